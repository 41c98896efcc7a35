// Copyright 2026 The SkyVault Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <memory>
#include <string>

#include "skyvault/error.hpp"
#include "skyvault/identity.hpp"

namespace skyvault {

// HTTP status for a failed identity request: 400 malformed, 401 failed
// authentication, 404 unknown id/challenge, 409 duplicate id.
int http_status_for(ErrorCode code) noexcept;

// JSON-over-HTTP front end for IdentityService:
//
//   POST /register        {"id","password","public_key"}  -> Account
//   POST /auth/begin      {"id"}                          -> Challenge (public view)
//   POST /auth/complete   {"challenge_id","response"}     -> SessionToken
//   GET  /session/{token}                                 -> {"account_id"}
//
// Octets travel as base64url without padding, digests as lowercase hex.
// Failures return {"error": <code>, "message": ...}.
class IdentityServer {
 public:
  explicit IdentityServer(IdentityService& service);
  ~IdentityServer();
  IdentityServer(const IdentityServer&) = delete;
  IdentityServer& operator=(const IdentityServer&) = delete;

  // Returns false if the address cannot be bound.
  bool bind(const std::string& host, int port);
  // Binds an ephemeral port and returns it, or -1.
  int bind_any_port(const std::string& host);
  // Blocks serving requests until stop() is called.
  bool listen();
  void stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace skyvault
