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

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"
#include "skyvault/clock.hpp"
#include "skyvault/crypto.hpp"

namespace skyvault {

using ChallengeId = FixedBytes<16, struct ChallengeIdTag>;
using TokenValue = FixedBytes<32, struct TokenValueTag>;

struct Account {
  std::string id;
  Digest verifier;
  PublicKey public_key;
  UnixSeconds created_at = 0;

  friend bool operator==(const Account&, const Account&) = default;
};

// The server-side challenge record. `nonce` never leaves the service; the
// client only ever sees the public view produced by to_json().
struct Challenge {
  ChallengeId challenge_id;
  std::string account_id;
  Bytes nonce;
  Envelope sealed_nonce;
  UnixSeconds issued_at = 0;
  std::int64_t ttl_seconds = 0;
};

struct SessionToken {
  TokenValue token;
  std::string account_id;
  UnixSeconds expires_at = 0;
};

struct IdentityConfig {
  std::int64_t challenge_ttl = 120;
  std::int64_t session_ttl = 3600;
  std::size_t min_password_length = 8;
};

nlohmann::json to_json(const Account& account);
Account account_from_json(const nlohmann::json& j);
// Public view: everything except the server-held nonce.
nlohmann::json to_json(const Challenge& challenge);
Challenge challenge_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SessionToken& session);
SessionToken session_from_json(const nlohmann::json& j);

nlohmann::json envelope_to_json(const Envelope& env);
Envelope envelope_from_json(const nlohmann::json& j);

// response = SHA-256(nonce || verifier).
Digest auth_response(ByteView nonce, const Digest& verifier);

// Client side of the login handshake: opens the sealed nonce with the
// account's private key and binds it to the password verifier. Needs both.
Digest solve_challenge(const Challenge& challenge, const PrivateKey& private_key,
                       std::string_view id, std::string_view password);

// Off-chain authentication authority. All state sits behind one mutex, so
// concurrent callers are applied one at a time.
//
// With a persistence directory, the constructor loads any accounts and
// sessions already there and every change is written through
// (accounts/<hex H(id)>.json, sessions/<hex H(token)>.json). Outstanding
// challenges are memory-only.
class IdentityService {
 public:
  IdentityService(IdentityConfig config, Clock clock,
                  std::optional<std::filesystem::path> persist_dir = std::nullopt);

  Account register_account(std::string_view id, std::string_view password,
                           const PublicKey& public_key);
  Challenge begin_auth(std::string_view id);
  SessionToken complete_auth(const ChallengeId& challenge_id, const Digest& response);
  std::string validate_session(const TokenValue& token) const;

  std::optional<Account> find_account(std::string_view id) const;
  std::size_t account_count() const;

 private:
  struct SessionRecord {
    std::string account_id;
    UnixSeconds expires_at = 0;
  };

  void persist_account(const Account& account) const;
  void persist_session(const Digest& token_hash, const SessionRecord& rec) const;

  IdentityConfig config_;
  Clock clock_;
  std::optional<std::filesystem::path> dir_;

  mutable std::mutex mu_;
  std::map<std::string, Account, std::less<>> accounts_;
  std::map<ChallengeId, Challenge> challenges_;
  std::map<Digest, SessionRecord> sessions_;
};

}  // namespace skyvault
