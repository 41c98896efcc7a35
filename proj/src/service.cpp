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

#include "skyvault/service.hpp"

#include "httplib.h"
#include "json.hpp"

namespace skyvault {

using nlohmann::json;

int http_status_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DuplicateId:
      return 409;
    case ErrorCode::UnknownId:
    case ErrorCode::UnknownChallenge:
      return 404;
    case ErrorCode::ResponseMismatch:
    case ErrorCode::Expired:
    case ErrorCode::InvalidToken:
      return 401;
    default:
      return 400;
  }
}

struct IdentityServer::Impl {
  IdentityService& service;
  httplib::Server server;

  explicit Impl(IdentityService& s) : service(s) { routes(); }

  static void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  static void send_error(httplib::Response& res, ErrorCode code, const std::string& message) {
    send_json(res, http_status_for(code),
              {{"error", std::string(to_string(code))}, {"message", message}});
  }

  // Parses the body, runs `fn` and maps library errors onto HTTP statuses.
  template <typename Fn>
  static void handle(const httplib::Request& req, httplib::Response& res, Fn&& fn) {
    try {
      json body = req.body.empty() ? json::object() : json::parse(req.body);
      if (!body.is_object()) fail(ErrorCode::DecodeError, "request body must be a JSON object");
      send_json(res, 200, fn(body));
    } catch (const json::exception& e) {
      send_error(res, ErrorCode::DecodeError, e.what());
    } catch (const Error& e) {
      send_error(res, e.code(), e.what());
    }
  }

  static std::string str_field(const json& body, const char* name) {
    if (!body.contains(name) || !body.at(name).is_string()) {
      fail(ErrorCode::DecodeError, std::string("field '") + name + "' must be a string");
    }
    return body.at(name).get<std::string>();
  }

  void routes() {
    server.Post("/register", [this](const httplib::Request& req, httplib::Response& res) {
      handle(req, res, [this](const json& body) {
        auto pk = PublicKey::from_b64url(str_field(body, "public_key"));
        return to_json(service.register_account(str_field(body, "id"),
                                                str_field(body, "password"), pk));
      });
    });
    server.Post("/auth/begin", [this](const httplib::Request& req, httplib::Response& res) {
      handle(req, res, [this](const json& body) {
        return to_json(service.begin_auth(str_field(body, "id")));
      });
    });
    server.Post("/auth/complete", [this](const httplib::Request& req, httplib::Response& res) {
      handle(req, res, [this](const json& body) {
        auto cid = ChallengeId::from_b64url(str_field(body, "challenge_id"));
        auto response = Digest::from_hex(str_field(body, "response"));
        return to_json(service.complete_auth(cid, response));
      });
    });
    server.Get(R"(/session/([A-Za-z0-9_-]+))",
               [this](const httplib::Request& req, httplib::Response& res) {
                 handle(req, res, [&](const json&) {
                   auto token = TokenValue::from_b64url(req.matches[1].str());
                   return json{{"account_id", service.validate_session(token)}};
                 });
               });
  }
};

IdentityServer::IdentityServer(IdentityService& service)
    : impl_(std::make_unique<Impl>(service)) {}

IdentityServer::~IdentityServer() { stop(); }

bool IdentityServer::bind(const std::string& host, int port) {
  return impl_->server.bind_to_port(host, port);
}

int IdentityServer::bind_any_port(const std::string& host) {
  return impl_->server.bind_to_any_port(host);
}

bool IdentityServer::listen() { return impl_->server.listen_after_bind(); }

void IdentityServer::stop() {
  if (impl_) impl_->server.stop();
}

bool IdentityServer::running() const { return impl_->server.is_running(); }

}  // namespace skyvault
