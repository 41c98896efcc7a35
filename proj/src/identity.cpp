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

#include "skyvault/identity.hpp"

#include <sodium.h>

#include "skyvault/error.hpp"

namespace skyvault {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::size_t utf8_length(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

template <typename T>
T field(const json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) {
    fail(ErrorCode::DecodeError, std::string("missing field '") + name + "'");
  }
  try {
    return j.at(name).get<T>();
  } catch (const json::exception&) {
    fail(ErrorCode::DecodeError, std::string("bad type for field '") + name + "'");
  }
}

}  // namespace

json envelope_to_json(const Envelope& env) {
  return {{"ephemeral_public", b64url_encode(env.ephemeral_public)},
          {"nonce", b64url_encode(env.nonce)},
          {"ciphertext", b64url_encode(env.ciphertext)}};
}

Envelope envelope_from_json(const json& j) {
  return {b64url_decode(field<std::string>(j, "ephemeral_public")),
          b64url_decode(field<std::string>(j, "nonce")),
          b64url_decode(field<std::string>(j, "ciphertext"))};
}

json to_json(const Account& a) {
  return {{"id", a.id},
          {"verifier", a.verifier.hex()},
          {"public_key", a.public_key.b64url()},
          {"created_at", a.created_at}};
}

Account account_from_json(const json& j) {
  Account a;
  a.id = field<std::string>(j, "id");
  a.verifier = Digest::from_hex(field<std::string>(j, "verifier"));
  a.public_key = PublicKey::from_b64url(field<std::string>(j, "public_key"));
  a.created_at = field<std::int64_t>(j, "created_at");
  return a;
}

json to_json(const Challenge& c) {
  return {{"challenge_id", c.challenge_id.b64url()},
          {"account_id", c.account_id},
          {"sealed_nonce", envelope_to_json(c.sealed_nonce)},
          {"issued_at", c.issued_at},
          {"ttl_seconds", c.ttl_seconds}};
}

Challenge challenge_from_json(const json& j) {
  Challenge c;
  c.challenge_id = ChallengeId::from_b64url(field<std::string>(j, "challenge_id"));
  c.account_id = field<std::string>(j, "account_id");
  c.sealed_nonce = envelope_from_json(field<json>(j, "sealed_nonce"));
  c.issued_at = field<std::int64_t>(j, "issued_at");
  c.ttl_seconds = field<std::int64_t>(j, "ttl_seconds");
  return c;
}

json to_json(const SessionToken& s) {
  return {{"token", s.token.b64url()},
          {"account_id", s.account_id},
          {"expires_at", s.expires_at}};
}

SessionToken session_from_json(const json& j) {
  SessionToken s;
  s.token = TokenValue::from_b64url(field<std::string>(j, "token"));
  s.account_id = field<std::string>(j, "account_id");
  s.expires_at = field<std::int64_t>(j, "expires_at");
  return s;
}

Digest auth_response(ByteView nonce, const Digest& verifier) {
  return digest_concat({nonce, verifier.view()});
}

Digest solve_challenge(const Challenge& challenge, const PrivateKey& private_key,
                       std::string_view id, std::string_view password) {
  auto nonce = open(private_key, challenge.sealed_nonce);
  return auth_response(nonce, derive_credential(id, password).verifier);
}

IdentityService::IdentityService(IdentityConfig config, Clock clock,
                                 std::optional<fs::path> persist_dir)
    : config_(config), clock_(std::move(clock)), dir_(std::move(persist_dir)) {
  if (config_.challenge_ttl <= 0 || config_.session_ttl <= 0) {
    fail(ErrorCode::InvalidConfig, "identity TTLs must be positive");
  }
  if (!dir_) return;
  fs::create_directories(*dir_ / "accounts");
  fs::create_directories(*dir_ / "sessions");
  for (const auto& entry : fs::directory_iterator(*dir_ / "accounts")) {
    if (entry.path().extension() != ".json") continue;
    auto a = account_from_json(json::parse(to_string(read_file(entry.path()))));
    accounts_.emplace(a.id, std::move(a));
  }
  for (const auto& entry : fs::directory_iterator(*dir_ / "sessions")) {
    if (entry.path().extension() != ".json") continue;
    auto j = json::parse(to_string(read_file(entry.path())));
    sessions_[Digest::from_hex(field<std::string>(j, "token_hash"))] =
        SessionRecord{field<std::string>(j, "account_id"),
                      field<std::int64_t>(j, "expires_at")};
  }
}

void IdentityService::persist_account(const Account& a) const {
  if (!dir_) return;
  write_file(*dir_ / "accounts" / (digest(a.id).hex() + ".json"), to_json(a).dump(2));
}

void IdentityService::persist_session(const Digest& token_hash,
                                      const SessionRecord& rec) const {
  if (!dir_) return;
  json j = {{"token_hash", token_hash.hex()},
            {"account_id", rec.account_id},
            {"expires_at", rec.expires_at}};
  write_file(*dir_ / "sessions" / (token_hash.hex() + ".json"), j.dump(2));
}

Account IdentityService::register_account(std::string_view id, std::string_view password,
                                          const PublicKey& public_key) {
  if (utf8_length(password) < config_.min_password_length) {
    fail(ErrorCode::WeakPassword, "password must be at least " +
                                      std::to_string(config_.min_password_length) +
                                      " characters");
  }
  auto cred = derive_credential(id, password);

  std::lock_guard lock(mu_);
  if (accounts_.contains(id)) {
    fail(ErrorCode::DuplicateId, "account '" + std::string(id) + "' already exists");
  }
  Account account{cred.id, cred.verifier, public_key, clock_()};
  persist_account(account);
  accounts_.emplace(account.id, account);
  return account;
}

Challenge IdentityService::begin_auth(std::string_view id) {
  std::lock_guard lock(mu_);
  auto it = accounts_.find(id);
  if (it == accounts_.end()) {
    fail(ErrorCode::UnknownId, "no account '" + std::string(id) + "'");
  }
  Challenge c;
  c.challenge_id = random_fixed<ChallengeId>();
  c.account_id = it->second.id;
  c.nonce = random_bytes(32);
  c.sealed_nonce = seal(it->second.public_key, c.nonce);
  c.issued_at = clock_();
  c.ttl_seconds = config_.challenge_ttl;
  challenges_[c.challenge_id] = c;
  return c;
}

SessionToken IdentityService::complete_auth(const ChallengeId& challenge_id,
                                            const Digest& response) {
  std::lock_guard lock(mu_);
  auto it = challenges_.find(challenge_id);
  if (it == challenges_.end()) {
    fail(ErrorCode::UnknownChallenge, "challenge is unknown or already used");
  }
  // Single use: consumed whatever the outcome.
  Challenge c = std::move(it->second);
  challenges_.erase(it);

  auto now = clock_();
  if (now >= c.issued_at + c.ttl_seconds) {
    fail(ErrorCode::Expired, "challenge expired");
  }
  auto acct = accounts_.find(c.account_id);
  if (acct == accounts_.end()) fail(ErrorCode::UnknownId, "account vanished");
  auto expected = auth_response(c.nonce, acct->second.verifier);
  if (sodium_memcmp(expected.data(), response.data(), Digest::kSize) != 0) {
    fail(ErrorCode::ResponseMismatch, "challenge response does not match");
  }

  SessionToken s{random_fixed<TokenValue>(), c.account_id, now + config_.session_ttl};
  SessionRecord rec{s.account_id, s.expires_at};
  auto token_hash = digest(s.token.view());
  persist_session(token_hash, rec);
  sessions_[token_hash] = rec;
  return s;
}

std::string IdentityService::validate_session(const TokenValue& token) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(digest(token.view()));
  if (it == sessions_.end()) fail(ErrorCode::InvalidToken, "unknown session token");
  if (clock_() >= it->second.expires_at) fail(ErrorCode::Expired, "session expired");
  return it->second.account_id;
}

std::optional<Account> IdentityService::find_account(std::string_view id) const {
  std::lock_guard lock(mu_);
  auto it = accounts_.find(id);
  if (it == accounts_.end()) return std::nullopt;
  return it->second;
}

std::size_t IdentityService::account_count() const {
  std::lock_guard lock(mu_);
  return accounts_.size();
}

}  // namespace skyvault
