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

#include "skyvault/licensing.hpp"

#include <sodium.h>

#include "skyvault/error.hpp"

namespace skyvault {

using nlohmann::json;

namespace {

constexpr std::uint8_t kLicenseVersion = 1;
constexpr std::uint8_t kSecretBlockVersion = 1;

std::mutex purchase_mu;

void write_rules(ByteWriter& w, const KeyRules& r) {
  w.i64(r.not_before).i64(r.not_after);
  w.u8(r.max_uses ? 1 : 0).u32(r.max_uses.value_or(0));
  w.u8(r.offline_allowed ? 1 : 0);
}

KeyRules read_rules(ByteReader& r) {
  KeyRules k;
  k.not_before = r.i64();
  k.not_after = r.i64();
  auto has_max = r.u8();
  auto max = r.u32();
  if (has_max > 1) fail(ErrorCode::DecodeError, "bad max_uses flag");
  if (has_max == 1) k.max_uses = max;
  auto offline = r.u8();
  if (offline > 1) fail(ErrorCode::DecodeError, "bad offline flag");
  k.offline_allowed = offline == 1;
  return k;
}

void write_rights(ByteWriter& w, const Rights& r) {
  w.u8(static_cast<std::uint8_t>(r.allowed_actions.size()));
  for (auto a : r.allowed_actions) w.u8(static_cast<std::uint8_t>(a));
}

Rights read_rights(ByteReader& r) {
  Rights out;
  out.allowed_actions.clear();
  auto n = r.u8();
  for (std::uint8_t i = 0; i < n; ++i) {
    auto a = r.u8();
    if (a < 1 || a > 3) fail(ErrorCode::DecodeError, "unknown action");
    if (!out.allowed_actions.insert(static_cast<Action>(a)).second) {
      fail(ErrorCode::DecodeError, "duplicate action");
    }
  }
  return out;
}

json rights_to_json(const Rights& r) {
  json arr = json::array();
  for (auto a : r.allowed_actions) arr.push_back(to_string(a));
  return arr;
}

Rights rights_from_json(const json& j) {
  Rights r;
  r.allowed_actions.clear();
  for (const auto& a : j) r.allowed_actions.insert(parse_action(a.get<std::string>()));
  return r;
}

}  // namespace

std::string_view to_string(Action a) noexcept {
  switch (a) {
    case Action::Stream: return "stream";
    case Action::Download: return "download";
    case Action::Relicense: return "re-license";
  }
  return "unknown";
}

Action parse_action(std::string_view text) {
  if (text == "stream") return Action::Stream;
  if (text == "download") return Action::Download;
  if (text == "re-license") return Action::Relicense;
  fail(ErrorCode::InvalidArgument, "unknown action '" + std::string(text) + "'");
}

std::string_view to_string(DenyReason r) noexcept {
  switch (r) {
    case DenyReason::ActionForbidden: return "ActionForbidden";
    case DenyReason::NotYetValid: return "NotYetValid";
    case DenyReason::Expired: return "Expired";
    case DenyReason::UsesExhausted: return "UsesExhausted";
  }
  return "Unknown";
}

Bytes License::body_bytes() const {
  ByteWriter w;
  w.u8(kLicenseVersion).fixed(license_id.view()).str(consumer_id);
  w.fixed(consumer_public_key.view()).fixed(content_id.view());
  w.var(enveloped_content_key.serialize());
  write_rules(w, key_rules);
  write_rights(w, rights);
  w.fixed(consumer_fingerprint.view()).i64(issued_at);
  return std::move(w).bytes();
}

bool License::intact() const {
  return compute_hash() == license_hash &&
         consumer_fingerprint == skyvault::consumer_fingerprint(consumer_id, content_id);
}

Bytes License::serialize() const {
  return ByteWriter().fixed(body_bytes()).fixed(license_hash.view()).bytes();
}

License License::parse(ByteView data) {
  ByteReader r(data);
  if (r.u8() != kLicenseVersion) fail(ErrorCode::DecodeError, "unknown license version");
  License l;
  l.license_id = LicenseId(r.array<16>());
  l.consumer_id = r.str();
  l.consumer_public_key = PublicKey(r.array<32>());
  l.content_id = Digest(r.array<32>());
  l.enveloped_content_key = Envelope::parse(r.var());
  l.key_rules = read_rules(r);
  l.rights = read_rights(r);
  l.consumer_fingerprint = Digest(r.array<32>());
  l.issued_at = r.i64();
  l.license_hash = Digest(r.array<32>());
  r.expect_done();
  return l;
}

json to_json(const License& l) {
  json rules = {{"not_before", l.key_rules.not_before},
                {"not_after", l.key_rules.not_after},
                {"max_uses", l.key_rules.max_uses ? json(*l.key_rules.max_uses) : json(nullptr)},
                {"offline_allowed", l.key_rules.offline_allowed}};
  return {{"license_id", l.license_id.b64url()},
          {"consumer_id", l.consumer_id},
          {"consumer_public_key", l.consumer_public_key.b64url()},
          {"content_id", l.content_id.hex()},
          {"enveloped_content_key", envelope_to_json(l.enveloped_content_key)},
          {"key_rules", rules},
          {"rights", rights_to_json(l.rights)},
          {"consumer_fingerprint", l.consumer_fingerprint.hex()},
          {"issued_at", l.issued_at},
          {"license_hash", l.license_hash.hex()}};
}

Digest consumer_fingerprint(std::string_view consumer_id, const Digest& content_id) {
  return digest_concat({as_bytes(consumer_id), content_id.view()});
}

License issue_license(const Account& consumer, const Digest& content_id,
                      const SymKey& content_key, const KeyRules& rules, const Rights& rights,
                      UnixSeconds now) {
  if (rules.not_before > rules.not_after) {
    fail(ErrorCode::InvalidRules, "not_before is after not_after");
  }
  if (rights.allowed_actions.empty()) fail(ErrorCode::EmptyRights, "no actions granted");
  License l;
  l.license_id = random_fixed<LicenseId>();
  l.consumer_id = consumer.id;
  l.consumer_public_key = consumer.public_key;
  l.content_id = content_id;
  l.enveloped_content_key = seal(consumer.public_key, content_key.view());
  l.key_rules = rules;
  l.rights = rights;
  l.consumer_fingerprint = consumer_fingerprint(consumer.id, content_id);
  l.issued_at = now;
  l.license_hash = l.compute_hash();
  return l;
}

RightsDecision evaluate_rights(const License& license, Action action, UnixSeconds now,
                               std::uint64_t uses_so_far) {
  const auto& rules = license.key_rules;
  if (!license.rights.allowed_actions.contains(action)) return {DenyReason::ActionForbidden};
  if (now < rules.not_before) return {DenyReason::NotYetValid};
  if (now > rules.not_after) return {DenyReason::Expired};
  if (rules.max_uses && uses_so_far >= *rules.max_uses) return {DenyReason::UsesExhausted};
  return {};
}

RightsDecision UsageTracker::check_rights(const License& license, Action action,
                                          UnixSeconds now) {
  std::lock_guard lock(mu_);
  auto& used = uses_[license.license_id];
  auto decision = evaluate_rights(license, action, now, used);
  if (decision.allowed()) ++used;
  return decision;
}

std::uint64_t UsageTracker::uses(const LicenseId& id) const {
  std::lock_guard lock(mu_);
  auto it = uses_.find(id);
  return it == uses_.end() ? 0 : it->second;
}

void UsageTracker::set_uses(const LicenseId& id, std::uint64_t uses) {
  std::lock_guard lock(mu_);
  uses_[id] = uses;
}

SymKey redeem_license(const PrivateKey& consumer_private, const License& license,
                      Action action, UnixSeconds now, UsageTracker& tracker) {
  auto opened = open(consumer_private, license.enveloped_content_key);
  auto decision = tracker.check_rights(license, action, now);
  if (!decision.allowed()) {
    sodium_memzero(opened.data(), opened.size());
    throw RightsDeniedError(*decision.deny);
  }
  return SymKey::from(opened, ErrorCode::OpenFailed);
}

Bytes SecretBlock::body_bytes() const {
  ByteWriter w;
  w.u8(kSecretBlockVersion).fixed(prev_public_hash.view()).i64(time);
  w.fixed(auth_info.view()).str(provider_info);
  w.var(encrypted_content_info.serialize()).fixed(license_info.view());
  return std::move(w).bytes();
}

Bytes SecretBlock::serialize() const {
  return ByteWriter().fixed(block_hash.view()).fixed(body_bytes()).bytes();
}

SecretBlock SecretBlock::parse(ByteView data) {
  ByteReader r(data);
  SecretBlock b;
  b.block_hash = Digest(r.array<32>());
  if (r.u8() != kSecretBlockVersion) fail(ErrorCode::DecodeError, "unknown secret block version");
  b.prev_public_hash = Digest(r.array<32>());
  b.time = r.i64();
  b.auth_info = Digest(r.array<32>());
  b.provider_info = r.str();
  b.encrypted_content_info = Envelope::parse(r.var());
  b.license_info = Digest(r.array<32>());
  r.expect_done();
  return b;
}

Digest session_binding(const TokenValue& session_token, std::string_view consumer_id) {
  return digest_concat({session_token.view(), as_bytes(consumer_id)});
}

ContentInfo open_content_info(const PrivateKey& consumer_private, const SecretBlock& block) {
  auto plain = open(consumer_private, block.encrypted_content_info);
  ByteReader r(plain);
  ContentInfo info;
  info.title = r.str();
  info.skylink = r.str();
  r.expect_done();
  return info;
}

std::pair<SecretBlock, Envelope> build_secret_block(
    const License& license, const TokenValue& session_token, std::string_view provider_name,
    const Digest& chain_tip_hash, std::string_view content_title, const SkyLink& skylink,
    const PublicKey& consumer_public, UnixSeconds now) {
  if (!license.intact()) fail(ErrorCode::InvalidArgument, "license fails its integrity check");
  SecretBlock b;
  b.prev_public_hash = chain_tip_hash;
  b.time = now;
  b.auth_info = session_binding(session_token, license.consumer_id);
  b.provider_info = std::string(provider_name);
  auto info = ByteWriter().str(content_title).str(skylink.text()).bytes();
  b.encrypted_content_info = seal(consumer_public, info);
  b.license_info = license.license_hash;
  b.block_hash = b.compute_hash();
  auto sealed = seal(consumer_public, b.serialize());
  return {std::move(b), std::move(sealed)};
}

json to_json(const Offer& o) {
  return {{"content_id", o.content_id.hex()},
          {"title", o.title},
          {"rights", rights_to_json(o.rights)},
          {"max_uses", o.max_uses ? json(*o.max_uses) : json(nullptr)},
          {"validity_seconds", o.validity_seconds},
          {"offline_allowed", o.offline_allowed}};
}

Offer offer_from_json(const json& j) {
  try {
    Offer o;
    o.content_id = Digest::from_hex(j.at("content_id").get<std::string>());
    o.title = j.at("title").get<std::string>();
    o.rights = rights_from_json(j.at("rights"));
    if (!j.at("max_uses").is_null()) o.max_uses = j.at("max_uses").get<std::uint32_t>();
    o.validity_seconds = j.at("validity_seconds").get<std::int64_t>();
    o.offline_allowed = j.at("offline_allowed").get<bool>();
    return o;
  } catch (const json::exception& e) {
    fail(ErrorCode::DecodeError, std::string("bad offer record: ") + e.what());
  }
}

Digest content_commitment(const Digest& content_id, const LicenseId& license_id) {
  return digest_concat({content_id.view(), license_id.view()});
}

PurchaseReceipt execute_purchase(const TokenValue& session_token, const Digest& content_id,
                                 const Provider& provider, const Account& consumer,
                                 const IdentityService& identity,
                                 const StorageNetwork& network, Chain& chain,
                                 UnixSeconds now) {
  std::string session_owner;
  try {
    session_owner = identity.validate_session(session_token);
  } catch (const Error& e) {
    fail(ErrorCode::NotAuthenticated, "session rejected: " + std::string(e.what()));
  }
  if (session_owner != consumer.id) {
    fail(ErrorCode::NotAuthenticated, "session belongs to a different account");
  }

  SkyLink link(content_id);
  auto manifest = network.find_manifest(link);
  auto offer = provider.catalog.find(content_id);
  if (!manifest || offer == provider.catalog.end()) {
    fail(ErrorCode::UnknownContent, "no published content " + link.text());
  }
  SymKey content_key;
  try {
    content_key = network.open_file_key(*manifest, provider.keys.private_key);
  } catch (const Error&) {
    fail(ErrorCode::UnknownContent, "provider does not hold the key for " + link.text());
  }

  KeyRules rules{now, now + offer->second.validity_seconds, offer->second.max_uses,
                 offer->second.offline_allowed};
  auto license = issue_license(consumer, content_id, content_key, rules, offer->second.rights, now);
  sodium_memzero(content_key.data(), content_key.size());

  std::lock_guard lock(purchase_mu);
  auto [block, sealed] =
      build_secret_block(license, session_token, provider.name, chain.tip_hash(),
                         offer->second.title, link, consumer.public_key, now);
  auto tx = make_transaction(provider.keys, consumer.public_key,
                             content_commitment(content_id, license.license_id),
                             digest(block.serialize()), now);
  try {
    chain.submit_transaction(tx, provider.keys.public_key);
  } catch (const Error& e) {
    fail(ErrorCode::LedgerRejected, "ledger rejected purchase: " + std::string(e.what()));
  }
  return {std::move(license), std::move(sealed), tx.tx_id};
}

}  // namespace skyvault
