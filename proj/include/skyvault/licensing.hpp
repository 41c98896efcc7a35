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

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "json.hpp"
#include "skyvault/clock.hpp"
#include "skyvault/crypto.hpp"
#include "skyvault/identity.hpp"
#include "skyvault/ledger.hpp"
#include "skyvault/storage.hpp"

namespace skyvault {

using LicenseId = FixedBytes<16, struct LicenseIdTag>;

enum class Action : std::uint8_t { Stream = 1, Download = 2, Relicense = 3 };

std::string_view to_string(Action a) noexcept;
// "stream" | "download" | "re-license"; throws InvalidArgument.
Action parse_action(std::string_view text);

struct KeyRules {
  UnixSeconds not_before = 0;
  UnixSeconds not_after = 0;
  std::optional<std::uint32_t> max_uses;  // nullopt = unlimited
  bool offline_allowed = false;

  friend bool operator==(const KeyRules&, const KeyRules&) = default;
};

// Re-licensing is never granted unless listed explicitly.
struct Rights {
  std::set<Action> allowed_actions{Action::Stream};

  friend bool operator==(const Rights&, const Rights&) = default;
};

struct License {
  LicenseId license_id;
  std::string consumer_id;
  PublicKey consumer_public_key;
  Digest content_id;
  Envelope enveloped_content_key;
  KeyRules key_rules;
  Rights rights;
  Digest consumer_fingerprint;
  UnixSeconds issued_at = 0;
  Digest license_hash;

  // Canonical encoding of every field before license_hash, in declared order.
  Bytes body_bytes() const;
  Digest compute_hash() const { return digest(body_bytes()); }
  // license_hash and consumer_fingerprint both recompute.
  bool intact() const;

  // body | license_hash.
  Bytes serialize() const;
  static License parse(ByteView data);

  friend bool operator==(const License&, const License&) = default;
};

nlohmann::json to_json(const License& license);

// SHA-256(utf8(consumer_id) || content_id). Lets a leaked
// (consumer, content) pair be traced back to the license that carries it.
Digest consumer_fingerprint(std::string_view consumer_id, const Digest& content_id);

// Errors: InvalidRules, EmptyRights.
License issue_license(const Account& consumer, const Digest& content_id,
                      const SymKey& content_key, const KeyRules& rules, const Rights& rights,
                      UnixSeconds now);

enum class DenyReason { ActionForbidden, NotYetValid, Expired, UsesExhausted };
std::string_view to_string(DenyReason r) noexcept;

struct RightsDecision {
  std::optional<DenyReason> deny;

  bool allowed() const noexcept { return !deny.has_value(); }
};

// Pure rule evaluation given how many uses were already granted. When more
// than one rule fails the reason reported follows the enum order above.
RightsDecision evaluate_rights(const License& license, Action action, UnixSeconds now,
                               std::uint64_t uses_so_far);

// Consumer-side use counters, one per license. Calls on one tracker are
// serialised.
class UsageTracker {
 public:
  // Evaluates and, on allow, counts the use.
  RightsDecision check_rights(const License& license, Action action, UnixSeconds now);
  std::uint64_t uses(const LicenseId& id) const;
  void set_uses(const LicenseId& id, std::uint64_t uses);

 private:
  mutable std::mutex mu_;
  std::map<LicenseId, std::uint64_t> uses_;
};

class RightsDeniedError : public Error {
 public:
  explicit RightsDeniedError(DenyReason reason)
      : Error(ErrorCode::RightsDenied, "rights denied: " + std::string(to_string(reason))),
        reason_(reason) {}

  DenyReason reason() const noexcept { return reason_; }

 private:
  DenyReason reason_;
};

// Releases the content key only after the rules allow `action`; the use is
// counted only when the key is actually released. Errors: RightsDenied,
// OpenFailed.
SymKey redeem_license(const PrivateKey& consumer_private, const License& license,
                      Action action, UnixSeconds now, UsageTracker& tracker);

struct SecretBlock {
  Digest block_hash;
  Digest prev_public_hash;
  UnixSeconds time = 0;
  Digest auth_info;
  std::string provider_info;
  Envelope encrypted_content_info;
  Digest license_info;

  Bytes body_bytes() const;
  Digest compute_hash() const { return digest(body_bytes()); }
  // block_hash | body. The on-chain commitment is SHA-256 of these bytes.
  Bytes serialize() const;
  static SecretBlock parse(ByteView data);

  friend bool operator==(const SecretBlock&, const SecretBlock&) = default;
};

// auth_info = SHA-256(session token || consumer_id).
Digest session_binding(const TokenValue& session_token, std::string_view consumer_id);

struct ContentInfo {
  std::string title;
  std::string skylink;
};
ContentInfo open_content_info(const PrivateKey& consumer_private, const SecretBlock& block);

// Builds the consumer-only purchase record and seals it to the consumer.
// Neither the plaintext block nor the token is retained. Throws
// InvalidArgument if the license fails its integrity check.
std::pair<SecretBlock, Envelope> build_secret_block(
    const License& license, const TokenValue& session_token, std::string_view provider_name,
    const Digest& chain_tip_hash, std::string_view content_title, const SkyLink& skylink,
    const PublicKey& consumer_public, UnixSeconds now);

// Terms under which a provider sells one content item.
struct Offer {
  Digest content_id;
  std::string title;
  Rights rights;
  std::optional<std::uint32_t> max_uses;
  std::int64_t validity_seconds = 30 * 24 * 3600;
  bool offline_allowed = false;
};

nlohmann::json to_json(const Offer& offer);
Offer offer_from_json(const nlohmann::json& j);

struct Provider {
  std::string name;
  KeyPair keys;
  std::map<Digest, Offer> catalog;
};

// content_commitment = SHA-256(content_id || license_id): binds the purchase
// to the item without publishing which item it was.
Digest content_commitment(const Digest& content_id, const LicenseId& license_id);

struct PurchaseReceipt {
  License license;
  Envelope sealed_secret_block;
  Digest tx_id;
};

// Validates the session, issues the license, builds the secret block on the
// current chain tip and submits the signed commitment transaction. Nothing is
// persisted unless the ledger accepts. Errors: NotAuthenticated,
// UnknownContent, LedgerRejected.
PurchaseReceipt execute_purchase(const TokenValue& session_token, const Digest& content_id,
                                 const Provider& provider, const Account& consumer,
                                 const IdentityService& identity,
                                 const StorageNetwork& network, Chain& chain,
                                 UnixSeconds now);

}  // namespace skyvault
