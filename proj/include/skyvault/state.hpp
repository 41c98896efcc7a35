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
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "skyvault/clock.hpp"
#include "skyvault/identity.hpp"
#include "skyvault/ledger.hpp"
#include "skyvault/licensing.hpp"
#include "skyvault/storage.hpp"

namespace skyvault {

struct Config {
  std::uint64_t replication_factor = 3;
  std::uint64_t chunk_size = 262144;
  std::uint64_t pow_difficulty = 8;
  std::uint64_t challenge_ttl = 120;
  std::uint64_t session_ttl = 3600;
  std::uint64_t host_count = 5;
  std::uint64_t segment_bytes = 1048576;

  // Throws InvalidConfig.
  void validate() const;
  // Line-based key=value; '#' starts a comment, unknown keys are rejected.
  static Config parse(std::string_view text);
  std::string render() const;

  friend bool operator==(const Config&, const Config&) = default;
};

struct Catalog {
  std::string provider;
  std::map<Digest, Offer> offers;
};

// On-disk home of one deployment:
//
//   config                      key=value settings
//   accounts/ sessions/         identity store (JSON)
//   hosts/ manifests/           storage network
//   chain.log                   append-only block records
//   catalog/<hex H(name)>.json  provider offers
//   licenses/<hex id>.license   canonical license (+ .json, + .uses)
//   secrets/<hex tx_id>.secret  sealed secret blocks
//   wallet/<hex H(id)>.key      client keypairs, .session for login tokens
//
// Each component is loaded lazily so read-only commands stay cheap.
class StateDirectory {
 public:
  // Creates the layout (and hosts) if absent; an existing directory is
  // opened as-is.
  static StateDirectory init(const std::filesystem::path& root, const Config& config,
                             Clock clock = system_clock());
  // Throws IoError unless `root` was initialised.
  static StateDirectory open(const std::filesystem::path& root, Clock clock = system_clock());

  const std::filesystem::path& root() const noexcept { return root_; }
  const Config& config() const noexcept { return config_; }
  UnixSeconds now() const { return clock_(); }
  const Clock& clock() const noexcept { return clock_; }

  IdentityService& identity();
  StorageNetwork& network();
  void save_network();
  Chain& chain();
  // Mines the pending transactions and appends the block to chain.log.
  Block mine_and_append();

  void save_keypair(std::string_view id, const KeyPair& keys);
  KeyPair load_keypair(std::string_view id) const;
  bool has_keypair(std::string_view id) const;
  void save_session(std::string_view id, const SessionToken& session);
  std::optional<SessionToken> load_session(std::string_view id) const;

  void save_offer(std::string_view provider, const Offer& offer);
  Catalog load_catalog(std::string_view provider) const;
  // The provider publishing `content_id`, if any.
  std::optional<Catalog> find_publisher(const Digest& content_id) const;

  void save_license(const License& license);
  License load_license(const LicenseId& id) const;
  std::vector<License> licenses() const;
  std::uint64_t load_uses(const LicenseId& id) const;
  void save_uses(const LicenseId& id, std::uint64_t uses);

  void save_secret(const Digest& tx_id, const Envelope& sealed);
  Envelope load_secret(const Digest& tx_id) const;

 private:
  StateDirectory(std::filesystem::path root, Config config, Clock clock);

  std::filesystem::path root_;
  Config config_;
  Clock clock_;
  std::unique_ptr<IdentityService> identity_;
  std::unique_ptr<StorageNetwork> network_;
  std::unique_ptr<Chain> chain_;
};

}  // namespace skyvault
