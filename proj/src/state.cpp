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

#include "skyvault/state.hpp"

#include <charconv>
#include <sstream>

#include "skyvault/error.hpp"

namespace skyvault {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ConfigField {
  const char* name;
  std::uint64_t Config::*member;
};

constexpr ConfigField kFields[] = {
    {"replication_factor", &Config::replication_factor},
    {"chunk_size", &Config::chunk_size},
    {"pow_difficulty", &Config::pow_difficulty},
    {"challenge_ttl", &Config::challenge_ttl},
    {"session_ttl", &Config::session_ttl},
    {"host_count", &Config::host_count},
    {"segment_bytes", &Config::segment_bytes},
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::string id_file(std::string_view id) { return digest(id).hex(); }

}  // namespace

void Config::validate() const {
  for (const auto& f : kFields) {
    if (this->*f.member == 0) fail(ErrorCode::InvalidConfig, std::string(f.name) + " must be positive");
  }
  if (replication_factor > host_count) {
    fail(ErrorCode::InvalidConfig, "replication_factor exceeds host_count");
  }
  if (pow_difficulty > 64) fail(ErrorCode::InvalidConfig, "pow_difficulty above 64 bits");
}

Config Config::parse(std::string_view text) {
  Config c;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      fail(ErrorCode::InvalidConfig, "config line " + std::to_string(lineno) + " lacks '='");
    }
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    const ConfigField* field = nullptr;
    for (const auto& f : kFields) {
      if (key == f.name) field = &f;
    }
    if (field == nullptr) fail(ErrorCode::InvalidConfig, "unknown config key '" + std::string(key) + "'");
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || p != value.data() + value.size()) {
      fail(ErrorCode::InvalidConfig, "config key '" + std::string(key) + "' needs an integer");
    }
    c.*(field->member) = v;
  }
  c.validate();
  return c;
}

std::string Config::render() const {
  std::string out;
  for (const auto& f : kFields) out += std::string(f.name) + "=" + std::to_string(this->*f.member) + "\n";
  return out;
}

StateDirectory::StateDirectory(fs::path root, Config config, Clock clock)
    : root_(std::move(root)), config_(config), clock_(std::move(clock)) {}

StateDirectory StateDirectory::init(const fs::path& root, const Config& config, Clock clock) {
  if (fs::exists(root / "config")) return open(root, std::move(clock));
  config.validate();
  for (const char* sub : {"accounts", "sessions", "hosts", "manifests", "catalog", "licenses",
                          "secrets", "wallet"}) {
    fs::create_directories(root / sub);
  }
  StorageNetwork fresh(config.host_count, config.replication_factor);
  fresh.save(root);
  write_file(root / "config", config.render());
  return StateDirectory(root, config, std::move(clock));
}

StateDirectory StateDirectory::open(const fs::path& root, Clock clock) {
  if (!fs::exists(root / "config")) {
    fail(ErrorCode::IoError, "no state directory at " + root.string() + " (run init)");
  }
  auto config = Config::parse(to_string(read_file(root / "config")));
  return StateDirectory(root, config, std::move(clock));
}

IdentityService& StateDirectory::identity() {
  if (!identity_) {
    IdentityConfig ic{static_cast<std::int64_t>(config_.challenge_ttl),
                      static_cast<std::int64_t>(config_.session_ttl), 8};
    identity_ = std::make_unique<IdentityService>(ic, clock_, root_);
  }
  return *identity_;
}

StorageNetwork& StateDirectory::network() {
  if (!network_) network_ = StorageNetwork::load(root_, config_.replication_factor);
  return *network_;
}

void StateDirectory::save_network() {
  if (network_) network_->save(root_);
}

Chain& StateDirectory::chain() {
  if (!chain_) {
    chain_ = Chain::load(root_ / "chain.log", clock_,
                         static_cast<std::uint32_t>(config_.pow_difficulty));
  }
  return *chain_;
}

Block StateDirectory::mine_and_append() {
  auto block = chain().mine_block();
  Chain::append_block(root_ / "chain.log", block, chain().difficulty());
  return block;
}

void StateDirectory::save_keypair(std::string_view id, const KeyPair& keys) {
  json j = {{"id", id},
            {"public_key", keys.public_key.b64url()},
            {"private_key", keys.private_key.b64url()}};
  write_file(root_ / "wallet" / (id_file(id) + ".key"), j.dump(2));
}

KeyPair StateDirectory::load_keypair(std::string_view id) const {
  auto path = root_ / "wallet" / (id_file(id) + ".key");
  if (!fs::exists(path)) fail(ErrorCode::UnknownId, "no local keypair for '" + std::string(id) + "'");
  auto j = json::parse(to_string(read_file(path)));
  return {PublicKey::from_b64url(j.at("public_key").get<std::string>()),
          PrivateKey::from_b64url(j.at("private_key").get<std::string>())};
}

bool StateDirectory::has_keypair(std::string_view id) const {
  return fs::exists(root_ / "wallet" / (id_file(id) + ".key"));
}

void StateDirectory::save_session(std::string_view id, const SessionToken& session) {
  write_file(root_ / "wallet" / (id_file(id) + ".session"), to_json(session).dump(2));
}

std::optional<SessionToken> StateDirectory::load_session(std::string_view id) const {
  auto path = root_ / "wallet" / (id_file(id) + ".session");
  if (!fs::exists(path)) return std::nullopt;
  return session_from_json(json::parse(to_string(read_file(path))));
}

void StateDirectory::save_offer(std::string_view provider, const Offer& offer) {
  auto catalog = load_catalog(provider);
  catalog.offers[offer.content_id] = offer;
  json offers = json::array();
  for (const auto& [id, o] : catalog.offers) offers.push_back(to_json(o));
  json j = {{"provider", provider}, {"offers", offers}};
  write_file(root_ / "catalog" / (id_file(provider) + ".json"), j.dump(2));
}

Catalog StateDirectory::load_catalog(std::string_view provider) const {
  Catalog c{std::string(provider), {}};
  auto path = root_ / "catalog" / (id_file(provider) + ".json");
  if (!fs::exists(path)) return c;
  auto j = json::parse(to_string(read_file(path)));
  for (const auto& o : j.at("offers")) {
    auto offer = offer_from_json(o);
    c.offers.emplace(offer.content_id, std::move(offer));
  }
  return c;
}

std::optional<Catalog> StateDirectory::find_publisher(const Digest& content_id) const {
  if (!fs::exists(root_ / "catalog")) return std::nullopt;
  for (const auto& e : fs::directory_iterator(root_ / "catalog")) {
    if (e.path().extension() != ".json") continue;
    auto j = json::parse(to_string(read_file(e.path())));
    auto c = load_catalog(j.at("provider").get<std::string>());
    if (c.offers.contains(content_id)) return c;
  }
  return std::nullopt;
}

void StateDirectory::save_license(const License& license) {
  auto base = root_ / "licenses" / license.license_id.hex();
  write_file(fs::path(base).concat(".license"), license.serialize());
  write_file(fs::path(base).concat(".json"), to_json(license).dump(2));
}

License StateDirectory::load_license(const LicenseId& id) const {
  auto path = root_ / "licenses" / (id.hex() + ".license");
  if (!fs::exists(path)) fail(ErrorCode::InvalidArgument, "no license " + id.hex());
  return License::parse(read_file(path));
}

std::vector<License> StateDirectory::licenses() const {
  std::vector<License> out;
  if (!fs::exists(root_ / "licenses")) return out;
  for (const auto& e : fs::directory_iterator(root_ / "licenses")) {
    if (e.path().extension() == ".license") out.push_back(License::parse(read_file(e.path())));
  }
  return out;
}

std::uint64_t StateDirectory::load_uses(const LicenseId& id) const {
  auto path = root_ / "licenses" / (id.hex() + ".uses");
  if (!fs::exists(path)) return 0;
  auto text = to_string(read_file(path));
  std::uint64_t v = 0;
  std::from_chars(text.data(), text.data() + text.size(), v);
  return v;
}

void StateDirectory::save_uses(const LicenseId& id, std::uint64_t uses) {
  write_file(root_ / "licenses" / (id.hex() + ".uses"), std::to_string(uses) + "\n");
}

void StateDirectory::save_secret(const Digest& tx_id, const Envelope& sealed) {
  write_file(root_ / "secrets" / (tx_id.hex() + ".secret"), sealed.serialize());
}

Envelope StateDirectory::load_secret(const Digest& tx_id) const {
  auto path = root_ / "secrets" / (tx_id.hex() + ".secret");
  if (!fs::exists(path)) fail(ErrorCode::UnknownTransaction, "no secret block for " + tx_id.hex());
  return Envelope::parse(read_file(path));
}

}  // namespace skyvault
