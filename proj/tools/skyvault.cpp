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

// skyvault: operator CLI over a state directory.
//
// Every subcommand loads what it needs from the state directory, performs one
// operation and persists the result. Errors go to stderr as a JSON object
// {"error": <stable code>, "message": ...} with a nonzero exit status.

#include <csignal>
#include <cstdlib>
#include <iostream>
#include <pthread.h>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "skyvault/error.hpp"
#include "skyvault/hls.hpp"
#include "skyvault/identity.hpp"
#include "skyvault/ledger.hpp"
#include "skyvault/licensing.hpp"
#include "skyvault/service.hpp"
#include "skyvault/state.hpp"
#include "skyvault/storage.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace skyvault;

constexpr std::string_view kRenter = "_renter";

fs::path default_state_dir() {
  if (const char* env = std::getenv("SKYVAULT_STATE"); env != nullptr && *env != '\0') {
    return env;
  }
  return "skyvault-state";
}

// SKYVAULT_NOW pins the clock, which makes expiry reproducible in scripts.
Clock cli_clock() {
  if (const char* env = std::getenv("SKYVAULT_NOW"); env != nullptr && *env != '\0') {
    UnixSeconds fixed = std::stoll(env);
    return [fixed] { return fixed; };
  }
  return system_clock();
}

KeyPair renter_keys(StateDirectory& state, const std::string& as) {
  if (!as.empty()) return state.load_keypair(as);
  if (!state.has_keypair(kRenter)) state.save_keypair(kRenter, generate_keypair());
  return state.load_keypair(kRenter);
}

TokenValue require_session(StateDirectory& state, const std::string& id) {
  auto session = state.load_session(id);
  if (!session) fail(ErrorCode::NotAuthenticated, "'" + id + "' is not logged in");
  try {
    if (state.identity().validate_session(session->token) != id) {
      fail(ErrorCode::NotAuthenticated, "session belongs to another account");
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NotAuthenticated) throw;
    fail(ErrorCode::NotAuthenticated, std::string("session rejected: ") + e.what());
  }
  return session->token;
}

std::set<Action> parse_rights(const std::string& csv) {
  std::set<Action> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    auto comma = csv.find(',', start);
    auto item = csv.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!item.empty()) out.insert(parse_action(item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

// Redeems `license_hex` for `as`, enforcing rights and the online check for
// licenses that do not allow offline use.
SymKey redeem_for(StateDirectory& state, const std::string& license_hex, const std::string& as,
                  Action action) {
  auto license = state.load_license(LicenseId::from_hex(license_hex));
  if (license.consumer_id != as) {
    fail(ErrorCode::KeyAccessDenied, "license " + license_hex + " belongs to another consumer");
  }
  if (!license.intact()) fail(ErrorCode::DecodeError, "license failed its integrity check");
  if (!license.key_rules.offline_allowed) require_session(state, as);
  auto keys = state.load_keypair(as);
  UsageTracker tracker;
  tracker.set_uses(license.license_id, state.load_uses(license.license_id));
  auto key = redeem_license(keys.private_key, license, action, state.now(), tracker);
  state.save_uses(license.license_id, tracker.uses(license.license_id));
  return key;
}

struct Options {
  std::string state_dir = default_state_dir().string();
  std::string as;
  std::string password;
  std::string id;
  std::string file;
  std::string out;
  std::string skylink;
  std::string title;
  std::string rights = "stream";
  std::string action = "stream";
  std::string license;
  std::string key_hex;
  std::string key_uri;
  std::string bind = "127.0.0.1:8080";
  std::string host_id;
  std::string tx;
  std::vector<std::uint64_t> bandwidths;
  std::uint64_t chunk_size = 0;
  std::uint64_t segment_bytes = 0;
  double duration = hls::kDefaultSegmentDuration;
  std::uint32_t max_uses = 0;
  std::uint64_t valid_days = 30;
  bool offline = false;
  bool show_key = false;
  Config config;
};

int run_serve(StateDirectory& state, const std::string& bind) {
  auto colon = bind.rfind(':');
  if (colon == std::string::npos) fail(ErrorCode::InvalidArgument, "--bind expects host:port");
  auto host = bind.substr(0, colon);
  int port = std::stoi(bind.substr(colon + 1));

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  IdentityServer server(state.identity());
  if (port == 0) {
    port = server.bind_any_port(host);
    if (port < 0) fail(ErrorCode::IoError, "cannot bind " + host);
  } else if (!server.bind(host, port)) {
    fail(ErrorCode::IoError, "cannot bind " + bind);
  }
  std::cout << "listening on " << host << ":" << port << std::endl;
  std::thread worker([&] { server.listen(); });
  int sig = 0;
  sigwait(&signals, &sig);
  server.stop();
  worker.join();
  std::cout << "shutdown" << std::endl;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"skyvault: encrypted, replicated content distribution with an auditable ledger"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--state", o.state_dir, "State directory (env SKYVAULT_STATE)");

  auto* init = app.add_subcommand("init", "Create a state directory");
  init->add_option("--hosts", o.config.host_count, "Number of storage hosts");
  init->add_option("--replication", o.config.replication_factor, "Replicas per chunk");
  init->add_option("--chunk-size", o.config.chunk_size, "Upload chunk size in bytes");
  init->add_option("--difficulty", o.config.pow_difficulty, "Proof-of-work bits");
  init->add_option("--challenge-ttl", o.config.challenge_ttl, "Login challenge lifetime (s)");
  init->add_option("--session-ttl", o.config.session_ttl, "Session lifetime (s)");
  init->add_option("--segment-bytes", o.config.segment_bytes, "HLS segment size in bytes");

  auto* reg = app.add_subcommand("register", "Create a keypair and register an account");
  reg->add_option("id", o.id)->required();
  reg->add_option("--password", o.password)->required();

  auto* login = app.add_subcommand("login", "Authenticate and store a session");
  login->add_option("id", o.id)->required();
  login->add_option("--password", o.password)->required();

  auto* upload = app.add_subcommand("upload", "Upload a file to the storage network");
  upload->add_option("file", o.file)->required();
  upload->add_option("--as", o.as, "Uploader (defaults to the local renter key)");
  upload->add_option("--chunk-size", o.chunk_size);

  auto* download = app.add_subcommand("download", "Download a skylink");
  download->add_option("skylink", o.skylink)->required();
  download->add_option("out", o.out)->required();
  download->add_option("--as", o.as, "Key holder (defaults to the local renter key)");

  auto* publish = app.add_subcommand("publish", "Offer uploaded content for sale");
  publish->add_option("skylink", o.skylink)->required();
  publish->add_option("--as", o.as, "Provider account")->required();
  publish->add_option("--title", o.title)->required();
  publish->add_option("--rights", o.rights, "Comma-separated: stream,download,re-license");
  publish->add_option("--max-uses", o.max_uses, "0 = unlimited");
  publish->add_option("--valid-days", o.valid_days);
  publish->add_flag("--offline", o.offline, "Allow redemption without a live session");

  auto* buy = app.add_subcommand("buy", "Purchase a license and record it on chain");
  buy->add_option("skylink", o.skylink)->required();
  buy->add_option("--as", o.as, "Consumer account")->required();

  auto* play = app.add_subcommand("play", "Redeem a license and decrypt its content");
  play->add_option("license", o.license, "License id (hex)")->required();
  play->add_option("out", o.out)->required();
  play->add_option("--as", o.as, "Consumer account")->required();
  play->add_option("--action", o.action);
  play->add_flag("--show-key", o.show_key, "Print the redeemed content key (debug)");

  auto* hls_pkg = app.add_subcommand("hls-package", "Package media as encrypted HLS");
  hls_pkg->add_option("file", o.file)->required();
  hls_pkg->add_option("outdir", o.out)->required();
  hls_pkg->add_option("--license", o.license, "Derive the key from this license");
  hls_pkg->add_option("--as", o.as, "License holder");
  hls_pkg->add_option("--key-hex", o.key_hex, "Explicit 16-octet key");
  hls_pkg->add_option("--key-uri", o.key_uri, "Key URI for an explicit key");
  hls_pkg->add_option("--segment-bytes", o.segment_bytes);
  hls_pkg->add_option("--duration", o.duration, "Segment duration hint (s)");
  hls_pkg->add_option("--bandwidth", o.bandwidths, "Also write master.m3u8 with these renditions");

  auto* hls_unpkg = app.add_subcommand("hls-unpackage", "Reassemble media from an HLS directory");
  hls_unpkg->add_option("dir", o.file)->required();
  hls_unpkg->add_option("out", o.out)->required();
  hls_unpkg->add_option("--license", o.license);
  hls_unpkg->add_option("--as", o.as);
  hls_unpkg->add_option("--key-hex", o.key_hex);

  auto* verify_chain = app.add_subcommand("verify-chain", "Verify chain.log from disk");

  auto* confirm = app.add_subcommand("confirm-secret", "Check a secret block against the chain");
  confirm->add_option("tx", o.tx, "Transaction id (hex)")->required();
  confirm->add_option("--as", o.as, "Consumer account")->required();

  auto* host = app.add_subcommand("host", "Inspect or fail storage hosts");
  host->require_subcommand(1);
  auto* host_list = host->add_subcommand("list");
  auto* host_fail = host->add_subcommand("fail");
  host_fail->add_option("host_id", o.host_id)->required();
  auto* host_revive = host->add_subcommand("revive");
  host_revive->add_option("host_id", o.host_id)->required();

  auto* serve = app.add_subcommand("serve", "Run the identity service over HTTP");
  serve->add_option("--bind", o.bind, "host:port (port 0 picks one)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*init) {
      auto state = StateDirectory::init(o.state_dir, o.config, cli_clock());
      std::cout << "initialised " << state.root().string() << " with "
                << state.config().host_count << " hosts" << std::endl;
      return 0;
    }

    auto state = StateDirectory::open(o.state_dir, cli_clock());

    if (*reg) {
      auto keys = generate_keypair();
      auto account = state.identity().register_account(o.id, o.password, keys.public_key);
      state.save_keypair(o.id, keys);
      std::cout << to_json(account).dump(2) << std::endl;
    } else if (*login) {
      auto keys = state.load_keypair(o.id);
      auto challenge = state.identity().begin_auth(o.id);
      auto response = solve_challenge(challenge, keys.private_key, o.id, o.password);
      auto session = state.identity().complete_auth(challenge.challenge_id, response);
      state.save_session(o.id, session);
      std::cout << "Logged in as " << o.id << " (session expires at " << session.expires_at
                << ")" << std::endl;
    } else if (*upload) {
      auto keys = renter_keys(state, o.as);
      auto data = read_file(o.file);
      auto chunk = o.chunk_size ? o.chunk_size : state.config().chunk_size;
      auto [link, manifest] = state.network().upload(data, keys, chunk);
      state.save_network();
      std::cout << "Successfully uploaded file! Skylink: " << link.text() << std::endl;
    } else if (*download) {
      auto keys = renter_keys(state, o.as);
      auto data = state.network().download(SkyLink::parse(o.skylink), keys.private_key);
      write_file(o.out, data);
      std::cout << "Successfully downloaded skylink!" << std::endl;
    } else if (*publish) {
      require_session(state, o.as);
      auto link = SkyLink::parse(o.skylink);
      auto manifest = state.network().find_manifest(link);
      if (!manifest) fail(ErrorCode::UnknownSkylink, "unknown skylink " + link.text());
      state.network().open_file_key(*manifest, state.load_keypair(o.as).private_key);
      Offer offer;
      offer.content_id = link.digest();
      offer.title = o.title;
      offer.rights.allowed_actions = parse_rights(o.rights);
      if (offer.rights.allowed_actions.empty()) fail(ErrorCode::EmptyRights, "no rights given");
      if (o.max_uses > 0) offer.max_uses = o.max_uses;
      offer.validity_seconds = static_cast<std::int64_t>(o.valid_days) * 24 * 3600;
      offer.offline_allowed = o.offline;
      state.save_offer(o.as, offer);
      std::cout << "Published " << link.text() << " as \"" << o.title << "\"" << std::endl;
    } else if (*buy) {
      auto link = SkyLink::parse(o.skylink);
      auto session = state.load_session(o.as);
      if (!session) fail(ErrorCode::NotAuthenticated, "'" + o.as + "' is not logged in");
      auto consumer = state.identity().find_account(o.as);
      if (!consumer) fail(ErrorCode::UnknownId, "no account '" + o.as + "'");
      auto catalog = state.find_publisher(link.digest());
      if (!catalog) fail(ErrorCode::UnknownContent, "nobody publishes " + link.text());
      Provider provider{catalog->provider, state.load_keypair(catalog->provider),
                        catalog->offers};
      auto receipt = execute_purchase(session->token, link.digest(), provider, *consumer,
                                      state.identity(), state.network(), state.chain(),
                                      state.now());
      auto block = state.mine_and_append();
      state.save_license(receipt.license);
      state.save_secret(receipt.tx_id, receipt.sealed_secret_block);
      json out = {{"tx_id", receipt.tx_id.hex()},
                  {"license_id", receipt.license.license_id.hex()},
                  {"block_height", block.height},
                  {"block_hash", block.block_hash.hex()}};
      std::cout << out.dump(2) << std::endl;
    } else if (*play) {
      auto key = redeem_for(state, o.license, o.as, parse_action(o.action));
      auto license = state.load_license(LicenseId::from_hex(o.license));
      auto data = state.network().download_with_key(SkyLink(license.content_id), key);
      write_file(o.out, data);
      if (o.show_key) std::cout << "content key: " << key.hex() << std::endl;
      std::cout << "Playback ready: " << o.out << " (" << data.size() << " bytes)" << std::endl;
    } else if (*hls_pkg || *hls_unpkg) {
      hls::HlsKey key;
      std::string uri = o.key_uri;
      if (!o.license.empty()) {
        if (o.as.empty()) fail(ErrorCode::InvalidArgument, "--license needs --as");
        key = hls::derive_hls_key(redeem_for(state, o.license, o.as, Action::Stream));
        if (uri.empty()) uri = "skydrm://license/" + o.license;
      } else if (!o.key_hex.empty()) {
        key = hls::HlsKey::from(hex_decode(o.key_hex), ErrorCode::BadKeyLength);
        if (uri.empty() && *hls_pkg) fail(ErrorCode::InvalidArgument, "--key-hex needs --key-uri");
      } else {
        fail(ErrorCode::InvalidArgument, "give --license/--as or --key-hex");
      }
      if (*hls_pkg) {
        auto seg = o.segment_bytes ? o.segment_bytes : state.config().segment_bytes;
        auto pkg = hls::package(read_file(o.file), key.view(), uri, seg, o.duration);
        hls::write_package(pkg, o.out);
        if (!o.bandwidths.empty()) {
          std::vector<hls::Rendition> renditions;
          for (auto bw : o.bandwidths) renditions.push_back({bw, "playlist.m3u8"});
          hls::write_master(hls::master_playlist(renditions), o.out);
        }
        std::cout << "Packaged " << pkg.segments.size() << " segments into " << o.out
                  << std::endl;
      } else {
        auto data = hls::unpackage(hls::read_package(o.file), key.view());
        write_file(o.out, data);
        std::cout << "Reassembled " << data.size() << " bytes into " << o.out << std::endl;
      }
    } else if (*verify_chain) {
      auto path = state.root() / "chain.log";
      auto verdict = fs::exists(path) ? verify_chain_bytes(read_file(path)) : VerifyResult{};
      if (verdict.ok()) {
        std::cout << "ok" << std::endl;
      } else {
        std::cout << "first_bad_height=" << *verdict.first_bad_height << std::endl;
        return 1;
      }
    } else if (*confirm) {
      auto tx_id = Digest::from_hex(o.tx);
      auto keys = state.load_keypair(o.as);
      auto opened = open(keys.private_key, state.load_secret(tx_id));
      auto block = SecretBlock::parse(opened);
      bool ok = block.compute_hash() == block.block_hash &&
                state.chain().confirm_secret(tx_id, opened);
      auto pos = state.chain().prove_inclusion(tx_id);
      std::cout << (ok ? "confirmed" : "mismatch") << " height=" << pos.height
                << " position=" << pos.position << std::endl;
      return ok ? 0 : 1;
    } else if (*host) {
      if (*host_list) {
        for (const auto& id : state.network().host_ids()) {
          const auto& h = state.network().host(id);
          std::cout << id << "\t" << (h.alive() ? "alive" : "dead") << "\t"
                    << h.fragment_count() << " fragments" << std::endl;
        }
      } else {
        if (*host_fail) {
          state.network().fail_host(o.host_id);
        } else {
          state.network().revive_host(o.host_id);
        }
        state.save_network();
        std::cout << o.host_id << (*host_fail ? " failed" : " revived") << std::endl;
      }
    } else if (*serve) {
      return run_serve(state, o.bind);
    }
    return 0;
  } catch (const Error& e) {
    json err = {{"error", std::string(to_string(e.code()))}, {"message", e.what()}};
    if (const auto* ie = dynamic_cast<const IntegrityError*>(&e)) {
      err["chunk_index"] = ie->chunk_index();
      err["host_id"] = ie->host_id();
    }
    if (const auto* rd = dynamic_cast<const RightsDeniedError*>(&e)) {
      err["reason"] = std::string(to_string(rd->reason()));
    }
    std::cerr << err.dump() << std::endl;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "InternalError"}, {"message", e.what()}}.dump() << std::endl;
    return 1;
  }
}
