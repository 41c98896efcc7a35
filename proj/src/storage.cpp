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

#include "skyvault/storage.hpp"

#include <algorithm>

#include "skyvault/error.hpp"

namespace skyvault {

namespace fs = std::filesystem;

namespace {

constexpr std::uint8_t kManifestVersion = 1;

struct EncryptedFile {
  FileManifest manifest;
  std::vector<Chunk> chunks;
};

EncryptedFile encrypt_file(ByteView data, const PrivateKey& uploader,
                           std::size_t chunk_size, SymKey* key_out = nullptr) {
  auto pieces = chunk_file(data, chunk_size);
  EncryptedFile out;
  out.manifest.file_digest = digest(data);
  out.manifest.file_size = data.size();
  out.manifest.chunk_size = chunk_size;
  auto key = derive_file_key(uploader, out.manifest.file_digest);
  out.chunks.reserve(pieces.size());
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    out.chunks.push_back(encrypt_chunk(key, i, pieces[i]));
    out.manifest.chunk_records.push_back({i, out.chunks.back().ciphertext_digest, {}});
  }
  if (key_out) *key_out = key;
  return out;
}

}  // namespace

std::vector<ByteView> chunk_file(ByteView data, std::size_t chunk_size) {
  if (chunk_size == 0) fail(ErrorCode::BadChunkSize, "chunk_size must be at least 1");
  std::vector<ByteView> out;
  out.reserve((data.size() + chunk_size - 1) / chunk_size);
  for (std::size_t off = 0; off < data.size(); off += chunk_size) {
    out.push_back(data.subspan(off, std::min(chunk_size, data.size() - off)));
  }
  return out;
}

SymKey derive_file_key(const PrivateKey& uploader, const Digest& file_digest) {
  return SymKey(digest_concat({uploader.view(), file_digest.view()}).array());
}

Chunk encrypt_chunk(const SymKey& key, std::uint64_t index, ByteView plaintext) {
  Chunk c;
  c.index = index;
  c.plaintext_digest = digest(plaintext);
  c.ciphertext = sym_encrypt(key, counter_nonce(index), plaintext);
  c.ciphertext_digest = digest(c.ciphertext);
  return c;
}

// Layout (all integers big-endian):
//   u8 version | file_digest[32] | u64 file_size | u64 chunk_size |
//   u32 n | n x (u64 index | ciphertext_digest[32])
Bytes FileManifest::addressable_bytes() const {
  ByteWriter w;
  w.u8(kManifestVersion).fixed(file_digest.view()).u64(file_size).u64(chunk_size);
  w.u32(static_cast<std::uint32_t>(chunk_records.size()));
  for (const auto& rec : chunk_records) w.u64(rec.index).fixed(rec.ciphertext_digest.view());
  return std::move(w).bytes();
}

// addressable_bytes() followed by, per chunk in order, u32 host count and
// length-prefixed host ids, then the length-prefixed sealed file key.
Bytes FileManifest::serialize() const {
  ByteWriter w;
  w.fixed(addressable_bytes());
  for (const auto& rec : chunk_records) {
    w.u32(static_cast<std::uint32_t>(rec.host_ids.size()));
    for (const auto& h : rec.host_ids) w.str(h);
  }
  w.var(encrypted_file_key.serialize());
  return std::move(w).bytes();
}

FileManifest FileManifest::parse(ByteView data) {
  ByteReader r(data);
  if (r.u8() != kManifestVersion) fail(ErrorCode::DecodeError, "unknown manifest version");
  FileManifest m;
  m.file_digest = Digest(r.array<32>());
  m.file_size = r.u64();
  m.chunk_size = r.u64();
  auto n = r.u32();
  if (m.chunk_size == 0) fail(ErrorCode::DecodeError, "manifest chunk_size is zero");
  if (n != (m.file_size + m.chunk_size - 1) / m.chunk_size) {
    fail(ErrorCode::DecodeError, "manifest chunk count does not match file size");
  }
  m.chunk_records.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    m.chunk_records[i].index = r.u64();
    if (m.chunk_records[i].index != i) fail(ErrorCode::DecodeError, "non-contiguous chunk index");
    m.chunk_records[i].ciphertext_digest = Digest(r.array<32>());
  }
  for (auto& rec : m.chunk_records) {
    auto hosts = r.u32();
    if (hosts == 0) fail(ErrorCode::DecodeError, "chunk without hosts");
    for (std::uint32_t h = 0; h < hosts; ++h) rec.host_ids.push_back(r.str());
  }
  m.encrypted_file_key = Envelope::parse(r.var());
  r.expect_done();
  return m;
}

SkyLink SkyLink::for_manifest(const FileManifest& manifest) {
  return SkyLink(skyvault::digest(manifest.addressable_bytes()));
}

SkyLink SkyLink::parse(std::string_view text) {
  constexpr std::string_view kScheme = "sia://";
  if (text.starts_with(kScheme)) text.remove_prefix(kScheme.size());
  if (text.size() != 43) fail(ErrorCode::DecodeError, "skylink must carry 43 base64url chars");
  return SkyLink(Digest::from_b64url(text));
}

bool Host::alive() const {
  std::lock_guard lock(mu_);
  return alive_;
}

void Host::set_alive(bool alive) {
  std::lock_guard lock(mu_);
  alive_ = alive;
}

void Host::store(const Digest& key, Bytes fragment) {
  std::lock_guard lock(mu_);
  if (!alive_) fail(ErrorCode::HostUnavailable, "host " + host_id_ + " is down");
  fragments_.insert_or_assign(key, std::move(fragment));
}

std::optional<Bytes> Host::fetch(const Digest& key) const {
  std::lock_guard lock(mu_);
  if (!alive_) fail(ErrorCode::HostUnavailable, "host " + host_id_ + " is down");
  auto it = fragments_.find(key);
  if (it == fragments_.end()) return std::nullopt;
  return it->second;
}

std::size_t Host::fragment_count() const {
  std::lock_guard lock(mu_);
  return fragments_.size();
}

void Host::for_each_fragment(
    const std::function<void(const Digest&, const Bytes&)>& fn) const {
  std::lock_guard lock(mu_);
  for (const auto& [k, v] : fragments_) fn(k, v);
}

bool Host::corrupt_fragment(const Digest& key, std::size_t offset, std::uint8_t mask) {
  std::lock_guard lock(mu_);
  auto it = fragments_.find(key);
  if (it == fragments_.end() || offset >= it->second.size()) return false;
  it->second[offset] ^= mask;
  return true;
}

StorageNetwork::StorageNetwork(std::size_t host_count, std::size_t replication_factor)
    : replication_(replication_factor) {
  if (replication_factor == 0) fail(ErrorCode::InvalidConfig, "replication factor must be >= 1");
  hosts_.reserve(host_count);
  for (std::size_t i = 0; i < host_count; ++i) {
    hosts_.push_back(std::make_unique<Host>("host-" + std::to_string(i)));
  }
}

std::vector<std::string> StorageNetwork::host_ids() const {
  std::vector<std::string> ids;
  for (const auto& h : hosts_) ids.push_back(h->id());
  return ids;
}

Host& StorageNetwork::host(std::string_view host_id) {
  return const_cast<Host&>(std::as_const(*this).host(host_id));
}

const Host& StorageNetwork::host(std::string_view host_id) const {
  for (const auto& h : hosts_) {
    if (h->id() == host_id) return *h;
  }
  fail(ErrorCode::UnknownHost, "no host '" + std::string(host_id) + "'");
}

std::pair<SkyLink, FileManifest> StorageNetwork::upload(ByteView data,
                                                        const KeyPair& uploader,
                                                        std::size_t chunk_size) {
  if (data.empty()) fail(ErrorCode::EmptyFile, "cannot upload an empty file");
  if (chunk_size == 0) fail(ErrorCode::BadChunkSize, "chunk_size must be at least 1");
  std::vector<Host*> live;
  for (const auto& h : hosts_) {
    if (h->alive()) live.push_back(h.get());
  }
  if (live.size() < replication_) {
    fail(ErrorCode::InsufficientHosts,
         "need " + std::to_string(replication_) + " live hosts, have " +
             std::to_string(live.size()));
  }

  SymKey key;
  auto enc = encrypt_file(data, uploader.private_key, chunk_size, &key);
  for (auto& chunk : enc.chunks) {
    auto& rec = enc.manifest.chunk_records[chunk.index];
    for (std::size_t k = 0; k < replication_; ++k) {
      Host* h = live[(chunk.index + k) % live.size()];
      h->store(chunk.ciphertext_digest, chunk.ciphertext);
      rec.host_ids.push_back(h->id());
    }
  }
  enc.manifest.encrypted_file_key = seal(uploader.public_key, key.view());
  auto link = SkyLink::for_manifest(enc.manifest);
  {
    std::unique_lock lock(manifests_mu_);
    manifests_.try_emplace(link.digest(), enc.manifest);
  }
  return {link, std::move(enc.manifest)};
}

std::optional<FileManifest> StorageNetwork::find_manifest(const SkyLink& link) const {
  std::shared_lock lock(manifests_mu_);
  auto it = manifests_.find(link.digest());
  if (it == manifests_.end()) return std::nullopt;
  return it->second;
}

std::vector<SkyLink> StorageNetwork::skylinks() const {
  std::shared_lock lock(manifests_mu_);
  std::vector<SkyLink> out;
  for (const auto& [d, m] : manifests_) out.emplace_back(d);
  return out;
}

SymKey StorageNetwork::open_file_key(const FileManifest& manifest,
                                     const PrivateKey& holder) const {
  try {
    return SymKey::from(open(holder, manifest.encrypted_file_key), ErrorCode::KeyAccessDenied);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::OpenFailed || e.code() == ErrorCode::KeyAccessDenied) {
      fail(ErrorCode::KeyAccessDenied, "requester cannot open the file key");
    }
    throw;
  }
}

Bytes StorageNetwork::download(const SkyLink& link, const PrivateKey& requester) const {
  auto manifest = find_manifest(link);
  if (!manifest) fail(ErrorCode::UnknownSkylink, "unknown skylink " + link.text());
  return download_with_key(link, open_file_key(*manifest, requester));
}

Bytes StorageNetwork::fetch_chunk(const ChunkRecord& rec, const SymKey& key) const {
  std::optional<IntegrityError> integrity;
  for (const auto& host_id : rec.host_ids) {
    const Host* h = nullptr;
    for (const auto& candidate : hosts_) {
      if (candidate->id() == host_id) h = candidate.get();
    }
    if (h == nullptr || !h->alive()) continue;
    std::optional<Bytes> fragment;
    try {
      fragment = h->fetch(rec.ciphertext_digest);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::HostUnavailable) continue;
      throw;
    }
    if (!fragment) continue;
    if (digest(*fragment) != rec.ciphertext_digest) {
      integrity.emplace(rec.index, host_id,
                        "chunk " + std::to_string(rec.index) + " on " + host_id +
                            " fails its ciphertext digest");
      continue;
    }
    try {
      return sym_decrypt(key, counter_nonce(rec.index), *fragment);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::AuthFailed) {
        fail(ErrorCode::KeyAccessDenied, "file key does not decrypt this content");
      }
      throw;
    }
  }
  if (integrity) throw *integrity;
  fail(ErrorCode::AllReplicasDown,
       "no live replica holds chunk " + std::to_string(rec.index));
}

Bytes StorageNetwork::download_with_key(const SkyLink& link, const SymKey& file_key) const {
  auto manifest = find_manifest(link);
  if (!manifest) fail(ErrorCode::UnknownSkylink, "unknown skylink " + link.text());
  Bytes out;
  out.reserve(manifest->file_size);
  for (const auto& rec : manifest->chunk_records) {
    auto plain = fetch_chunk(rec, file_key);
    out.insert(out.end(), plain.begin(), plain.end());
  }
  if (out.size() != manifest->file_size || digest(out) != manifest->file_digest) {
    auto last = manifest->chunk_records.empty() ? 0 : manifest->chunk_records.back().index;
    throw IntegrityError(last, "manifest", "reassembled file does not match file digest");
  }
  return out;
}

void StorageNetwork::fail_host(std::string_view host_id) { host(host_id).set_alive(false); }

void StorageNetwork::revive_host(std::string_view host_id) { host(host_id).set_alive(true); }

void StorageNetwork::save(const fs::path& dir) const {
  fs::create_directories(dir / "manifests");
  {
    std::shared_lock lock(manifests_mu_);
    for (const auto& [d, m] : manifests_) {
      auto path = dir / "manifests" / (d.hex() + ".manifest");
      if (!fs::exists(path)) write_file(path, m.serialize());
    }
  }
  for (const auto& h : hosts_) {
    auto host_dir = dir / "hosts" / h->id();
    fs::create_directories(host_dir);
    write_file(host_dir / "status", std::string_view(h->alive() ? "alive\n" : "dead\n"));
    // Fragments are content-addressed; rewrite only what changed on disk.
    h->for_each_fragment([&](const Digest& d, const Bytes& frag) {
      auto path = host_dir / d.hex();
      if (!fs::exists(path) || fs::file_size(path) != frag.size() || read_file(path) != frag) {
        write_file(path, frag);
      }
    });
  }
}

std::unique_ptr<StorageNetwork> StorageNetwork::load(const fs::path& dir,
                                                     std::size_t replication_factor) {
  std::vector<std::string> ids;
  if (fs::exists(dir / "hosts")) {
    for (const auto& e : fs::directory_iterator(dir / "hosts")) {
      if (e.is_directory()) ids.push_back(e.path().filename().string());
    }
  }
  // host-N ordering, not lexicographic, so placement stays stable.
  std::sort(ids.begin(), ids.end(), [](const std::string& a, const std::string& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  auto net = std::make_unique<StorageNetwork>(0, replication_factor);
  for (const auto& id : ids) {
    auto h = std::make_unique<Host>(id);
    auto host_dir = dir / "hosts" / id;
    for (const auto& e : fs::directory_iterator(host_dir)) {
      auto name = e.path().filename().string();
      if (name.size() != 64) continue;
      h->store(Digest::from_hex(name), read_file(e.path()));
    }
    if (fs::exists(host_dir / "status") && to_string(read_file(host_dir / "status")) == "dead\n") {
      h->set_alive(false);
    }
    net->hosts_.push_back(std::move(h));
  }
  if (fs::exists(dir / "manifests")) {
    for (const auto& e : fs::directory_iterator(dir / "manifests")) {
      if (e.path().extension() != ".manifest") continue;
      auto m = FileManifest::parse(read_file(e.path()));
      auto link = SkyLink::for_manifest(m);
      if (link.digest().hex() != e.path().stem().string()) {
        fail(ErrorCode::DecodeError, "manifest file name does not match its content address");
      }
      net->manifests_.emplace(link.digest(), std::move(m));
    }
  }
  return net;
}

bool verify_skylink(const SkyLink& link, ByteView data, const KeyPair& uploader,
                    std::size_t chunk_size) {
  if (data.empty() || chunk_size == 0) return false;
  auto enc = encrypt_file(data, uploader.private_key, chunk_size);
  return SkyLink::for_manifest(enc.manifest) == link;
}

}  // namespace skyvault
