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
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "skyvault/crypto.hpp"

namespace skyvault {

inline constexpr std::size_t kDefaultChunkSize = 262144;
inline constexpr std::size_t kDefaultReplication = 3;

// Splits into fixed-size views over `data`; the last one may be short and
// empty input yields no chunks. Throws BadChunkSize for chunk_size 0.
std::vector<ByteView> chunk_file(ByteView data, std::size_t chunk_size);

struct Chunk {
  std::uint64_t index = 0;
  Digest plaintext_digest;
  Bytes ciphertext;
  Digest ciphertext_digest;
};

// Per-file key: SHA-256(uploader_private || file_digest). Deterministic so the
// same uploader re-uploading the same bytes gets the same skylink.
SymKey derive_file_key(const PrivateKey& uploader, const Digest& file_digest);

// Encrypts chunk `index` under `key` with nonce = index (12-octet big-endian).
Chunk encrypt_chunk(const SymKey& key, std::uint64_t index, ByteView plaintext);

struct ChunkRecord {
  std::uint64_t index = 0;
  Digest ciphertext_digest;
  std::vector<std::string> host_ids;

  friend bool operator==(const ChunkRecord&, const ChunkRecord&) = default;
};

struct FileManifest {
  Digest file_digest;
  std::uint64_t file_size = 0;
  std::uint64_t chunk_size = 0;
  std::vector<ChunkRecord> chunk_records;
  Envelope encrypted_file_key;

  // Content-addressing part of the manifest: file digest, sizes and the
  // ordered ciphertext digests. Placement (host ids) and the randomised
  // key envelope are excluded so the address depends only on content,
  // chunk size and uploader.
  Bytes addressable_bytes() const;
  Bytes serialize() const;
  static FileManifest parse(ByteView data);

  friend bool operator==(const FileManifest&, const FileManifest&) = default;
};

// "sia://" + base64url(SHA-256(manifest.addressable_bytes())), 43 chars of
// base64url after the scheme.
class SkyLink {
 public:
  SkyLink() = default;
  explicit SkyLink(const Digest& d) : digest_(d) {}

  static SkyLink for_manifest(const FileManifest& manifest);
  // Accepts "sia://<43 chars>" or the bare 43 chars; throws DecodeError.
  static SkyLink parse(std::string_view text);

  const Digest& digest() const noexcept { return digest_; }
  std::string text() const { return "sia://" + digest_.b64url(); }

  friend auto operator<=>(const SkyLink&, const SkyLink&) = default;

 private:
  Digest digest_;
};

// A storage host holds ciphertext fragments keyed by their digest. A dead
// host refuses every request with HostUnavailable.
class Host {
 public:
  explicit Host(std::string host_id) : host_id_(std::move(host_id)) {}

  const std::string& id() const noexcept { return host_id_; }
  bool alive() const;
  void set_alive(bool alive);

  void store(const Digest& key, Bytes fragment);
  // nullopt when the host is alive but lacks the fragment.
  std::optional<Bytes> fetch(const Digest& key) const;

  std::size_t fragment_count() const;
  void for_each_fragment(const std::function<void(const Digest&, const Bytes&)>& fn) const;
  // Failure injection: XOR one byte of a stored fragment. Returns false if the
  // fragment is absent or the offset is out of range.
  bool corrupt_fragment(const Digest& key, std::size_t offset, std::uint8_t mask = 0x01);

 private:
  std::string host_id_;
  mutable std::mutex mu_;
  bool alive_ = true;
  std::map<Digest, Bytes> fragments_;
};

// Single-process simulation of a replicated, content-addressed storage
// network. Hosts serialise their own fragment maps; the manifest registry
// takes a shared lock for readers and an exclusive one for writers.
class StorageNetwork {
 public:
  StorageNetwork(std::size_t host_count, std::size_t replication_factor = kDefaultReplication);

  std::size_t replication_factor() const noexcept { return replication_; }
  std::size_t host_count() const noexcept { return hosts_.size(); }
  std::vector<std::string> host_ids() const;
  Host& host(std::string_view host_id);
  const Host& host(std::string_view host_id) const;

  // Chunks, encrypts and places every chunk on R distinct live hosts, chosen
  // round-robin starting at (index mod live hosts). Errors: EmptyFile,
  // BadChunkSize, InsufficientHosts.
  std::pair<SkyLink, FileManifest> upload(ByteView data, const KeyPair& uploader,
                                          std::size_t chunk_size = kDefaultChunkSize);

  // Errors: UnknownSkylink, KeyAccessDenied, IntegrityFailure, AllReplicasDown.
  Bytes download(const SkyLink& link, const PrivateKey& requester) const;
  // Download path for holders of the file key itself (e.g. via a license).
  Bytes download_with_key(const SkyLink& link, const SymKey& file_key) const;

  std::optional<FileManifest> find_manifest(const SkyLink& link) const;
  std::vector<SkyLink> skylinks() const;
  // Opens the manifest's sealed file key; throws KeyAccessDenied.
  SymKey open_file_key(const FileManifest& manifest, const PrivateKey& holder) const;

  void fail_host(std::string_view host_id);
  void revive_host(std::string_view host_id);

  // Persistence layout under `dir`: manifests/<hex skylink digest>.manifest,
  // hosts/<host_id>/<hex ciphertext digest> and hosts/<host_id>/status.
  void save(const std::filesystem::path& dir) const;
  static std::unique_ptr<StorageNetwork> load(const std::filesystem::path& dir,
                                              std::size_t replication_factor);

 private:
  Bytes fetch_chunk(const ChunkRecord& rec, const SymKey& key) const;

  std::size_t replication_;
  std::vector<std::unique_ptr<Host>> hosts_;
  mutable std::shared_mutex manifests_mu_;
  std::map<Digest, FileManifest> manifests_;
};

// True iff re-deriving the manifest for `data` under (uploader, chunk_size)
// reproduces `link`.
bool verify_skylink(const SkyLink& link, ByteView data, const KeyPair& uploader,
                    std::size_t chunk_size = kDefaultChunkSize);

}  // namespace skyvault
