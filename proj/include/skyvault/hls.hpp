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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "skyvault/crypto.hpp"

namespace skyvault::hls {

using HlsKey = FixedBytes<16, struct HlsKeyTag>;
using Iv = FixedBytes<16, struct HlsIvTag>;

inline constexpr std::size_t kDefaultSegmentBytes = 1048576;
inline constexpr double kDefaultSegmentDuration = 6.0;

// IV an HLS client uses when #EXT-X-KEY has no IV attribute: the media
// sequence number as a 128-bit big-endian integer.
Iv sequence_iv(std::uint64_t sequence);

// AES-128-CBC with PKCS#7 padding.
Bytes aes128_cbc_encrypt(const HlsKey& key, const Iv& iv, ByteView plaintext);
// Throws PaddingError when the padding does not check out, which is how a
// wrong key or corrupted segment shows up with an unauthenticated cipher.
Bytes aes128_cbc_decrypt(const HlsKey& key, const Iv& iv, ByteView ciphertext);

// The 16-octet segment key for content protected by `content_key`. Only
// someone who redeemed a license for the content can compute it.
HlsKey derive_hls_key(const SymKey& content_key);

struct Segment {
  std::string name;
  Bytes ciphertext;
};

struct HlsPackage {
  std::string media_playlist;
  std::vector<Segment> segments;
  std::string key_uri;
  HlsKey key;
  double segment_duration_hint = kDefaultSegmentDuration;
};

// Splits media into `segment_bytes` ranges, encrypts segment i under IV = i
// and emits the media playlist. Errors: EmptyMedia, BadKeyLength.
HlsPackage package(ByteView media, ByteView key, std::string key_uri,
                   std::size_t segment_bytes = kDefaultSegmentBytes,
                   double segment_duration_hint = kDefaultSegmentDuration);

// Errors: MalformedPlaylist, MissingSegment, PaddingError, BadKeyLength.
Bytes unpackage(const HlsPackage& pkg, ByteView key);

struct Rendition {
  std::uint64_t bandwidth = 0;
  std::string media_playlist_name;
};

struct MasterPlaylist {
  std::string text;
  std::vector<Rendition> renditions;
};

// Errors: NoRenditions, DuplicateBandwidth.
MasterPlaylist master_playlist(std::vector<Rendition> renditions);

struct MediaEntry {
  double duration = 0;
  std::string uri;
};

struct MediaPlaylist {
  int version = 1;
  std::int64_t target_duration = 0;
  std::uint64_t media_sequence = 0;
  std::string key_method = "NONE";
  std::string key_uri;
  std::optional<Iv> key_iv;
  std::vector<MediaEntry> entries;
  bool ended = false;
};

// Throws MalformedPlaylist on any grammar violation.
MediaPlaylist parse_media_playlist(std::string_view text);

// Mandatory-tag grammar checks; an empty result means the playlist conforms.
std::vector<std::string> validate_media_playlist(std::string_view text);
std::vector<std::string> validate_master_playlist(std::string_view text);

// <dir>/playlist.m3u8 and <dir>/seg{i}.ts. The key is never written.
void write_package(const HlsPackage& pkg, const std::filesystem::path& dir);
// Reads the playlist and whichever listed segments exist; a missing file
// surfaces later as MissingSegment from unpackage().
HlsPackage read_package(const std::filesystem::path& dir);
void write_master(const MasterPlaylist& master, const std::filesystem::path& dir);

}  // namespace skyvault::hls
