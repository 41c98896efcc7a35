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

#include "skyvault/hls.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>

#include "skyvault/error.hpp"

namespace skyvault::hls {

namespace fs = std::filesystem;

namespace {

using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, decltype(&EVP_CIPHER_CTX_free)>;

CipherCtx new_ctx() {
  CipherCtx ctx(EVP_CIPHER_CTX_new(), &EVP_CIPHER_CTX_free);
  if (!ctx) throw std::bad_alloc();
  return ctx;
}

HlsKey key_from(ByteView key) {
  return HlsKey::from(key, ErrorCode::BadKeyLength);
}

std::string segment_name(std::size_t i) { return "seg" + std::to_string(i) + ".ts"; }

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return lines;
}

bool is_decimal_integer(std::string_view s) {
  return !s.empty() && s.size() <= 20 &&
         std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::optional<std::uint64_t> parse_u64(std::string_view s) {
  if (!is_decimal_integer(s)) return std::nullopt;
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<double> parse_decimal_float(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::size_t dots = 0;
  for (char c : s) {
    if (c == '.') {
      ++dots;
    } else if (c < '0' || c > '9') {
      return std::nullopt;
    }
  }
  if (dots > 1 || s.front() == '.') return std::nullopt;
  return std::stod(std::string(s));
}

// RFC 8216 attribute-list: NAME=value pairs separated by commas, where a
// value is a quoted-string (no embedded quotes), or an unquoted token.
std::optional<std::map<std::string, std::string>> parse_attributes(std::string_view s) {
  std::map<std::string, std::string> attrs;
  while (!s.empty()) {
    auto eq = s.find('=');
    if (eq == std::string_view::npos || eq == 0) return std::nullopt;
    std::string name(s.substr(0, eq));
    for (char c : name) {
      if (!((c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-')) return std::nullopt;
    }
    s.remove_prefix(eq + 1);
    std::string value;
    if (!s.empty() && s.front() == '"') {
      auto close = s.find('"', 1);
      if (close == std::string_view::npos) return std::nullopt;
      value = std::string(s.substr(0, close + 1));
      s.remove_prefix(close + 1);
    } else {
      auto comma = s.find(',');
      value = std::string(s.substr(0, comma));
      if (value.empty()) return std::nullopt;
      s.remove_prefix(comma == std::string_view::npos ? s.size() : comma);
    }
    if (!attrs.emplace(name, value).second) return std::nullopt;
    if (!s.empty()) {
      if (s.front() != ',') return std::nullopt;
      s.remove_prefix(1);
      if (s.empty()) return std::nullopt;
    }
  }
  return attrs;
}

bool is_quoted(std::string_view v) {
  return v.size() >= 2 && v.front() == '"' && v.back() == '"';
}

std::string_view unquote(std::string_view v) { return v.substr(1, v.size() - 2); }

std::string_view tag_value(std::string_view line, std::string_view tag) {
  return line.substr(tag.size());
}

bool starts_with_tag(std::string_view line, std::string_view tag) {
  return line.starts_with(tag);
}

std::optional<Iv> parse_iv(std::string_view v) {
  if (v.size() != 34 || !(v.starts_with("0x") || v.starts_with("0X"))) return std::nullopt;
  try {
    std::string lower(v.substr(2));
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](char c) { return static_cast<char>(std::tolower(c)); });
    return Iv::from_hex(lower);
  } catch (const Error&) {
    return std::nullopt;
  }
}

// Shared walk over a media playlist; collects every violation rather than
// stopping at the first so the validator can report them all.
MediaPlaylist walk_media(std::string_view text, std::vector<std::string>& errors) {
  MediaPlaylist pl;
  auto lines = split_lines(text);
  if (lines.empty() || lines.front() != "#EXTM3U") {
    errors.push_back("first line must be #EXTM3U");
    return pl;
  }
  bool seen_version = false, seen_target = false, seen_sequence = false;
  bool seen_segment = false;
  bool has_pending = false;
  double pending_duration = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto line = lines[i];
    auto where = "line " + std::to_string(i + 1) + ": ";
    if (line.empty()) continue;
    if (pl.ended) {
      errors.push_back(where + "content after #EXT-X-ENDLIST");
      continue;
    }
    if (line.front() != '#') {
      if (!has_pending) {
        errors.push_back(where + "segment URI without a preceding #EXTINF");
      } else {
        pl.entries.push_back({pending_duration, std::string(line)});
        has_pending = false;
      }
      seen_segment = true;
      continue;
    }
    if (!line.starts_with("#EXT")) continue;  // comment
    if (has_pending && (starts_with_tag(line, "#EXTINF:") || line == "#EXT-X-ENDLIST")) {
      errors.push_back(where + "#EXTINF must be followed by its segment URI");
      has_pending = false;
    }
    if (line == "#EXTM3U") {
      errors.push_back(where + "#EXTM3U repeated");
    } else if (starts_with_tag(line, "#EXT-X-VERSION:")) {
      auto v = parse_u64(tag_value(line, "#EXT-X-VERSION:"));
      if (seen_version) errors.push_back(where + "#EXT-X-VERSION repeated");
      if (!v || *v == 0) {
        errors.push_back(where + "#EXT-X-VERSION needs a positive decimal-integer");
      } else {
        pl.version = static_cast<int>(*v);
      }
      seen_version = true;
    } else if (starts_with_tag(line, "#EXT-X-TARGETDURATION:")) {
      auto v = parse_u64(tag_value(line, "#EXT-X-TARGETDURATION:"));
      if (seen_target) errors.push_back(where + "#EXT-X-TARGETDURATION repeated");
      if (!v) {
        errors.push_back(where + "#EXT-X-TARGETDURATION needs a decimal-integer");
      } else {
        pl.target_duration = static_cast<std::int64_t>(*v);
      }
      seen_target = true;
    } else if (starts_with_tag(line, "#EXT-X-MEDIA-SEQUENCE:")) {
      auto v = parse_u64(tag_value(line, "#EXT-X-MEDIA-SEQUENCE:"));
      if (seen_sequence) errors.push_back(where + "#EXT-X-MEDIA-SEQUENCE repeated");
      if (seen_segment) errors.push_back(where + "#EXT-X-MEDIA-SEQUENCE after first segment");
      if (!v) {
        errors.push_back(where + "#EXT-X-MEDIA-SEQUENCE needs a decimal-integer");
      } else {
        pl.media_sequence = *v;
      }
      seen_sequence = true;
    } else if (starts_with_tag(line, "#EXT-X-KEY:")) {
      auto attrs = parse_attributes(tag_value(line, "#EXT-X-KEY:"));
      if (!attrs || !attrs->contains("METHOD")) {
        errors.push_back(where + "#EXT-X-KEY needs a METHOD attribute");
        continue;
      }
      const auto& method = attrs->at("METHOD");
      if (method != "NONE" && method != "AES-128" && method != "SAMPLE-AES") {
        errors.push_back(where + "unknown key METHOD " + method);
      }
      pl.key_method = method;
      if (method == "NONE") {
        if (attrs->contains("URI") || attrs->contains("IV")) {
          errors.push_back(where + "METHOD=NONE must not carry URI or IV");
        }
        continue;
      }
      if (!attrs->contains("URI") || !is_quoted(attrs->at("URI"))) {
        errors.push_back(where + "#EXT-X-KEY URI must be a quoted-string");
      } else {
        pl.key_uri = std::string(unquote(attrs->at("URI")));
      }
      if (attrs->contains("IV")) {
        pl.key_iv = parse_iv(attrs->at("IV"));
        if (!pl.key_iv) errors.push_back(where + "IV must be a 128-bit hexadecimal-sequence");
      }
    } else if (starts_with_tag(line, "#EXTINF:")) {
      auto v = tag_value(line, "#EXTINF:");
      auto duration = parse_decimal_float(v.substr(0, v.find(',')));
      if (!duration) {
        errors.push_back(where + "#EXTINF duration must be a decimal number");
        duration = 0;
      } else if (v.find(',') == std::string_view::npos) {
        errors.push_back(where + "#EXTINF needs a trailing comma");
      }
      pending_duration = *duration;
      has_pending = true;
    } else if (line == "#EXT-X-ENDLIST") {
      pl.ended = true;
    } else if (starts_with_tag(line, "#EXT-X-STREAM-INF") ||
               starts_with_tag(line, "#EXT-X-I-FRAME-STREAM-INF")) {
      errors.push_back(where + "master playlist tag in a media playlist");
    }
  }
  if (has_pending) errors.push_back("#EXTINF at end of playlist without a URI");
  if (!seen_target) errors.push_back("missing #EXT-X-TARGETDURATION");
  for (const auto& e : pl.entries) {
    if (std::llround(e.duration) > pl.target_duration) {
      errors.push_back("segment " + e.uri + " is longer than #EXT-X-TARGETDURATION");
    }
  }
  if (pl.key_iv && pl.version < 2) errors.push_back("IV attribute needs #EXT-X-VERSION >= 2");
  return pl;
}

}  // namespace

Iv sequence_iv(std::uint64_t sequence) {
  std::array<std::uint8_t, 16> iv{};
  for (int i = 0; i < 8; ++i) iv[15 - i] = static_cast<std::uint8_t>(sequence >> (8 * i));
  return Iv(iv);
}

Bytes aes128_cbc_encrypt(const HlsKey& key, const Iv& iv, ByteView plaintext) {
  auto ctx = new_ctx();
  Bytes out(plaintext.size() + 16);
  int len1 = 0, len2 = 0;
  if (EVP_EncryptInit_ex(ctx.get(), EVP_aes_128_cbc(), nullptr, key.data(), iv.data()) != 1 ||
      EVP_EncryptUpdate(ctx.get(), out.data(), &len1, plaintext.data(),
                        static_cast<int>(plaintext.size())) != 1 ||
      EVP_EncryptFinal_ex(ctx.get(), out.data() + len1, &len2) != 1) {
    throw std::runtime_error("AES-128-CBC encryption failed");
  }
  out.resize(static_cast<std::size_t>(len1 + len2));
  return out;
}

Bytes aes128_cbc_decrypt(const HlsKey& key, const Iv& iv, ByteView ciphertext) {
  if (ciphertext.empty() || ciphertext.size() % 16 != 0) {
    fail(ErrorCode::PaddingError, "ciphertext is not a whole number of blocks");
  }
  auto ctx = new_ctx();
  Bytes out(ciphertext.size());
  int len1 = 0, len2 = 0;
  if (EVP_DecryptInit_ex(ctx.get(), EVP_aes_128_cbc(), nullptr, key.data(), iv.data()) != 1 ||
      EVP_DecryptUpdate(ctx.get(), out.data(), &len1, ciphertext.data(),
                        static_cast<int>(ciphertext.size())) != 1) {
    throw std::runtime_error("AES-128-CBC decryption failed");
  }
  if (EVP_DecryptFinal_ex(ctx.get(), out.data() + len1, &len2) != 1) {
    fail(ErrorCode::PaddingError, "bad PKCS#7 padding (wrong key or corrupted segment)");
  }
  out.resize(static_cast<std::size_t>(len1 + len2));
  return out;
}

HlsKey derive_hls_key(const SymKey& content_key) {
  constexpr std::string_view kContext = "skyvault-hls-key-v1";
  auto d = digest_concat({as_bytes(kContext), content_key.view()});
  return HlsKey::from(d.view().first(16));
}

HlsPackage package(ByteView media, ByteView key, std::string key_uri,
                   std::size_t segment_bytes, double segment_duration_hint) {
  if (media.empty()) fail(ErrorCode::EmptyMedia, "media must not be empty");
  auto k = key_from(key);
  if (segment_bytes == 0) fail(ErrorCode::InvalidArgument, "segment_bytes must be positive");
  if (!(segment_duration_hint > 0)) {
    fail(ErrorCode::InvalidArgument, "segment duration must be positive");
  }
  if (key_uri.find('"') != std::string::npos || key_uri.find('\n') != std::string::npos) {
    fail(ErrorCode::InvalidArgument, "key URI cannot contain quotes or newlines");
  }

  HlsPackage pkg;
  pkg.key_uri = std::move(key_uri);
  pkg.key = k;
  pkg.segment_duration_hint = segment_duration_hint;

  char extinf[64];
  std::snprintf(extinf, sizeof extinf, "#EXTINF:%.3f,\n", segment_duration_hint);
  std::string text = "#EXTM3U\n#EXT-X-VERSION:3\n";
  text += "#EXT-X-TARGETDURATION:" +
          std::to_string(static_cast<long long>(std::ceil(segment_duration_hint))) + "\n";
  text += "#EXT-X-MEDIA-SEQUENCE:0\n";
  text += "#EXT-X-KEY:METHOD=AES-128,URI=\"" + pkg.key_uri + "\"\n";
  for (std::size_t off = 0, i = 0; off < media.size(); off += segment_bytes, ++i) {
    auto piece = media.subspan(off, std::min(segment_bytes, media.size() - off));
    pkg.segments.push_back({segment_name(i), aes128_cbc_encrypt(k, sequence_iv(i), piece)});
    text += extinf;
    text += pkg.segments.back().name + "\n";
  }
  text += "#EXT-X-ENDLIST\n";
  pkg.media_playlist = std::move(text);
  return pkg;
}

MediaPlaylist parse_media_playlist(std::string_view text) {
  std::vector<std::string> errors;
  auto pl = walk_media(text, errors);
  if (!errors.empty()) fail(ErrorCode::MalformedPlaylist, errors.front());
  return pl;
}

std::vector<std::string> validate_media_playlist(std::string_view text) {
  std::vector<std::string> errors;
  walk_media(text, errors);
  return errors;
}

Bytes unpackage(const HlsPackage& pkg, ByteView key) {
  auto k = key_from(key);
  auto pl = parse_media_playlist(pkg.media_playlist);
  if (pl.key_method != "AES-128") {
    fail(ErrorCode::MalformedPlaylist, "playlist does not declare METHOD=AES-128");
  }
  Bytes out;
  for (std::size_t i = 0; i < pl.entries.size(); ++i) {
    const auto& uri = pl.entries[i].uri;
    auto seg = std::find_if(pkg.segments.begin(), pkg.segments.end(),
                            [&](const Segment& s) { return s.name == uri; });
    if (seg == pkg.segments.end()) fail(ErrorCode::MissingSegment, uri);
    auto iv = pl.key_iv ? *pl.key_iv : sequence_iv(pl.media_sequence + i);
    auto plain = aes128_cbc_decrypt(k, iv, seg->ciphertext);
    out.insert(out.end(), plain.begin(), plain.end());
  }
  return out;
}

MasterPlaylist master_playlist(std::vector<Rendition> renditions) {
  if (renditions.empty()) fail(ErrorCode::NoRenditions, "at least one rendition is required");
  std::sort(renditions.begin(), renditions.end(),
            [](const Rendition& a, const Rendition& b) { return a.bandwidth < b.bandwidth; });
  for (std::size_t i = 0; i < renditions.size(); ++i) {
    if (renditions[i].bandwidth == 0) {
      fail(ErrorCode::InvalidArgument, "bandwidth must be positive");
    }
    if (renditions[i].media_playlist_name.empty() ||
        renditions[i].media_playlist_name.front() == '#' ||
        renditions[i].media_playlist_name.find('\n') != std::string::npos) {
      fail(ErrorCode::InvalidArgument, "invalid media playlist name");
    }
    if (i > 0 && renditions[i].bandwidth == renditions[i - 1].bandwidth) {
      fail(ErrorCode::DuplicateBandwidth,
           "bandwidth " + std::to_string(renditions[i].bandwidth) + " listed twice");
    }
  }
  MasterPlaylist m;
  m.text = "#EXTM3U\n#EXT-X-VERSION:3\n";
  for (const auto& r : renditions) {
    m.text += "#EXT-X-STREAM-INF:BANDWIDTH=" + std::to_string(r.bandwidth) + "\n";
    m.text += r.media_playlist_name + "\n";
  }
  m.renditions = std::move(renditions);
  return m;
}

std::vector<std::string> validate_master_playlist(std::string_view text) {
  std::vector<std::string> errors;
  auto lines = split_lines(text);
  if (lines.empty() || lines.front() != "#EXTM3U") {
    errors.push_back("first line must be #EXTM3U");
    return errors;
  }
  bool expect_uri = false, seen_version = false;
  std::size_t streams = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto line = lines[i];
    auto where = "line " + std::to_string(i + 1) + ": ";
    if (line.empty()) continue;
    if (line.front() != '#') {
      if (!expect_uri) errors.push_back(where + "URI without a preceding #EXT-X-STREAM-INF");
      expect_uri = false;
      continue;
    }
    if (!line.starts_with("#EXT")) continue;
    if (expect_uri) {
      errors.push_back(where + "#EXT-X-STREAM-INF must be followed by its URI");
      expect_uri = false;
    }
    if (starts_with_tag(line, "#EXT-X-VERSION:")) {
      auto v = parse_u64(tag_value(line, "#EXT-X-VERSION:"));
      if (seen_version) errors.push_back(where + "#EXT-X-VERSION repeated");
      if (!v || *v == 0) errors.push_back(where + "#EXT-X-VERSION needs a positive integer");
      seen_version = true;
    } else if (starts_with_tag(line, "#EXT-X-STREAM-INF:")) {
      auto attrs = parse_attributes(tag_value(line, "#EXT-X-STREAM-INF:"));
      if (!attrs || !attrs->contains("BANDWIDTH") || !parse_u64(attrs->at("BANDWIDTH"))) {
        errors.push_back(where + "#EXT-X-STREAM-INF needs a decimal-integer BANDWIDTH");
      }
      expect_uri = true;
      ++streams;
    } else if (starts_with_tag(line, "#EXTINF") ||
               starts_with_tag(line, "#EXT-X-TARGETDURATION") ||
               starts_with_tag(line, "#EXT-X-MEDIA-SEQUENCE") ||
               line == "#EXT-X-ENDLIST") {
      errors.push_back(where + "media playlist tag in a master playlist");
    }
  }
  if (expect_uri) errors.push_back("#EXT-X-STREAM-INF at end of playlist without a URI");
  if (streams == 0) errors.push_back("master playlist lists no variant streams");
  return errors;
}

void write_package(const HlsPackage& pkg, const fs::path& dir) {
  fs::create_directories(dir);
  write_file(dir / "playlist.m3u8", std::string_view(pkg.media_playlist));
  for (const auto& s : pkg.segments) write_file(dir / s.name, s.ciphertext);
}

HlsPackage read_package(const fs::path& dir) {
  HlsPackage pkg;
  pkg.media_playlist = to_string(read_file(dir / "playlist.m3u8"));
  auto pl = parse_media_playlist(pkg.media_playlist);
  pkg.key_uri = pl.key_uri;
  if (!pl.entries.empty()) pkg.segment_duration_hint = pl.entries.front().duration;
  for (const auto& e : pl.entries) {
    // Segment URIs are plain relative names; anything else stays unresolved.
    if (e.uri.find('/') != std::string::npos || e.uri.find("..") != std::string::npos) continue;
    auto path = dir / e.uri;
    if (fs::exists(path)) pkg.segments.push_back({e.uri, read_file(path)});
  }
  return pkg;
}

void write_master(const MasterPlaylist& master, const fs::path& dir) {
  fs::create_directories(dir);
  write_file(dir / "master.m3u8", std::string_view(master.text));
}

}  // namespace skyvault::hls
