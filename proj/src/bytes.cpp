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

#include "skyvault/bytes.hpp"

#include <sodium.h>

#include <fstream>
#include <functional>
#include <iterator>

#include "skyvault/error.hpp"

namespace skyvault {

Bytes concat(std::initializer_list<ByteView> parts) {
  std::size_t total = 0;
  for (auto p : parts) total += p.size();
  Bytes out;
  out.reserve(total);
  for (auto p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

std::string hex_encode(ByteView data) {
  std::string out(data.size() * 2 + 1, '\0');
  sodium_bin2hex(out.data(), out.size(), data.data(), data.size());
  out.pop_back();
  return out;
}

Bytes hex_decode(std::string_view text) {
  if (text.size() % 2 != 0) fail(ErrorCode::DecodeError, "odd-length hex string");
  Bytes out(text.size() / 2);
  std::size_t len = 0;
  const char* end = nullptr;
  if (sodium_hex2bin(out.data(), out.size(), text.data(), text.size(), nullptr,
                     &len, &end) != 0 ||
      len != out.size() || end != text.data() + text.size()) {
    fail(ErrorCode::DecodeError, "invalid hex string");
  }
  return out;
}

namespace {
constexpr int kB64Variant = sodium_base64_VARIANT_URLSAFE_NO_PADDING;
}

std::string b64url_encode(ByteView data) {
  std::string out(sodium_base64_encoded_len(data.size(), kB64Variant), '\0');
  sodium_bin2base64(out.data(), out.size(), data.data(), data.size(), kB64Variant);
  out.resize(out.size() - 1);
  return out;
}

Bytes b64url_decode(std::string_view text) {
  Bytes out(text.size() * 3 / 4 + 3);
  std::size_t len = 0;
  const char* end = nullptr;
  if (sodium_base642bin(out.data(), out.size(), text.data(), text.size(), nullptr,
                        &len, &end, kB64Variant) != 0 ||
      end != text.data() + text.size()) {
    fail(ErrorCode::DecodeError, "invalid base64url string");
  }
  out.resize(len);
  return out;
}

bool contains(ByteView haystack, ByteView needle) {
  if (needle.empty()) return true;
  return std::search(haystack.begin(), haystack.end(),
                     std::boyer_moore_horspool_searcher(needle.begin(),
                                                        needle.end())) !=
         haystack.end();
}

ByteWriter& ByteWriter::u8(std::uint8_t v) {
  buf_.push_back(v);
  return *this;
}

ByteWriter& ByteWriter::u32(std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8)
    buf_.push_back(static_cast<std::uint8_t>(v >> shift));
  return *this;
}

ByteWriter& ByteWriter::u64(std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8)
    buf_.push_back(static_cast<std::uint8_t>(v >> shift));
  return *this;
}

ByteWriter& ByteWriter::fixed(ByteView v) {
  buf_.insert(buf_.end(), v.begin(), v.end());
  return *this;
}

ByteWriter& ByteWriter::var(ByteView v) {
  if (v.size() > UINT32_MAX) fail(ErrorCode::InvalidArgument, "field too large");
  u32(static_cast<std::uint32_t>(v.size()));
  return fixed(v);
}

ByteView ByteReader::take(std::size_t n) {
  if (n > remaining()) fail(ErrorCode::DecodeError, "truncated record");
  auto out = data_.subspan(pos_, n);
  pos_ += n;
  return out;
}

std::uint8_t ByteReader::u8() { return take(1)[0]; }

std::uint32_t ByteReader::u32() {
  auto b = take(4);
  std::uint32_t v = 0;
  for (auto x : b) v = (v << 8) | x;
  return v;
}

std::uint64_t ByteReader::u64() {
  auto b = take(8);
  std::uint64_t v = 0;
  for (auto x : b) v = (v << 8) | x;
  return v;
}

Bytes ByteReader::fixed(std::size_t n) {
  auto b = take(n);
  return {b.begin(), b.end()};
}

Bytes ByteReader::var() { return fixed(u32()); }

std::string ByteReader::str() {
  auto b = take(u32());
  return to_string(b);
}

void ByteReader::expect_done() const {
  if (!done()) fail(ErrorCode::DecodeError, "trailing bytes after record");
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, ByteView data) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoError, "cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
    if (!out) fail(ErrorCode::IoError, "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace skyvault
