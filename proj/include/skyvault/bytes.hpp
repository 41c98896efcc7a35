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

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace skyvault {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline ByteView as_bytes(std::string_view s) noexcept {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

inline Bytes to_bytes(std::string_view s) {
  auto v = as_bytes(s);
  return {v.begin(), v.end()};
}

inline std::string to_string(ByteView b) {
  return {reinterpret_cast<const char*>(b.data()), b.size()};
}

Bytes concat(std::initializer_list<ByteView> parts);

// Lowercase hex.
std::string hex_encode(ByteView data);
Bytes hex_decode(std::string_view text);

// RFC 4648 base64url without padding.
std::string b64url_encode(ByteView data);
Bytes b64url_decode(std::string_view text);

// True iff `needle` occurs as a contiguous run inside `haystack`.
bool contains(ByteView haystack, ByteView needle);

// Append-only builder for the canonical binary encodings: integers are
// big-endian fixed width, variable-length fields carry a u32 length prefix.
class ByteWriter {
 public:
  ByteWriter& u8(std::uint8_t v);
  ByteWriter& u32(std::uint32_t v);
  ByteWriter& u64(std::uint64_t v);
  ByteWriter& i64(std::int64_t v) { return u64(static_cast<std::uint64_t>(v)); }
  ByteWriter& fixed(ByteView v);
  ByteWriter& var(ByteView v);
  ByteWriter& str(std::string_view s) { return var(as_bytes(s)); }

  const Bytes& bytes() const& noexcept { return buf_; }
  Bytes bytes() && noexcept { return std::move(buf_); }

 private:
  Bytes buf_;
};

// Cursor over a canonical encoding. Every read is bounds checked and throws
// Error(DecodeError) on truncation.
class ByteReader {
 public:
  explicit ByteReader(ByteView data) noexcept : data_(data) {}

  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  Bytes fixed(std::size_t n);
  template <std::size_t N>
  std::array<std::uint8_t, N> array() {
    std::array<std::uint8_t, N> out{};
    auto b = take(N);
    std::copy(b.begin(), b.end(), out.begin());
    return out;
  }
  Bytes var();
  std::string str();

  std::size_t remaining() const noexcept { return data_.size() - pos_; }
  std::size_t position() const noexcept { return pos_; }
  bool done() const noexcept { return remaining() == 0; }
  // Throws DecodeError unless the whole input was consumed.
  void expect_done() const;

 private:
  ByteView take(std::size_t n);

  ByteView data_;
  std::size_t pos_ = 0;
};

Bytes read_file(const std::filesystem::path& path);
// Writes via a sibling temp file and rename so readers never see a torn file.
void write_file(const std::filesystem::path& path, ByteView data);
inline void write_file(const std::filesystem::path& path, std::string_view text) {
  write_file(path, as_bytes(text));
}

}  // namespace skyvault
