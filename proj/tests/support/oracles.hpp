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

// Independent reference implementations used to cross-check the library.
// None of these call into skyvault's own crypto: hashing and block ciphers
// come from OpenSSL directly, and rights are decided by enumeration.

#include <openssl/evp.h>

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace oracle {

using Octets = std::vector<std::uint8_t>;

inline Octets sha256(const std::uint8_t* data, std::size_t n) {
  Octets out(32);
  unsigned int len = 0;
  if (EVP_Digest(data, n, out.data(), &len, EVP_sha256(), nullptr) != 1 || len != 32) {
    throw std::runtime_error("EVP_Digest failed");
  }
  return out;
}

template <typename Range>
Octets sha256(const Range& r) {
  return sha256(reinterpret_cast<const std::uint8_t*>(r.data()), r.size());
}

inline std::string hex(const Octets& b) {
  static const char* digits = "0123456789abcdef";
  std::string s;
  for (auto c : b) {
    s += digits[c >> 4];
    s += digits[c & 15];
  }
  return s;
}

// AES-128 single-block primitive; CBC chaining and PKCS#7 removal are done
// by hand below so the library's EVP CBC path is not reused.
inline std::array<std::uint8_t, 16> aes128_ecb_decrypt_block(const std::uint8_t* key,
                                                             const std::uint8_t* block) {
  std::array<std::uint8_t, 16> out{};
  EVP_CIPHER_CTX* ctx = EVP_CIPHER_CTX_new();
  int len = 0;
  bool ok = EVP_DecryptInit_ex(ctx, EVP_aes_128_ecb(), nullptr, key, nullptr) == 1 &&
            EVP_CIPHER_CTX_set_padding(ctx, 0) == 1 &&
            EVP_DecryptUpdate(ctx, out.data(), &len, block, 16) == 1 && len == 16;
  EVP_CIPHER_CTX_free(ctx);
  if (!ok) throw std::runtime_error("AES-ECB block decrypt failed");
  return out;
}

// Returns nullopt on bad length or bad padding.
inline std::optional<Octets> cbc_decrypt(const Octets& key, const Octets& iv, const Octets& ct) {
  if (key.size() != 16 || iv.size() != 16 || ct.empty() || ct.size() % 16 != 0) return std::nullopt;
  Octets out;
  out.reserve(ct.size());
  const std::uint8_t* prev = iv.data();
  for (std::size_t off = 0; off < ct.size(); off += 16) {
    auto block = aes128_ecb_decrypt_block(key.data(), ct.data() + off);
    for (int i = 0; i < 16; ++i) out.push_back(block[i] ^ prev[i]);
    prev = ct.data() + off;
  }
  std::uint8_t pad = out.back();
  if (pad == 0 || pad > 16) return std::nullopt;
  for (std::size_t i = out.size() - pad; i < out.size(); ++i) {
    if (out[i] != pad) return std::nullopt;
  }
  out.resize(out.size() - pad);
  return out;
}

// HLS default IV: the media sequence number as a 128-bit big-endian integer.
inline Octets sequence_iv(std::uint64_t seq) {
  Octets iv(16, 0);
  for (int i = 0; i < 8; ++i) iv[15 - i] = static_cast<std::uint8_t>(seq >> (8 * i));
  return iv;
}

// Brute-force license evaluator over a small discrete universe: it lists
// every permitted (action, time, prior-uses) triple and answers membership.
// Only meaningful for times in [0, kTimeSpan) and uses in [0, kUseSpan).
struct RightsUniverse {
  static constexpr std::int64_t kTimeSpan = 64;
  static constexpr std::uint64_t kUseSpan = 12;

  std::set<std::tuple<int, std::int64_t, std::uint64_t>> permitted;

  RightsUniverse(const std::set<int>& actions, std::int64_t not_before, std::int64_t not_after,
                 std::optional<std::uint64_t> max_uses) {
    for (int a : actions) {
      for (std::int64_t t = 0; t < kTimeSpan; ++t) {
        bool in_window = false;
        for (std::int64_t w = not_before; w <= not_after; ++w) {
          if (w == t) in_window = true;
        }
        if (!in_window) continue;
        for (std::uint64_t u = 0; u < kUseSpan; ++u) {
          std::uint64_t remaining = max_uses ? *max_uses : kUseSpan + 1;
          if (u + 1 <= remaining) permitted.emplace(a, t, u);
        }
      }
    }
  }

  bool allows(int action, std::int64_t t, std::uint64_t uses) const {
    return permitted.count({action, t, uses}) != 0;
  }
};

}  // namespace oracle
