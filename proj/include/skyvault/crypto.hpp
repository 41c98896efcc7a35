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

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "skyvault/bytes.hpp"
#include "skyvault/error.hpp"

namespace skyvault {

// Fixed-length octet string tagged by role so digests, keys and signatures
// cannot be mixed up at call sites.
template <std::size_t N, typename Tag>
class FixedBytes {
 public:
  static constexpr std::size_t kSize = N;

  FixedBytes() = default;
  explicit FixedBytes(const std::array<std::uint8_t, N>& bytes) : bytes_(bytes) {}

  // Throws Error(code) unless `data` is exactly N octets.
  static FixedBytes from(ByteView data, ErrorCode code = ErrorCode::DecodeError);
  static FixedBytes from_hex(std::string_view text) { return from(hex_decode(text)); }
  static FixedBytes from_b64url(std::string_view text, ErrorCode code = ErrorCode::DecodeError) {
    return from(b64url_decode(text), code);
  }

  ByteView view() const noexcept { return bytes_; }
  const std::uint8_t* data() const noexcept { return bytes_.data(); }
  std::uint8_t* data() noexcept { return bytes_.data(); }
  constexpr std::size_t size() const noexcept { return N; }
  std::uint8_t operator[](std::size_t i) const noexcept { return bytes_[i]; }
  const std::array<std::uint8_t, N>& array() const noexcept { return bytes_; }

  std::string hex() const { return hex_encode(bytes_); }
  std::string b64url() const { return b64url_encode(bytes_); }

  friend auto operator<=>(const FixedBytes&, const FixedBytes&) = default;

 private:
  std::array<std::uint8_t, N> bytes_{};
};

template <std::size_t N, typename Tag>
FixedBytes<N, Tag> FixedBytes<N, Tag>::from(ByteView data, ErrorCode code) {
  if (data.size() != N) {
    throw Error(code, "expected " + std::to_string(N) + " octets, got " +
                          std::to_string(data.size()));
  }
  std::array<std::uint8_t, N> a{};
  std::copy(data.begin(), data.end(), a.begin());
  return FixedBytes(a);
}

using Digest = FixedBytes<32, struct DigestTag>;
using PublicKey = FixedBytes<32, struct PublicKeyTag>;
using PrivateKey = FixedBytes<32, struct PrivateKeyTag>;
using SymKey = FixedBytes<32, struct SymKeyTag>;
using Signature = FixedBytes<64, struct SignatureTag>;
using Nonce = FixedBytes<12, struct NonceTag>;

struct DigestHash {
  std::size_t operator()(const Digest& d) const noexcept {
    std::size_t h = 0;
    for (std::size_t i = 0; i < sizeof(h); ++i) h = (h << 8) | d[i];
    return h;
  }
};

struct KeyPair {
  PublicKey public_key;
  PrivateKey private_key;
};

// Ephemeral-key hybrid encryption output: an X25519 ephemeral public key, the
// AEAD nonce and the ChaCha20-Poly1305 ciphertext (tag appended).
struct Envelope {
  Bytes ephemeral_public;
  Bytes nonce;
  Bytes ciphertext;

  Bytes serialize() const;
  static Envelope parse(ByteView data);
  friend bool operator==(const Envelope&, const Envelope&) = default;
};

struct Credential {
  std::string id;
  Digest verifier;
};

// Idempotent libsodium initialisation; every entry point below calls it.
void ensure_crypto_initialized();

Bytes random_bytes(std::size_t n);

template <typename T>
T random_fixed() {
  auto b = random_bytes(T::kSize);
  return T::from(b);
}

// SHA-256.
Digest digest(ByteView data);
inline Digest digest(std::string_view data) { return digest(as_bytes(data)); }
Digest digest_concat(std::initializer_list<ByteView> parts);

// verifier = SHA-256(password || SHA-256(id)).
Credential derive_credential(std::string_view id, std::string_view password);

// With a seed the keypair is a pure function of it; without, the seed comes
// from the system CSPRNG.
KeyPair generate_keypair(std::optional<ByteView> seed = std::nullopt);

Envelope seal(const PublicKey& recipient, ByteView plaintext);
// Throws Error(OpenFailed) for a foreign key or any tampering.
Bytes open(const PrivateKey& recipient, const Envelope& envelope);

// Authenticated symmetric encryption (ChaCha20-Poly1305, 16-octet tag).
Bytes sym_encrypt(const SymKey& key, const Nonce& nonce, ByteView plaintext);
// Throws Error(AuthFailed) for a wrong key, nonce or modified ciphertext.
Bytes sym_decrypt(const SymKey& key, const Nonce& nonce, ByteView ciphertext);

// Ed25519 (deterministic).
Signature sign(const PrivateKey& key, ByteView message);
bool verify(const PublicKey& key, ByteView message, const Signature& sig) noexcept;

// 12-octet big-endian encoding of a counter, used as a per-chunk nonce.
Nonce counter_nonce(std::uint64_t counter);

}  // namespace skyvault
