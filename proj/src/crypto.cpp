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

#include "skyvault/crypto.hpp"

#include <sodium.h>

#include <mutex>

#include "skyvault/error.hpp"

namespace skyvault {

namespace {

constexpr std::string_view kSealContext = "skyvault-seal-v1";

struct Curve25519Pair {
  std::array<std::uint8_t, crypto_scalarmult_BYTES> public_key{};
  std::array<std::uint8_t, crypto_scalarmult_SCALARBYTES> secret_key{};
  ~Curve25519Pair() { sodium_memzero(secret_key.data(), secret_key.size()); }
};

std::array<std::uint8_t, crypto_sign_SECRETKEYBYTES> expand_signing_key(
    const PrivateKey& key, std::array<std::uint8_t, crypto_sign_PUBLICKEYBYTES>* pk) {
  std::array<std::uint8_t, crypto_sign_SECRETKEYBYTES> sk{};
  std::array<std::uint8_t, crypto_sign_PUBLICKEYBYTES> unused{};
  crypto_sign_seed_keypair(pk ? pk->data() : unused.data(), sk.data(), key.data());
  return sk;
}

std::array<std::uint8_t, crypto_scalarmult_BYTES> to_curve_public(const PublicKey& key) {
  std::array<std::uint8_t, crypto_scalarmult_BYTES> out{};
  if (crypto_sign_ed25519_pk_to_curve25519(out.data(), key.data()) != 0) {
    fail(ErrorCode::BadKeyLength, "public key is not a valid curve point");
  }
  return out;
}

SymKey seal_key(ByteView shared, ByteView ephemeral_public, ByteView recipient_public) {
  return SymKey(digest_concat({as_bytes(kSealContext), shared, ephemeral_public,
                               recipient_public})
                    .array());
}

}  // namespace

void ensure_crypto_initialized() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0) throw std::runtime_error("libsodium failed to initialise");
  });
}

Bytes random_bytes(std::size_t n) {
  ensure_crypto_initialized();
  Bytes out(n);
  randombytes_buf(out.data(), out.size());
  return out;
}

Digest digest(ByteView data) {
  ensure_crypto_initialized();
  std::array<std::uint8_t, crypto_hash_sha256_BYTES> out{};
  crypto_hash_sha256(out.data(), data.data(), data.size());
  return Digest(out);
}

Digest digest_concat(std::initializer_list<ByteView> parts) {
  ensure_crypto_initialized();
  crypto_hash_sha256_state st;
  crypto_hash_sha256_init(&st);
  for (auto p : parts) crypto_hash_sha256_update(&st, p.data(), p.size());
  std::array<std::uint8_t, crypto_hash_sha256_BYTES> out{};
  crypto_hash_sha256_final(&st, out.data());
  return Digest(out);
}

Credential derive_credential(std::string_view id, std::string_view password) {
  if (id.empty()) fail(ErrorCode::EmptyIdentifier, "identifier must not be empty");
  if (password.empty()) fail(ErrorCode::EmptyPassword, "password must not be empty");
  auto id_hash = digest(id);
  return {std::string(id), digest_concat({as_bytes(password), id_hash.view()})};
}

KeyPair generate_keypair(std::optional<ByteView> seed) {
  ensure_crypto_initialized();
  PrivateKey sk;
  if (seed) {
    sk = PrivateKey::from(*seed, ErrorCode::BadSeedLength);
  } else {
    randombytes_buf(sk.data(), sk.size());
  }
  std::array<std::uint8_t, crypto_sign_PUBLICKEYBYTES> pk{};
  auto expanded = expand_signing_key(sk, &pk);
  sodium_memzero(expanded.data(), expanded.size());
  return {PublicKey(pk), sk};
}

Bytes Envelope::serialize() const {
  return ByteWriter().var(ephemeral_public).var(nonce).var(ciphertext).bytes();
}

Envelope Envelope::parse(ByteView data) {
  ByteReader r(data);
  Envelope env;
  env.ephemeral_public = r.var();
  env.nonce = r.var();
  env.ciphertext = r.var();
  r.expect_done();
  return env;
}

Envelope seal(const PublicKey& recipient, ByteView plaintext) {
  ensure_crypto_initialized();
  auto recipient_curve = to_curve_public(recipient);

  Curve25519Pair eph;
  crypto_box_keypair(eph.public_key.data(), eph.secret_key.data());
  std::array<std::uint8_t, crypto_scalarmult_BYTES> shared{};
  if (crypto_scalarmult(shared.data(), eph.secret_key.data(), recipient_curve.data()) != 0) {
    fail(ErrorCode::BadKeyLength, "public key is a low-order point");
  }
  auto key = seal_key(shared, eph.public_key, recipient_curve);
  sodium_memzero(shared.data(), shared.size());

  Envelope env;
  env.ephemeral_public.assign(eph.public_key.begin(), eph.public_key.end());
  env.nonce = random_bytes(crypto_aead_chacha20poly1305_ietf_NPUBBYTES);
  env.ciphertext.resize(plaintext.size() + crypto_aead_chacha20poly1305_ietf_ABYTES);
  unsigned long long clen = 0;
  crypto_aead_chacha20poly1305_ietf_encrypt(
      env.ciphertext.data(), &clen, plaintext.data(), plaintext.size(),
      env.ephemeral_public.data(), env.ephemeral_public.size(), nullptr,
      env.nonce.data(), key.data());
  env.ciphertext.resize(clen);
  return env;
}

Bytes open(const PrivateKey& recipient, const Envelope& env) {
  ensure_crypto_initialized();
  if (env.ephemeral_public.size() != crypto_scalarmult_BYTES ||
      env.nonce.size() != crypto_aead_chacha20poly1305_ietf_NPUBBYTES ||
      env.ciphertext.size() < crypto_aead_chacha20poly1305_ietf_ABYTES) {
    fail(ErrorCode::OpenFailed, "malformed envelope");
  }
  std::array<std::uint8_t, crypto_sign_PUBLICKEYBYTES> ed_pk{};
  auto ed_sk = expand_signing_key(recipient, &ed_pk);
  Curve25519Pair mine;
  crypto_sign_ed25519_sk_to_curve25519(mine.secret_key.data(), ed_sk.data());
  sodium_memzero(ed_sk.data(), ed_sk.size());
  crypto_scalarmult_base(mine.public_key.data(), mine.secret_key.data());

  std::array<std::uint8_t, crypto_scalarmult_BYTES> shared{};
  if (crypto_scalarmult(shared.data(), mine.secret_key.data(),
                        env.ephemeral_public.data()) != 0) {
    fail(ErrorCode::OpenFailed, "envelope ephemeral key is invalid");
  }
  auto key = seal_key(shared, env.ephemeral_public, mine.public_key);
  sodium_memzero(shared.data(), shared.size());

  Bytes out(env.ciphertext.size() - crypto_aead_chacha20poly1305_ietf_ABYTES);
  unsigned long long mlen = 0;
  if (crypto_aead_chacha20poly1305_ietf_decrypt(
          out.data(), &mlen, nullptr, env.ciphertext.data(), env.ciphertext.size(),
          env.ephemeral_public.data(), env.ephemeral_public.size(), env.nonce.data(),
          key.data()) != 0) {
    fail(ErrorCode::OpenFailed, "envelope does not open with this key");
  }
  out.resize(mlen);
  return out;
}

Bytes sym_encrypt(const SymKey& key, const Nonce& nonce, ByteView plaintext) {
  ensure_crypto_initialized();
  Bytes out(plaintext.size() + crypto_aead_chacha20poly1305_ietf_ABYTES);
  unsigned long long clen = 0;
  crypto_aead_chacha20poly1305_ietf_encrypt(out.data(), &clen, plaintext.data(),
                                            plaintext.size(), nullptr, 0, nullptr,
                                            nonce.data(), key.data());
  out.resize(clen);
  return out;
}

Bytes sym_decrypt(const SymKey& key, const Nonce& nonce, ByteView ciphertext) {
  ensure_crypto_initialized();
  if (ciphertext.size() < crypto_aead_chacha20poly1305_ietf_ABYTES) {
    fail(ErrorCode::AuthFailed, "ciphertext shorter than the authentication tag");
  }
  Bytes out(ciphertext.size() - crypto_aead_chacha20poly1305_ietf_ABYTES);
  unsigned long long mlen = 0;
  if (crypto_aead_chacha20poly1305_ietf_decrypt(out.data(), &mlen, nullptr,
                                                ciphertext.data(), ciphertext.size(),
                                                nullptr, 0, nonce.data(),
                                                key.data()) != 0) {
    fail(ErrorCode::AuthFailed, "ciphertext failed authentication");
  }
  out.resize(mlen);
  return out;
}

Signature sign(const PrivateKey& key, ByteView message) {
  ensure_crypto_initialized();
  auto sk = expand_signing_key(key, nullptr);
  std::array<std::uint8_t, crypto_sign_BYTES> sig{};
  crypto_sign_detached(sig.data(), nullptr, message.data(), message.size(), sk.data());
  sodium_memzero(sk.data(), sk.size());
  return Signature(sig);
}

bool verify(const PublicKey& key, ByteView message, const Signature& sig) noexcept {
  ensure_crypto_initialized();
  return crypto_sign_verify_detached(sig.data(), message.data(), message.size(),
                                     key.data()) == 0;
}

Nonce counter_nonce(std::uint64_t counter) {
  std::array<std::uint8_t, Nonce::kSize> n{};
  for (int i = 0; i < 8; ++i) {
    n[Nonce::kSize - 1 - i] = static_cast<std::uint8_t>(counter >> (8 * i));
  }
  return Nonce(n);
}

}  // namespace skyvault
