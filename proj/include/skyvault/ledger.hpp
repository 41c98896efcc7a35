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
#include <deque>
#include <filesystem>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <vector>

#include "skyvault/clock.hpp"
#include "skyvault/crypto.hpp"

namespace skyvault {

// A public transaction. It commits to the consumer's secret block and the
// purchased content by digest only; identities appear as key fingerprints.
struct Transaction {
  Digest tx_id;
  Digest consumer_key_fingerprint;
  Digest provider_key_fingerprint;
  Digest content_commitment;
  Digest secret_commitment;
  UnixSeconds timestamp = 0;
  PublicKey provider_public_key;
  Signature provider_signature;

  // u8 version | 4 x digest[32] | i64 timestamp. tx_id = SHA-256(body).
  Bytes body_bytes() const;
  Digest compute_id() const { return digest(body_bytes()); }

  // tx_id | body | provider_public_key | provider_signature.
  Bytes serialize() const;
  static Transaction parse(ByteView data);

  friend bool operator==(const Transaction&, const Transaction&) = default;
};

// Builds, identifies and signs a transaction for `provider`.
Transaction make_transaction(const KeyPair& provider, const PublicKey& consumer_public,
                             const Digest& content_commitment,
                             const Digest& secret_commitment, UnixSeconds timestamp);

struct Block {
  std::uint64_t height = 0;
  Digest prev_hash;
  std::vector<Digest> tx_ids;
  Digest tx_root;
  UnixSeconds timestamp = 0;
  std::uint32_t difficulty = 0;
  std::uint64_t nonce = 0;
  Digest block_hash;
  std::vector<Transaction> transactions;

  // u8 version | u64 height | prev_hash | tx_root | i64 timestamp |
  // u32 difficulty | u64 nonce. block_hash = SHA-256(header).
  Bytes header_bytes() const;
  Digest compute_hash() const { return digest(header_bytes()); }

  // header | block_hash | u32 n | n x var(transaction record).
  Bytes serialize() const;
  static Block parse(ByteView data);

  friend bool operator==(const Block&, const Block&) = default;
};

// SHA-256 over the concatenated tx ids.
Digest compute_tx_root(const std::vector<Digest>& tx_ids);
unsigned leading_zero_bits(const Digest& d) noexcept;

struct VerifyResult {
  std::optional<std::uint64_t> first_bad_height;

  bool ok() const noexcept { return !first_bad_height.has_value(); }
};

// Checks heights, linkage, header hashes, difficulty, tx roots and every
// embedded transaction's id, fingerprint and signature. Needs nothing beyond
// the public blocks.
VerifyResult verify_blocks(const std::vector<Block>& blocks, std::uint32_t difficulty);

struct InclusionProof {
  std::uint64_t height = 0;
  std::uint64_t position = 0;
};

struct ChainConfig {
  std::uint32_t difficulty = 8;
  std::int64_t timestamp_window = 900;
};

// Single-node proof-of-work chain. Submission and mining take the exclusive
// lock; verification and lookups share it.
class Chain {
 public:
  Chain(ChainConfig config, Clock clock);

  // Errors: MalformedTransaction, BadSignature, StaleTimestamp,
  // DuplicateTransaction.
  Digest submit_transaction(const Transaction& tx, const PublicKey& provider_public);
  // Errors: NothingToMine.
  Block mine_block();

  VerifyResult verify() const;
  // Errors: UnknownTransaction.
  InclusionProof prove_inclusion(const Digest& tx_id) const;
  bool confirm_secret(const Digest& tx_id, ByteView secret_block_bytes) const;
  std::optional<Transaction> find_transaction(const Digest& tx_id) const;

  Digest tip_hash() const;
  std::uint32_t difficulty() const noexcept { return config_.difficulty; }
  std::vector<Block> blocks() const;
  std::vector<Transaction> pending() const;
  std::size_t height() const;
  std::uint64_t last_mining_trials() const;

  // "SKVCHAIN" | u8 version | u32 difficulty, then per block u32 length |
  // block record. The file form is append-only.
  Bytes serialize() const;
  static std::unique_ptr<Chain> parse(ByteView data, Clock clock,
                                      std::int64_t timestamp_window = 900);
  void save(const std::filesystem::path& path) const;
  // Appends one block record, writing the file header if the file is new.
  static void append_block(const std::filesystem::path& path, const Block& block,
                           std::uint32_t difficulty);
  static std::unique_ptr<Chain> load(const std::filesystem::path& path, Clock clock,
                                     std::uint32_t default_difficulty = 8);

 private:
  const Transaction* find_locked(const Digest& tx_id) const;

  ChainConfig config_;
  Clock clock_;
  mutable std::shared_mutex mu_;
  std::vector<Block> blocks_;
  std::deque<Transaction> pending_;
  std::uint64_t last_trials_ = 0;
};

// Verdict on a serialized chain read cold. A record that fails to parse is
// reported as the first bad height.
VerifyResult verify_chain_bytes(ByteView data);

}  // namespace skyvault
