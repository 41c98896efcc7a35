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

#include "skyvault/ledger.hpp"

#include <bit>
#include <fstream>
#include <mutex>
#include <set>

#include "skyvault/error.hpp"

namespace skyvault {

namespace {

constexpr std::uint8_t kTxVersion = 1;
constexpr std::uint8_t kBlockVersion = 1;
constexpr std::uint8_t kChainVersion = 1;
constexpr std::string_view kChainMagic = "SKVCHAIN";

Bytes chain_file_header(std::uint32_t difficulty) {
  return ByteWriter().fixed(as_bytes(kChainMagic)).u8(kChainVersion).u32(difficulty).bytes();
}

std::uint32_t read_chain_header(ByteReader& r) {
  auto magic = r.fixed(kChainMagic.size());
  if (to_string(magic) != kChainMagic) fail(ErrorCode::DecodeError, "not a chain file");
  if (r.u8() != kChainVersion) fail(ErrorCode::DecodeError, "unknown chain version");
  return r.u32();
}

Bytes block_record(const Block& b) {
  auto rec = b.serialize();
  return ByteWriter().var(rec).bytes();
}

// Mirrors submit-time checks that do not depend on the clock.
bool transaction_well_formed(const Transaction& tx) {
  return tx.compute_id() == tx.tx_id &&
         digest(tx.provider_public_key.view()) == tx.provider_key_fingerprint &&
         verify(tx.provider_public_key, tx.body_bytes(), tx.provider_signature);
}

}  // namespace

Bytes Transaction::body_bytes() const {
  return ByteWriter()
      .u8(kTxVersion)
      .fixed(consumer_key_fingerprint.view())
      .fixed(provider_key_fingerprint.view())
      .fixed(content_commitment.view())
      .fixed(secret_commitment.view())
      .i64(timestamp)
      .bytes();
}

Bytes Transaction::serialize() const {
  return ByteWriter()
      .fixed(tx_id.view())
      .fixed(body_bytes())
      .fixed(provider_public_key.view())
      .fixed(provider_signature.view())
      .bytes();
}

Transaction Transaction::parse(ByteView data) {
  ByteReader r(data);
  Transaction tx;
  tx.tx_id = Digest(r.array<32>());
  if (r.u8() != kTxVersion) fail(ErrorCode::DecodeError, "unknown transaction version");
  tx.consumer_key_fingerprint = Digest(r.array<32>());
  tx.provider_key_fingerprint = Digest(r.array<32>());
  tx.content_commitment = Digest(r.array<32>());
  tx.secret_commitment = Digest(r.array<32>());
  tx.timestamp = r.i64();
  tx.provider_public_key = PublicKey(r.array<32>());
  tx.provider_signature = Signature(r.array<64>());
  r.expect_done();
  return tx;
}

Transaction make_transaction(const KeyPair& provider, const PublicKey& consumer_public,
                             const Digest& content_commitment,
                             const Digest& secret_commitment, UnixSeconds timestamp) {
  Transaction tx;
  tx.consumer_key_fingerprint = digest(consumer_public.view());
  tx.provider_key_fingerprint = digest(provider.public_key.view());
  tx.content_commitment = content_commitment;
  tx.secret_commitment = secret_commitment;
  tx.timestamp = timestamp;
  tx.provider_public_key = provider.public_key;
  tx.tx_id = tx.compute_id();
  tx.provider_signature = sign(provider.private_key, tx.body_bytes());
  return tx;
}

Bytes Block::header_bytes() const {
  return ByteWriter()
      .u8(kBlockVersion)
      .u64(height)
      .fixed(prev_hash.view())
      .fixed(tx_root.view())
      .i64(timestamp)
      .u32(difficulty)
      .u64(nonce)
      .bytes();
}

Bytes Block::serialize() const {
  ByteWriter w;
  w.fixed(header_bytes()).fixed(block_hash.view());
  w.u32(static_cast<std::uint32_t>(transactions.size()));
  for (const auto& tx : transactions) w.var(tx.serialize());
  return std::move(w).bytes();
}

Block Block::parse(ByteView data) {
  ByteReader r(data);
  Block b;
  if (r.u8() != kBlockVersion) fail(ErrorCode::DecodeError, "unknown block version");
  b.height = r.u64();
  b.prev_hash = Digest(r.array<32>());
  b.tx_root = Digest(r.array<32>());
  b.timestamp = r.i64();
  b.difficulty = r.u32();
  b.nonce = r.u64();
  b.block_hash = Digest(r.array<32>());
  auto n = r.u32();
  if (n > r.remaining()) fail(ErrorCode::DecodeError, "transaction count exceeds record");
  for (std::uint32_t i = 0; i < n; ++i) {
    b.transactions.push_back(Transaction::parse(r.var()));
    b.tx_ids.push_back(b.transactions.back().tx_id);
  }
  r.expect_done();
  return b;
}

Digest compute_tx_root(const std::vector<Digest>& tx_ids) {
  Bytes all;
  all.reserve(tx_ids.size() * Digest::kSize);
  for (const auto& id : tx_ids) all.insert(all.end(), id.view().begin(), id.view().end());
  return digest(all);
}

unsigned leading_zero_bits(const Digest& d) noexcept {
  unsigned bits = 0;
  for (std::size_t i = 0; i < Digest::kSize; ++i) {
    if (d[i] == 0) {
      bits += 8;
      continue;
    }
    return bits + static_cast<unsigned>(std::countl_zero(d[i]));
  }
  return bits;
}

VerifyResult verify_blocks(const std::vector<Block>& blocks, std::uint32_t difficulty) {
  std::set<Digest> seen;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& b = blocks[i];
    const auto expected_prev = i == 0 ? Digest{} : blocks[i - 1].block_hash;
    bool good = b.height == i && b.prev_hash == expected_prev &&
                b.difficulty == difficulty && b.tx_ids.size() == b.transactions.size() &&
                !b.transactions.empty() && b.compute_hash() == b.block_hash &&
                leading_zero_bits(b.block_hash) >= difficulty &&
                compute_tx_root(b.tx_ids) == b.tx_root;
    for (std::size_t j = 0; good && j < b.transactions.size(); ++j) {
      const auto& tx = b.transactions[j];
      good = tx.tx_id == b.tx_ids[j] && transaction_well_formed(tx) &&
             seen.insert(tx.tx_id).second;
    }
    if (!good) return {i};
  }
  return {};
}

Chain::Chain(ChainConfig config, Clock clock) : config_(config), clock_(std::move(clock)) {
  if (config_.difficulty > 64) fail(ErrorCode::InvalidConfig, "difficulty above 64 bits");
}

const Transaction* Chain::find_locked(const Digest& tx_id) const {
  for (const auto& b : blocks_) {
    for (const auto& tx : b.transactions) {
      if (tx.tx_id == tx_id) return &tx;
    }
  }
  return nullptr;
}

Digest Chain::submit_transaction(const Transaction& tx, const PublicKey& provider_public) {
  if (tx.compute_id() != tx.tx_id) {
    fail(ErrorCode::MalformedTransaction, "tx_id does not match the transaction body");
  }
  if (tx.provider_public_key != provider_public ||
      digest(provider_public.view()) != tx.provider_key_fingerprint ||
      !skyvault::verify(provider_public, tx.body_bytes(), tx.provider_signature)) {
    fail(ErrorCode::BadSignature, "provider signature does not verify");
  }
  std::unique_lock lock(mu_);
  auto now = clock_();
  if (tx.timestamp < now - config_.timestamp_window ||
      tx.timestamp > now + config_.timestamp_window) {
    fail(ErrorCode::StaleTimestamp, "transaction timestamp outside the accepted window");
  }
  bool pending_dup = false;
  for (const auto& p : pending_) pending_dup = pending_dup || p.tx_id == tx.tx_id;
  if (pending_dup || find_locked(tx.tx_id) != nullptr) {
    fail(ErrorCode::DuplicateTransaction, "transaction already submitted");
  }
  pending_.push_back(tx);
  return tx.tx_id;
}

Block Chain::mine_block() {
  std::unique_lock lock(mu_);
  if (pending_.empty()) fail(ErrorCode::NothingToMine, "no pending transactions");
  Block b;
  b.height = blocks_.size();
  b.prev_hash = blocks_.empty() ? Digest{} : blocks_.back().block_hash;
  b.transactions.assign(pending_.begin(), pending_.end());
  for (const auto& tx : b.transactions) b.tx_ids.push_back(tx.tx_id);
  b.tx_root = compute_tx_root(b.tx_ids);
  b.timestamp = clock_();
  b.difficulty = config_.difficulty;

  std::uint64_t trials = 0;
  for (b.nonce = 0;; ++b.nonce) {
    ++trials;
    b.block_hash = b.compute_hash();
    if (leading_zero_bits(b.block_hash) >= config_.difficulty) break;
  }
  last_trials_ = trials;
  pending_.clear();
  blocks_.push_back(b);
  return b;
}

VerifyResult Chain::verify() const {
  std::shared_lock lock(mu_);
  return verify_blocks(blocks_, config_.difficulty);
}

InclusionProof Chain::prove_inclusion(const Digest& tx_id) const {
  std::shared_lock lock(mu_);
  for (const auto& b : blocks_) {
    for (std::size_t j = 0; j < b.tx_ids.size(); ++j) {
      if (b.tx_ids[j] == tx_id) return {b.height, j};
    }
  }
  fail(ErrorCode::UnknownTransaction, "transaction " + tx_id.hex() + " is not on chain");
}

bool Chain::confirm_secret(const Digest& tx_id, ByteView secret_block_bytes) const {
  std::shared_lock lock(mu_);
  const auto* tx = find_locked(tx_id);
  if (tx == nullptr) {
    fail(ErrorCode::UnknownTransaction, "transaction " + tx_id.hex() + " is not on chain");
  }
  return digest(secret_block_bytes) == tx->secret_commitment;
}

std::optional<Transaction> Chain::find_transaction(const Digest& tx_id) const {
  std::shared_lock lock(mu_);
  const auto* tx = find_locked(tx_id);
  if (tx == nullptr) return std::nullopt;
  return *tx;
}

Digest Chain::tip_hash() const {
  std::shared_lock lock(mu_);
  return blocks_.empty() ? Digest{} : blocks_.back().block_hash;
}

std::vector<Block> Chain::blocks() const {
  std::shared_lock lock(mu_);
  return blocks_;
}

std::vector<Transaction> Chain::pending() const {
  std::shared_lock lock(mu_);
  return {pending_.begin(), pending_.end()};
}

std::size_t Chain::height() const {
  std::shared_lock lock(mu_);
  return blocks_.size();
}

std::uint64_t Chain::last_mining_trials() const {
  std::shared_lock lock(mu_);
  return last_trials_;
}

Bytes Chain::serialize() const {
  std::shared_lock lock(mu_);
  auto out = chain_file_header(config_.difficulty);
  for (const auto& b : blocks_) {
    auto rec = block_record(b);
    out.insert(out.end(), rec.begin(), rec.end());
  }
  return out;
}

std::unique_ptr<Chain> Chain::parse(ByteView data, Clock clock,
                                    std::int64_t timestamp_window) {
  ByteReader r(data);
  auto difficulty = read_chain_header(r);
  auto chain = std::make_unique<Chain>(ChainConfig{difficulty, timestamp_window},
                                       std::move(clock));
  while (!r.done()) chain->blocks_.push_back(Block::parse(r.var()));
  return chain;
}

void Chain::save(const std::filesystem::path& path) const { write_file(path, serialize()); }

void Chain::append_block(const std::filesystem::path& path, const Block& block,
                         std::uint32_t difficulty) {
  bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) fail(ErrorCode::IoError, "cannot append to " + path.string());
  auto write = [&](const Bytes& b) {
    out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
  };
  if (fresh) write(chain_file_header(difficulty));
  write(block_record(block));
  out.flush();
  if (!out) fail(ErrorCode::IoError, "short write to " + path.string());
}

std::unique_ptr<Chain> Chain::load(const std::filesystem::path& path, Clock clock,
                                   std::uint32_t default_difficulty) {
  if (!std::filesystem::exists(path) || std::filesystem::file_size(path) == 0) {
    return std::make_unique<Chain>(ChainConfig{default_difficulty, 900}, std::move(clock));
  }
  return parse(read_file(path), std::move(clock));
}

VerifyResult verify_chain_bytes(ByteView data) {
  ByteReader r(data);
  std::uint32_t difficulty = 0;
  try {
    difficulty = read_chain_header(r);
  } catch (const Error&) {
    return {0};
  }
  std::vector<Block> blocks;
  bool truncated = false;
  while (!r.done()) {
    try {
      blocks.push_back(Block::parse(r.var()));
    } catch (const Error&) {
      truncated = true;
      break;
    }
  }
  auto verdict = verify_blocks(blocks, difficulty);
  if (!verdict.ok()) return verdict;
  if (truncated) return {blocks.size()};
  return {};
}

}  // namespace skyvault
