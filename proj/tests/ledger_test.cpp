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

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "skyvault/ledger.hpp"
#include "test_util.hpp"

using namespace skyvault;

namespace {

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::InvalidArgument;
}

struct LedgerFixture : ::testing::Test {
  ManualClock clock;
  Chain chain{ChainConfig{}, clock.clock()};
  KeyPair provider = generate_keypair();
  KeyPair consumer = generate_keypair();
  int counter = 0;

  Transaction next_tx() {
    ++counter;
    return make_transaction(provider, consumer.public_key,
                            digest(std::string_view("content-" + std::to_string(counter))),
                            digest(std::string_view("secret-" + std::to_string(counter))),
                            clock.now());
  }

  Digest submit() {
    auto tx = next_tx();
    return chain.submit_transaction(tx, provider.public_key);
  }
};

unsigned oracle_leading_zero_bits(const oracle::Octets& d) {
  unsigned bits = 0;
  for (auto byte : d) {
    for (int i = 7; i >= 0; --i) {
      if (byte & (1u << i)) return bits;
      ++bits;
    }
  }
  return bits;
}

}  // namespace

TEST_F(LedgerFixture, TransactionIdIsDigestOfBody) {
  auto tx = next_tx();
  EXPECT_EQ(tx.tx_id.hex(), oracle::hex(oracle::sha256(tx.body_bytes())));
  EXPECT_EQ(tx.consumer_key_fingerprint.hex(),
            oracle::hex(oracle::sha256(consumer.public_key.array())));
  EXPECT_TRUE(verify(provider.public_key, tx.body_bytes(), tx.provider_signature));
  EXPECT_EQ(Transaction::parse(tx.serialize()), tx);
}

TEST_F(LedgerFixture, SubmitValidatesInOrder) {
  auto tx = next_tx();
  auto bad_id = tx;
  bad_id.tx_id = digest(std::string_view("x"));
  EXPECT_EQ(code_of([&] { chain.submit_transaction(bad_id, provider.public_key); }),
            ErrorCode::MalformedTransaction);
  EXPECT_EQ(code_of([&] { chain.submit_transaction(tx, consumer.public_key); }),
            ErrorCode::BadSignature);
  auto forged = tx;
  forged.provider_signature = sign(consumer.private_key, tx.body_bytes());
  EXPECT_EQ(code_of([&] { chain.submit_transaction(forged, provider.public_key); }),
            ErrorCode::BadSignature);
  EXPECT_EQ(chain.submit_transaction(tx, provider.public_key), tx.tx_id);
  EXPECT_EQ(code_of([&] { chain.submit_transaction(tx, provider.public_key); }),
            ErrorCode::DuplicateTransaction);
  chain.mine_block();
  EXPECT_EQ(code_of([&] { chain.submit_transaction(tx, provider.public_key); }),
            ErrorCode::DuplicateTransaction);
}

TEST_F(LedgerFixture, TimestampWindow) {
  auto tx = make_transaction(provider, consumer.public_key, {}, {}, clock.now() - 900);
  EXPECT_NO_THROW(chain.submit_transaction(tx, provider.public_key));
  auto old = make_transaction(provider, consumer.public_key, {}, {}, clock.now() - 901);
  EXPECT_EQ(code_of([&] { chain.submit_transaction(old, provider.public_key); }),
            ErrorCode::StaleTimestamp);
  auto future = make_transaction(provider, consumer.public_key, {}, {}, clock.now() + 901);
  EXPECT_EQ(code_of([&] { chain.submit_transaction(future, provider.public_key); }),
            ErrorCode::StaleTimestamp);
}

TEST_F(LedgerFixture, MiningMeetsDifficultyAndLinksBlocks) {
  EXPECT_EQ(code_of([&] { chain.mine_block(); }), ErrorCode::NothingToMine);
  auto t1 = submit();
  auto t2 = submit();
  auto b0 = chain.mine_block();
  EXPECT_EQ(b0.height, 0u);
  EXPECT_EQ(b0.prev_hash, Digest{});
  EXPECT_EQ(b0.tx_ids, (std::vector<Digest>{t1, t2}));
  EXPECT_EQ(b0.block_hash.hex(), oracle::hex(oracle::sha256(b0.header_bytes())));
  EXPECT_GE(oracle_leading_zero_bits(oracle::sha256(b0.header_bytes())), 8u);
  EXPECT_EQ(chain.last_mining_trials(), b0.nonce + 1);

  oracle::Octets ids;
  for (const auto& id : b0.tx_ids) ids.insert(ids.end(), id.array().begin(), id.array().end());
  EXPECT_EQ(b0.tx_root.hex(), oracle::hex(oracle::sha256(ids)));

  submit();
  auto b1 = chain.mine_block();
  EXPECT_EQ(b1.prev_hash, b0.block_hash);
  EXPECT_EQ(chain.tip_hash(), b1.block_hash);
  EXPECT_TRUE(chain.pending().empty());
  EXPECT_TRUE(chain.verify().ok());
}

TEST(LeadingZeros, CountsBits) {
  Digest d;
  EXPECT_EQ(leading_zero_bits(d), 256u);
  auto arr = d.array();
  arr[1] = 0x10;
  EXPECT_EQ(leading_zero_bits(Digest(arr)), 11u);
  arr[0] = 0x80;
  EXPECT_EQ(leading_zero_bits(Digest(arr)), 0u);
}

TEST_F(LedgerFixture, InclusionAndSecretConfirmation) {
  submit();
  auto tx = next_tx();
  Bytes secret = to_bytes("secret block bytes");
  tx = make_transaction(provider, consumer.public_key, tx.content_commitment, digest(secret),
                        clock.now());
  chain.submit_transaction(tx, provider.public_key);
  chain.mine_block();
  auto proof = chain.prove_inclusion(tx.tx_id);
  EXPECT_EQ(proof.height, 0u);
  EXPECT_EQ(proof.position, 1u);
  EXPECT_TRUE(chain.confirm_secret(tx.tx_id, secret));
  EXPECT_FALSE(chain.confirm_secret(tx.tx_id, to_bytes("secret block byteZ")));
  EXPECT_EQ(code_of([&] { chain.prove_inclusion(Digest{}); }), ErrorCode::UnknownTransaction);
  EXPECT_TRUE(chain.find_transaction(tx.tx_id));
}

TEST_F(LedgerFixture, VerifyReportsFirstBadHeight) {
  for (int i = 0; i < 3; ++i) {
    submit();
    chain.mine_block();
  }
  auto blocks = chain.blocks();
  EXPECT_TRUE(verify_blocks(blocks, 8).ok());

  auto tampered = blocks;
  tampered[1].transactions[0].timestamp += 1;
  EXPECT_EQ(verify_blocks(tampered, 8).first_bad_height, 1u);

  tampered = blocks;
  tampered[2].prev_hash = blocks[0].block_hash;
  EXPECT_EQ(verify_blocks(tampered, 8).first_bad_height, 2u);

  tampered = blocks;
  tampered[0].nonce += 1;
  EXPECT_EQ(verify_blocks(tampered, 8).first_bad_height, 0u);
}

TEST_F(LedgerFixture, SerializeParseAndFileAppend) {
  testutil::TempDir dir;
  auto path = dir.path() / "chain.log";
  for (int i = 0; i < 3; ++i) {
    submit();
    Chain::append_block(path, chain.mine_block(), chain.difficulty());
  }
  auto file = read_file(path);
  EXPECT_EQ(file, chain.serialize());
  EXPECT_TRUE(verify_chain_bytes(file).ok());
  auto loaded = Chain::load(path, clock.clock());
  EXPECT_EQ(loaded->blocks(), chain.blocks());
  EXPECT_EQ(loaded->tip_hash(), chain.tip_hash());

  auto missing = Chain::load(dir.path() / "absent.log", clock.clock(), 4);
  EXPECT_TRUE(missing->blocks().empty());
  EXPECT_EQ(missing->difficulty(), 4u);
}

TEST_F(LedgerFixture, EveryBitFlipIsDetected) {
  for (int i = 0; i < 2; ++i) {
    submit();
    chain.mine_block();
  }
  auto wire = chain.serialize();
  std::size_t missed = 0;
  for (std::size_t bit = 0; bit < wire.size() * 8; ++bit) {
    auto copy = wire;
    copy[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    if (verify_chain_bytes(copy).ok()) ++missed;
  }
  EXPECT_EQ(missed, 0u);
}

TEST_F(LedgerFixture, CommitmentsOnlyOnChain) {
  auto tx = next_tx();
  chain.submit_transaction(tx, provider.public_key);
  chain.mine_block();
  auto wire = chain.serialize();
  EXPECT_FALSE(contains(wire, consumer.public_key.view()));
  EXPECT_TRUE(contains(wire, tx.consumer_key_fingerprint.view()));
}
