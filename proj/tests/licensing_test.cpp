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

#include <random>

#include "oracles.hpp"
#include "skyvault/licensing.hpp"
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

Account make_account(const std::string& id, const KeyPair& kp) {
  return Account{id, derive_credential(id, "irrelevant-pw").verifier, kp.public_key, 0};
}

struct LicenseFixture : ::testing::Test {
  KeyPair bob_keys = generate_keypair();
  Account bob = make_account("bob", bob_keys);
  Digest content = digest(std::string_view("movie"));
  SymKey key = random_fixed<SymKey>();

  License issue(KeyRules rules, std::set<Action> actions = {Action::Stream}) {
    return issue_license(bob, content, key, rules, Rights{actions}, 100);
  }
};

}  // namespace

TEST(Actions, NamesRoundTrip) {
  for (auto a : {Action::Stream, Action::Download, Action::Relicense}) {
    EXPECT_EQ(parse_action(to_string(a)), a);
  }
  EXPECT_EQ(to_string(Action::Relicense), "re-license");
  EXPECT_EQ(code_of([] { parse_action("copy"); }), ErrorCode::InvalidArgument);
}

TEST_F(LicenseFixture, IssueBindsConsumerAndSealsKey) {
  auto lic = issue({100, 200, std::nullopt, false});
  EXPECT_TRUE(lic.intact());
  EXPECT_EQ(lic.consumer_id, "bob");
  EXPECT_EQ(lic.consumer_fingerprint, consumer_fingerprint("bob", content));
  EXPECT_EQ(open(bob_keys.private_key, lic.enveloped_content_key), Bytes(key.view().begin(), key.view().end()));
  EXPECT_EQ(lic.license_hash.hex(), oracle::hex(oracle::sha256(lic.body_bytes())));
  EXPECT_EQ(License::parse(lic.serialize()), lic);
}

TEST_F(LicenseFixture, IssueRejectsBadRules) {
  EXPECT_EQ(code_of([&] { issue({200, 100, std::nullopt, false}); }), ErrorCode::InvalidRules);
  EXPECT_EQ(code_of([&] { issue({100, 200, std::nullopt, false}, {}); }), ErrorCode::EmptyRights);
}

TEST_F(LicenseFixture, TamperedLicenseIsNotIntact) {
  auto lic = issue({100, 200, 3, false});
  auto widened = lic;
  widened.key_rules.max_uses = 1000;
  EXPECT_FALSE(widened.intact());
  auto reassigned = lic;
  reassigned.consumer_id = "eve";
  reassigned.license_hash = reassigned.compute_hash();
  EXPECT_FALSE(reassigned.intact());  // fingerprint still names bob
}

TEST_F(LicenseFixture, DenyReasonsAndPrecedence) {
  auto lic = issue({100, 200, 2, false});
  EXPECT_TRUE(evaluate_rights(lic, Action::Stream, 100, 0).allowed());
  EXPECT_TRUE(evaluate_rights(lic, Action::Stream, 200, 1).allowed());
  EXPECT_EQ(evaluate_rights(lic, Action::Download, 150, 0).deny, DenyReason::ActionForbidden);
  EXPECT_EQ(evaluate_rights(lic, Action::Stream, 99, 0).deny, DenyReason::NotYetValid);
  EXPECT_EQ(evaluate_rights(lic, Action::Stream, 201, 0).deny, DenyReason::Expired);
  EXPECT_EQ(evaluate_rights(lic, Action::Stream, 150, 2).deny, DenyReason::UsesExhausted);
  // Forbidden action wins over every other reason, time over count.
  EXPECT_EQ(evaluate_rights(lic, Action::Download, 500, 9).deny, DenyReason::ActionForbidden);
  EXPECT_EQ(evaluate_rights(lic, Action::Stream, 500, 9).deny, DenyReason::Expired);
}

TEST_F(LicenseFixture, RedeemCountsUsesOnlyOnSuccess) {
  auto lic = issue({100, 200, 2, false});
  UsageTracker tracker;
  EXPECT_EQ(redeem_license(bob_keys.private_key, lic, Action::Stream, 150, tracker), key);
  try {
    redeem_license(bob_keys.private_key, lic, Action::Download, 150, tracker);
    FAIL();
  } catch (const RightsDeniedError& e) {
    EXPECT_EQ(e.reason(), DenyReason::ActionForbidden);
  }
  EXPECT_EQ(tracker.uses(lic.license_id), 1u);
  EXPECT_NO_THROW(redeem_license(bob_keys.private_key, lic, Action::Stream, 150, tracker));
  try {
    redeem_license(bob_keys.private_key, lic, Action::Stream, 150, tracker);
    FAIL();
  } catch (const RightsDeniedError& e) {
    EXPECT_EQ(e.reason(), DenyReason::UsesExhausted);
    EXPECT_EQ(e.code(), ErrorCode::RightsDenied);
  }
}

TEST_F(LicenseFixture, RedeemWithForeignKeyFails) {
  auto lic = issue({100, 200, std::nullopt, false});
  UsageTracker tracker;
  EXPECT_EQ(code_of([&] {
              redeem_license(generate_keypair().private_key, lic, Action::Stream, 150, tracker);
            }),
            ErrorCode::OpenFailed);
  EXPECT_EQ(tracker.uses(lic.license_id), 0u);
}

TEST_F(LicenseFixture, AgreesWithEnumeratedEvaluator) {
  std::mt19937_64 rng(8);
  const std::vector<Action> all = {Action::Stream, Action::Download, Action::Relicense};
  for (int sample = 0; sample < 2000; ++sample) {
    std::int64_t nb = testutil::uniform(rng, 0, 63);
    std::int64_t na = testutil::uniform(rng, nb, 63);
    std::optional<std::uint32_t> max;
    if (rng() % 3) max = static_cast<std::uint32_t>(testutil::uniform(rng, 0, 10));
    std::set<Action> actions;
    std::set<int> codes;
    for (auto a : all) {
      if (rng() % 2) {
        actions.insert(a);
        codes.insert(static_cast<int>(a));
      }
    }
    if (actions.empty()) continue;
    License lic;
    lic.key_rules = {nb, na, max, false};
    lic.rights.allowed_actions = actions;
    oracle::RightsUniverse universe(codes, nb, na,
                                    max ? std::optional<std::uint64_t>(*max) : std::nullopt);
    auto action = all[rng() % 3];
    std::int64_t now = testutil::uniform(rng, 0, 63);
    std::uint64_t uses = testutil::uniform(rng, 0, 11);
    EXPECT_EQ(evaluate_rights(lic, action, now, uses).allowed(),
              universe.allows(static_cast<int>(action), now, uses));
  }
}

TEST(SecretBlockFormat, RoundTripAndHash) {
  auto kp = generate_keypair();
  auto lic = issue_license(make_account("bob", kp), digest(std::string_view("c")),
                           random_fixed<SymKey>(), {0, 10, std::nullopt, true}, Rights{}, 5);
  auto token = random_fixed<TokenValue>();
  SkyLink link(digest(std::string_view("c")));
  auto [block, sealed] = build_secret_block(lic, token, "acme", digest(std::string_view("tip")),
                                            "Title", link, kp.public_key, 5);
  EXPECT_EQ(block.block_hash, block.compute_hash());
  EXPECT_EQ(block.auth_info, session_binding(token, "bob"));
  EXPECT_EQ(block.license_info, lic.license_hash);
  auto opened = open(kp.private_key, sealed);
  EXPECT_EQ(SecretBlock::parse(opened), block);
  auto info = open_content_info(kp.private_key, block);
  EXPECT_EQ(info.title, "Title");
  EXPECT_EQ(info.skylink, link.text());

  auto broken = lic;
  broken.rights.allowed_actions.insert(Action::Download);
  EXPECT_EQ(code_of([&] {
              build_secret_block(broken, token, "acme", {}, "T", link, kp.public_key, 5);
            }),
            ErrorCode::InvalidArgument);
}

namespace {

struct PurchaseFixture : ::testing::Test {
  ManualClock clock;
  IdentityService identity{IdentityConfig{}, clock.clock()};
  StorageNetwork network{5, 3};
  Chain chain{ChainConfig{}, clock.clock()};
  KeyPair acme_keys = generate_keypair();
  KeyPair bob_keys = generate_keypair();
  Provider acme{"acme-films", acme_keys, {}};
  Bytes media = to_bytes(std::string(5000, 'm'));
  SkyLink link;
  TokenValue token;
  Account bob;

  void SetUp() override {
    link = network.upload(media, acme_keys, 1024).first;
    Offer offer;
    offer.content_id = link.digest();
    offer.title = "Sintel";
    offer.rights.allowed_actions = {Action::Stream, Action::Download};
    offer.max_uses = 5;
    acme.catalog[link.digest()] = offer;
    bob = identity.register_account("bob", "bobpassword", bob_keys.public_key);
    auto ch = identity.begin_auth("bob");
    token = identity
                .complete_auth(ch.challenge_id,
                               solve_challenge(ch, bob_keys.private_key, "bob", "bobpassword"))
                .token;
  }
};

}  // namespace

TEST_F(PurchaseFixture, PurchaseRecordsCommitmentAndDeliversKey) {
  auto receipt = execute_purchase(token, link.digest(), acme, bob, identity, network, chain,
                                  clock.now());
  ASSERT_EQ(chain.pending().size(), 1u);
  chain.mine_block();
  auto tx = chain.find_transaction(receipt.tx_id);
  ASSERT_TRUE(tx);
  EXPECT_EQ(tx->content_commitment, content_commitment(link.digest(), receipt.license.license_id));

  auto opened = open(bob_keys.private_key, receipt.sealed_secret_block);
  EXPECT_TRUE(chain.confirm_secret(receipt.tx_id, opened));

  UsageTracker tracker;
  auto key = redeem_license(bob_keys.private_key, receipt.license, Action::Stream, clock.now(),
                            tracker);
  EXPECT_EQ(network.download_with_key(link, key), media);
  EXPECT_EQ(receipt.license.key_rules.not_after, clock.now() + 30 * 24 * 3600);
  EXPECT_EQ(receipt.license.key_rules.max_uses, 5u);
}

TEST_F(PurchaseFixture, PurchaseRequiresValidSessionAndKnownContent) {
  EXPECT_EQ(code_of([&] {
              execute_purchase(random_fixed<TokenValue>(), link.digest(), acme, bob, identity,
                               network, chain, clock.now());
            }),
            ErrorCode::NotAuthenticated);
  EXPECT_EQ(code_of([&] {
              execute_purchase(token, digest(std::string_view("nope")), acme, bob, identity,
                               network, chain, clock.now());
            }),
            ErrorCode::UnknownContent);
  Provider impostor{"impostor", generate_keypair(), acme.catalog};
  EXPECT_EQ(code_of([&] {
              execute_purchase(token, link.digest(), impostor, bob, identity, network, chain,
                               clock.now());
            }),
            ErrorCode::UnknownContent);
  clock.advance(3600);
  EXPECT_EQ(code_of([&] {
              execute_purchase(token, link.digest(), acme, bob, identity, network, chain,
                               clock.now());
            }),
            ErrorCode::NotAuthenticated);
  EXPECT_TRUE(chain.pending().empty());
}

TEST(OfferJson, RoundTrip) {
  Offer o;
  o.content_id = digest(std::string_view("x"));
  o.title = "T";
  o.rights.allowed_actions = {Action::Relicense};
  o.max_uses = 7;
  o.offline_allowed = true;
  auto back = offer_from_json(to_json(o));
  EXPECT_EQ(back.content_id, o.content_id);
  EXPECT_EQ(back.rights, o.rights);
  EXPECT_EQ(back.max_uses, 7u);
  EXPECT_TRUE(back.offline_allowed);
}
