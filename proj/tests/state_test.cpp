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

#include "skyvault/state.hpp"
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

}  // namespace

TEST(ConfigFile, DefaultsRenderAndParse) {
  Config c;
  EXPECT_EQ(c.replication_factor, 3u);
  EXPECT_EQ(c.chunk_size, 262144u);
  EXPECT_EQ(c.pow_difficulty, 8u);
  EXPECT_EQ(c.challenge_ttl, 120u);
  EXPECT_EQ(c.session_ttl, 3600u);
  EXPECT_EQ(Config::parse(c.render()), c);
}

TEST(ConfigFile, CommentsAndWhitespace) {
  auto c = Config::parse("# test\n  host_count = 7 \n\nreplication_factor=2\r\n");
  EXPECT_EQ(c.host_count, 7u);
  EXPECT_EQ(c.replication_factor, 2u);
}

TEST(ConfigFile, Rejections) {
  EXPECT_EQ(code_of([] { Config::parse("colour=blue\n"); }), ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of([] { Config::parse("host_count\n"); }), ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of([] { Config::parse("host_count=x\n"); }), ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of([] { Config::parse("chunk_size=0\n"); }), ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of([] { Config::parse("host_count=2\n"); }), ErrorCode::InvalidConfig);
}

TEST(StateDir, OpenRequiresInit) {
  testutil::TempDir dir;
  EXPECT_EQ(code_of([&] { StateDirectory::open(dir.path() / "none"); }), ErrorCode::IoError);
}

TEST(StateDir, FullLifecycleSurvivesReopen) {
  testutil::TempDir dir;
  ManualClock clock;
  auto root = dir.path() / "st";
  Config cfg;
  cfg.chunk_size = 1000;
  auto kp = generate_keypair();
  Bytes media(4321, 0x5a);
  SkyLink link;
  Digest tx_id;
  {
    auto st = StateDirectory::init(root, cfg, clock.clock());
    st.save_keypair("carol", kp);
    st.identity().register_account("carol", "carolpassword", kp.public_key);
    link = st.network().upload(media, kp, cfg.chunk_size).first;
    st.save_network();

    auto tx = make_transaction(kp, kp.public_key, {}, digest(std::string_view("s")), clock.now());
    tx_id = st.chain().submit_transaction(tx, kp.public_key);
    st.mine_and_append();

    Offer o;
    o.content_id = link.digest();
    o.title = "Doc";
    st.save_offer("carol", o);
  }
  auto st = StateDirectory::open(root, clock.clock());
  EXPECT_EQ(st.config(), cfg);
  EXPECT_EQ(st.load_keypair("carol").private_key, kp.private_key);
  EXPECT_TRUE(st.identity().find_account("carol"));
  EXPECT_EQ(st.network().download(link, kp.private_key), media);
  EXPECT_TRUE(st.chain().verify().ok());
  EXPECT_TRUE(st.chain().find_transaction(tx_id));
  auto pub = st.find_publisher(link.digest());
  ASSERT_TRUE(pub);
  EXPECT_EQ(pub->provider, "carol");
  EXPECT_EQ(pub->offers.at(link.digest()).title, "Doc");
  EXPECT_FALSE(st.find_publisher(Digest{}));
  EXPECT_EQ(code_of([&] { st.load_keypair("nobody"); }), ErrorCode::UnknownId);
}

TEST(StateDir, LicensesUsesAndSecrets) {
  testutil::TempDir dir;
  auto st = StateDirectory::init(dir.path(), Config{});
  auto kp = generate_keypair();
  Account acc{"dan", {}, kp.public_key, 0};
  auto lic = issue_license(acc, digest(std::string_view("c")), random_fixed<SymKey>(),
                           {0, 10, 3, false}, Rights{}, 0);
  st.save_license(lic);
  EXPECT_EQ(st.load_license(lic.license_id), lic);
  EXPECT_EQ(st.licenses().size(), 1u);
  EXPECT_EQ(st.load_uses(lic.license_id), 0u);
  st.save_uses(lic.license_id, 2);
  EXPECT_EQ(st.load_uses(lic.license_id), 2u);

  auto env = seal(kp.public_key, to_bytes("secret"));
  auto id = digest(std::string_view("tx"));
  st.save_secret(id, env);
  EXPECT_EQ(st.load_secret(id), env);
  EXPECT_EQ(code_of([&] { st.load_secret(Digest{}); }), ErrorCode::UnknownTransaction);
}
