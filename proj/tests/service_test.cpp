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

#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "skyvault/service.hpp"

using namespace skyvault;
using nlohmann::json;

namespace {

class ServiceFixture : public ::testing::Test {
 protected:
  ManualClock clock;
  IdentityService identity{IdentityConfig{}, clock.clock()};
  IdentityServer server{identity};
  std::thread worker;
  int port = -1;
  KeyPair keys = generate_keypair();

  void SetUp() override {
    port = server.bind_any_port("127.0.0.1");
    ASSERT_GT(port, 0);
    worker = std::thread([this] { server.listen(); });
    for (int i = 0; i < 200 && !server.running(); ++i) {
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
  }

  void TearDown() override {
    server.stop();
    if (worker.joinable()) worker.join();
  }

  httplib::Result post(const std::string& path, const json& body) {
    httplib::Client cli("127.0.0.1", port);
    return cli.Post(path, body.dump(), "application/json");
  }

  json register_alice() {
    auto res = post("/register", {{"id", "alice"},
                                  {"password", "alicepassword"},
                                  {"public_key", keys.public_key.b64url()}});
    EXPECT_EQ(res->status, 200);
    return json::parse(res->body);
  }
};

}  // namespace

TEST_F(ServiceFixture, RegisterLoginAndValidate) {
  auto acc = register_alice();
  EXPECT_EQ(acc["id"], "alice");

  auto begin = post("/auth/begin", {{"id", "alice"}});
  ASSERT_EQ(begin->status, 200);
  auto ch = challenge_from_json(json::parse(begin->body));
  auto response = solve_challenge(ch, keys.private_key, "alice", "alicepassword");

  auto done = post("/auth/complete",
                   {{"challenge_id", ch.challenge_id.b64url()}, {"response", response.hex()}});
  ASSERT_EQ(done->status, 200);
  auto session = session_from_json(json::parse(done->body));

  httplib::Client cli("127.0.0.1", port);
  auto check = cli.Get("/session/" + session.token.b64url());
  ASSERT_EQ(check->status, 200);
  EXPECT_EQ(json::parse(check->body)["account_id"], "alice");

  auto replay = post("/auth/complete",
                     {{"challenge_id", ch.challenge_id.b64url()}, {"response", response.hex()}});
  EXPECT_EQ(replay->status, 404);
  EXPECT_EQ(json::parse(replay->body)["error"], "UnknownChallenge");
}

TEST_F(ServiceFixture, ErrorStatuses) {
  register_alice();
  auto dup = post("/register", {{"id", "alice"},
                                {"password", "alicepassword"},
                                {"public_key", keys.public_key.b64url()}});
  EXPECT_EQ(dup->status, 409);
  EXPECT_EQ(json::parse(dup->body)["error"], "DuplicateId");

  EXPECT_EQ(post("/auth/begin", {{"id", "nobody"}})->status, 404);

  auto ch = challenge_from_json(json::parse(post("/auth/begin", {{"id", "alice"}})->body));
  auto wrong = solve_challenge(ch, keys.private_key, "alice", "not-the-password");
  auto bad = post("/auth/complete",
                  {{"challenge_id", ch.challenge_id.b64url()}, {"response", wrong.hex()}});
  EXPECT_EQ(bad->status, 401);
  EXPECT_EQ(json::parse(bad->body)["error"], "ResponseMismatch");

  httplib::Client cli("127.0.0.1", port);
  EXPECT_EQ(cli.Post("/auth/begin", "not json", "application/json")->status, 400);
  EXPECT_EQ(cli.Get("/session/" + random_fixed<TokenValue>().b64url())->status, 401);
  EXPECT_EQ(post("/register", {{"id", "x"}})->status, 400);
}

TEST(HttpStatus, Mapping) {
  EXPECT_EQ(http_status_for(ErrorCode::DuplicateId), 409);
  EXPECT_EQ(http_status_for(ErrorCode::UnknownId), 404);
  EXPECT_EQ(http_status_for(ErrorCode::Expired), 401);
  EXPECT_EQ(http_status_for(ErrorCode::WeakPassword), 400);
}
