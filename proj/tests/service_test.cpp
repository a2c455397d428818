// Copyright 2026 The pianobench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pianobench/service.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "pianobench/policy.hpp"

namespace pianobench {
namespace {

std::shared_ptr<const SongLibrary> library() {
  return std::make_shared<const SongLibrary>(SongLibrary::builtin());
}

Message call(Session& session, const Message& request) {
  auto reply = parse_message(session.handle(request.str()));
  EXPECT_TRUE(reply.has_value());
  return reply.value_or(Message{});
}

Message step_message(std::span<const double> action) {
  Message m{"step", {}};
  m.fields.set("action", action);
  return m;
}

TEST(Session, HandshakeAdvertisesDimensions) {
  ServiceContext context(EnvConfig{}, library());
  Session session(context);
  Message request{"handshake", {}};
  request.fields.set("version", kProtocolVersion);
  const Message reply = call(session, request);
  ASSERT_EQ(reply.kind, "handshake");
  EXPECT_EQ(reply.fields.get_int<int>("action_dim"), 23);
  EXPECT_EQ(reply.fields.get_int<int>("obs_dim"), 1228);
  EXPECT_EQ(reply.fields.get_double("dt"), 0.05);
  EXPECT_EQ(reply.fields.get_double("action_low"), -1.0);
  EXPECT_EQ(reply.fields.get_double("action_high"), 1.0);
  EXPECT_NE(reply.fields.at("songs").find("c_major_scale"), std::string::npos);
  EXPECT_EQ(split_exact(reply.fields.at("active_dims"), ',').size(), 23u);

  request.fields.set("version", 99);
  EXPECT_EQ(call(session, request).fields.at("code"), error_code::kVersionMismatch);
}

TEST(Session, ErrorsLeaveSessionUsable) {
  ServiceContext context(EnvConfig{}, library());
  Session session(context);
  const std::vector<double> zero(kActionDim, 0.0);

  Message reply = call(session, step_message(zero));
  EXPECT_EQ(reply.kind, "error");
  EXPECT_EQ(reply.fields.at("code"), error_code::kNotReset);

  EXPECT_EQ(parse_message(session.handle("not a message"))->fields.at("code"),
            error_code::kBadMessage);
  EXPECT_EQ(parse_message(session.handle("dance"))->fields.at("code"), error_code::kUnknownKind);
  EXPECT_EQ(parse_message(session.handle("reset"))->fields.at("code"), error_code::kBadMessage);

  Message reset{"reset", {}};
  reset.fields.set("song", "no_such_song");
  EXPECT_EQ(call(session, reset).fields.at("code"), error_code::kUnknownSong);

  reset.fields.set("song", "single_note");
  reply = call(session, reset);
  ASSERT_EQ(reply.kind, "reset");
  EXPECT_EQ(reply.fields.get_vector("obs").size(), 1228u);

  const std::vector<double> short_action(22, 0.0);
  reply = call(session, step_message(short_action));
  EXPECT_EQ(reply.fields.at("code"), error_code::kBadActionLength);
  EXPECT_EQ(reply.fields.at("message"), "expected 23 values, got 22");

  std::vector<double> bad = zero;
  bad[3] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_EQ(call(session, step_message(bad)).fields.at("code"), error_code::kBadValue);
  EXPECT_EQ(parse_message(session.handle("step action=1,x"))->fields.at("code"),
            error_code::kBadMessage);

  reply = call(session, step_message(zero));
  EXPECT_EQ(reply.kind, "step");
  EXPECT_EQ(reply.fields.get_int<int>("frame"), 0);
}

TEST(Session, EpisodeDoneAfterLastFrame) {
  ServiceContext context(EnvConfig{}, library());
  Session session(context);
  Message reset{"reset", {}};
  reset.fields.set("song", "single_note");
  const int frames = call(session, reset).fields.get_int<int>("frames");
  const std::vector<double> zero(kActionDim, 0.0);
  for (int i = 0; i < frames; ++i) {
    const Message reply = call(session, step_message(zero));
    EXPECT_EQ(reply.fields.get_bool("done"), i + 1 == frames);
  }
  EXPECT_EQ(call(session, step_message(zero)).fields.at("code"), error_code::kEpisodeDone);
  EXPECT_EQ(call(session, reset).kind, "reset");
}

TEST(Session, MatchesInProcessEnvironment) {
  ServiceContext context(EnvConfig{}, library());
  Session session(context);
  Message reset{"reset", {}};
  reset.fields.set("song", "twinkle").set("seed", 5);
  const Message first = call(session, reset);

  Environment env(EnvConfig{}, SongLibrary::builtin().get("twinkle"));
  EXPECT_EQ(first.fields.get_vector("obs"), env.observe().flatten());

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  while (!env.done()) {
    std::vector<double> action(kActionDim);
    for (auto& a : action) a = u(rng);
    const StepResult local = env.step(action);
    const Message remote = call(session, step_message(action));
    ASSERT_EQ(remote.kind, "step");
    ASSERT_EQ(remote.fields.get_vector("obs"), local.observation.flatten());
    ASSERT_EQ(remote.fields.get_double("r_key"), local.reward.r_key);
    ASSERT_EQ(remote.fields.get_double("r_finger"), local.reward.r_finger);
    ASSERT_EQ(remote.fields.get_double("r_energy"), local.reward.r_energy);
    ASSERT_EQ(remote.fields.get_double("r_total"), local.reward.r_total);
    ASSERT_EQ(remote.fields.get_double("f1"), local.info.f1);
    ASSERT_EQ(remote.fields.get_double("sum_total"), local.info.totals.total);
    ASSERT_EQ(parse_key_list(remote.fields.at("played")), local.info.played);
    ASSERT_EQ(remote.fields.get_bool("done"), local.done);
  }
}

TEST(Session, LoggedTrajectoryReplaysBitExactly) {
  std::stringstream log;
  TrajectoryWriter writer(log);
  ServiceContext context(EnvConfig{}, library(), &writer);
  Session session(context);
  Message reset{"reset", {}};
  reset.fields.set("song", "c_major_scale");
  call(session, reset);
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 40; ++i) {
    std::vector<double> action(kActionDim);
    for (auto& a : action) a = u(rng);
    call(session, step_message(action));
  }

  const TrajectoryFile file = read_trajectories(log);
  ASSERT_EQ(file.records.size(), 40u);
  Environment env(EnvConfig{}, SongLibrary::builtin().get("c_major_scale"));
  for (const auto& record : file.records) {
    ASSERT_EQ(record.observation, env.observe().flatten());
    const StepResult result = env.step(record.action);
    ASSERT_EQ(result.reward, record.reward);
    ASSERT_EQ(result.info.played, record.played);
  }
}

TEST(Session, ServeStreamAnswersEveryLine) {
  ServiceContext context(EnvConfig{}, library());
  std::istringstream in("handshake\r\n\nreset song=single_note\nbogus line!\nclose\nhandshake\n");
  std::ostringstream out;
  serve_stream(in, out, context);
  std::istringstream replies(out.str());
  std::vector<std::string> kinds;
  std::string line;
  while (std::getline(replies, line)) kinds.push_back(parse_message(line)->kind);
  EXPECT_EQ(kinds, (std::vector<std::string>{"handshake", "reset", "error", "close"}));
}

TEST(Server, SessionsOverTcpAreIsolated) {
  std::stringstream log;
  TrajectoryWriter writer(log);
  ServiceContext context(EnvConfig{}, library(), &writer);
  Server server(context);
  const int port = server.listen("127.0.0.1", 0);
  ASSERT_GT(port, 0);

  Client a("127.0.0.1", port);
  Client b("127.0.0.1", port);
  Message reset{"reset", {}};
  reset.fields.set("song", "single_note");
  const auto ea = a.call(reset).fields.get_int<std::int64_t>("episode");
  reset.fields.set("song", "twinkle");
  const auto eb = b.call(reset).fields.get_int<std::int64_t>("episode");
  EXPECT_NE(ea, eb);

  Environment env_a(EnvConfig{}, SongLibrary::builtin().get("single_note"));
  Environment env_b(EnvConfig{}, SongLibrary::builtin().get("twinkle"));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 15; ++i) {
    std::vector<double> action(kActionDim);
    for (auto& x : action) x = u(rng);
    Client& client = i % 3 == 0 ? b : a;
    Environment& env = i % 3 == 0 ? env_b : env_a;
    const StepResult local = env.step(action);
    const Message remote = client.call(step_message(action));
    ASSERT_EQ(remote.fields.get_vector("obs"), local.observation.flatten());
    ASSERT_EQ(remote.fields.get_double("r_total"), local.reward.r_total);
  }
  EXPECT_EQ(a.call(Message{"close", {}}).kind, "close");
  server.stop();
  EXPECT_EQ(read_trajectories(log).records.size(), 15u);
}

TEST(Server, ErrorRepliesKeepConnectionOpen) {
  ServiceContext context(EnvConfig{}, library());
  Server server(context);
  Client client("127.0.0.1", server.listen("127.0.0.1", 0));
  EXPECT_EQ(parse_message(client.request("step action=0"))->fields.at("code"),
            error_code::kNotReset);
  EXPECT_EQ(parse_message(client.request("handshake"))->kind, "handshake");
}

TEST(Client, DeadEndpointIsAConnectionError) {
  int port = 0;
  {
    ServiceContext context(EnvConfig{}, library());
    Server server(context);
    port = server.listen("127.0.0.1", 0);
  }
  EXPECT_THROW(Client("127.0.0.1", port), std::runtime_error);
}

TEST(Server, StopUnblocksIdleConnections) {
  ServiceContext context(EnvConfig{}, library());
  Server server(context);
  Client client("127.0.0.1", server.listen("127.0.0.1", 0));
  server.stop();
  EXPECT_THROW(client.request("handshake"), std::runtime_error);
}

}  // namespace
}  // namespace pianobench
