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

#include "pianobench/env.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pianobench/policy.hpp"
#include "pianobench/songs.hpp"
#include "test_support.hpp"

namespace pianobench {
namespace {

std::vector<double> random_action(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> a(kActionDim);
  for (auto& x : a) x = u(rng);
  return a;
}

TEST(Tolerance, BoundaryValues) {
  for (auto [bounds, margin] : {std::pair{0.05, 0.5}, std::pair{0.01, 0.1}}) {
    EXPECT_EQ(tolerance(0.0, bounds, margin), 1.0);
    EXPECT_EQ(tolerance(bounds, bounds, margin), 1.0);
    EXPECT_NEAR(tolerance(bounds + margin, bounds, margin), 0.1, 1e-12);
  }
  EXPECT_NEAR(tolerance(0.11, 0.01, 0.1), 0.1, 1e-12);
  EXPECT_THROW(tolerance(0.1, 0.0, 0.0), std::invalid_argument);
}

TEST(Tolerance, ContinuousAndNonIncreasingOnGrid) {
  double previous = tolerance(0.0, 0.05, 0.5);
  for (int i = 1; i <= 10000; ++i) {
    const double value = tolerance(i * 2e-4, 0.05, 0.5);
    EXPECT_LT(value - previous, 1e-12);
    EXPECT_LT(std::abs(value - previous), 1e-3);  // no jumps
    previous = value;
  }
}

TEST(RewardKey, HandExamples) {
  const ToleranceParams params{0.05, 0.5};
  KeySet goal;
  goal.set(39);
  KeyDepressions d{};
  d[39] = 1.0;
  EXPECT_EQ(reward_key(goal, d, false, params), 1.0);
  d[39] = 0.0;
  const double c = std::sqrt(-2.0 * std::log(0.1));
  EXPECT_NEAR(reward_key(goal, d, true, params), 0.5 * std::exp(-0.5 * std::pow(1.9 * c, 2)), 1e-15);
  EXPECT_EQ(reward_key(KeySet{}, d, false, params), 1.0);
}

TEST(RewardFinger, HandExamples) {
  const KeyLayout layout;
  FingertipPositions tips{};
  tips[0] = layout.center(39);
  std::vector<FingerAssignment> labels = {{39, 0}};
  EXPECT_EQ(reward_finger(labels, tips, layout, {0.01, 0.1}), 1.0);
  tips[0] += 0.11;
  EXPECT_NEAR(reward_finger(labels, tips, layout, {0.01, 0.1}), 0.1, 1e-12);
  EXPECT_EQ(reward_finger({}, tips, layout, {0.01, 0.1}), 1.0);
}

TEST(Environment, Dimensions) {
  const EnvConfig config;
  const Environment env(config, songs::single_note());
  EXPECT_EQ(env.observation_size(), 1228);
  EXPECT_EQ(static_cast<int>(env.observe().flatten().size()), env.observation_size());
  EXPECT_EQ(env.num_frames(), 30u);
}

TEST(Environment, ZeroLengthScoreIsDoneImmediately) {
  Environment env(EnvConfig{}, Score{});
  EXPECT_TRUE(env.done());
  EXPECT_THROW(env.step(std::vector<double>(kActionDim, 0.0)), std::logic_error);
}

TEST(Environment, EpisodeLengthIsFrameCount) {
  std::mt19937_64 rng(1);
  for (const auto& name : SongLibrary::builtin().names()) {
    Environment env(EnvConfig{}, SongLibrary::builtin().get(name));
    std::size_t steps = 0;
    while (!env.done()) {
      env.step(random_action(rng));
      ++steps;
    }
    EXPECT_EQ(steps, env.num_frames()) << name;
  }
}

TEST(Environment, GoalBlockEqualsRollRows) {
  const Score score = songs::twinkle();
  EnvConfig config;
  config.lookahead = 7;
  Environment env(config, score);
  const PianoRoll roll = to_piano_roll(score, config.dt_control);
  std::mt19937_64 rng(2);
  while (!env.done()) {
    const Observation obs = env.observe();
    ASSERT_EQ(obs.goal.size(), 8u);
    for (std::size_t r = 0; r < obs.goal.size(); ++r) {
      const std::size_t f = env.frame() + r;
      ASSERT_EQ(obs.goal[r], f < roll.num_frames() ? roll.frames[f] : KeySet{});
      ASSERT_EQ(obs.fingers[r], f < roll.num_frames() ? roll.fingers[f] : FingerSet{});
    }
    env.step(random_action(rng));
  }
}

TEST(Environment, RewardTotalsEqualSumOfSteps) {
  Environment env(EnvConfig{}, songs::c_major_scale());
  std::mt19937_64 rng(3);
  RewardTotals sum;
  StepResult last;
  while (!env.done()) {
    last = env.step(random_action(rng));
    sum.key += last.reward.r_key;
    sum.finger += last.reward.r_finger;
    sum.energy += last.reward.r_energy;
    sum.total += last.reward.r_total;
  }
  EXPECT_EQ(last.info.totals, sum);
  EXPECT_EQ(env.report().rewards, sum);
}

TEST(Environment, RewardBounds) {
  const EnvConfig config;
  Environment env(config, songs::two_hand_chords());
  const double e_max = env.model().max_step_energy(config.dt_control);
  std::mt19937_64 rng(4);
  while (!env.done()) {
    const auto r = env.step(random_action(rng)).reward;
    ASSERT_GE(r.r_key, 0.0);
    ASSERT_LE(r.r_key, 1.0);
    ASSERT_GE(r.r_total, -config.weights.energy * e_max);
    ASSERT_LE(r.r_total, config.weights.key + config.weights.finger);
  }
}

// Dropping the fingering labels only touches r_finger.
TEST(Environment, FingeringAffectsOnlyFingerReward) {
  const Score labeled = songs::c_major_scale();
  Score unlabeled = labeled;
  for (auto& note : unlabeled.notes) note.finger.reset();
  Environment a(EnvConfig{}, labeled);
  Environment b(EnvConfig{}, unlabeled);
  std::mt19937_64 rng(5);
  while (!a.done()) {
    const auto action = random_action(rng);
    const auto ra = a.step(action);
    const auto rb = b.step(action);
    ASSERT_EQ(ra.reward.r_key, rb.reward.r_key);
    ASSERT_EQ(ra.reward.r_energy, rb.reward.r_energy);
    ASSERT_EQ(rb.reward.r_finger, 1.0);
  }
}

TEST(Environment, ResetRestoresInitialState) {
  Environment env(EnvConfig{}, songs::single_note());
  const auto initial = env.state_hash();
  const auto obs = env.observe().flatten();
  std::mt19937_64 rng(6);
  for (int i = 0; i < 5; ++i) env.step(random_action(rng));
  EXPECT_NE(env.state_hash(), initial);
  EXPECT_EQ(env.reset().flatten(), obs);
  EXPECT_EQ(env.state_hash(), initial);
}

TEST(Environment, ScriptedOracleScoresPerfectlyOnOneNote) {
  Environment env(EnvConfig{}, songs::single_note());
  ScriptedPolicy policy;
  const EpisodeReport report = run_episode(env, policy, 0);
  EXPECT_EQ(report.f1, 1.0);
  EXPECT_EQ(report.precision, 1.0);
  EXPECT_EQ(report.recall, 1.0);
}

TEST(Environment, ActiveFalsePositiveSourceIgnoresSustain) {
  // with the pedal down a released key keeps sounding; only the sounding
  // source penalizes it
  Score score;
  score.notes.push_back({.pitch = 60, .onset = 0.0, .offset = 0.3});
  score.notes.push_back({.pitch = 64, .onset = 0.3, .offset = 0.6});
  normalize(score);
  auto run = [&](KeySource source) {
    EnvConfig config;
    config.false_positive = source;
    Environment env(config, score);
    const HandModel& model = env.model();
    double r_last = 0.0;
    while (!env.done()) {
      auto action = model.encode_state(model.rest_state(), 1.0);
      const bool first = env.frame() < 5;
      action[dof::press(0, 0)] = first ? 1.0 : -1.0;
      action[dof::press(0, 2)] = first ? -1.0 : 1.0;
      r_last = env.step(action).reward.r_key;
    }
    return r_last;
  };
  EXPECT_LT(run(KeySource::kSounding), 0.6);
  EXPECT_GT(run(KeySource::kActive), 0.9);
}

TEST(EnvConfig, Validation) {
  EnvConfig config;
  config.dt_physics = 0.003;
  EXPECT_THROW(Environment(config, songs::single_note()), std::invalid_argument);
  config = {};
  config.lookahead = -1;
  EXPECT_THROW(config.validate(), std::invalid_argument);
  config = {};
  config.weights.energy = -1;
  EXPECT_THROW(config.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace pianobench
