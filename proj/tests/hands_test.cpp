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

#include "pianobench/hands.hpp"

#include <gtest/gtest.h>

#include <random>

namespace pianobench {
namespace {

constexpr double kDtControl = 0.05;
constexpr double kDtPhysics = 0.005;

std::vector<double> random_action(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.5, 1.5);  // includes out-of-range values
  std::vector<double> a(kActionDim);
  for (auto& x : a) x = u(rng);
  return a;
}

TEST(Hands, ZeroActionIsRestPose) {
  const HandModel model;
  const HandState rest = model.rest_state();
  const auto trajectory = apply_action(model, rest, std::vector<double>(kActionDim, 0.0), kDtControl, kDtPhysics);
  EXPECT_EQ(trajectory.samples.back().state, rest);
  EXPECT_EQ(energy(trajectory), 0.0);
  // right thumb over C4, right middle over E4, left middle over E3
  EXPECT_EQ(model.layout().key_at(model.fingertip_x(rest, 0)), key_index(60));
  EXPECT_EQ(model.layout().key_at(model.fingertip_x(rest, 2)), key_index(64));
  EXPECT_EQ(model.layout().key_at(model.fingertip_x(rest, 7)), key_index(52));
}

TEST(Hands, FixedPointActionKeepsState) {
  const HandModel model;
  std::mt19937_64 rng(3);
  HandState state = model.rest_state();
  for (int i = 0; i < 20; ++i) {
    state = apply_action(model, state, random_action(rng), kDtControl, kDtPhysics).samples.back().state;
  }
  state.qd.fill(0.0);
  const auto trajectory = apply_action(model, state, model.encode_state(state), kDtControl, kDtPhysics);
  for (int i = 0; i < kHandDofs; ++i) EXPECT_NEAR(trajectory.samples.back().state.q[i], state.q[i], 1e-9);
}

TEST(Hands, PressStepResponseRisesMonotonically) {
  const HandModel model;
  std::vector<double> action(kActionDim, 0.0);
  action[dof::press(0, 0)] = 1.0;
  HandState state = model.rest_state();
  const int key = key_index(60);
  double previous = 0.0;
  for (int step = 0; step < 10; ++step) {
    const auto trajectory = apply_action(model, state, action, kDtControl, kDtPhysics);
    for (const auto& sample : trajectory.samples) {
      EXPECT_GE(sample.loads[key], previous);
      EXPECT_LE(sample.loads[key], 1.0);
      previous = sample.loads[key];
    }
    state = trajectory.samples.back().state;
  }
  EXPECT_GT(previous, 0.99);
}

TEST(Hands, LimitsHoldAndFingersNeverCross) {
  const HandModel model;
  std::mt19937_64 rng(8);
  HandState state = model.rest_state();
  for (int step = 0; step < 500; ++step) {
    const auto trajectory = apply_action(model, state, random_action(rng), kDtControl, kDtPhysics);
    for (const auto& sample : trajectory.samples) {
      for (int i = 0; i < kHandDofs; ++i) {
        ASSERT_GE(sample.state.q[i], model.spec(i).lo);
        ASSERT_LE(sample.state.q[i], model.spec(i).hi);
        ASSERT_LE(std::abs(sample.state.qd[i]), model.spec(i).speed_max);
      }
      for (int hand = 0; hand < kNumHands; ++hand) {
        for (int d = 0; d + 1 < kFingersPerHand; ++d) {
          const double a = sample.state.q[dof::offset(hand, d)];
          const double b = sample.state.q[dof::offset(hand, d + 1)];
          ASSERT_TRUE(hand == 0 ? a <= b : a >= b);
          ASSERT_LE(std::abs(a), model.span_max());
        }
      }
    }
    state = trajectory.samples.back().state;
  }
}

TEST(Hands, MaskedDofsNeverMoveAndCostNothing) {
  HandConfig config;
  config.mask = ActionMask::reduced();
  config.mask.freeze(dof::base(1));
  const HandModel model(config);
  std::mt19937_64 rng(12);
  HandState state = model.rest_state();
  const HandState rest = state;
  for (int step = 0; step < 50; ++step) {
    const auto trajectory = apply_action(model, state, random_action(rng), kDtControl, kDtPhysics);
    for (const auto& sample : trajectory.samples) {
      for (int i = 0; i < kHandDofs; ++i) {
        if (config.mask.active(i)) continue;
        ASSERT_EQ(sample.state.q[i], rest.q[i]);
        ASSERT_EQ(sample.force[i], 0.0);
      }
    }
    state = trajectory.samples.back().state;
  }
  EXPECT_EQ(config.mask.num_active(), kActionDim - 11);
}

TEST(Hands, DeterministicTrajectories) {
  const HandModel model;
  std::mt19937_64 rng(21);
  const auto action = random_action(rng);
  const auto a = apply_action(model, model.rest_state(), action, kDtControl, kDtPhysics);
  const auto b = apply_action(model, model.rest_state(), action, kDtControl, kDtPhysics);
  for (std::size_t s = 0; s < a.samples.size(); ++s) {
    EXPECT_EQ(a.samples[s].state, b.samples[s].state);
    EXPECT_EQ(a.samples[s].force, b.samples[s].force);
  }
}

TEST(Energy, DoublingKpIncreasesEnergy) {
  HandConfig soft;
  soft.kd = 40.0;  // same damping for both
  HandConfig stiff = soft;
  stiff.kp = 800.0;
  std::vector<double> action(kActionDim, 0.0);
  action[dof::base(0)] = 0.05;
  const HandModel a(soft);
  const HandModel b(stiff);
  const double ea = energy(apply_action(a, a.rest_state(), action, kDtControl, kDtPhysics));
  const double eb = energy(apply_action(b, b.rest_state(), action, kDtControl, kDtPhysics));
  EXPECT_GT(ea, 0.0);
  EXPECT_GT(eb, ea);
}

TEST(Energy, BoundedByMaxStepEnergy) {
  const HandModel model;
  std::mt19937_64 rng(5);
  HandState state = model.rest_state();
  const double bound = model.max_step_energy(kDtControl);
  for (int step = 0; step < 300; ++step) {
    const auto trajectory = apply_action(model, state, random_action(rng), kDtControl, kDtPhysics);
    ASSERT_LE(energy(trajectory), bound);
    state = trajectory.samples.back().state;
  }
}

TEST(Hands, KeyLoadsDeepestPressWins) {
  const HandModel model;
  HandState state = model.rest_state();
  // slide right index onto the thumb's key
  state.q[dof::offset(0, 1)] = model.spec(dof::offset(0, 1)).lo;
  state.q[dof::offset(0, 0)] = model.spec(dof::offset(0, 0)).hi;
  const auto k0 = model.layout().key_at(model.fingertip_x(state, 0));
  const auto k1 = model.layout().key_at(model.fingertip_x(state, 1));
  ASSERT_EQ(k0, k1);
  state.q[dof::press(0, 0)] = 0.3;
  state.q[dof::press(0, 1)] = 0.7;
  EXPECT_EQ(model.key_loads(state)[*k0], 0.7);
}

TEST(Hands, RejectsBadInput) {
  const HandModel model;
  EXPECT_THROW(apply_action(model, model.rest_state(), std::vector<double>(5), kDtControl, kDtPhysics),
               std::invalid_argument);
  EXPECT_THROW(substep_count(0.05, 0.003), std::invalid_argument);
  EXPECT_EQ(substep_count(0.05, 0.005), 10);
  HandConfig bad_gain;
  bad_gain.kp = -1.0;
  EXPECT_THROW(HandModel{bad_gain}, std::invalid_argument);
  EXPECT_THROW(ActionMask::from_name("nope"), std::invalid_argument);
}

}  // namespace
}  // namespace pianobench
