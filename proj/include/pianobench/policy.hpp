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

// In-process action sources for episodes: the baselines used by the CLI and
// by dataset logging.

#ifndef PIANOBENCH_POLICY_HPP_
#define PIANOBENCH_POLICY_HPP_

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "pianobench/env.hpp"
#include "pianobench/planner.hpp"

namespace pianobench {

class Policy {
 public:
  virtual ~Policy() = default;
  virtual void reset(std::uint64_t seed) = 0;
  virtual std::vector<double> act(const Environment& env) = 0;
};

// All-zero action: hands hold the rest pose, nothing pressed, pedal up.
class ZeroPolicy final : public Policy {
 public:
  void reset(std::uint64_t) override {}
  std::vector<double> act(const Environment&) override {
    return std::vector<double>(kActionDim, 0.0);
  }
};

class RandomPolicy final : public Policy {
 public:
  void reset(std::uint64_t seed) override { rng_.seed(seed); }
  std::vector<double> act(const Environment&) override {
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    std::vector<double> action(kActionDim);
    for (auto& a : action) a = uniform(rng_);
    return action;
  }

 private:
  std::mt19937_64 rng_;
};

// Scripted reference player. Hands stay in the rest pose; a goal key is
// played by its labeled finger, or else by the finger resting over it.
// Presses start early enough that the key activates during exactly the
// control step of the note's first frame. Keys out of reach of the rest
// pose are ignored, so this is an oracle only for songs that fit under it.
class ScriptedPolicy final : public Policy {
 public:
  void reset(std::uint64_t) override { lead_ = -1; }

  std::vector<double> act(const Environment& env) override {
    if (lead_ < 0) lead_ = press_lead(env.config());
    const HandModel& model = env.model();
    const HandState rest = model.rest_state();
    std::vector<double> action = model.encode_state(rest, 0.0);
    const PianoRoll& roll = env.roll();
    std::array<bool, kNumFingers> press{};
    for (int j = 0; j <= lead_; ++j) {
      const std::size_t f = env.frame() + static_cast<std::size_t>(j);
      if (f >= roll.num_frames()) break;
      for (int key = 0; key < kNumKeys; ++key) {
        if (!roll.frames[f][key]) continue;
        const int finger = finger_for(roll, f, key, model, rest);
        if (finger >= 0) press[finger] = true;
      }
    }
    for (int finger = 0; finger < kNumFingers; ++finger) {
      const int hand = dof::hand_of_finger(finger);
      action[dof::press(hand, dof::digit_of_finger(finger))] = press[finger] ? 1.0 : -1.0;
    }
    return action;
  }

  // Control steps a press must lead the target frame: the number of steps
  // from rest until a fully commanded key turns active, minus one.
  static int press_lead(const EnvConfig& config) {
    Score probe;
    const HandModel model(config.hands);
    const int finger = 0;
    const auto key = model.layout().key_at(model.fingertip_x(model.rest_state(), finger));
    if (!key) return 0;
    probe.notes.push_back({.pitch = key_pitch(*key), .onset = 0.0, .offset = 10.0});
    normalize(probe);
    Environment env(config, probe);
    std::vector<double> action = model.encode_state(model.rest_state(), 0.0);
    action[dof::press(0, 0)] = 1.0;
    const double threshold = config.keyboard.threshold();
    for (int step = 0; !env.done(); ++step) {
      env.step(action);
      if (env.plant().keyboard.depression[*key] >= threshold) return step;
    }
    return 0;
  }

 private:
  static int finger_for(const PianoRoll& roll, std::size_t frame, int key, const HandModel& model,
                        const HandState& rest) {
    for (const auto& a : roll.assignments[frame]) {
      if (a.key == key) return a.finger;
    }
    for (int finger = 0; finger < kNumFingers; ++finger) {
      if (model.layout().key_at(model.fingertip_x(rest, finger)) == key) return finger;
    }
    return -1;
  }

  int lead_ = -1;
};

class MpcPolicy final : public Policy {
 public:
  MpcPolicy(const PlannerConfig& config, double dt_control) : controller_(config, dt_control) {}
  void reset(std::uint64_t seed) override { controller_.reset(seed); }
  std::vector<double> act(const Environment& env) override { return controller_.act(env); }

 private:
  MpcController controller_;
};

inline std::unique_ptr<Policy> make_policy(std::string_view name, const PlannerConfig& planner,
                                           double dt_control) {
  if (name == "zero") return std::make_unique<ZeroPolicy>();
  if (name == "random") return std::make_unique<RandomPolicy>();
  if (name == "scripted") return std::make_unique<ScriptedPolicy>();
  if (name == "mpc") return std::make_unique<MpcPolicy>(planner, dt_control);
  throw std::invalid_argument("unknown policy '" + std::string(name) +
                              "' (expected zero|random|scripted|mpc)");
}

// Resets env and policy and plays one episode.
inline EpisodeReport run_episode(Environment& env, Policy& policy, std::uint64_t seed,
                                 const StepCallback& on_step = {}) {
  Observation observation = env.reset();
  policy.reset(seed);
  while (!env.done()) {
    const std::vector<double> action = policy.act(env);
    StepResult result = env.step(action);
    if (on_step) on_step(observation, action, result);
    observation = std::move(result.observation);
  }
  return env.report();
}

}  // namespace pianobench

#endif  // PIANOBENCH_POLICY_HPP_
