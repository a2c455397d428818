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

// Finite-horizon piano-playing task: goal-conditioned observations with
// lookahead, shaped reward, and framewise evaluation.

#ifndef PIANOBENCH_ENV_HPP_
#define PIANOBENCH_ENV_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pianobench/hands.hpp"
#include "pianobench/keyboard.hpp"
#include "pianobench/metrics.hpp"
#include "pianobench/score.hpp"
#include "pianobench/text.hpp"

namespace pianobench {

// Shaping function with a Gaussian tail: 1 inside [0, bounds], then decays
// so that it equals 0.1 at bounds + margin.
inline double tolerance(double distance, double bounds, double margin) {
  if (!(margin > 0.0)) throw std::invalid_argument("tolerance: margin must be positive");
  if (distance <= bounds) return 1.0;
  static const double kScale = std::sqrt(-2.0 * std::log(0.1));
  const double z = kScale * (distance - bounds) / margin;
  return std::exp(-0.5 * z * z);
}

struct ToleranceParams {
  double bounds = 0.0;
  double margin = 1.0;
};

struct RewardWeights {
  double key = 1.0;
  double finger = 1.0;
  double energy = 0.005;
};

// Which key set counts as "playing" a key.
enum class KeySource { kSounding, kActive };

inline KeySource key_source_from_name(std::string_view name) {
  if (name == "sounding") return KeySource::kSounding;
  if (name == "active") return KeySource::kActive;
  throw std::invalid_argument("unknown key source '" + std::string(name) +
                              "' (expected sounding|active)");
}

inline const char* key_source_name(KeySource source) {
  return source == KeySource::kSounding ? "sounding" : "active";
}

struct EnvConfig {
  double dt_control = 0.05;
  double dt_physics = 0.005;
  int lookahead = 10;
  RewardWeights weights;
  ToleranceParams key_tolerance{0.05, 0.5};
  ToleranceParams finger_tolerance{0.01, 0.1};
  KeyboardConfig keyboard;
  HandConfig hands;
  // Carried for agents; the environment itself never discounts.
  double discount = 0.99;
  KeySource false_positive = KeySource::kSounding;
  KeySource played = KeySource::kActive;

  void validate() const {
    substep_count(dt_control, dt_physics);
    if (lookahead < 0) throw std::invalid_argument("lookahead must be >= 0");
    if (weights.key < 0.0 || weights.finger < 0.0 || weights.energy < 0.0) {
      throw std::invalid_argument("reward weights must be >= 0");
    }
    if (!(key_tolerance.margin > 0.0) || !(finger_tolerance.margin > 0.0) ||
        key_tolerance.bounds < 0.0 || finger_tolerance.bounds < 0.0) {
      throw std::invalid_argument("tolerance needs bounds >= 0 and margin > 0");
    }
    if (!(discount >= 0.0 && discount < 1.0)) throw std::invalid_argument("discount must be in [0, 1)");
    if (!(keyboard.tau_key > 0.0)) throw std::invalid_argument("tau_key must be positive");
    keyboard.threshold();
  }
};

struct RewardBreakdown {
  double r_key = 0.0;
  double r_finger = 0.0;
  double r_energy = 0.0;
  double r_total = 0.0;
  friend bool operator==(const RewardBreakdown&, const RewardBreakdown&) = default;
};

inline bool has_false_positive(const KeySet& goal, const KeySet& playing) {
  return (playing & ~goal).any();
}

// Half for how fully the goal keys are depressed, half for playing nothing
// else. An empty goal frame counts as fully satisfied.
inline double reward_key(const KeySet& goal, const KeyDepressions& depression,
                         bool false_positive, const ToleranceParams& params) {
  double press_term = 1.0;
  if (goal.any()) {
    double sum = 0.0;
    for (int k = 0; k < kNumKeys; ++k) {
      if (goal[k]) sum += tolerance(std::abs(depression[k] - 1.0), params.bounds, params.margin);
    }
    press_term = sum / static_cast<double>(goal.count());
  }
  return 0.5 * press_term + 0.5 * (false_positive ? 0.0 : 1.0);
}

// Mean shaped distance from each labeled finger to the center of its key;
// 1 when the frame has no labeled notes.
inline double reward_finger(std::span<const FingerAssignment> assignments,
                            const FingertipPositions& fingertips, const KeyLayout& layout,
                            const ToleranceParams& params) {
  if (assignments.empty()) return 1.0;
  double sum = 0.0;
  for (const auto& a : assignments) {
    const double distance = std::abs(fingertips[a.finger] - layout.center(a.key));
    sum += tolerance(distance, params.bounds, params.margin);
  }
  return sum / static_cast<double>(assignments.size());
}

inline RewardBreakdown combine_reward(double r_key, double r_finger, double r_energy,
                                      const RewardWeights& weights) {
  return {r_key, r_finger, r_energy,
          weights.key * r_key + weights.finger * r_finger - weights.energy * r_energy};
}

inline int observation_dim(int lookahead) {
  return kHandDofs * 2 + 6 + kNumKeys + 1 + (lookahead + 1) * (kNumKeys + kNumFingers + 1);
}

struct Observation {
  DofVector hand_q{};
  DofVector hand_qd{};
  std::array<double, 6> forearm{};
  KeyDepressions keys{};
  bool sustain = false;
  std::vector<KeySet> goal;        // frames t..t+L, empty past the end
  std::vector<FingerSet> fingers;  // same rows
  std::vector<std::uint8_t> sustain_goal;

  // Layout: hand_q, hand_qd, forearm, keys, sustain, goal rows (88 each),
  // finger rows (10 each), sustain goal (one per row).
  std::vector<double> flatten() const {
    std::vector<double> out;
    out.reserve(observation_dim(static_cast<int>(goal.size()) - 1));
    out.insert(out.end(), hand_q.begin(), hand_q.end());
    out.insert(out.end(), hand_qd.begin(), hand_qd.end());
    out.insert(out.end(), forearm.begin(), forearm.end());
    out.insert(out.end(), keys.begin(), keys.end());
    out.push_back(sustain ? 1.0 : 0.0);
    for (const auto& row : goal) {
      for (int k = 0; k < kNumKeys; ++k) out.push_back(row[k] ? 1.0 : 0.0);
    }
    for (const auto& row : fingers) {
      for (int f = 0; f < kNumFingers; ++f) out.push_back(row[f] ? 1.0 : 0.0);
    }
    for (auto s : sustain_goal) out.push_back(s ? 1.0 : 0.0);
    return out;
  }
};

inline std::uint64_t observation_hash(std::span<const double> flat) {
  return fnv1a(flat.data(), flat.size() * sizeof(double));
}

struct PlantState {
  HandState hands;
  KeyboardState keyboard;
  friend bool operator==(const PlantState&, const PlantState&) = default;
};

struct StepInfo {
  std::size_t frame = 0;  // frame the step was scored against
  double precision = 1.0;  // running, over frames so far
  double recall = 1.0;
  double f1 = 1.0;
  RewardTotals totals;
  KeySet played;
  std::vector<SynthEvent> events;
};

struct StepResult {
  Observation observation;
  RewardBreakdown reward;
  bool done = false;
  StepInfo info;
};

class Environment {
 public:
  Environment(EnvConfig config, std::shared_ptr<const PianoRoll> roll)
      : config_(std::move(config)), model_(config_.hands), roll_(std::move(roll)) {
    config_.validate();
    if (!roll_) throw std::invalid_argument("Environment: null piano roll");
    if (std::abs(roll_->dt - config_.dt_control) > 1e-12) {
      throw std::invalid_argument("Environment: roll dt " + format_double(roll_->dt) +
                                  " differs from dt_control " + format_double(config_.dt_control));
    }
    reset();
  }

  Environment(EnvConfig config, const Score& score)
      : Environment(config, std::make_shared<const PianoRoll>(to_piano_roll(score, config.dt_control))) {}

  Observation reset() {
    plant_ = {model_.rest_state(), KeyboardState{}};
    frame_ = 0;
    played_.clear();
    accumulator_ = {};
    totals_ = {};
    return observe();
  }

  StepResult step(std::span<const double> action) {
    if (done()) throw std::logic_error("step called on a finished episode; call reset()");
    const HandTrajectory trajectory =
        apply_action(model_, plant_.hands, action, config_.dt_control, config_.dt_physics);

    StepResult result;
    const double t0 = static_cast<double>(frame_) * config_.dt_control;
    for (std::size_t s = 0; s < trajectory.samples.size(); ++s) {
      const KeySet before = plant_.keyboard.sounding;
      plant_.keyboard = step_keys(plant_.keyboard, trajectory.samples[s].loads,
                                  trajectory.sustain_cmd, config_.dt_physics, config_.keyboard);
      append_synth_events(before, plant_.keyboard.sounding,
                          t0 + static_cast<double>(s + 1) * config_.dt_physics,
                          result.info.events);
    }
    plant_.hands = trajectory.samples.back().state;

    const KeySet& goal = roll_->frames[frame_];
    const double threshold = config_.keyboard.threshold();
    const KeySet active = active_keys(plant_.keyboard, threshold);
    const KeySet& fp_keys =
        config_.false_positive == KeySource::kSounding ? plant_.keyboard.sounding : active;
    const double r_key = reward_key(goal, plant_.keyboard.depression,
                                    has_false_positive(goal, fp_keys), config_.key_tolerance);
    const double r_finger = reward_finger(roll_->assignments[frame_], model_.fingertips(plant_.hands),
                                          model_.layout(), config_.finger_tolerance);
    result.reward = combine_reward(r_key, r_finger, energy(trajectory), config_.weights);

    totals_.key += result.reward.r_key;
    totals_.finger += result.reward.r_finger;
    totals_.energy += result.reward.r_energy;
    totals_.total += result.reward.r_total;

    const KeySet played = config_.played == KeySource::kActive ? active : plant_.keyboard.sounding;
    played_.push_back(played);
    accumulator_.add(frame_prf(goal, played));

    result.info.frame = frame_;
    result.info.precision = accumulator_.precision();
    result.info.recall = accumulator_.recall();
    result.info.f1 = accumulator_.f1();
    result.info.totals = totals_;
    result.info.played = played;

    ++frame_;
    result.done = done();
    result.observation = observe();
    return result;
  }

  Observation observe() const {
    Observation obs;
    obs.hand_q = plant_.hands.q;
    obs.hand_qd = plant_.hands.qd;
    obs.forearm = model_.forearm_positions(plant_.hands);
    obs.keys = plant_.keyboard.depression;
    obs.sustain = plant_.keyboard.sustained;
    const std::size_t rows = static_cast<std::size_t>(config_.lookahead) + 1;
    obs.goal.assign(rows, KeySet{});
    obs.fingers.assign(rows, FingerSet{});
    obs.sustain_goal.assign(rows, 0);
    for (std::size_t r = 0; r < rows; ++r) {
      const std::size_t f = frame_ + r;
      if (f >= roll_->num_frames()) break;
      obs.goal[r] = roll_->frames[f];
      obs.fingers[r] = roll_->fingers[f];
      obs.sustain_goal[r] = roll_->sustain[f];
    }
    return obs;
  }

  // Framewise report over the frames played so far, with reward totals.
  EpisodeReport report() const {
    const std::span<const KeySet> goal(roll_->frames.data(), played_.size());
    EpisodeReport report = episode_prf(goal, played_);
    report.rewards = totals_;
    return report;
  }

  std::uint64_t state_hash() const {
    std::uint64_t h = fnv1a(plant_.hands.q.data(), sizeof(double) * kHandDofs);
    h = fnv1a(plant_.hands.qd.data(), sizeof(double) * kHandDofs, h);
    h = fnv1a(plant_.keyboard.depression.data(), sizeof(double) * kNumKeys, h);
    const std::string bits = plant_.keyboard.sounding.to_string() +
                             plant_.keyboard.just_struck.to_string() +
                             (plant_.keyboard.sustained ? "1" : "0");
    h = fnv1a(bits.data(), bits.size(), h);
    return fnv1a(&frame_, sizeof(frame_), h);
  }

  bool done() const { return frame_ >= roll_->num_frames(); }
  std::size_t frame() const { return frame_; }
  std::size_t num_frames() const { return roll_->num_frames(); }
  double time() const { return static_cast<double>(frame_) * config_.dt_control; }
  const EnvConfig& config() const { return config_; }
  const HandModel& model() const { return model_; }
  const PianoRoll& roll() const { return *roll_; }
  const std::shared_ptr<const PianoRoll>& roll_ptr() const { return roll_; }
  const PlantState& plant() const { return plant_; }
  const std::vector<KeySet>& played() const { return played_; }
  const RewardTotals& totals() const { return totals_; }
  int observation_size() const { return observation_dim(config_.lookahead); }

  // Test and tooling hook: overwrite the physical state mid-episode.
  void set_plant(const PlantState& plant) { plant_ = plant; }

 private:
  EnvConfig config_;
  HandModel model_;
  std::shared_ptr<const PianoRoll> roll_;
  PlantState plant_;
  std::size_t frame_ = 0;
  std::vector<KeySet> played_;
  PrfAccumulator accumulator_;
  RewardTotals totals_;
};

}  // namespace pianobench

#endif  // PIANOBENCH_ENV_HPP_
