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

// Simplified bimanual hand plant.
//
// Each hand has 11 degrees of freedom: a base translation along the keyboard,
// and per finger a lateral offset from the base and a press depth in [0, 1].
// Targets arrive at the control rate and are tracked by PD control integrated
// at the physics rate (unit mass, semi-implicit Euler).
//
// Degree-of-freedom and action layout (right hand first, so finger indices
// 0-4 belong to hand 0 and 5-9 to hand 1):
//
//   [hand*11 + 0]       base x
//   [hand*11 + 1 + i]   finger i lateral offset
//   [hand*11 + 6 + i]   finger i press
//   [22]                sustain pedal (action only)

#ifndef PIANOBENCH_HANDS_HPP_
#define PIANOBENCH_HANDS_HPP_

#include <algorithm>
#include <array>
#include <bitset>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pianobench/keyboard.hpp"
#include "pianobench/layout.hpp"

namespace pianobench {

inline constexpr int kNumHands = 2;
inline constexpr int kFingersPerHand = 5;
inline constexpr int kDofsPerHand = 11;
inline constexpr int kHandDofs = kNumHands * kDofsPerHand;
inline constexpr int kSustainDim = kHandDofs;
inline constexpr int kActionDim = kHandDofs + 1;

namespace dof {
constexpr int base(int hand) { return hand * kDofsPerHand; }
constexpr int offset(int hand, int digit) { return hand * kDofsPerHand + 1 + digit; }
constexpr int press(int hand, int digit) { return hand * kDofsPerHand + 6 + digit; }
constexpr int hand_of_finger(int finger) { return finger / kFingersPerHand; }
constexpr int digit_of_finger(int finger) { return finger % kFingersPerHand; }
}  // namespace dof

// Frozen action dimensions keep their rest value whatever the agent sends.
class ActionMask {
 public:
  ActionMask() { active_.set(); }

  static ActionMask full() { return {}; }

  // Lateral finger offsets frozen: base, presses and pedal remain.
  static ActionMask reduced() {
    ActionMask mask;
    for (int hand = 0; hand < kNumHands; ++hand) {
      for (int digit = 0; digit < kFingersPerHand; ++digit) mask.freeze(dof::offset(hand, digit));
    }
    return mask;
  }

  static ActionMask from_name(std::string_view name) {
    if (name == "full") return full();
    if (name == "reduced") return reduced();
    throw std::invalid_argument("unknown action mask preset '" + std::string(name) +
                                "' (expected full|reduced)");
  }

  void freeze(int dim) { active_.reset(dim); }
  bool active(int dim) const { return active_[dim]; }
  int num_active() const { return static_cast<int>(active_.count()); }
  const std::bitset<kActionDim>& bits() const { return active_; }

  friend bool operator==(const ActionMask&, const ActionMask&) = default;

 private:
  std::bitset<kActionDim> active_;
};

struct HandConfig {
  double kp = 400.0;  // 1/s^2
  double kd = 0.0;    // 1/s; 0 selects critical damping 2*sqrt(kp)
  KeyboardGeometry geometry;
  int right_rest_pitch = 64;  // E4 under the right middle finger
  int left_rest_pitch = 52;   // E3 under the left middle finger
  double finger_spacing = 0.0;  // 0 selects the white-key pitch
  double base_speed_max = 2.0;     // m/s
  double offset_speed_max = 1.0;   // m/s
  double press_speed_max = 20.0;   // 1/s
  double forearm_y = 0.4;
  double forearm_z = 0.13;
  ActionMask mask;

  double damping() const { return kd > 0.0 ? kd : 2.0 * std::sqrt(kp); }
};

struct DofSpec {
  double lo = 0.0;  // position limits
  double hi = 0.0;
  double target_lo = 0.0;  // action -1 maps here
  double target_hi = 0.0;  // action +1 maps here
  double speed_max = 0.0;
  double rest = 0.0;
};

struct HandState {
  std::array<double, kHandDofs> q{};
  std::array<double, kHandDofs> qd{};
  friend bool operator==(const HandState&, const HandState&) = default;
};

using DofVector = std::array<double, kHandDofs>;
using FingertipPositions = std::array<double, kNumFingers>;

// Limits, ranges and geometry resolved from a HandConfig.
class HandModel {
 public:
  explicit HandModel(const HandConfig& config = {}) : config_(config), layout_(config.geometry) {
    if (!(config.kp > 0.0) || config.kd < 0.0) {
      throw std::invalid_argument("HandModel: kp must be positive and kd non-negative");
    }
    if (!is_piano_pitch(config.right_rest_pitch) || !is_piano_pitch(config.left_rest_pitch)) {
      throw std::invalid_argument("HandModel: rest pitches must be piano keys");
    }
    spacing_ = config.finger_spacing > 0.0 ? config.finger_spacing : config.geometry.white_pitch;
    const double width = layout_.width();
    for (int hand = 0; hand < kNumHands; ++hand) {
      const int rest_pitch = hand == 0 ? config.right_rest_pitch : config.left_rest_pitch;
      const double rest = layout_.center(key_index(rest_pitch));
      const double reach = std::min(rest, width - rest);
      specs_[dof::base(hand)] = {0.0, width, rest - reach, rest + reach, config.base_speed_max, rest};
      for (int digit = 0; digit < kFingersPerHand; ++digit) {
        // Right thumb is leftmost, left thumb rightmost. Windows of adjacent
        // fingers touch but never overlap, so fingers cannot cross.
        const double center = (hand == 0 ? digit - 2 : 2 - digit) * spacing_;
        const double lo = center - 0.5 * spacing_;
        const double hi = center + 0.5 * spacing_;
        specs_[dof::offset(hand, digit)] = {lo, hi, lo, hi, config.offset_speed_max, center};
        specs_[dof::press(hand, digit)] = {0.0, 1.0, -1.0, 1.0, config.press_speed_max, 0.0};
      }
    }
  }

  const HandConfig& config() const { return config_; }
  const KeyLayout& layout() const { return layout_; }
  const ActionMask& mask() const { return config_.mask; }
  const DofSpec& spec(int dof) const { return specs_[dof]; }
  double finger_spacing() const { return spacing_; }
  double span_max() const { return 2.5 * spacing_; }

  HandState rest_state() const {
    HandState state;
    for (int i = 0; i < kHandDofs; ++i) state.q[i] = specs_[i].rest;
    return state;
  }

  // Physical target for one action value; inputs outside [-1, 1] are clamped.
  double target(int dof, double action) const {
    const auto& s = specs_[dof];
    const double a = std::clamp(action, -1.0, 1.0);
    return s.target_lo + 0.5 * (a + 1.0) * (s.target_hi - s.target_lo);
  }

  // Inverse of target() on the target range.
  double encode(int dof, double target) const {
    const auto& s = specs_[dof];
    return 2.0 * (target - s.target_lo) / (s.target_hi - s.target_lo) - 1.0;
  }

  // Action re-encoding of a state's positions (its PD fixed point).
  std::vector<double> encode_state(const HandState& state, double sustain = 0.0) const {
    std::vector<double> action(kActionDim, 0.0);
    for (int i = 0; i < kHandDofs; ++i) action[i] = encode(i, state.q[i]);
    action[kSustainDim] = sustain;
    return action;
  }

  DofVector targets(std::span<const double> action) const {
    DofVector out{};
    for (int i = 0; i < kHandDofs; ++i) {
      out[i] = config_.mask.active(i) ? target(i, action[i]) : specs_[i].rest;
    }
    return out;
  }

  double sustain_command(std::span<const double> action) const {
    return config_.mask.active(kSustainDim) ? std::clamp(action[kSustainDim], -1.0, 1.0) : 0.0;
  }

  // One PD substep in place; writes the generalized force of each DOF.
  void substep(HandState& state, const DofVector& targets, double dt, DofVector& force) const {
    const double kp = config_.kp;
    const double kd = config_.damping();
    for (int i = 0; i < kHandDofs; ++i) {
      if (!config_.mask.active(i)) {
        state.qd[i] = 0.0;
        force[i] = 0.0;
        continue;
      }
      const auto& s = specs_[i];
      const double f = kp * (targets[i] - state.q[i]) - kd * state.qd[i];
      double v = std::clamp(state.qd[i] + f * dt, -s.speed_max, s.speed_max);
      double x = state.q[i] + v * dt;
      if (x < s.lo) {
        x = s.lo;
        v = 0.0;
      } else if (x > s.hi) {
        x = s.hi;
        v = 0.0;
      }
      state.q[i] = x;
      state.qd[i] = v;
      force[i] = f;
    }
  }

  double fingertip_x(const HandState& state, int finger) const {
    const int hand = dof::hand_of_finger(finger);
    const int digit = dof::digit_of_finger(finger);
    return state.q[dof::base(hand)] + state.q[dof::offset(hand, digit)];
  }

  FingertipPositions fingertips(const HandState& state) const {
    FingertipPositions out{};
    for (int f = 0; f < kNumFingers; ++f) out[f] = fingertip_x(state, f);
    return out;
  }

  // Each fingertip loads the key beneath it with its press depth; a key
  // under several fingers takes the deepest press.
  KeyLoads key_loads(const HandState& state) const {
    KeyLoads loads{};
    for (int f = 0; f < kNumFingers; ++f) {
      const auto key = layout_.key_at(fingertip_x(state, f));
      if (!key) continue;
      const int hand = dof::hand_of_finger(f);
      const double press = state.q[dof::press(hand, dof::digit_of_finger(f))];
      loads[*key] = std::max(loads[*key], press);
    }
    return loads;
  }

  // Forearm (x, y, z) per hand; y and z are fixed on this plant.
  std::array<double, 6> forearm_positions(const HandState& state) const {
    return {state.q[dof::base(0)], config_.forearm_y, config_.forearm_z,
            state.q[dof::base(1)], config_.forearm_y, config_.forearm_z};
  }

  // Upper bound on energy() over one control step of length dt.
  double max_step_energy(double dt) const {
    const double kp = config_.kp;
    const double kd = config_.damping();
    double total = 0.0;
    for (int i = 0; i < kHandDofs; ++i) {
      if (!config_.mask.active(i)) continue;
      const auto& s = specs_[i];
      const double max_error = std::max(std::abs(s.target_hi - s.lo), std::abs(s.hi - s.target_lo));
      total += (kp * max_error + kd * s.speed_max) * s.speed_max;
    }
    return total * dt;
  }

 private:
  HandConfig config_;
  KeyLayout layout_;
  double spacing_ = 0.0;
  std::array<DofSpec, kHandDofs> specs_{};
};

struct HandSample {
  HandState state;  // after the substep
  DofVector force{};
  KeyLoads loads{};
};

struct HandTrajectory {
  double dt_physics = 0.0;
  double sustain_cmd = 0.0;
  std::vector<HandSample> samples;
};

// Number of physics substeps per control step; throws unless dt_control is a
// positive integer multiple of dt_physics.
inline int substep_count(double dt_control, double dt_physics) {
  if (!(dt_control > 0.0) || !(dt_physics > 0.0)) {
    throw std::invalid_argument("timesteps must be positive");
  }
  const double ratio = dt_control / dt_physics;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    throw std::invalid_argument("dt_control (" + format_double(dt_control) +
                                ") must be an integer multiple of dt_physics (" +
                                format_double(dt_physics) + ")");
  }
  return static_cast<int>(rounded);
}

inline HandTrajectory apply_action(const HandModel& model, const HandState& state,
                                   std::span<const double> action, double dt_control,
                                   double dt_physics) {
  if (action.size() != static_cast<std::size_t>(kActionDim)) {
    throw std::invalid_argument("action has " + std::to_string(action.size()) +
                                " values, expected " + std::to_string(kActionDim));
  }
  const int substeps = substep_count(dt_control, dt_physics);
  const DofVector targets = model.targets(action);
  HandTrajectory trajectory;
  trajectory.dt_physics = dt_physics;
  trajectory.sustain_cmd = model.sustain_command(action);
  trajectory.samples.reserve(substeps);
  HandState current = state;
  for (int s = 0; s < substeps; ++s) {
    HandSample sample;
    model.substep(current, targets, dt_physics, sample.force);
    sample.state = current;
    sample.loads = model.key_loads(current);
    trajectory.samples.push_back(sample);
  }
  return trajectory;
}

// Sum over substeps and DOFs of |force| * |velocity| * dt.
inline double energy(const HandTrajectory& trajectory) {
  double total = 0.0;
  for (const auto& sample : trajectory.samples) {
    for (int i = 0; i < kHandDofs; ++i) {
      total += std::abs(sample.force[i]) * std::abs(sample.state.qd[i]) * trajectory.dt_physics;
    }
  }
  return total;
}

}  // namespace pianobench

#endif  // PIANOBENCH_HANDS_HPP_
