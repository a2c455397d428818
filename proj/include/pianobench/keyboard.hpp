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

// Spring-returned keys with a sustain latch.
//
// Each key depression (0 = rest, 1 = bottomed out) relaxes exponentially
// toward the penetration commanded by whatever is pressing on it. A key is
// active once its depression reaches the activation threshold; active keys
// sound, and the latch keeps released keys sounding until it opens.

#ifndef PIANOBENCH_KEYBOARD_HPP_
#define PIANOBENCH_KEYBOARD_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "pianobench/score.hpp"
#include "pianobench/text.hpp"

namespace pianobench {

using KeyLoads = std::array<double, kNumKeys>;
using KeyDepressions = std::array<double, kNumKeys>;

// Normalized activation threshold for a key with `travel_deg` of rotation
// that counts as active within `margin_deg` of the bottom.
inline double activation_threshold(double travel_deg, double margin_deg) {
  if (!(travel_deg > 0.0) || !(margin_deg > 0.0) || margin_deg >= travel_deg) {
    throw std::invalid_argument("activation_threshold: need 0 < margin < travel");
  }
  return (travel_deg - margin_deg) / travel_deg;
}

struct KeyboardConfig {
  double tau_key = 0.01;  // seconds
  double travel_deg = 5.0;
  double activation_margin_deg = 0.5;  // fixed by the task definition
  double sustain_threshold = 0.5;

  double threshold() const { return activation_threshold(travel_deg, activation_margin_deg); }
};

struct KeyboardState {
  KeyDepressions depression{};
  bool sustained = false;
  KeySet sounding;
  KeySet just_struck;

  friend bool operator==(const KeyboardState&, const KeyboardState&) = default;
};

inline KeySet active_keys(const KeyDepressions& depression, double threshold) {
  KeySet active;
  for (int k = 0; k < kNumKeys; ++k) {
    if (depression[k] >= threshold) active.set(k);
  }
  return active;
}

inline KeySet active_keys(const KeyboardState& state, double threshold) {
  return active_keys(state.depression, threshold);
}

// One physics step of the keyboard. Loads and the pedal command are clamped
// to [0, 1]; nothing is rejected.
inline KeyboardState step_keys(const KeyboardState& state, const KeyLoads& load,
                               double sustain_cmd, double dt_physics,
                               const KeyboardConfig& config) {
  if (!(dt_physics > 0.0)) throw std::invalid_argument("step_keys: dt_physics must be positive");
  const double threshold = config.threshold();
  const double decay = std::exp(-dt_physics / config.tau_key);

  KeyboardState next;
  KeySet was_active;
  KeySet now_active;
  for (int k = 0; k < kNumKeys; ++k) {
    const double target = std::clamp(load[k], 0.0, 1.0);
    const double previous = state.depression[k];
    next.depression[k] = std::clamp(target + (previous - target) * decay, 0.0, 1.0);
    if (previous >= threshold) was_active.set(k);
    if (next.depression[k] >= threshold) now_active.set(k);
  }
  next.sustained = std::clamp(sustain_cmd, 0.0, 1.0) >= config.sustain_threshold;
  next.just_struck = now_active & ~was_active;
  next.sounding = next.sustained ? (state.sounding | now_active) : now_active;
  return next;
}

struct SynthEvent {
  enum class Kind { kNoteOn, kNoteOff };
  Kind kind = Kind::kNoteOn;
  int key = 0;
  double time = 0.0;
  friend bool operator==(const SynthEvent&, const SynthEvent&) = default;
};

inline void append_synth_events(const KeySet& before, const KeySet& after, double time,
                                std::vector<SynthEvent>& out) {
  for (int k = 0; k < kNumKeys; ++k) {
    if (after[k] && !before[k]) out.push_back({SynthEvent::Kind::kNoteOn, k, time});
    if (before[k] && !after[k]) out.push_back({SynthEvent::Kind::kNoteOff, k, time});
  }
}

// "note_on,39,0.025"
inline std::string format_synth_event(const SynthEvent& event) {
  return std::string(event.kind == SynthEvent::Kind::kNoteOn ? "note_on" : "note_off") + "," +
         std::to_string(event.key) + "," + format_double(event.time);
}

}  // namespace pianobench

#endif  // PIANOBENCH_KEYBOARD_HPP_
