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

// Text configuration: one "section.key = value" per line, '#' comments.
// The full key set is documented in docs/config.md.

#ifndef PIANOBENCH_CONFIG_HPP_
#define PIANOBENCH_CONFIG_HPP_

#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "pianobench/env.hpp"
#include "pianobench/planner.hpp"
#include "pianobench/text.hpp"

namespace pianobench {

struct Settings {
  EnvConfig env;
  PlannerConfig planner;
};

namespace config_detail {

using Setter = std::function<void(Settings&, std::string_view)>;

inline double to_double(std::string_view key, std::string_view value) {
  auto parsed = parse_double(value);
  if (!parsed) throw std::invalid_argument(std::string(key) + ": expected a number");
  return *parsed;
}

template <typename Int>
Int to_int(std::string_view key, std::string_view value) {
  auto parsed = parse_int<Int>(value);
  if (!parsed) throw std::invalid_argument(std::string(key) + ": expected an integer");
  return *parsed;
}

inline const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = [] {
    std::map<std::string, Setter, std::less<>> t;
    auto number = [&t](const char* key, auto member) {
      t[key] = [key, member](Settings& s, std::string_view v) { member(s) = to_double(key, v); };
    };
    auto integer = [&t](const char* key, auto member) {
      t[key] = [key, member](Settings& s, std::string_view v) {
        auto& field = member(s);
        field = to_int<std::remove_reference_t<decltype(field)>>(key, v);
      };
    };
    number("env.dt_control", [](Settings& s) -> double& { return s.env.dt_control; });
    number("env.dt_physics", [](Settings& s) -> double& { return s.env.dt_physics; });
    integer("env.lookahead", [](Settings& s) -> int& { return s.env.lookahead; });
    number("env.discount", [](Settings& s) -> double& { return s.env.discount; });
    t["env.false_positive"] = [](Settings& s, std::string_view v) {
      s.env.false_positive = key_source_from_name(v);
    };
    t["env.played"] = [](Settings& s, std::string_view v) { s.env.played = key_source_from_name(v); };

    number("reward.w_key", [](Settings& s) -> double& { return s.env.weights.key; });
    number("reward.w_finger", [](Settings& s) -> double& { return s.env.weights.finger; });
    number("reward.w_energy", [](Settings& s) -> double& { return s.env.weights.energy; });
    number("reward.key_bounds", [](Settings& s) -> double& { return s.env.key_tolerance.bounds; });
    number("reward.key_margin", [](Settings& s) -> double& { return s.env.key_tolerance.margin; });
    number("reward.finger_bounds",
           [](Settings& s) -> double& { return s.env.finger_tolerance.bounds; });
    number("reward.finger_margin",
           [](Settings& s) -> double& { return s.env.finger_tolerance.margin; });

    number("keyboard.tau_key", [](Settings& s) -> double& { return s.env.keyboard.tau_key; });
    number("keyboard.travel_deg", [](Settings& s) -> double& { return s.env.keyboard.travel_deg; });
    number("keyboard.sustain_threshold",
           [](Settings& s) -> double& { return s.env.keyboard.sustain_threshold; });

    number("hands.kp", [](Settings& s) -> double& { return s.env.hands.kp; });
    number("hands.kd", [](Settings& s) -> double& { return s.env.hands.kd; });
    number("hands.white_pitch",
           [](Settings& s) -> double& { return s.env.hands.geometry.white_pitch; });
    number("hands.black_width",
           [](Settings& s) -> double& { return s.env.hands.geometry.black_width; });
    number("hands.key_gap", [](Settings& s) -> double& { return s.env.hands.geometry.gap; });
    integer("hands.right_rest_pitch",
            [](Settings& s) -> int& { return s.env.hands.right_rest_pitch; });
    integer("hands.left_rest_pitch", [](Settings& s) -> int& { return s.env.hands.left_rest_pitch; });
    number("hands.finger_spacing", [](Settings& s) -> double& { return s.env.hands.finger_spacing; });
    number("hands.base_speed_max", [](Settings& s) -> double& { return s.env.hands.base_speed_max; });
    number("hands.offset_speed_max",
           [](Settings& s) -> double& { return s.env.hands.offset_speed_max; });
    number("hands.press_speed_max",
           [](Settings& s) -> double& { return s.env.hands.press_speed_max; });
    t["hands.mask"] = [](Settings& s, std::string_view v) {
      s.env.hands.mask = ActionMask::from_name(v);
    };
    t["hands.freeze"] = [](Settings& s, std::string_view v) {
      for (auto field : split_fields(v, ", ")) {
        const int dim = to_int<int>("hands.freeze", field);
        if (dim < 0 || dim >= kActionDim) {
          throw std::invalid_argument("hands.freeze: dimension out of range");
        }
        s.env.hands.mask.freeze(dim);
      }
    };

    integer("planner.num_candidates",
            [](Settings& s) -> int& { return s.planner.num_candidates; });
    number("planner.sigma", [](Settings& s) -> double& { return s.planner.sigma; });
    number("planner.plan_horizon", [](Settings& s) -> double& { return s.planner.plan_horizon; });
    number("planner.dt_plan", [](Settings& s) -> double& { return s.planner.dt_plan; });
    number("planner.dt_physics_plan",
           [](Settings& s) -> double& { return s.planner.dt_physics_plan; });
    integer("planner.spline_points", [](Settings& s) -> int& { return s.planner.spline_points; });
    t["planner.spline"] = [](Settings& s, std::string_view v) {
      s.planner.spline = spline_kind_from_name(v);
    };
    integer("planner.iterations", [](Settings& s) -> int& { return s.planner.iterations; });
    number("planner.budget_seconds",
           [](Settings& s) -> double& { return s.planner.budget_seconds; });
    integer("planner.seed", [](Settings& s) -> std::uint64_t& { return s.planner.seed; });
    integer("planner.threads", [](Settings& s) -> int& { return s.planner.threads; });
    return t;
  }();
  return table;
}

}  // namespace config_detail

inline void apply_setting(Settings& settings, std::string_view key, std::string_view value) {
  const auto& table = config_detail::setters();
  auto it = table.find(key);
  if (it == table.end()) throw std::invalid_argument("unknown config key '" + std::string(key) + "'");
  it->second(settings, value);
}

// Applies every line of `text` on top of `settings`.
inline void apply_config_text(Settings& settings, std::string_view text) {
  std::size_t line_number = 0;
  for (auto raw : split_exact(text, '\n')) {
    ++line_number;
    std::string line = trim(raw);
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = trim(std::string_view(line).substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_number) +
                                  ": expected 'key = value'");
    }
    try {
      apply_setting(settings, trim(std::string_view(line).substr(0, eq)),
                    trim(std::string_view(line).substr(eq + 1)));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(line_number) + ": " + e.what());
    }
  }
}

inline std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [key, setter] : config_detail::setters()) keys.push_back(key);
  return keys;
}

}  // namespace pianobench

#endif  // PIANOBENCH_CONFIG_HPP_
