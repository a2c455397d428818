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

// Predictive sampling: derivative-free receding-horizon control.
//
// Every iteration perturbs the control points of the nominal spline with
// Gaussian noise, rolls each candidate out on a copy of the plant, and keeps
// the cheapest plan. The incumbent is always among the candidates, so the
// nominal cost never increases within a control step.

#ifndef PIANOBENCH_PLANNER_HPP_
#define PIANOBENCH_PLANNER_HPP_

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "pianobench/env.hpp"
#include "pianobench/spline.hpp"

namespace pianobench {

struct PlannerConfig {
  int num_candidates = 10;
  double sigma = 0.05;
  double plan_horizon = 0.2;
  double dt_plan = 0.01;
  double dt_physics_plan = 0.005;
  int spline_points = 2;
  SplineKind spline = SplineKind::kCubic;
  // Per control step. A negative cap means "until the budget runs out".
  int iterations = 50;
  double budget_seconds = 0.0;  // 0 selects pure iteration mode
  std::uint64_t seed = 0;
  int threads = 1;

  int rollout_steps() const {
    const double ratio = plan_horizon / dt_plan;
    return static_cast<int>(std::round(ratio));
  }

  void validate() const {
    if (num_candidates < 1) throw std::invalid_argument("planner: num_candidates must be >= 1");
    if (!(sigma > 0.0)) throw std::invalid_argument("planner: sigma must be positive");
    if (!(dt_plan > 0.0) || !(plan_horizon >= dt_plan)) {
      throw std::invalid_argument("planner: need plan_horizon >= dt_plan > 0");
    }
    substep_count(dt_plan, dt_physics_plan);
    if (spline_points < 2) throw std::invalid_argument("planner: spline_points must be >= 2");
    if (iterations < 0 && !(budget_seconds > 0.0)) {
      throw std::invalid_argument("planner: unlimited iterations need a positive budget");
    }
    if (budget_seconds < 0.0) throw std::invalid_argument("planner: budget must be >= 0");
    if (threads < 1) throw std::invalid_argument("planner: threads must be >= 1");
  }
};

struct CostBreakdown {
  std::vector<double> key;  // per rollout step
  std::vector<double> finger;
  std::vector<double> total;
  double c_key = 0.0;
  double c_finger = 0.0;
  double c_total = 0.0;
  friend bool operator==(const CostBreakdown&, const CostBreakdown&) = default;
};

// Key cost: half the mean distance of goal keys from full depression plus
// half for any false positive. Finger cost: mean distance of labeled fingers
// from their key centers. Both are raw distances; empty terms cost 0.
inline void step_cost(const KeySet& goal, std::span<const FingerAssignment> assignments,
                      const PlantState& plant, const HandModel& model, const EnvConfig& env,
                      double& c_key, double& c_finger) {
  c_key = 0.0;
  if (goal.any()) {
    double sum = 0.0;
    for (int k = 0; k < kNumKeys; ++k) {
      if (goal[k]) sum += std::abs(plant.keyboard.depression[k] - 1.0);
    }
    c_key = 0.5 * sum / static_cast<double>(goal.count());
  }
  const KeySet playing = env.false_positive == KeySource::kSounding
                             ? plant.keyboard.sounding
                             : active_keys(plant.keyboard, env.keyboard.threshold());
  if (has_false_positive(goal, playing)) c_key += 0.5;

  c_finger = 0.0;
  if (!assignments.empty()) {
    double sum = 0.0;
    for (const auto& a : assignments) {
      sum += std::abs(model.fingertip_x(plant.hands, a.finger) - model.layout().center(a.key));
    }
    c_finger = sum / static_cast<double>(assignments.size());
  }
}

// Simulates `plan` from the snapshot's current state over the plan horizon
// and returns the undiscounted cost. The snapshot is not modified.
inline CostBreakdown rollout_cost(const Environment& snapshot, const NominalPlan& plan,
                                  const PlannerConfig& config) {
  if (plan.dims() != kActionDim) {
    throw std::invalid_argument("rollout_cost: plan has " + std::to_string(plan.dims()) +
                                " dims, expected " + std::to_string(kActionDim));
  }
  const int steps = config.rollout_steps();
  const int substeps = substep_count(config.dt_plan, config.dt_physics_plan);
  const HandModel& model = snapshot.model();
  const EnvConfig& env = snapshot.config();
  const PianoRoll& roll = snapshot.roll();
  const double t0 = snapshot.time();

  PlantState plant = snapshot.plant();
  std::vector<double> action(kActionDim);
  DofVector force{};
  CostBreakdown cost;
  cost.key.reserve(steps);
  cost.finger.reserve(steps);
  cost.total.reserve(steps);
  static const std::vector<FingerAssignment> kNoAssignments;

  for (int j = 0; j < steps; ++j) {
    plan.evaluate(j * config.dt_plan, action);
    for (auto& a : action) a = std::clamp(a, -1.0, 1.0);
    const DofVector targets = model.targets(action);
    const double sustain = model.sustain_command(action);
    for (int s = 0; s < substeps; ++s) {
      model.substep(plant.hands, targets, config.dt_physics_plan, force);
      plant.keyboard = step_keys(plant.keyboard, model.key_loads(plant.hands), sustain,
                                 config.dt_physics_plan, env.keyboard);
    }
    const double mid = t0 + (j + 0.5) * config.dt_plan;
    const auto frame = static_cast<std::size_t>(std::floor(mid / env.dt_control));
    const bool in_song = frame < roll.num_frames();
    const KeySet goal = in_song ? roll.frames[frame] : KeySet{};
    const auto& assignments = in_song ? roll.assignments[frame] : kNoAssignments;

    double c_key = 0.0;
    double c_finger = 0.0;
    step_cost(goal, assignments, plant, model, env, c_key, c_finger);
    cost.key.push_back(c_key);
    cost.finger.push_back(c_finger);
    cost.total.push_back(c_key + c_finger);
    cost.c_key += c_key;
    cost.c_finger += c_finger;
  }
  cost.c_total = cost.c_key + cost.c_finger;
  return cost;
}

struct ImproveResult {
  NominalPlan plan;
  double cost = 0.0;
  double incumbent_cost = 0.0;
  int winner = -1;  // -1 keeps the incumbent, otherwise the candidate index
};

// One predictive-sampling iteration. Noise is drawn sequentially before any
// rollout so the outcome does not depend on config.threads; the winner is
// the lowest (cost, index) pair with the incumbent at index -1.
inline ImproveResult improve(const NominalPlan& nominal, const Environment& snapshot,
                             const PlannerConfig& config, std::mt19937_64& rng) {
  const int n = config.num_candidates;
  const ActionMask& mask = snapshot.model().mask();
  std::vector<NominalPlan> candidates(n, nominal);
  std::normal_distribution<double> noise(0.0, config.sigma);
  for (auto& candidate : candidates) {
    for (int p = 0; p < candidate.points(); ++p) {
      for (int d = 0; d < candidate.dims(); ++d) {
        if (d < kActionDim && !mask.active(d)) continue;
        double& value = candidate.at(p, d);
        value = std::clamp(value + noise(rng), -1.0, 1.0);
      }
    }
  }

  std::vector<double> costs(n + 1, 0.0);
  auto evaluate = [&](int index) {
    const NominalPlan& plan = index == 0 ? nominal : candidates[index - 1];
    costs[index] = rollout_cost(snapshot, plan, config).c_total;
  };
  const int workers = std::min(config.threads, n + 1);
  if (workers <= 1) {
    for (int i = 0; i <= n; ++i) evaluate(i);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (int w = 1; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int i = w; i <= n; i += workers) evaluate(i);
      });
    }
    for (int i = 0; i <= n; i += workers) evaluate(i);
  }

  ImproveResult result{nominal, costs[0], costs[0], -1};
  for (int i = 1; i <= n; ++i) {
    if (costs[i] < result.cost) {
      result.cost = costs[i];
      result.winner = i - 1;
    }
  }
  if (result.winner >= 0) result.plan = candidates[result.winner];
  return result;
}

// Receding-horizon controller carrying the nominal plan between steps.
class MpcController {
 public:
  MpcController(const PlannerConfig& config, double dt_control)
      : config_(config), dt_control_(dt_control) {
    config_.validate();
    reset(config_.seed);
  }

  void reset(std::uint64_t seed) {
    rng_.seed(seed);
    nominal_ = NominalPlan(config_.spline_points, kActionDim, config_.plan_horizon, config_.spline);
  }

  // Plans from the environment's current state and returns the action to
  // execute; afterwards the nominal is shifted by one control step.
  std::vector<double> act(const Environment& env, int* iterations_run = nullptr) {
    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();
    const bool budgeted = config_.budget_seconds > 0.0;
    int iteration = 0;
    while (config_.iterations < 0 || iteration < config_.iterations) {
      if (budgeted) {
        const std::chrono::duration<double> elapsed = Clock::now() - start;
        if (elapsed.count() >= config_.budget_seconds) break;
      }
      nominal_ = improve(nominal_, env, config_, rng_).plan;
      ++iteration;
    }
    if (iterations_run) *iterations_run = iteration;
    std::vector<double> action = nominal_.evaluate(0.0);
    for (auto& a : action) a = std::clamp(a, -1.0, 1.0);
    nominal_ = nominal_.shifted(dt_control_);
    return action;
  }

  const NominalPlan& nominal() const { return nominal_; }
  const PlannerConfig& config() const { return config_; }

 private:
  PlannerConfig config_;
  double dt_control_;
  NominalPlan nominal_;
  std::mt19937_64 rng_;
};

using StepCallback = std::function<void(const Observation& before, std::span<const double> action,
                                        const StepResult& result)>;

struct ControlTrace {
  std::vector<std::vector<double>> actions;
  std::vector<RewardBreakdown> rewards;
  std::vector<int> iterations;
  EpisodeReport report;
};

// Runs the planner on `env` from its current state until the episode ends.
inline ControlTrace control_loop(Environment& env, const PlannerConfig& config,
                                 const StepCallback& on_step = {}) {
  MpcController controller(config, env.config().dt_control);
  ControlTrace trace;
  Observation observation = env.observe();
  while (!env.done()) {
    int iterations = 0;
    std::vector<double> action = controller.act(env, &iterations);
    StepResult result = env.step(action);
    if (on_step) on_step(observation, action, result);
    trace.actions.push_back(std::move(action));
    trace.rewards.push_back(result.reward);
    trace.iterations.push_back(iterations);
    observation = std::move(result.observation);
  }
  trace.report = env.report();
  return trace;
}

}  // namespace pianobench

#endif  // PIANOBENCH_PLANNER_HPP_
