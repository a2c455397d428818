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

// Framewise precision / recall / F1 between goal and played key sets.

#ifndef PIANOBENCH_METRICS_HPP_
#define PIANOBENCH_METRICS_HPP_

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pianobench/score.hpp"
#include "pianobench/text.hpp"

namespace pianobench {

struct FrameScore {
  double precision = 1.0;
  double recall = 1.0;
  double f1 = 1.0;
  bool skipped = false;  // empty goal and nothing played
  friend bool operator==(const FrameScore&, const FrameScore&) = default;
};

inline FrameScore frame_prf(const KeySet& goal, const KeySet& played) {
  if (goal.none() && played.none()) return {1.0, 1.0, 1.0, true};
  const double tp = static_cast<double>((goal & played).count());
  const double fp = static_cast<double>((played & ~goal).count());
  const double fn = static_cast<double>((goal & ~played).count());
  FrameScore score;
  score.precision = tp + fp > 0.0 ? tp / (tp + fp) : 1.0;
  score.recall = tp + fn > 0.0 ? tp / (tp + fn) : 1.0;
  const double sum = score.precision + score.recall;
  score.f1 = sum > 0.0 ? 2.0 * score.precision * score.recall / sum : 0.0;
  return score;
}

struct RewardTotals {
  double key = 0.0;
  double finger = 0.0;
  double energy = 0.0;
  double total = 0.0;
  friend bool operator==(const RewardTotals&, const RewardTotals&) = default;
};

// Incremental mean over evaluated frames, in frame order.
struct PrfAccumulator {
  double sum_precision = 0.0;
  double sum_recall = 0.0;
  double sum_f1 = 0.0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;

  void add(const FrameScore& score) {
    if (score.skipped) {
      ++skipped;
      return;
    }
    sum_precision += score.precision;
    sum_recall += score.recall;
    sum_f1 += score.f1;
    ++evaluated;
  }
  double precision() const { return evaluated ? sum_precision / evaluated : 1.0; }
  double recall() const { return evaluated ? sum_recall / evaluated : 1.0; }
  double f1() const { return evaluated ? sum_f1 / evaluated : 1.0; }
};

struct EpisodeReport {
  double precision = 1.0;
  double recall = 1.0;
  double f1 = 1.0;
  // F1 of the averaged precision and recall.
  double f1_of_means = 1.0;
  // Means over every frame, silent frames counted as perfect.
  double precision_all = 1.0;
  double recall_all = 1.0;
  double f1_all = 1.0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
  std::vector<FrameScore> frames;
  RewardTotals rewards;
  Diagnostics diagnostics;
};

inline EpisodeReport episode_prf(std::span<const KeySet> goal, std::span<const KeySet> played) {
  if (goal.size() != played.size()) {
    throw std::invalid_argument("episode_prf: goal has " + std::to_string(goal.size()) +
                                " frames, played has " + std::to_string(played.size()));
  }
  EpisodeReport report;
  PrfAccumulator evaluated;
  PrfAccumulator all;
  report.frames.reserve(goal.size());
  for (std::size_t f = 0; f < goal.size(); ++f) {
    const FrameScore score = frame_prf(goal[f], played[f]);
    report.frames.push_back(score);
    evaluated.add(score);
    FrameScore counted = score;
    counted.skipped = false;
    all.add(counted);
  }
  report.evaluated = evaluated.evaluated;
  report.skipped = evaluated.skipped;
  report.precision = evaluated.precision();
  report.recall = evaluated.recall();
  report.f1 = evaluated.f1();
  const double sum = report.precision + report.recall;
  report.f1_of_means = sum > 0.0 ? 2.0 * report.precision * report.recall / sum : 0.0;
  report.precision_all = all.precision();
  report.recall_all = all.recall();
  report.f1_all = all.f1();
  if (report.evaluated == 0) {
    report.diagnostics.push_back("no evaluated frames: goal and played are silent throughout");
  }
  return report;
}

// Flat key=value record.
inline std::string format_report(const EpisodeReport& report) {
  Record record;
  record.set("precision", report.precision)
      .set("recall", report.recall)
      .set("f1", report.f1)
      .set("f1_of_means", report.f1_of_means)
      .set("precision_all", report.precision_all)
      .set("recall_all", report.recall_all)
      .set("f1_all", report.f1_all)
      .set("evaluated", report.evaluated)
      .set("skipped", report.skipped)
      .set("frames", report.frames.size())
      .set("reward_key", report.rewards.key)
      .set("reward_finger", report.rewards.finger)
      .set("reward_energy", report.rewards.energy)
      .set("reward_total", report.rewards.total);
  return record.str();
}

inline constexpr const char* kFramesCsvSchema = "# schema=frames/1";

// One CSV row per frame.
inline std::string format_frames_csv(const EpisodeReport& report) {
  std::string out = std::string(kFramesCsvSchema) + "\nframe,evaluated,precision,recall,f1\n";
  for (std::size_t f = 0; f < report.frames.size(); ++f) {
    const auto& frame = report.frames[f];
    out += std::to_string(f) + ',' + (frame.skipped ? "0" : "1") + ',' +
           format_double(frame.precision) + ',' + format_double(frame.recall) + ',' +
           format_double(frame.f1) + '\n';
  }
  return out;
}

}  // namespace pianobench

#endif  // PIANOBENCH_METRICS_HPP_
