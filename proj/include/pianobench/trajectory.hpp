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

// Trajectory files: newline-delimited records behind a version header.
//
//   # pianobench-trajectory v1
//   episode=0 song=c_major_scale seed=0 step=0 obs=... action=... played=39
//       r_key=... r_finger=... r_energy=... r_total=... done=0
//
// `obs` is the observation the action was chosen from; `played` lists the
// key indices counted as played after the step. A writer that hits a failed
// write appends an `aborted=1` marker before giving up.

#ifndef PIANOBENCH_TRAJECTORY_HPP_
#define PIANOBENCH_TRAJECTORY_HPP_

#include <cstdint>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pianobench/env.hpp"
#include "pianobench/metrics.hpp"
#include "pianobench/policy.hpp"
#include "pianobench/songs.hpp"
#include "pianobench/text.hpp"

namespace pianobench {

inline constexpr const char* kTrajectoryHeader = "# pianobench-trajectory v1";

struct TrajectoryRecord {
  std::int64_t episode = 0;
  std::string song;
  std::uint64_t seed = 0;
  std::int64_t step = 0;
  std::vector<double> observation;
  std::vector<double> action;
  KeySet played;
  RewardBreakdown reward;
  bool done = false;

  friend bool operator==(const TrajectoryRecord&, const TrajectoryRecord&) = default;
};

inline std::string format_key_list(const KeySet& keys) {
  std::string out;
  for (int k = 0; k < kNumKeys; ++k) {
    if (!keys[k]) continue;
    if (!out.empty()) out.push_back(',');
    out += std::to_string(k);
  }
  return out;
}

inline KeySet parse_key_list(std::string_view text) {
  KeySet keys;
  if (text.empty()) return keys;
  for (auto field : split_exact(text, ',')) {
    auto key = parse_int<int>(field);
    if (!key || *key < 0 || *key >= kNumKeys) throw std::invalid_argument("bad key index in list");
    keys.set(*key);
  }
  return keys;
}

inline Record to_record(const TrajectoryRecord& r) {
  Record record;
  record.set("episode", r.episode)
      .set("song", r.song)
      .set("seed", static_cast<std::size_t>(r.seed))
      .set("step", r.step)
      .set("obs", std::span<const double>(r.observation))
      .set("action", std::span<const double>(r.action))
      .set("played", format_key_list(r.played))
      .set("r_key", r.reward.r_key)
      .set("r_finger", r.reward.r_finger)
      .set("r_energy", r.reward.r_energy)
      .set("r_total", r.reward.r_total)
      .set("done", r.done);
  return record;
}

inline TrajectoryRecord from_record(const Record& record) {
  TrajectoryRecord r;
  r.episode = record.get_int("episode");
  r.song = record.at("song");
  r.seed = record.get_int<std::uint64_t>("seed");
  r.step = record.get_int("step");
  r.observation = record.get_vector("obs");
  r.action = record.get_vector("action");
  r.played = parse_key_list(record.at("played"));
  r.reward = {record.get_double("r_key"), record.get_double("r_finger"),
              record.get_double("r_energy"), record.get_double("r_total")};
  r.done = record.get_bool("done");
  return r;
}

class SinkError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Serializes records onto a stream; safe to share between sessions.
class TrajectoryWriter {
 public:
  explicit TrajectoryWriter(std::ostream& out) : out_(out) {
    write_line(kTrajectoryHeader);
  }

  void write(const TrajectoryRecord& record) {
    std::lock_guard lock(mutex_);
    if (aborted_) throw SinkError("trajectory sink already aborted");
    out_ << to_record(record).str() << '\n';
    out_.flush();
    if (!out_) {
      aborted_ = true;
      out_.clear();
      Record marker;
      marker.set("aborted", true)
          .set("reason", "write_failed")
          .set("episode", record.episode)
          .set("step", record.step);
      out_ << marker.str() << '\n';
      out_.flush();
      throw SinkError("trajectory write failed at episode " + std::to_string(record.episode) +
                      " step " + std::to_string(record.step));
    }
  }

  bool aborted() const { return aborted_; }

 private:
  void write_line(const std::string& line) {
    out_ << line << '\n';
    out_.flush();
    if (!out_) throw SinkError("cannot write trajectory header");
  }

  std::ostream& out_;
  std::mutex mutex_;
  bool aborted_ = false;
};

struct TrajectoryFile {
  std::vector<TrajectoryRecord> records;
  bool aborted = false;
};

inline TrajectoryFile read_trajectories(std::istream& in) {
  TrajectoryFile file;
  std::string line;
  if (!std::getline(in, line) || line != kTrajectoryHeader) {
    throw std::invalid_argument("not a pianobench trajectory file (missing version header)");
  }
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line.front() == '#') continue;
    auto record = Record::parse(line);
    if (!record) {
      throw std::invalid_argument("trajectory line " + std::to_string(line_number) + ": malformed");
    }
    if (record->has("aborted")) {
      file.aborted = true;
      break;
    }
    try {
      file.records.push_back(from_record(*record));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("trajectory line " + std::to_string(line_number) + ": " + e.what());
    }
  }
  return file;
}

struct EpisodeSummary {
  std::int64_t episode = 0;
  std::string song;
  std::size_t steps = 0;
  EpisodeReport report;
};

// Groups records by episode and re-scores each against its song's roll.
inline std::vector<EpisodeSummary> evaluate_trajectories(const TrajectoryFile& file,
                                                         const SongLibrary& library,
                                                         const EnvConfig& config) {
  std::map<std::int64_t, std::vector<const TrajectoryRecord*>> episodes;
  for (const auto& record : file.records) episodes[record.episode].push_back(&record);
  std::vector<EpisodeSummary> out;
  for (const auto& [episode, records] : episodes) {
    EpisodeSummary summary;
    summary.episode = episode;
    summary.song = records.front()->song;
    summary.steps = records.size();
    const PianoRoll roll = to_piano_roll(library.get(summary.song), config.dt_control);
    std::vector<KeySet> played;
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (records[i]->step != static_cast<std::int64_t>(i)) {
        throw std::invalid_argument("episode " + std::to_string(episode) +
                                    " has non-contiguous step indices");
      }
      played.push_back(records[i]->played);
    }
    if (played.size() > roll.num_frames()) {
      throw std::invalid_argument("episode " + std::to_string(episode) + " is longer than its song");
    }
    summary.report =
        episode_prf(std::span<const KeySet>(roll.frames.data(), played.size()), played);
    for (const auto* r : records) {
      summary.report.rewards.key += r->reward.r_key;
      summary.report.rewards.finger += r->reward.r_finger;
      summary.report.rewards.energy += r->reward.r_energy;
      summary.report.rewards.total += r->reward.r_total;
    }
    out.push_back(std::move(summary));
  }
  return out;
}

struct DatasetSummary {
  std::size_t episodes = 0;
  std::size_t total_steps = 0;
  double mean_f1 = 0.0;
};

// Plays `n` episodes of `song` with `policy` and logs every step. Episode i
// resets the policy with `seed`, or with `seed + i` when `distinct_seeds`.
inline DatasetSummary log_trajectories(const Environment& prototype, const std::string& song,
                                       Policy& policy, int n, std::uint64_t seed,
                                       TrajectoryWriter& sink, bool distinct_seeds = false,
                                       std::int64_t first_episode = 0) {
  if (n < 1) throw std::invalid_argument("log_trajectories: n must be >= 1");
  DatasetSummary summary;
  double f1_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    Environment env = prototype;
    const std::uint64_t episode_seed = distinct_seeds ? seed + static_cast<std::uint64_t>(i) : seed;
    const std::int64_t episode = first_episode + i;
    std::int64_t step = 0;
    const EpisodeReport report =
        run_episode(env, policy, episode_seed,
                    [&](const Observation& before, std::span<const double> action,
                        const StepResult& result) {
                      TrajectoryRecord record;
                      record.episode = episode;
                      record.song = song;
                      record.seed = episode_seed;
                      record.step = step++;
                      record.observation = before.flatten();
                      record.action.assign(action.begin(), action.end());
                      record.played = result.info.played;
                      record.reward = result.reward;
                      record.done = result.done;
                      sink.write(record);
                    });
    ++summary.episodes;
    summary.total_steps += static_cast<std::size_t>(step);
    f1_sum += report.f1;
  }
  summary.mean_f1 = f1_sum / static_cast<double>(summary.episodes);
  return summary;
}

}  // namespace pianobench

#endif  // PIANOBENCH_TRAJECTORY_HPP_
