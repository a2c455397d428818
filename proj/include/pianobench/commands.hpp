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

// Batch commands behind the pianobench CLI. Each throws on error; the CLI
// turns exceptions into a message and a nonzero exit status.

#ifndef PIANOBENCH_COMMANDS_HPP_
#define PIANOBENCH_COMMANDS_HPP_

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "pianobench/config.hpp"
#include "pianobench/metrics.hpp"
#include "pianobench/policy.hpp"
#include "pianobench/service.hpp"
#include "pianobench/songs.hpp"
#include "pianobench/trajectory.hpp"

namespace pianobench {

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr const char* kRollCsvSchema = "# schema=roll/1";
inline constexpr const char* kSweepCsvSchema = "# schema=sweep/1";
inline constexpr const char* kTraceSchema = "# schema=trace/1";
inline constexpr const char* kEventsSchema = "# schema=events/1";

namespace command_detail {

inline std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  auto out = open_output(path);
  out << content;
  if (!out.flush()) throw std::runtime_error("write failed for '" + path.string() + "'");
}

template <typename Bits>
std::string join_bits(const Bits& bits) {
  std::string out;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (!bits[i]) continue;
    if (!out.empty()) out.push_back(';');
    out += std::to_string(i);
  }
  return out;
}

}  // namespace command_detail

// ---------------------------------------------------------------- roll

struct RollStats {
  std::size_t frames = 0;
  std::size_t notes = 0;
  double labeled_fraction = 0.0;
  std::size_t sustain_frames = 0;
};

// keys: ';'-separated key indices; fingers: ';'-separated finger indices.
inline std::string format_roll_csv(const PianoRoll& roll) {
  std::string out = std::string(kRollCsvSchema) + "\nframe,keys,fingers,sustain\n";
  for (std::size_t f = 0; f < roll.num_frames(); ++f) {
    out += std::to_string(f) + ',' + command_detail::join_bits(roll.frames[f]) + ',' +
           command_detail::join_bits(roll.fingers[f]) + ',' + (roll.sustain[f] ? "1" : "0") + '\n';
  }
  return out;
}

inline RollStats roll_stats(const Score& score, const PianoRoll& roll) {
  RollStats stats;
  stats.frames = roll.num_frames();
  stats.notes = score.notes.size();
  std::size_t labeled = 0;
  for (const auto& note : score.notes) labeled += note.finger.has_value();
  stats.labeled_fraction = stats.notes ? static_cast<double>(labeled) / stats.notes : 0.0;
  for (auto s : roll.sustain) stats.sustain_frames += s;
  return stats;
}

inline std::string format_roll_stats(const RollStats& stats) {
  Record record;
  record.set("frames", stats.frames)
      .set("notes", stats.notes)
      .set("labeled_fraction", stats.labeled_fraction)
      .set("sustain_frames", stats.sustain_frames);
  return record.str();
}

struct RollOptions {
  std::string song;  // library id or file path
  std::string fingering;
  double dt = 0.05;
};

// Writes the roll CSV to `out`; returns the summary.
inline RollStats cmd_roll(const RollOptions& options, const SongLibrary& library, std::ostream& out,
                          Diagnostics* diagnostics = nullptr) {
  if (!(options.dt > 0.0) || !std::isfinite(options.dt)) {
    throw UsageError("--dt must be a positive number");
  }
  if (options.song.empty()) throw UsageError("a song id or --midi path is required");
  const Score score = resolve_song(library, options.song, options.fingering, diagnostics);
  const PianoRoll roll = to_piano_roll(score, options.dt);
  out << format_roll_csv(roll);
  return roll_stats(score, roll);
}

// ---------------------------------------------------------------- play

struct PlayOptions {
  Settings settings;
  std::string song = "c_major_scale";
  std::string fingering;
  std::string policy = "mpc";
  std::uint64_t seed = 0;
  std::string out_dir;  // empty: no files
};

struct PlayResult {
  EpisodeReport report;
  std::size_t steps = 0;
  double wall_seconds = 0.0;
};

inline std::string format_trace_line(std::size_t step, const Observation& before,
                                     std::span<const double> action, const StepResult& result) {
  const std::vector<double> flat = before.flatten();
  Record record;
  record.set("step", step)
      .set("frame", result.info.frame)
      .set("obs_hash", std::to_string(observation_hash(flat)))
      .set("action", action)
      .set("r_key", result.reward.r_key)
      .set("r_finger", result.reward.r_finger)
      .set("r_energy", result.reward.r_energy)
      .set("r_total", result.reward.r_total)
      .set("f1", result.info.f1);
  return record.str();
}

// Plays one episode. With an output directory it writes report.txt,
// frames.csv, trajectory.txt, trace.txt and events.txt; none of them depends
// on wall-clock time.
inline PlayResult cmd_play(const PlayOptions& options, const SongLibrary& library,
                           Diagnostics* diagnostics = nullptr) {
  namespace fs = std::filesystem;
  const Score score = resolve_song(library, options.song, options.fingering, diagnostics);
  Environment env(options.settings.env, score);
  auto policy = make_policy(options.policy, options.settings.planner, options.settings.env.dt_control);

  const bool write = !options.out_dir.empty();
  std::ofstream trajectory_file;
  std::unique_ptr<TrajectoryWriter> writer;
  std::string trace = std::string(kTraceSchema) + '\n';
  std::string events = std::string(kEventsSchema) + "\nkind,key,time\n";
  if (write) {
    trajectory_file = command_detail::open_output(fs::path(options.out_dir) / "trajectory.txt");
    writer = std::make_unique<TrajectoryWriter>(trajectory_file);
  }

  PlayResult result;
  const auto start = std::chrono::steady_clock::now();
  result.report = run_episode(
      env, *policy, options.seed,
      [&](const Observation& before, std::span<const double> action, const StepResult& step) {
        if (write) {
          TrajectoryRecord record;
          record.song = options.song;
          record.seed = options.seed;
          record.step = static_cast<std::int64_t>(result.steps);
          record.observation = before.flatten();
          record.action.assign(action.begin(), action.end());
          record.played = step.info.played;
          record.reward = step.reward;
          record.done = step.done;
          writer->write(record);
          trace += format_trace_line(result.steps, before, action, step) + '\n';
          for (const auto& e : step.info.events) events += format_synth_event(e) + '\n';
        }
        ++result.steps;
      });
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (write) {
    Record header;
    header.set("song", options.song)
        .set("policy", options.policy)
        .set("seed", static_cast<std::size_t>(options.seed))
        .set("dt", options.settings.env.dt_control)
        .set("lookahead", options.settings.env.lookahead)
        .set("steps", result.steps);
    std::string report = "# pianobench-report v1\n" + header.str() + '\n' +
                         format_report(result.report) + '\n';
    for (const auto& d : result.report.diagnostics) report += "# " + d + '\n';
    command_detail::write_file(fs::path(options.out_dir) / "report.txt", report);
    command_detail::write_file(fs::path(options.out_dir) / "frames.csv",
                               format_frames_csv(result.report));
    command_detail::write_file(fs::path(options.out_dir) / "trace.txt", trace);
    command_detail::write_file(fs::path(options.out_dir) / "events.txt", events);
  }
  return result;
}

// ---------------------------------------------------------------- sweep

enum class SweepAxis { kDtControl, kLookahead };

inline SweepAxis sweep_axis_from_name(std::string_view name) {
  if (name == "dt_control" || name == "dt") return SweepAxis::kDtControl;
  if (name == "lookahead") return SweepAxis::kLookahead;
  throw UsageError("unknown sweep axis '" + std::string(name) + "' (expected dt_control|lookahead)");
}

inline const char* sweep_axis_name(SweepAxis axis) {
  return axis == SweepAxis::kDtControl ? "dt_control" : "lookahead";
}

struct SweepOptions {
  Settings settings;
  std::string song = "c_major_scale";
  std::string fingering;
  std::string policy = "mpc";
  SweepAxis axis = SweepAxis::kDtControl;
  std::vector<double> values;
  std::vector<std::uint64_t> seeds = {0};
};

struct SweepRow {
  double value = 0.0;
  std::uint64_t seed = 0;
  double f1 = 0.0;
  double wall_seconds = 0.0;
  std::size_t steps = 0;
};

inline std::string format_sweep_csv(SweepAxis axis, const std::vector<SweepRow>& rows) {
  std::string out = std::string(kSweepCsvSchema) + "\naxis,value,seed,f1,wall_time_s,steps\n";
  for (const auto& row : rows) {
    out += std::string(sweep_axis_name(axis)) + ',' + format_double(row.value) + ',' +
           std::to_string(row.seed) + ',' + format_double(row.f1) + ',' +
           format_double(row.wall_seconds) + ',' + std::to_string(row.steps) + '\n';
  }
  return out;
}

// Runs the (value x seed) grid in input order. Duplicate values are dropped
// with a warning in `diagnostics`.
inline std::vector<SweepRow> cmd_sweep(const SweepOptions& options, const SongLibrary& library,
                                       Diagnostics* diagnostics = nullptr) {
  if (options.values.empty()) throw UsageError("--values must list at least one value");
  if (options.seeds.empty()) throw UsageError("--seeds must list at least one seed");
  std::vector<double> values;
  for (double v : options.values) {
    if (std::find(values.begin(), values.end(), v) != values.end()) {
      if (diagnostics) diagnostics->push_back("duplicate sweep value " + format_double(v) + " ignored");
      continue;
    }
    values.push_back(v);
  }
  std::vector<SweepRow> rows;
  for (double value : values) {
    PlayOptions play;
    play.settings = options.settings;
    play.song = options.song;
    play.fingering = options.fingering;
    play.policy = options.policy;
    if (options.axis == SweepAxis::kDtControl) {
      if (!(value > 0.0)) throw UsageError("dt_control values must be positive");
      play.settings.env.dt_control = value;
    } else {
      if (value < 0.0 || value != std::floor(value)) {
        throw UsageError("lookahead values must be non-negative integers");
      }
      play.settings.env.lookahead = static_cast<int>(value);
    }
    for (std::uint64_t seed : options.seeds) {
      play.seed = seed;
      const PlayResult result = cmd_play(play, library, diagnostics);
      rows.push_back({value, seed, result.report.f1, result.wall_seconds, result.steps});
    }
  }
  return rows;
}

// ---------------------------------------------------------------- log / eval

struct LogOptions {
  Settings settings;
  std::string song = "c_major_scale";
  std::string fingering;
  std::string policy = "mpc";
  int episodes = 1;
  std::uint64_t seed = 0;
  bool distinct_seeds = false;
  std::string out;  // trajectory file
};

inline DatasetSummary cmd_log(const LogOptions& options, const SongLibrary& library,
                              Diagnostics* diagnostics = nullptr) {
  if (options.episodes < 1) throw UsageError("--n must be >= 1");
  if (options.out.empty()) throw UsageError("--out is required");
  const Score score = resolve_song(library, options.song, options.fingering, diagnostics);
  const Environment prototype(options.settings.env, score);
  auto policy = make_policy(options.policy, options.settings.planner, options.settings.env.dt_control);
  auto file = command_detail::open_output(options.out);
  TrajectoryWriter writer(file);
  return log_trajectories(prototype, options.song, *policy, options.episodes, options.seed, writer,
                          options.distinct_seeds);
}

struct EvalResult {
  std::vector<EpisodeSummary> episodes;
  double mean_f1 = 0.0;
  bool aborted = false;
};

inline EvalResult cmd_eval(const std::string& path, const Settings& settings,
                           const SongLibrary& library) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  const TrajectoryFile file = read_trajectories(in);
  EvalResult result;
  result.aborted = file.aborted;
  result.episodes = evaluate_trajectories(file, library, settings.env);
  if (!result.episodes.empty()) {
    double sum = 0.0;
    for (const auto& e : result.episodes) sum += e.report.f1;
    result.mean_f1 = sum / static_cast<double>(result.episodes.size());
  }
  return result;
}

// ---------------------------------------------------------------- serve

struct ServeOptions {
  Settings settings;
  std::string host = "127.0.0.1";
  int port = 7777;
  bool stdio = false;
  std::string log;  // optional trajectory file
};

inline void cmd_serve(const ServeOptions& options, std::shared_ptr<const SongLibrary> library) {
  std::ofstream log_file;
  std::unique_ptr<TrajectoryWriter> writer;
  if (!options.log.empty()) {
    log_file = command_detail::open_output(options.log);
    writer = std::make_unique<TrajectoryWriter>(log_file);
  }
  ServiceContext context(options.settings.env, std::move(library), writer.get());
  if (options.stdio) {
    serve_stream(std::cin, std::cout, context);
    return;
  }
  Server server(context);
  const int port = server.listen(options.host, options.port);
  std::cerr << "listening on " << options.host << ':' << port << std::endl;
  server.wait();
}

}  // namespace pianobench

#endif  // PIANOBENCH_COMMANDS_HPP_
