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

// pianobench: roll | play | sweep | log | eval | serve | config-keys

#include <CLI11.hpp>

#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pianobench/commands.hpp"

namespace {

using namespace pianobench;

// Options shared by the commands that build an environment. Values given
// explicitly on the command line win over the --config file.
struct Common {
  std::string config;
  std::string song = "c_major_scale";
  std::string midi;
  std::string fingering;
  std::string songs_dir;
  std::string policy = "mpc";
  double dt = 0.05;
  int lookahead = 10;
  std::uint64_t seed = 0;
  int iters = 50;
  double budget = 0.0;
  int threads = 1;

  CLI::Option* dt_opt = nullptr;
  CLI::Option* lookahead_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* iters_opt = nullptr;
  CLI::Option* budget_opt = nullptr;
  CLI::Option* threads_opt = nullptr;

  void add(CLI::App* app, bool planner = true) {
    app->add_option("--config", config, "settings file (section.key = value)");
    app->add_option("--song", song, "built-in song id or score file");
    app->add_option("--midi", midi, "MIDI file (overrides --song)");
    app->add_option("--fingering", fingering, "PIG fingering file");
    app->add_option("--songs-dir", songs_dir, "add every .mid/.score in a directory");
    dt_opt = app->add_option("--dt", dt, "control timestep in seconds");
    lookahead_opt = app->add_option("--lookahead", lookahead, "goal lookahead frames");
    seed_opt = app->add_option("--seed", seed, "episode seed");
    if (planner) {
      app->add_option("--policy", policy, "zero|random|scripted|mpc");
      iters_opt = app->add_option("--iters", iters, "planner iterations per step");
      budget_opt = app->add_option("--budget", budget, "planner wall-clock budget per step (s)");
      threads_opt = app->add_option("--threads", threads, "rollout threads");
    }
  }

  Settings settings() const {
    Settings s;
    if (!config.empty()) apply_config_text(s, read_text_file(config));
    if (dt_opt && dt_opt->count()) s.env.dt_control = dt;
    if (lookahead_opt && lookahead_opt->count()) s.env.lookahead = lookahead;
    if (seed_opt && seed_opt->count()) s.planner.seed = seed;
    if (iters_opt && iters_opt->count()) s.planner.iterations = iters;
    if (budget_opt && budget_opt->count()) s.planner.budget_seconds = budget;
    if (threads_opt && threads_opt->count()) s.planner.threads = threads;
    s.env.validate();
    s.planner.validate();
    return s;
  }

  std::string song_arg() const { return midi.empty() ? song : midi; }

  SongLibrary library(Diagnostics* diagnostics) const {
    SongLibrary library = SongLibrary::builtin();
    if (!songs_dir.empty()) library.add_directory(songs_dir, diagnostics);
    return library;
  }
};

void print_diagnostics(const Diagnostics& diagnostics) {
  for (const auto& d : diagnostics) std::cerr << "warning: " << d << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pianobench: piano-playing control benchmark"};
  app.require_subcommand(1);

  // roll
  auto* roll = app.add_subcommand("roll", "discretize a score into a piano roll CSV");
  Common roll_common;
  roll_common.add(roll, false);
  std::string roll_out;
  roll->add_option("--out", roll_out, "CSV path (default stdout)");

  // play
  auto* play = app.add_subcommand("play", "play one episode and write reports");
  Common play_common;
  play_common.add(play);
  std::string play_out_dir;
  play->add_option("--out-dir", play_out_dir, "directory for report and trace files");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "F1 over a grid of dt or lookahead values");
  Common sweep_common;
  sweep_common.add(sweep);
  std::string axis = "dt_control";
  std::vector<double> values;
  std::vector<std::uint64_t> seeds;
  std::string sweep_out;
  sweep->add_option("--axis", axis, "dt_control|lookahead");
  sweep->add_option("--values", values, "axis values")->delimiter(',');
  sweep->add_option("--seeds", seeds, "seeds per value")->delimiter(',');
  sweep->add_option("--out", sweep_out, "CSV path (default stdout)");

  // log
  auto* log = app.add_subcommand("log", "log policy trajectories for dataset building");
  Common log_common;
  log_common.add(log);
  int episodes = 1;
  bool distinct = false;
  std::string log_out;
  log->add_option("--n", episodes, "number of episodes");
  log->add_flag("--distinct-seeds", distinct, "episode i uses seed + i");
  log->add_option("--out", log_out, "trajectory file")->required();

  // eval
  auto* eval = app.add_subcommand("eval", "re-score a trajectory file");
  Common eval_common;
  eval_common.add(eval, false);
  std::string eval_in;
  eval->add_option("trajectory", eval_in, "trajectory file")->required();

  // serve
  auto* serve = app.add_subcommand("serve", "serve environments over the line protocol");
  Common serve_common;
  serve_common.add(serve, false);
  std::string host = "127.0.0.1";
  int port = 7777;
  bool stdio = false;
  std::string serve_log;
  serve->add_option("--host", host, "bind address");
  serve->add_option("--port", port, "TCP port (0 picks one)");
  serve->add_flag("--stdio", stdio, "serve one session on stdin/stdout");
  serve->add_option("--log", serve_log, "trajectory log file");

  auto* keys = app.add_subcommand("config-keys", "list configuration keys");

  CLI11_PARSE(app, argc, argv);

  Diagnostics diagnostics;
  try {
    if (*roll) {
      RollOptions options;
      options.song = roll_common.song_arg();
      options.fingering = roll_common.fingering;
      options.dt = roll_common.dt;
      const SongLibrary library = roll_common.library(&diagnostics);
      RollStats stats;
      if (roll_out.empty()) {
        stats = cmd_roll(options, library, std::cout, &diagnostics);
      } else {
        std::ostringstream csv;
        stats = cmd_roll(options, library, csv, &diagnostics);
        command_detail::write_file(roll_out, csv.str());
      }
      print_diagnostics(diagnostics);
      std::cerr << format_roll_stats(stats) << '\n';
    } else if (*play) {
      PlayOptions options;
      options.settings = play_common.settings();
      options.song = play_common.song_arg();
      options.fingering = play_common.fingering;
      options.policy = play_common.policy;
      options.seed = options.settings.planner.seed;
      options.out_dir = play_out_dir;
      const SongLibrary library = play_common.library(&diagnostics);
      const PlayResult result = cmd_play(options, library, &diagnostics);
      print_diagnostics(diagnostics);
      std::cout << format_report(result.report) << '\n';
    } else if (*sweep) {
      SweepOptions options;
      options.settings = sweep_common.settings();
      options.song = sweep_common.song_arg();
      options.fingering = sweep_common.fingering;
      options.policy = sweep_common.policy;
      options.axis = sweep_axis_from_name(axis);
      options.values = values;
      if (!seeds.empty()) options.seeds = seeds;
      else options.seeds = {options.settings.planner.seed};
      const SongLibrary library = sweep_common.library(&diagnostics);
      const auto rows = cmd_sweep(options, library, &diagnostics);
      print_diagnostics(diagnostics);
      const std::string csv = format_sweep_csv(options.axis, rows);
      if (sweep_out.empty()) std::cout << csv;
      else command_detail::write_file(sweep_out, csv);
    } else if (*log) {
      LogOptions options;
      options.settings = log_common.settings();
      options.song = log_common.song_arg();
      options.fingering = log_common.fingering;
      options.policy = log_common.policy;
      options.episodes = episodes;
      options.seed = options.settings.planner.seed;
      options.distinct_seeds = distinct;
      options.out = log_out;
      const SongLibrary library = log_common.library(&diagnostics);
      const DatasetSummary summary = cmd_log(options, library, &diagnostics);
      print_diagnostics(diagnostics);
      Record record;
      record.set("episodes", summary.episodes)
          .set("total_steps", summary.total_steps)
          .set("mean_f1", summary.mean_f1);
      std::cout << record.str() << '\n';
    } else if (*eval) {
      const Settings settings = eval_common.settings();
      const SongLibrary library = eval_common.library(&diagnostics);
      const EvalResult result = cmd_eval(eval_in, settings, library);
      for (const auto& episode : result.episodes) {
        std::cout << "episode=" << episode.episode << " song=" << escape_value(episode.song)
                  << " steps=" << episode.steps << ' ' << format_report(episode.report) << '\n';
      }
      Record summary;
      summary.set("episodes", result.episodes.size())
          .set("mean_f1", result.mean_f1)
          .set("aborted", result.aborted);
      std::cout << summary.str() << '\n';
      if (result.aborted) {
        std::cerr << "warning: trajectory file ends with an abort marker (partial dataset)\n";
      }
    } else if (*serve) {
      ServeOptions options;
      options.settings = serve_common.settings();
      options.host = host;
      options.port = port;
      options.stdio = stdio;
      options.log = serve_log;
      auto library = std::make_shared<const SongLibrary>(serve_common.library(&diagnostics));
      print_diagnostics(diagnostics);
      cmd_serve(options, library);
    } else if (*keys) {
      for (const auto& key : config_keys()) std::cout << key << '\n';
    }
  } catch (const UsageError& e) {
    print_diagnostics(diagnostics);
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    print_diagnostics(diagnostics);
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
