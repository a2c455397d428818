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

#ifndef PIANOBENCH_SCORE_HPP_
#define PIANOBENCH_SCORE_HPP_

#include <algorithm>
#include <bitset>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pianobench/text.hpp"

namespace pianobench {

inline constexpr int kNumKeys = 88;
inline constexpr int kLowestPitch = 21;    // A0
inline constexpr int kHighestPitch = 108;  // C8
inline constexpr int kNumFingers = 10;     // 0-4 right thumb..little, 5-9 left

using KeySet = std::bitset<kNumKeys>;
using FingerSet = std::bitset<kNumFingers>;
using Diagnostics = std::vector<std::string>;

constexpr bool is_piano_pitch(int pitch) {
  return pitch >= kLowestPitch && pitch <= kHighestPitch;
}
constexpr int key_index(int pitch) { return pitch - kLowestPitch; }
constexpr int key_pitch(int key) { return key + kLowestPitch; }

struct NoteEvent {
  int pitch = 60;
  double onset = 0.0;
  double offset = 0.0;
  std::optional<int> finger = std::nullopt;
  // Parsed and carried through dumps; nothing downstream reads it.
  int velocity = 64;

  int key() const { return key_index(pitch); }
  friend bool operator==(const NoteEvent&, const NoteEvent&) = default;
};

struct SustainInterval {
  double start = 0.0;
  double end = 0.0;
  friend bool operator==(const SustainInterval&, const SustainInterval&) = default;
};

struct Score {
  std::string title;
  std::vector<NoteEvent> notes;  // sorted by (onset, pitch)
  std::vector<SustainInterval> sustain;
  double duration = 0.0;

  friend bool operator==(const Score&, const Score&) = default;
};

// Brings a score into canonical form:
//  - notes sorted by (onset, pitch);
//  - a same-pitch note that starts while an earlier one still sounds cuts the
//    earlier one short, so every roll cell has exactly one covering note;
//  - notes that end up with non-positive duration are dropped;
//  - sustain intervals sorted and merged;
//  - duration raised to cover every note and sustain interval.
inline void normalize(Score& score, Diagnostics* diagnostics = nullptr) {
  auto& notes = score.notes;
  std::stable_sort(notes.begin(), notes.end(), [](const NoteEvent& a, const NoteEvent& b) {
    if (a.onset != b.onset) return a.onset < b.onset;
    return a.pitch < b.pitch;
  });
  std::vector<int> last_of_pitch(kHighestPitch + 1, -1);
  for (int i = 0; i < static_cast<int>(notes.size()); ++i) {
    auto& note = notes[i];
    if (!is_piano_pitch(note.pitch)) continue;
    const int previous = last_of_pitch[note.pitch];
    if (previous >= 0 && notes[previous].offset > note.onset) {
      if (diagnostics) {
        diagnostics->push_back("overlapping notes on pitch " + std::to_string(note.pitch) +
                               " at " + format_double(note.onset) + " s; earlier note truncated");
      }
      notes[previous].offset = note.onset;
    }
    last_of_pitch[note.pitch] = i;
  }
  std::erase_if(notes, [](const NoteEvent& n) { return !(n.offset > n.onset); });

  auto& sustain = score.sustain;
  std::erase_if(sustain, [](const SustainInterval& s) { return !(s.end > s.start); });
  std::sort(sustain.begin(), sustain.end(),
            [](const SustainInterval& a, const SustainInterval& b) { return a.start < b.start; });
  std::vector<SustainInterval> merged;
  for (const auto& interval : sustain) {
    if (!merged.empty() && interval.start <= merged.back().end) {
      merged.back().end = std::max(merged.back().end, interval.end);
    } else {
      merged.push_back(interval);
    }
  }
  sustain = std::move(merged);

  for (const auto& note : notes) score.duration = std::max(score.duration, note.offset);
  for (const auto& interval : sustain) score.duration = std::max(score.duration, interval.end);
}

struct FingerAssignment {
  int key = 0;
  int finger = 0;
  friend bool operator==(const FingerAssignment&, const FingerAssignment&) = default;
};

// Per-frame goal representation at a fixed control timestep.
struct PianoRoll {
  double dt = 0.05;
  std::vector<KeySet> frames;
  std::vector<FingerSet> fingers;
  std::vector<std::uint8_t> sustain;
  // (key, finger) pairs of labeled notes active in each frame.
  std::vector<std::vector<FingerAssignment>> assignments;

  std::size_t num_frames() const { return frames.size(); }

  friend bool operator==(const PianoRoll&, const PianoRoll&) = default;
};

inline std::size_t frame_count(double duration, double dt) {
  if (duration <= 0.0) return 0;
  return static_cast<std::size_t>(std::ceil(duration / dt - 1e-9));
}

// Frame f covers [f*dt, (f+1)*dt); an interval is present in frame f iff it
// contains the frame midpoint.
inline PianoRoll to_piano_roll(const Score& score, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("to_piano_roll: dt must be positive, got " + format_double(dt));
  }
  PianoRoll roll;
  roll.dt = dt;
  const std::size_t num_frames = frame_count(score.duration, dt);
  roll.frames.assign(num_frames, KeySet{});
  roll.fingers.assign(num_frames, FingerSet{});
  roll.sustain.assign(num_frames, 0);
  roll.assignments.assign(num_frames, {});

  auto covered_frames = [&](double start, double end, auto&& visit) {
    if (num_frames == 0) return;
    const double first_guess = std::floor(start / dt - 0.5) - 1.0;
    std::size_t f = first_guess <= 0.0 ? 0 : static_cast<std::size_t>(first_guess);
    for (; f < num_frames; ++f) {
      const double mid = (static_cast<double>(f) + 0.5) * dt;
      if (mid >= end) break;
      if (mid >= start) visit(f);
    }
  };

  for (const auto& note : score.notes) {
    if (!is_piano_pitch(note.pitch)) continue;
    covered_frames(note.onset, note.offset, [&](std::size_t f) {
      roll.frames[f].set(note.key());
      if (note.finger) {
        roll.fingers[f].set(*note.finger);
        roll.assignments[f].push_back({note.key(), *note.finger});
      }
    });
  }
  for (const auto& interval : score.sustain) {
    covered_frames(interval.start, interval.end, [&](std::size_t f) { roll.sustain[f] = 1; });
  }
  return roll;
}

// Canonical text dump: one note per line "pitch onset offset finger" with
// finger "-" when unlabeled, plus "sustain start end" lines and "#" headers.
inline std::string dump_score(const Score& score) {
  std::string out = "# pianobench-score v1\n";
  out += "# title=" + escape_value(score.title) + "\n";
  out += "# duration=" + format_double(score.duration) + "\n";
  for (const auto& note : score.notes) {
    out += std::to_string(note.pitch);
    out += ' ' + format_double(note.onset);
    out += ' ' + format_double(note.offset);
    out += ' ' + (note.finger ? std::to_string(*note.finger) : std::string("-"));
    out += '\n';
  }
  for (const auto& interval : score.sustain) {
    out += "sustain " + format_double(interval.start) + ' ' + format_double(interval.end) + '\n';
  }
  return out;
}

inline Score parse_score_dump(std::string_view text) {
  Score score;
  std::size_t line_number = 0;
  for (auto line_view : split_exact(text, '\n')) {
    ++line_number;
    const std::string line = trim(line_view);
    if (line.empty()) continue;
    auto fail = [&](const std::string& why) {
      throw std::invalid_argument("score dump line " + std::to_string(line_number) + ": " + why);
    };
    if (line.front() == '#') {
      const std::string_view body = std::string_view(line).substr(1);
      const auto fields = split_fields(body);
      if (fields.size() != 1) continue;
      const auto eq = fields[0].find('=');
      if (eq == std::string_view::npos) continue;
      const auto key = fields[0].substr(0, eq);
      const auto value = fields[0].substr(eq + 1);
      if (key == "title") {
        auto title = unescape_value(value);
        if (!title) fail("bad title escape");
        score.title = *title;
      } else if (key == "duration") {
        auto duration = parse_double(value);
        if (!duration) fail("bad duration");
        score.duration = *duration;
      }
      continue;
    }
    const auto fields = split_fields(line);
    if (fields[0] == "sustain") {
      if (fields.size() != 3) fail("sustain needs start and end");
      auto start = parse_double(fields[1]);
      auto end = parse_double(fields[2]);
      if (!start || !end) fail("bad sustain times");
      score.sustain.push_back({*start, *end});
      continue;
    }
    if (fields.size() != 4) fail("expected 'pitch onset offset finger'");
    auto pitch = parse_int<int>(fields[0]);
    auto onset = parse_double(fields[1]);
    auto offset = parse_double(fields[2]);
    if (!pitch || !onset || !offset) fail("bad note fields");
    if (!is_piano_pitch(*pitch)) fail("pitch outside 21..108");
    if (!(*offset > *onset) || *onset < 0.0) fail("note needs 0 <= onset < offset");
    NoteEvent note{.pitch = *pitch, .onset = *onset, .offset = *offset};
    if (fields[3] != "-") {
      auto finger = parse_int<int>(fields[3]);
      if (!finger || *finger < 0 || *finger >= kNumFingers) fail("finger must be 0..9 or '-'");
      note.finger = *finger;
    }
    score.notes.push_back(note);
  }
  normalize(score);
  return score;
}

}  // namespace pianobench

#endif  // PIANOBENCH_SCORE_HPP_
