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

// PIG-style fingering annotations.
//
// Each non-comment line is tab separated:
//   id  onset  offset  spelled-pitch  on-vel  off-vel  channel  finger
// Finger 1..5 is the right hand thumb..little, -1..-5 the left hand. A
// substitution "a_b" keeps the first finger.

#ifndef PIANOBENCH_FINGERING_HPP_
#define PIANOBENCH_FINGERING_HPP_

#include <cmath>
#include <cstdlib>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pianobench/score.hpp"
#include "pianobench/text.hpp"

namespace pianobench {

struct FingeringEntry {
  int pitch = 0;
  double onset = 0.0;
  int finger = 0;  // 0..9
  friend bool operator==(const FingeringEntry&, const FingeringEntry&) = default;
};

using FingeringTable = std::vector<FingeringEntry>;

// "C4" -> 60, "F#3" -> 54, "Bb-1" -> 10. Accepts '#', 'b' and 'x' accidentals.
inline std::optional<int> parse_spelled_pitch(std::string_view text) {
  if (text.empty()) return std::nullopt;
  static constexpr int kLetterClass[] = {9, 11, 0, 2, 4, 5, 7};  // A..G
  char letter = text.front();
  if (letter >= 'a' && letter <= 'g') letter = static_cast<char>(letter - 'a' + 'A');
  if (letter < 'A' || letter > 'G') return std::nullopt;
  int pitch_class = kLetterClass[letter - 'A'];
  std::size_t i = 1;
  for (; i < text.size(); ++i) {
    if (text[i] == '#') {
      ++pitch_class;
    } else if (text[i] == 'b') {
      --pitch_class;
    } else if (text[i] == 'x') {
      pitch_class += 2;
    } else {
      break;
    }
  }
  auto octave = parse_int<int>(text.substr(i));
  if (!octave) return std::nullopt;
  return 12 * (*octave + 1) + pitch_class;
}

// Finger field to 0..9; nullopt for 0, |f| > 5 or garbage.
inline std::optional<int> parse_finger_field(std::string_view text) {
  const auto underscore = text.find('_');
  if (underscore != std::string_view::npos) text = text.substr(0, underscore);
  auto finger = parse_int<int>(text);
  if (!finger || *finger == 0 || std::abs(*finger) > 5) return std::nullopt;
  return *finger > 0 ? *finger - 1 : 5 + (-*finger - 1);
}

inline FingeringTable parse_fingering(std::string_view text, Diagnostics* diagnostics = nullptr) {
  FingeringTable table;
  std::size_t line_number = 0;
  for (auto raw : split_exact(text, '\n')) {
    ++line_number;
    const std::string line = trim(raw);
    if (line.empty() || line.starts_with("//")) continue;
    auto reject = [&](const std::string& why) {
      if (diagnostics) {
        diagnostics->push_back("fingering line " + std::to_string(line_number) + " rejected: " + why);
      }
    };
    const auto fields = split_fields(line, "\t ");
    if (fields.size() < 8) {
      reject("expected 8 fields, got " + std::to_string(fields.size()));
      continue;
    }
    auto onset = parse_double(fields[1]);
    if (!onset) {
      reject("bad onset '" + std::string(fields[1]) + "'");
      continue;
    }
    auto pitch = parse_spelled_pitch(fields[3]);
    if (!pitch) {
      reject("unparseable pitch '" + std::string(fields[3]) + "'");
      continue;
    }
    auto finger = parse_finger_field(fields[7]);
    if (!finger) {
      reject("finger '" + std::string(fields[7]) + "' outside 1..5 / -1..-5");
      continue;
    }
    table.push_back({*pitch, *onset, *finger});
  }
  return table;
}

// Labels each note with the unused entry of equal pitch and nearest onset
// within `tolerance`; notes are visited in score order and ties go to the
// earlier table entry.
inline Score attach_fingering(Score score, const FingeringTable& table, double tolerance = 0.01,
                              Diagnostics* diagnostics = nullptr) {
  if (!(tolerance >= 0.0)) throw std::invalid_argument("attach_fingering: tolerance must be >= 0");
  std::vector<bool> used(table.size(), false);
  const double slack = tolerance + 1e-12;
  for (auto& note : score.notes) {
    std::size_t best = table.size();
    double best_distance = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < table.size(); ++i) {
      if (used[i] || table[i].pitch != note.pitch) continue;
      const double distance = std::abs(table[i].onset - note.onset);
      if (distance <= slack && distance < best_distance) {
        best = i;
        best_distance = distance;
      }
    }
    if (best < table.size()) {
      used[best] = true;
      note.finger = table[best].finger;
    }
  }
  if (diagnostics) {
    for (std::size_t i = 0; i < table.size(); ++i) {
      if (!used[i]) {
        diagnostics->push_back("fingering entry pitch " + std::to_string(table[i].pitch) +
                               " onset " + format_double(table[i].onset) + " matched no note");
      }
    }
  }
  return score;
}

}  // namespace pianobench

#endif  // PIANOBENCH_FINGERING_HPP_
