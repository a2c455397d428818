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

// Built-in songs and the song library served to agents.

#ifndef PIANOBENCH_SONGS_HPP_
#define PIANOBENCH_SONGS_HPP_

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pianobench/fingering.hpp"
#include "pianobench/midi.hpp"
#include "pianobench/score.hpp"

namespace pianobench {

namespace songs {

struct Spec {
  int pitch;
  double onset;
  double offset;
  int finger;  // -1 when unlabeled
};

inline Score make(std::string title, const std::vector<Spec>& notes) {
  Score score;
  score.title = std::move(title);
  for (const auto& n : notes) {
    NoteEvent note{.pitch = n.pitch, .onset = n.onset, .offset = n.offset};
    if (n.finger >= 0) note.finger = n.finger;
    score.notes.push_back(note);
  }
  normalize(score);
  return score;
}

// C4 held for one second, starting half a second in; right thumb.
inline Score single_note() { return make("single_note", {{60, 0.5, 1.5, 0}}); }

// C4..C5 quarter notes at 60 bpm with the usual right-hand fingering
// 1-2-3-1-2-3-4-5.
inline Score c_major_scale() {
  static constexpr int kPitches[] = {60, 62, 64, 65, 67, 69, 71, 72};
  static constexpr int kFingers[] = {0, 1, 2, 0, 1, 2, 3, 4};
  std::vector<Spec> notes;
  for (int i = 0; i < 8; ++i) notes.push_back({kPitches[i], 1.0 * i, 1.0 * (i + 1), kFingers[i]});
  return make("c_major_scale", notes);
}

// Opening phrase of "Twinkle Twinkle" at 100 bpm, detached, no fingering.
inline Score twinkle() {
  static constexpr int kPitches[] = {60, 60, 67, 67, 69, 69, 67};
  std::vector<Spec> notes;
  const double beat = 0.6;
  for (int i = 0; i < 7; ++i) {
    const double length = i == 6 ? 2 * beat : beat;
    notes.push_back({kPitches[i], beat * i, beat * i + 0.85 * length, -1});
  }
  return make("twinkle", notes);
}

// I-IV-V chords, both hands, one second each with a short break.
inline Score two_hand_chords() {
  std::vector<Spec> notes;
  const int right[3][3] = {{60, 64, 67}, {65, 69, 72}, {67, 71, 74}};
  const int left[3][2] = {{48, 55}, {41, 48}, {43, 50}};
  for (int c = 0; c < 3; ++c) {
    const double on = 1.0 * c + 0.2;
    const double off = on + 0.8;
    notes.push_back({right[c][0], on, off, 0});
    notes.push_back({right[c][1], on, off, 2});
    notes.push_back({right[c][2], on, off, 4});
    notes.push_back({left[c][0], on, off, 9});
    notes.push_back({left[c][1], on, off, 5});
  }
  return make("two_hand_chords", notes);
}

}  // namespace songs

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Loads a score from a .mid/.midi file (optionally with a PIG fingering file)
// or from a canonical score dump.
inline Score load_score_file(const std::string& path, const std::string& fingering_path = {},
                             Diagnostics* diagnostics = nullptr) {
  const std::string extension = std::filesystem::path(path).extension().string();
  Score score;
  if (extension == ".mid" || extension == ".midi") {
    score = load_midi_file(path, diagnostics);
    if (score.title.empty()) score.title = std::filesystem::path(path).stem().string();
  } else {
    score = parse_score_dump(read_text_file(path));
  }
  if (!fingering_path.empty()) {
    const auto table = parse_fingering(read_text_file(fingering_path), diagnostics);
    score = attach_fingering(std::move(score), table, 0.01, diagnostics);
  }
  return score;
}

class SongLibrary {
 public:
  static SongLibrary builtin() {
    SongLibrary library;
    library.add("single_note", songs::single_note());
    library.add("c_major_scale", songs::c_major_scale());
    library.add("twinkle", songs::twinkle());
    library.add("two_hand_chords", songs::two_hand_chords());
    return library;
  }

  void add(const std::string& id, Score score) { songs_[id] = std::move(score); }

  // Adds every .mid/.midi/.score file in `dir`, keyed by file stem. A
  // sibling "<stem>_fingering.txt" is attached when present.
  void add_directory(const std::string& dir, Diagnostics* diagnostics = nullptr) {
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      if (!entry.is_regular_file()) continue;
      const auto& path = entry.path();
      const std::string extension = path.extension().string();
      if (extension != ".mid" && extension != ".midi" && extension != ".score") continue;
      const auto fingering = path.parent_path() / (path.stem().string() + "_fingering.txt");
      add(path.stem().string(),
          load_score_file(path.string(),
                          std::filesystem::exists(fingering) ? fingering.string() : std::string(),
                          diagnostics));
    }
  }

  bool contains(const std::string& id) const { return songs_.count(id) > 0; }

  const Score& get(const std::string& id) const {
    auto it = songs_.find(id);
    if (it == songs_.end()) {
      throw std::out_of_range("unknown song '" + id + "'; available: " + joined_names());
    }
    return it->second;
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& [id, score] : songs_) out.push_back(id);
    return out;
  }

  std::string joined_names(char sep = ',') const {
    std::string out;
    for (const auto& [id, score] : songs_) {
      if (!out.empty()) out.push_back(sep);
      out += id;
    }
    return out;
  }

 private:
  std::map<std::string, Score> songs_;
};

// Resolves a --song argument: a library id, or a path to a song file.
inline Score resolve_song(const SongLibrary& library, const std::string& song,
                          const std::string& fingering_path = {},
                          Diagnostics* diagnostics = nullptr) {
  if (library.contains(song)) {
    Score score = library.get(song);
    if (!fingering_path.empty()) {
      const auto table = parse_fingering(read_text_file(fingering_path), diagnostics);
      score = attach_fingering(std::move(score), table, 0.01, diagnostics);
    }
    return score;
  }
  if (std::filesystem::exists(song)) return load_score_file(song, fingering_path, diagnostics);
  throw std::out_of_range("unknown song '" + song + "'; available: " + library.joined_names());
}

}  // namespace pianobench

#endif  // PIANOBENCH_SONGS_HPP_
