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

// Standard MIDI File (format 0/1) reader producing a Score.

#ifndef PIANOBENCH_MIDI_HPP_
#define PIANOBENCH_MIDI_HPP_

#include <algorithm>
#include <cstdint>
#include <deque>
#include <fstream>
#include <iterator>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "pianobench/score.hpp"

namespace pianobench {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

inline constexpr std::uint32_t kDefaultTempo = 500000;  // us per quarter, 120 bpm

// Piecewise-constant tempo map from ticks to seconds.
class TempoMap {
 public:
  struct Change {
    std::uint64_t tick = 0;
    std::uint32_t us_per_quarter = kDefaultTempo;
  };

  // Metrical time. Changes at equal ticks: the last one wins.
  TempoMap(std::uint16_t ticks_per_quarter, std::vector<Change> changes)
      : ticks_per_quarter_(ticks_per_quarter) {
    std::stable_sort(changes.begin(), changes.end(),
                     [](const Change& a, const Change& b) { return a.tick < b.tick; });
    segments_.push_back({0, kDefaultTempo, 0.0});
    for (const auto& change : changes) {
      auto& last = segments_.back();
      if (change.tick == last.tick) {
        last.us_per_quarter = change.us_per_quarter;
        continue;
      }
      const double start = last.seconds + seconds_per_tick(last.us_per_quarter) *
                                              static_cast<double>(change.tick - last.tick);
      segments_.push_back({change.tick, change.us_per_quarter, start});
    }
  }

  // Timecode division: a fixed number of ticks per second.
  static TempoMap timecode(double ticks_per_second) {
    TempoMap map(1, {});
    map.ticks_per_second_ = ticks_per_second;
    return map;
  }

  double seconds(std::uint64_t tick) const {
    if (ticks_per_second_ > 0.0) return static_cast<double>(tick) / ticks_per_second_;
    auto it = std::upper_bound(segments_.begin(), segments_.end(), tick,
                               [](std::uint64_t t, const Segment& s) { return t < s.tick; });
    const Segment& segment = *std::prev(it);
    return segment.seconds +
           seconds_per_tick(segment.us_per_quarter) * static_cast<double>(tick - segment.tick);
  }

 private:
  struct Segment {
    std::uint64_t tick;
    std::uint32_t us_per_quarter;
    double seconds;
  };

  double seconds_per_tick(std::uint32_t us_per_quarter) const {
    return static_cast<double>(us_per_quarter) * 1e-6 / static_cast<double>(ticks_per_quarter_);
  }

  std::uint16_t ticks_per_quarter_;
  double ticks_per_second_ = 0.0;
  std::vector<Segment> segments_;
};

namespace midi_detail {

class ByteReader {
 public:
  ByteReader(std::span<const std::uint8_t> bytes, std::size_t pos, std::size_t end)
      : bytes_(bytes), pos_(pos), end_(end) {}

  std::size_t pos() const { return pos_; }
  bool done() const { return pos_ >= end_; }

  void require(std::size_t count, const char* what) const {
    if (end_ - pos_ < count) throw ParseError(std::string("truncated ") + what, pos_);
  }
  std::uint8_t u8(const char* what = "data") {
    require(1, what);
    return bytes_[pos_++];
  }
  std::uint8_t peek() const {
    require(1, "data");
    return bytes_[pos_];
  }
  std::uint16_t u16(const char* what = "data") {
    require(2, what);
    const std::uint16_t v = static_cast<std::uint16_t>(bytes_[pos_] << 8 | bytes_[pos_ + 1]);
    pos_ += 2;
    return v;
  }
  std::uint32_t u32(const char* what = "data") {
    require(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = v << 8 | bytes_[pos_ + i];
    pos_ += 4;
    return v;
  }
  std::uint32_t vlq() {
    const std::size_t start = pos_;
    std::uint32_t value = 0;
    for (int i = 0; i < 4; ++i) {
      const std::uint8_t byte = u8("variable-length quantity");
      value = value << 7 | (byte & 0x7F);
      if (!(byte & 0x80)) return value;
    }
    throw ParseError("variable-length quantity longer than 4 bytes", start);
  }
  void skip(std::size_t count, const char* what) {
    require(count, what);
    pos_ += count;
  }
  std::string text(std::size_t count) {
    require(count, "meta text");
    std::string out(reinterpret_cast<const char*>(bytes_.data() + pos_), count);
    pos_ += count;
    return out;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_;
  std::size_t end_;
};

struct Event {
  enum class Kind { kNoteOn, kNoteOff, kSustain };
  std::uint64_t tick;
  int track;
  std::size_t order;
  Kind kind;
  int channel;
  int data1;
  int data2;
};

}  // namespace midi_detail

// Parses a format-0 or format-1 Standard MIDI File.
//
// Notes are paired per (track, channel, pitch) first-in first-out; a note-on
// with velocity 0 is a note-off. Controller 64 >= 64 opens a sustain
// interval, < 64 closes it. Unknown chunks and messages are skipped.
inline Score parse_midi(std::span<const std::uint8_t> bytes, Diagnostics* diagnostics = nullptr) {
  using midi_detail::ByteReader;
  using midi_detail::Event;
  auto warn = [&](std::string message) {
    if (diagnostics) diagnostics->push_back(std::move(message));
  };

  ByteReader file(bytes, 0, bytes.size());
  file.require(4, "header chunk id");
  if (!std::equal(bytes.begin(), bytes.begin() + 4, "MThd")) {
    throw ParseError("missing MThd header", 0);
  }
  file.skip(4, "header chunk id");
  const std::size_t header_length_pos = file.pos();
  const std::uint32_t header_length = file.u32("header length");
  if (header_length < 6) throw ParseError("header chunk shorter than 6 bytes", header_length_pos);
  if (bytes.size() - file.pos() < header_length) {
    throw ParseError("header chunk length exceeds file", header_length_pos);
  }
  const std::size_t format_pos = file.pos();
  const std::uint16_t format = file.u16();
  const std::uint16_t declared_tracks = file.u16();
  const std::size_t division_pos = file.pos();
  const std::uint16_t division = file.u16();
  file.skip(header_length - 6, "header");
  if (format > 1) throw ParseError("unsupported MIDI format " + std::to_string(format), format_pos);
  if (division == 0) throw ParseError("zero ticks per quarter note", division_pos);

  Score score;
  std::vector<Event> events;
  std::vector<TempoMap::Change> tempo_changes;
  std::vector<std::uint64_t> track_end_ticks;
  int track = 0;

  while (!file.done()) {
    const std::size_t chunk_pos = file.pos();
    file.require(8, "chunk header");
    const bool is_track = std::equal(bytes.begin() + chunk_pos, bytes.begin() + chunk_pos + 4, "MTrk");
    file.skip(4, "chunk id");
    const std::size_t length_pos = file.pos();
    const std::uint32_t length = file.u32("chunk length");
    if (bytes.size() - file.pos() < length) {
      throw ParseError("chunk length exceeds file", length_pos);
    }
    const std::size_t body = file.pos();
    file.skip(length, "chunk body");
    if (!is_track) {
      warn("skipped unknown chunk at byte " + std::to_string(chunk_pos));
      continue;
    }

    ByteReader reader(bytes, body, body + length);
    std::uint64_t tick = 0;
    int running_status = -1;
    std::size_t order = 0;
    bool ended = false;
    while (!reader.done() && !ended) {
      tick += reader.vlq();
      const std::size_t status_pos = reader.pos();
      int status = reader.peek();
      if (status & 0x80) {
        reader.u8();
      } else if (running_status < 0) {
        throw ParseError("data byte without running status", status_pos);
      } else {
        status = running_status;
      }

      if (status == 0xFF) {
        running_status = -1;
        const int type = reader.u8("meta type");
        const std::uint32_t size = reader.vlq();
        if (type == 0x51) {
          if (size != 3) throw ParseError("tempo meta event must have 3 bytes", status_pos);
          const std::uint32_t tempo = static_cast<std::uint32_t>(reader.u8()) << 16 |
                                      static_cast<std::uint32_t>(reader.u8()) << 8 | reader.u8();
          if (tempo == 0) throw ParseError("zero tempo", status_pos);
          tempo_changes.push_back({tick, tempo});
        } else if (type == 0x2F) {
          reader.skip(size, "end of track");
          ended = true;
        } else if (type == 0x03 && track == 0 && score.title.empty()) {
          score.title = reader.text(size);
        } else {
          reader.skip(size, "meta event");
        }
        continue;
      }
      if (status == 0xF0 || status == 0xF7) {
        running_status = -1;
        reader.skip(reader.vlq(), "sysex");
        continue;
      }
      if (status >= 0xF1) throw ParseError("unexpected system message in track", status_pos);

      running_status = status;
      const int type = status & 0xF0;
      const int channel = status & 0x0F;
      const int data_bytes = (type == 0xC0 || type == 0xD0) ? 1 : 2;
      const int data1 = reader.u8("channel message");
      const int data2 = data_bytes == 2 ? reader.u8("channel message") : 0;
      if ((data1 | data2) & 0x80) throw ParseError("data byte with high bit set", status_pos);

      if (type == 0x90 && data2 > 0) {
        events.push_back({tick, track, order++, Event::Kind::kNoteOn, channel, data1, data2});
      } else if (type == 0x80 || type == 0x90) {
        events.push_back({tick, track, order++, Event::Kind::kNoteOff, channel, data1, data2});
      } else if (type == 0xB0 && data1 == 64) {
        events.push_back({tick, track, order++, Event::Kind::kSustain, channel, data1, data2});
      }
    }
    track_end_ticks.push_back(tick);
    ++track;
  }
  if (track != declared_tracks) {
    warn("header declares " + std::to_string(declared_tracks) + " tracks, found " +
         std::to_string(track));
  }

  const TempoMap tempo = (division & 0x8000)
      ? TempoMap::timecode([&] {
          const int fps = -static_cast<std::int8_t>(division >> 8);
          const double frames = fps == 29 ? 29.97 : static_cast<double>(fps);
          return frames * static_cast<double>(division & 0xFF);
        }())
      : TempoMap(division, tempo_changes);

  std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    return std::tie(a.tick, a.track, a.order) < std::tie(b.tick, b.track, b.order);
  });

  struct OpenNote {
    std::uint64_t tick;
    int velocity;
  };
  std::map<std::tuple<int, int, int>, std::deque<OpenNote>> open_notes;
  std::map<std::pair<int, int>, std::uint64_t> open_sustain;  // (track, channel) -> start tick

  auto emit_note = [&](int pitch, const OpenNote& open, std::uint64_t end_tick) {
    if (!is_piano_pitch(pitch)) {
      warn("dropped note with pitch " + std::to_string(pitch) + " outside 21..108");
      return;
    }
    NoteEvent note{.pitch = pitch,
                   .onset = tempo.seconds(open.tick),
                   .offset = tempo.seconds(end_tick),
                   .velocity = open.velocity};
    if (!(note.offset > note.onset)) {
      warn("dropped zero-length note with pitch " + std::to_string(pitch));
      return;
    }
    score.notes.push_back(note);
  };

  for (const auto& event : events) {
    switch (event.kind) {
      case Event::Kind::kNoteOn:
        open_notes[{event.track, event.channel, event.data1}].push_back({event.tick, event.data2});
        break;
      case Event::Kind::kNoteOff: {
        auto it = open_notes.find({event.track, event.channel, event.data1});
        if (it == open_notes.end() || it->second.empty()) {
          warn("note-off without note-on for pitch " + std::to_string(event.data1));
          break;
        }
        emit_note(event.data1, it->second.front(), event.tick);
        it->second.pop_front();
        break;
      }
      case Event::Kind::kSustain: {
        const std::pair<int, int> where{event.track, event.channel};
        auto it = open_sustain.find(where);
        if (event.data2 >= 64) {
          if (it == open_sustain.end()) open_sustain[where] = event.tick;
        } else if (it != open_sustain.end()) {
          score.sustain.push_back({tempo.seconds(it->second), tempo.seconds(event.tick)});
          open_sustain.erase(it);
        }
        break;
      }
    }
  }

  for (auto& [where, queue] : open_notes) {
    const auto end_tick = track_end_ticks[std::get<0>(where)];
    for (const auto& open : queue) {
      warn("note-on without note-off for pitch " + std::to_string(std::get<2>(where)) +
           "; closed at end of track");
      emit_note(std::get<2>(where), open, end_tick);
    }
  }
  for (const auto& [where, start] : open_sustain) {
    score.sustain.push_back({tempo.seconds(start), tempo.seconds(track_end_ticks[where.first])});
  }

  normalize(score, diagnostics);
  return score;
}

inline std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline Score load_midi_file(const std::string& path, Diagnostics* diagnostics = nullptr) {
  const auto bytes = read_file_bytes(path);
  return parse_midi(bytes, diagnostics);
}

}  // namespace pianobench

#endif  // PIANOBENCH_MIDI_HPP_
