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

#include "pianobench/midi.hpp"

#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"

namespace pianobench {
namespace {

using testing::MidiBuilder;

TEST(Midi, QuarterNoteFixture) {
  const Score score = load_midi_file(testing::data_path("quarter_note.mid"));
  ASSERT_EQ(score.notes.size(), 1u);
  EXPECT_EQ(score.notes[0].pitch, 60);
  EXPECT_DOUBLE_EQ(score.notes[0].onset, 0.0);
  EXPECT_NEAR(score.notes[0].offset, 0.5, 1e-12);
  EXPECT_EQ(score.title, "quarter");
  const PianoRoll roll = to_piano_roll(score, 0.05);
  std::size_t active = 0;
  for (const auto& frame : roll.frames) active += frame[39];
  EXPECT_EQ(active, 10u);
}

TEST(Midi, TempoChangeFixtureMatchesTickAccumulator) {
  const Score score = load_midi_file(testing::data_path("tempo_change.mid"));
  ASSERT_EQ(score.notes.size(), 1u);
  const double reference = testing::brute_force_seconds(480, 480, {{0, 120.0}, {240, 60.0}});
  EXPECT_NEAR(reference, 0.75, 1e-9);
  EXPECT_NEAR(score.notes[0].offset, reference, 1e-9);
}

TEST(Midi, EmptyFile) {
  const Score score = load_midi_file(testing::data_path("empty.mid"));
  EXPECT_TRUE(score.notes.empty());
  EXPECT_EQ(score.duration, 0.0);
}

TEST(TempoMap, MonotoneAndMatchesAccumulatorOnRandomMaps) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<TempoMap::Change> changes;
    std::vector<std::pair<std::uint64_t, double>> bpm;
    std::uint64_t tick = 0;
    for (int c = 0; c < 4; ++c) {
      tick += 1 + rng() % 300;
      const std::uint32_t us = 250000 + static_cast<std::uint32_t>(rng() % 1000000);
      changes.push_back({tick, us});
      bpm.push_back({tick, 60e6 / us});
    }
    const TempoMap map(96, changes);
    double previous = -1.0;
    for (std::uint64_t t = 0; t < tick + 200; t += 7) {
      const double s = map.seconds(t);
      EXPECT_GE(s, previous);
      previous = s;
      EXPECT_NEAR(s, testing::brute_force_seconds(t, 96, bpm), 1e-9);
    }
  }
}

TEST(Midi, RunningStatusAndVelocityZeroNoteOff) {
  MidiBuilder b;
  b.track().on(0, 60).raw(0, {64, 70}).raw(480, {60, 0}).raw(0, {64, 0}).end();
  const Score score = parse_midi(b.bytes());
  ASSERT_EQ(score.notes.size(), 2u);
  EXPECT_NEAR(score.notes[1].offset, 0.5, 1e-12);
}

TEST(Midi, SustainPedalIntervals) {
  MidiBuilder b;
  b.track().cc(0, 64, 127).on(0, 60).off(480, 60).cc(480, 64, 0).end();
  const Score score = parse_midi(b.bytes());
  ASSERT_EQ(score.sustain.size(), 1u);
  EXPECT_NEAR(score.sustain[0].end, 1.0, 1e-12);
  EXPECT_NEAR(score.duration, 1.0, 1e-12);
}

TEST(Midi, Format1TempoTrackAppliesToAllTracks) {
  MidiBuilder b(1, 480);
  b.track().tempo(0, 1000000).end();
  b.track().on(0, 62).off(480, 62).end();
  const Score score = parse_midi(b.bytes());
  ASSERT_EQ(score.notes.size(), 1u);
  EXPECT_NEAR(score.notes[0].offset, 1.0, 1e-12);
}

TEST(Midi, OutOfRangePitchDroppedWithDiagnostic) {
  MidiBuilder b;
  b.track().on(0, 10).off(100, 10).on(0, 60).off(100, 60).end();
  Diagnostics diag;
  const Score score = parse_midi(b.bytes(), &diag);
  ASSERT_EQ(score.notes.size(), 1u);
  EXPECT_FALSE(diag.empty());
}

TEST(Midi, UnclosedNoteClosedAtTrackEnd) {
  MidiBuilder b;
  b.track().on(0, 60).end(960);
  Diagnostics diag;
  const Score score = parse_midi(b.bytes(), &diag);
  ASSERT_EQ(score.notes.size(), 1u);
  EXPECT_NEAR(score.notes[0].offset, 1.0, 1e-12);
  EXPECT_FALSE(diag.empty());
}

TEST(Midi, MalformedInputsThrowWithOffset) {
  EXPECT_THROW(parse_midi(std::vector<std::uint8_t>{'M', 'T'}), ParseError);
  MidiBuilder format2(2);
  format2.track().end();
  EXPECT_THROW(parse_midi(format2.bytes()), ParseError);
  MidiBuilder b;
  b.track().on(0, 60).off(10, 60).end();
  auto bytes = b.bytes();
  bytes.resize(bytes.size() - 3);  // truncate the track body
  try {
    parse_midi(bytes);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_GT(e.offset(), 0u);
  }
}

TEST(Midi, RandomBytesNeverCrash) {
  std::mt19937_64 rng(9);
  MidiBuilder b;
  b.track().on(0, 60).off(480, 60).cc(0, 64, 100).tempo(10, 400000).end();
  const auto good = b.bytes();
  for (int trial = 0; trial < 2000; ++trial) {
    auto bytes = good;
    for (int flips = 0; flips < 3; ++flips) bytes[rng() % bytes.size()] = static_cast<std::uint8_t>(rng());
    try {
      parse_midi(bytes);
    } catch (const ParseError&) {
    }
  }
  SUCCEED();
}

}  // namespace
}  // namespace pianobench
