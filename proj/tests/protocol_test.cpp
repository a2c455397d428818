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

#include "pianobench/protocol.hpp"

#include <gtest/gtest.h>

#include <random>

namespace pianobench {
namespace {

std::string random_value(std::mt19937_64& rng) {
  static const std::string alphabet = "abc XYZ09,.-=%\t\r\n\x01\x7f\xc3\xa9";
  std::uniform_int_distribution<std::size_t> length(0, 12);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::string out(length(rng), ' ');
  for (auto& c : out) c = alphabet[pick(rng)];
  return out;
}

TEST(Protocol, RandomMessagesRoundTrip) {
  const char* kinds[] = {"handshake", "reset", "step", "close", "error"};
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> kind(0, 4);
  std::uniform_int_distribution<int> count(0, 6);
  std::normal_distribution<double> number(0.0, 1e3);
  for (int trial = 0; trial < 2000; ++trial) {
    Message message{kinds[kind(rng)], {}};
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
      const std::string key = "k" + std::to_string(i);
      switch (i % 3) {
        case 0: message.fields.set(key, random_value(rng)); break;
        case 1: message.fields.set(key, number(rng)); break;
        default: {
          std::vector<double> values(static_cast<std::size_t>(count(rng)));
          for (auto& v : values) v = number(rng);
          message.fields.set(key, std::span<const double>(values));
        }
      }
    }
    const std::string line = message.str();
    ASSERT_EQ(line.find('\n'), std::string::npos);
    const auto parsed = parse_message(line);
    ASSERT_TRUE(parsed.has_value()) << line;
    ASSERT_EQ(*parsed, message);
    for (int i = 1; i < n; i += 3) {
      const std::string key = "k" + std::to_string(i);
      ASSERT_EQ(format_double(parsed->fields.get_double(key)), message.fields.at(key));
    }
  }
}

TEST(Protocol, DoublesSurviveBitExact) {
  const double values[] = {0.1, -0.0, 1e-300, 5e-324, 1.7976931348623157e308, 1.0 / 3.0};
  Message message{"step", {}};
  message.fields.set("action", std::span<const double>(values));
  const auto parsed = parse_message(message.str());
  ASSERT_TRUE(parsed);
  const auto back = parsed->fields.get_vector("action");
  ASSERT_EQ(back.size(), std::size(values));
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(std::signbit(back[i]), std::signbit(values[i]));
    EXPECT_EQ(back[i], values[i]);
  }
}

TEST(Protocol, RejectsMalformedLines) {
  EXPECT_FALSE(parse_message(""));
  EXPECT_FALSE(parse_message("Step"));
  EXPECT_FALSE(parse_message("step action"));
  EXPECT_FALSE(parse_message("step =1"));
  EXPECT_FALSE(parse_message("step a=%4"));
  EXPECT_FALSE(parse_message("step a=%zz"));
  EXPECT_TRUE(parse_message("close\r\n"));
  EXPECT_EQ(parse_message("close\r\n")->kind, "close");
}

TEST(Protocol, ErrorMessageShape) {
  const Message m = error_message(error_code::kNotReset, "send reset first");
  EXPECT_EQ(m.str(), "error code=not_reset message=send%20reset%20first");
}

}  // namespace
}  // namespace pianobench
