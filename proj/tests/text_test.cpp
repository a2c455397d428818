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

#include "pianobench/text.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <random>

namespace pianobench {
namespace {

TEST(FormatDouble, RoundTripsRandomBitPatterns) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 10000; ++i) {
    const std::uint64_t bits = rng();
    double value;
    std::memcpy(&value, &bits, sizeof(value));
    if (!std::isfinite(value)) continue;
    const auto parsed = parse_double(format_double(value));
    ASSERT_TRUE(parsed.has_value());
    EXPECT_EQ(std::memcmp(&*parsed, &value, sizeof(value)), 0) << format_double(value);
  }
}

TEST(FormatDouble, Shortest) {
  EXPECT_EQ(format_double(0.05), "0.05");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(format_double(-0.0), "-0");
}

TEST(ParseDouble, RejectsJunk) {
  EXPECT_FALSE(parse_double(""));
  EXPECT_FALSE(parse_double("1.5x"));
  EXPECT_FALSE(parse_double(" 1"));
  EXPECT_EQ(*parse_double("+2.5"), 2.5);
}

TEST(ParseInt, Bounds) {
  EXPECT_EQ(*parse_int<int>("42"), 42);
  EXPECT_FALSE(parse_int<int>("4.2"));
  EXPECT_FALSE(parse_int<std::uint8_t>("300"));
  EXPECT_FALSE(parse_int<std::uint64_t>("-1"));
}

TEST(Split, FieldsDropEmptiesExactKeepsThem) {
  EXPECT_EQ(split_fields("  a \t b  ").size(), 2u);
  const auto exact = split_exact("a,,b,", ',');
  ASSERT_EQ(exact.size(), 4u);
  EXPECT_EQ(exact[1], "");
  EXPECT_EQ(exact[3], "");
}

TEST(Escape, RoundTripsAllBytes) {
  std::string raw;
  for (int c = 0; c < 256; ++c) raw.push_back(static_cast<char>(c));
  const std::string escaped = escape_value(raw);
  EXPECT_EQ(escaped.find(' '), std::string::npos);
  EXPECT_EQ(escaped.find('\n'), std::string::npos);
  EXPECT_EQ(*unescape_value(escaped), raw);
}

TEST(Escape, RejectsTruncatedSequences) {
  EXPECT_FALSE(unescape_value("%2"));
  EXPECT_FALSE(unescape_value("%zz"));
  EXPECT_EQ(*unescape_value("a%20b"), "a b");
}

TEST(Vector, RoundTrip) {
  const std::vector<double> v = {0.1, -2.0, 1e-300, 3.5};
  EXPECT_EQ(*parse_vector(format_vector(v)), v);
  EXPECT_TRUE(parse_vector("")->empty());
  EXPECT_FALSE(parse_vector("1,,2"));
}

TEST(Record, RoundTripAndAccessors) {
  Record r;
  const std::vector<double> v = {1.5, 2.25};
  r.set("name", "two words").set("x", 0.1).set("n", 7).set("flag", true).set("v", std::span<const double>(v));
  const auto parsed = Record::parse(r.str());
  ASSERT_TRUE(parsed);
  EXPECT_EQ(*parsed, r);
  EXPECT_EQ(parsed->at("name"), "two words");
  EXPECT_EQ(parsed->get_double("x"), 0.1);
  EXPECT_EQ(parsed->get_int("n"), 7);
  EXPECT_TRUE(parsed->get_bool("flag"));
  EXPECT_EQ(parsed->get_vector("v"), v);
  EXPECT_THROW(parsed->at("missing"), std::invalid_argument);
  EXPECT_THROW(parsed->get_double("name"), std::invalid_argument);
}

TEST(Record, SetOverwritesInPlace) {
  Record r;
  r.set("a", 1).set("b", 2).set("a", 3);
  EXPECT_EQ(r.str(), "a=3 b=2");
}

TEST(Record, ParseRejectsBareTokens) {
  EXPECT_FALSE(Record::parse("a=1 oops"));
  EXPECT_FALSE(Record::parse("=1"));
  EXPECT_TRUE(Record::parse("a= b=2"));
}

TEST(Fnv1a, KnownVector) {
  // FNV-1a 64 of "a"
  EXPECT_EQ(fnv1a("a", 1), 0xaf63dc4c8601ec8cULL);
}

}  // namespace
}  // namespace pianobench
