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

// Text helpers shared by every on-disk and on-wire format: round-trip exact
// number formatting and the flat `key=value` record codec.

#ifndef PIANOBENCH_TEXT_HPP_
#define PIANOBENCH_TEXT_HPP_

#include <charconv>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

namespace pianobench {

// shortest representation that parses back to the identical double
inline std::string format_double(double value) {
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buffer, end);
}

inline std::optional<double> parse_double(std::string_view text) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty()) {
    return std::nullopt;
  }
  return value;
}

template <typename Int>
std::optional<Int> parse_int(std::string_view text) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  Int value{};
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty()) {
    return std::nullopt;
  }
  return value;
}

inline std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(first, last - first + 1));
}

// Split on any run of the given delimiter characters; empty fields dropped.
inline std::vector<std::string_view> split_fields(std::string_view text,
                                                  std::string_view delims = " \t") {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto start = text.find_first_not_of(delims, pos);
    if (start == std::string_view::npos) break;
    auto stop = text.find_first_of(delims, start);
    if (stop == std::string_view::npos) stop = text.size();
    out.push_back(text.substr(start, stop - start));
    pos = stop;
  }
  return out;
}

// Split on every occurrence of `sep`, keeping empty fields.
inline std::vector<std::string_view> split_exact(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto stop = text.find(sep, pos);
    if (stop == std::string_view::npos) {
      out.push_back(text.substr(pos));
      return out;
    }
    out.push_back(text.substr(pos, stop - pos));
    pos = stop + 1;
  }
}

// Percent-encodes the bytes that would break a record line.
inline std::string escape_value(std::string_view raw) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    const auto byte = static_cast<unsigned char>(c);
    if (c == ' ' || c == '%' || c == '\n' || c == '\r' || c == '\t' || byte < 0x20 ||
        byte == 0x7F) {
      out.push_back('%');
      out.push_back(kHex[byte >> 4]);
      out.push_back(kHex[byte & 0xF]);
    } else {
      out.push_back(c);
    }
  }
  return out;
}

inline std::optional<std::string> unescape_value(std::string_view encoded) {
  auto hex = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
  };
  std::string out;
  out.reserve(encoded.size());
  for (std::size_t i = 0; i < encoded.size(); ++i) {
    if (encoded[i] != '%') {
      out.push_back(encoded[i]);
      continue;
    }
    if (i + 2 >= encoded.size()) return std::nullopt;
    const int hi = hex(encoded[i + 1]);
    const int lo = hex(encoded[i + 2]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out.push_back(static_cast<char>(hi * 16 + lo));
    i += 2;
  }
  return out;
}

inline std::string format_vector(std::span<const double> values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out.push_back(',');
    out += format_double(values[i]);
  }
  return out;
}

inline std::optional<std::vector<double>> parse_vector(std::string_view text) {
  std::vector<double> out;
  if (text.empty()) return out;
  for (auto field : split_exact(text, ',')) {
    auto value = parse_double(field);
    if (!value) return std::nullopt;
    out.push_back(*value);
  }
  return out;
}

// An ordered list of key=value fields serialized as one line:
//   key=value key=value ...
// Keys are [A-Za-z0-9_.]; values are percent-escaped.
class Record {
 public:
  Record() = default;

  Record& set(std::string key, std::string value) {
    for (auto& field : fields_) {
      if (field.first == key) {
        field.second = std::move(value);
        return *this;
      }
    }
    fields_.emplace_back(std::move(key), std::move(value));
    return *this;
  }
  Record& set(std::string key, double value) { return set(std::move(key), format_double(value)); }
  Record& set(std::string key, std::int64_t value) {
    return set(std::move(key), std::to_string(value));
  }
  Record& set(std::string key, int value) { return set(std::move(key), std::to_string(value)); }
  Record& set(std::string key, std::size_t value) {
    return set(std::move(key), std::to_string(value));
  }
  Record& set(std::string key, bool value) { return set(std::move(key), std::string(value ? "1" : "0")); }
  Record& set(std::string key, const char* value) { return set(std::move(key), std::string(value)); }
  Record& set(std::string key, std::span<const double> values) {
    return set(std::move(key), format_vector(values));
  }

  bool has(std::string_view key) const { return find(key) != nullptr; }

  const std::string* find(std::string_view key) const {
    for (const auto& field : fields_) {
      if (field.first == key) return &field.second;
    }
    return nullptr;
  }

  const std::string& at(std::string_view key) const {
    const auto* value = find(key);
    if (!value) throw std::invalid_argument("missing field '" + std::string(key) + "'");
    return *value;
  }

  double get_double(std::string_view key) const {
    auto value = parse_double(at(key));
    if (!value) throw std::invalid_argument("field '" + std::string(key) + "' is not a number");
    return *value;
  }

  template <typename Int = std::int64_t>
  Int get_int(std::string_view key) const {
    auto value = parse_int<Int>(at(key));
    if (!value) throw std::invalid_argument("field '" + std::string(key) + "' is not an integer");
    return *value;
  }

  bool get_bool(std::string_view key) const {
    const auto& value = at(key);
    if (value == "1" || value == "true") return true;
    if (value == "0" || value == "false") return false;
    throw std::invalid_argument("field '" + std::string(key) + "' is not a boolean");
  }

  std::vector<double> get_vector(std::string_view key) const {
    auto value = parse_vector(at(key));
    if (!value) throw std::invalid_argument("field '" + std::string(key) + "' is not a vector");
    return *value;
  }

  const std::vector<std::pair<std::string, std::string>>& fields() const { return fields_; }

  std::string str() const {
    std::string out;
    for (std::size_t i = 0; i < fields_.size(); ++i) {
      if (i) out.push_back(' ');
      out += fields_[i].first;
      out.push_back('=');
      out += escape_value(fields_[i].second);
    }
    return out;
  }

  static std::optional<Record> parse(std::string_view line) {
    Record record;
    for (auto token : split_fields(line, " ")) {
      const auto eq = token.find('=');
      if (eq == std::string_view::npos || eq == 0) return std::nullopt;
      auto value = unescape_value(token.substr(eq + 1));
      if (!value) return std::nullopt;
      record.fields_.emplace_back(std::string(token.substr(0, eq)), std::move(*value));
    }
    return record;
  }

  friend bool operator==(const Record&, const Record&) = default;

 private:
  std::vector<std::pair<std::string, std::string>> fields_;
};

// FNV-1a over raw bytes.
inline std::uint64_t fnv1a(const void* data, std::size_t size,
                           std::uint64_t hash = 0xcbf29ce484222325ULL) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    hash ^= bytes[i];
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

}  // namespace pianobench

#endif  // PIANOBENCH_TEXT_HPP_
