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

// Line protocol between the environment server and remote agents. Each
// message is one line: a kind word followed by key=value fields with
// percent-escaped values. See docs/protocol.md.

#ifndef PIANOBENCH_PROTOCOL_HPP_
#define PIANOBENCH_PROTOCOL_HPP_

#include <optional>
#include <string>
#include <string_view>

#include "pianobench/text.hpp"

namespace pianobench {

inline constexpr int kProtocolVersion = 1;

namespace error_code {
inline constexpr const char* kBadMessage = "bad_message";
inline constexpr const char* kUnknownKind = "unknown_kind";
inline constexpr const char* kBadActionLength = "bad_action_length";
inline constexpr const char* kNotReset = "not_reset";
inline constexpr const char* kEpisodeDone = "episode_done";
inline constexpr const char* kUnknownSong = "unknown_song";
inline constexpr const char* kVersionMismatch = "version_mismatch";
inline constexpr const char* kBadValue = "bad_value";
}  // namespace error_code

struct Message {
  std::string kind;
  Record fields;

  std::string str() const {
    const std::string body = fields.str();
    return body.empty() ? kind : kind + " " + body;
  }

  friend bool operator==(const Message&, const Message&) = default;
};

inline bool valid_kind(std::string_view kind) {
  if (kind.empty()) return false;
  for (char c : kind) {
    if (!((c >= 'a' && c <= 'z') || c == '_')) return false;
  }
  return true;
}

// nullopt on anything that is not "kind [key=value ...]".
inline std::optional<Message> parse_message(std::string_view line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.remove_suffix(1);
  const auto space = line.find(' ');
  Message message;
  message.kind = std::string(line.substr(0, space));
  if (!valid_kind(message.kind)) return std::nullopt;
  if (space != std::string_view::npos) {
    auto fields = Record::parse(line.substr(space + 1));
    if (!fields) return std::nullopt;
    message.fields = std::move(*fields);
  }
  return message;
}

inline Message error_message(std::string_view code, std::string_view text) {
  Message message{"error", {}};
  message.fields.set("code", std::string(code)).set("message", std::string(text));
  return message;
}

}  // namespace pianobench

#endif  // PIANOBENCH_PROTOCOL_HPP_
