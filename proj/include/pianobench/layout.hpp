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

// Horizontal layout of the 88 keys along the keyboard x axis (meters, 0 at
// the left edge of A0).

#ifndef PIANOBENCH_LAYOUT_HPP_
#define PIANOBENCH_LAYOUT_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "pianobench/score.hpp"

namespace pianobench {

struct KeyboardGeometry {
  double white_pitch = 0.0235;  // center-to-center spacing of white keys
  double black_width = 0.0125;
  double gap = 0.001;  // dead space between neighbouring key extents
};

struct KeyExtent {
  double lo = 0.0;
  double hi = 0.0;
  double center = 0.0;
};

constexpr bool is_black_key(int key) {
  const int pitch_class = key_pitch(key) % 12;
  return pitch_class == 1 || pitch_class == 3 || pitch_class == 6 || pitch_class == 8 ||
         pitch_class == 10;
}

// Number of white keys strictly left of `key`.
constexpr int white_keys_before(int key) {
  int count = 0;
  for (int k = 0; k < key; ++k) count += is_black_key(k) ? 0 : 1;
  return count;
}

inline constexpr int kNumWhiteKeys = 52;

class KeyLayout {
 public:
  explicit KeyLayout(const KeyboardGeometry& geometry = {}) : geometry_(geometry) {
    const double pitch = geometry.white_pitch;
    const double half_black = 0.5 * geometry.black_width;
    if (!(pitch > 0.0) || !(geometry.black_width > 0.0) || !(geometry.gap >= 0.0) ||
        geometry.black_width + 2.0 * geometry.gap >= pitch) {
      throw std::invalid_argument("KeyLayout: inconsistent keyboard geometry");
    }
    width_ = kNumWhiteKeys * pitch;
    for (int key = 0; key < kNumKeys; ++key) {
      KeyExtent& extent = keys_[key];
      const double boundary = white_keys_before(key) * pitch;
      if (is_black_key(key)) {
        extent = {boundary - half_black, boundary + half_black, boundary};
        continue;
      }
      const double left = boundary;
      const double right = boundary + pitch;
      extent.lo = (key > 0 && is_black_key(key - 1)) ? left + half_black + geometry.gap
                                                     : left + 0.5 * geometry.gap;
      extent.hi = (key + 1 < kNumKeys && is_black_key(key + 1))
                      ? right - half_black - geometry.gap
                      : right - 0.5 * geometry.gap;
      extent.center = 0.5 * (left + right);
    }
  }

  const KeyboardGeometry& geometry() const { return geometry_; }
  const KeyExtent& extent(int key) const { return keys_[key]; }
  // Target point for finger placement: center of the key surface.
  double center(int key) const { return keys_[key].center; }
  double width() const { return width_; }

  // Key under horizontal position x. Inside an extent: that key. In the gap
  // between two extents: the key with the nearer center (lower key on a tie).
  // Off the keyboard: none.
  std::optional<int> key_at(double x) const {
    if (!(x >= 0.0 && x <= width_)) return std::nullopt;
    auto it = std::lower_bound(keys_.begin(), keys_.end(), x,
                               [](const KeyExtent& e, double v) { return e.hi < v; });
    if (it == keys_.end()) return kNumKeys - 1;
    const int key = static_cast<int>(it - keys_.begin());
    if (it->lo <= x || key == 0) return key;
    const double left_distance = std::abs(x - keys_[key - 1].center);
    const double right_distance = std::abs(it->center - x);
    return right_distance < left_distance ? key : key - 1;
  }

 private:
  KeyboardGeometry geometry_;
  std::array<KeyExtent, kNumKeys> keys_{};
  double width_ = 0.0;
};

}  // namespace pianobench

#endif  // PIANOBENCH_LAYOUT_HPP_
