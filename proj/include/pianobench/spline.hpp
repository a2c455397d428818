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

#ifndef PIANOBENCH_SPLINE_HPP_
#define PIANOBENCH_SPLINE_HPP_

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pianobench {

enum class SplineKind { kZero, kLinear, kCubic };

inline SplineKind spline_kind_from_name(std::string_view name) {
  if (name == "zero") return SplineKind::kZero;
  if (name == "linear") return SplineKind::kLinear;
  if (name == "cubic") return SplineKind::kCubic;
  throw std::invalid_argument("unknown spline kind '" + std::string(name) +
                              "' (expected zero|linear|cubic)");
}

inline const char* spline_kind_name(SplineKind kind) {
  switch (kind) {
    case SplineKind::kZero: return "zero";
    case SplineKind::kLinear: return "linear";
    case SplineKind::kCubic: return "cubic";
  }
  return "cubic";
}

// Action sequence over [0, horizon] given by `points` uniformly spaced
// control points of `dims` values each (row-major).
//
// Cubic interpolation is Hermite with Catmull-Rom tangents in the interior
// and zero tangents at both ends; with two points it reduces to a smoothstep
// that never leaves the segment's range.
class NominalPlan {
 public:
  NominalPlan() = default;
  NominalPlan(int points, int dims, double horizon, SplineKind kind = SplineKind::kCubic)
      : points_(points), dims_(dims), horizon_(horizon), kind_(kind),
        values_(static_cast<std::size_t>(points) * dims, 0.0) {
    if (points < 2) throw std::invalid_argument("NominalPlan: need at least 2 control points");
    if (dims < 1) throw std::invalid_argument("NominalPlan: need at least 1 dimension");
    if (!(horizon > 0.0)) throw std::invalid_argument("NominalPlan: horizon must be positive");
  }

  int points() const { return points_; }
  int dims() const { return dims_; }
  double horizon() const { return horizon_; }
  SplineKind kind() const { return kind_; }
  double spacing() const { return horizon_ / (points_ - 1); }
  double knot_time(int point) const { return point * spacing(); }

  double& at(int point, int dim) { return values_[static_cast<std::size_t>(point) * dims_ + dim]; }
  double at(int point, int dim) const {
    return values_[static_cast<std::size_t>(point) * dims_ + dim];
  }
  std::span<double> point(int p) {
    return {values_.data() + static_cast<std::size_t>(p) * dims_, static_cast<std::size_t>(dims_)};
  }
  std::span<const double> point(int p) const {
    return {values_.data() + static_cast<std::size_t>(p) * dims_, static_cast<std::size_t>(dims_)};
  }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  // Times outside [0, horizon] hold the end values.
  void evaluate(double t, std::span<double> out) const {
    const double h = spacing();
    double u = std::clamp(t, 0.0, horizon_) / h;
    // snap to knots so control points are reproduced exactly
    if (std::abs(u - std::round(u)) < 1e-9) u = std::round(u);
    const int segment = std::clamp(static_cast<int>(std::floor(u)), 0, points_ - 2);
    const double s = std::clamp(u - segment, 0.0, 1.0);
    const int i0 = segment;
    const int i1 = segment + 1;
    for (int d = 0; d < dims_; ++d) {
      const double p0 = at(i0, d);
      const double p1 = at(i1, d);
      switch (kind_) {
        case SplineKind::kZero:
          out[d] = s >= 1.0 ? p1 : p0;
          break;
        case SplineKind::kLinear:
          out[d] = s >= 1.0 ? p1 : p0 + s * (p1 - p0);
          break;
        case SplineKind::kCubic: {
          if (s >= 1.0) {
            out[d] = p1;
            break;
          }
          // tangents in units of value per segment
          const double m0 = i0 > 0 ? 0.5 * (p1 - at(i0 - 1, d)) : 0.0;
          const double m1 = i1 < points_ - 1 ? 0.5 * (at(i1 + 1, d) - p0) : 0.0;
          const double s2 = s * s;
          const double s3 = s2 * s;
          out[d] = (2 * s3 - 3 * s2 + 1) * p0 + (s3 - 2 * s2 + s) * m0 +
                   (-2 * s3 + 3 * s2) * p1 + (s3 - s2) * m1;
          break;
        }
      }
    }
  }

  std::vector<double> evaluate(double t) const {
    std::vector<double> out(dims_);
    evaluate(t, out);
    return out;
  }

  // Warm start for the next control step: resample at knot times shifted by
  // `dt`; points past the horizon hold the last control point.
  NominalPlan shifted(double dt) const {
    NominalPlan next(points_, dims_, horizon_, kind_);
    for (int p = 0; p < points_; ++p) evaluate(knot_time(p) + dt, next.point(p));
    return next;
  }

  friend bool operator==(const NominalPlan&, const NominalPlan&) = default;

 private:
  int points_ = 2;
  int dims_ = 1;
  double horizon_ = 1.0;
  SplineKind kind_ = SplineKind::kCubic;
  std::vector<double> values_;
};

}  // namespace pianobench

#endif  // PIANOBENCH_SPLINE_HPP_
