// Copyright 2026 The sparse_array Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sparse_array/array_model.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <string>
#include <utility>

#include "sparse_array/error.hpp"

namespace sparse_array {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kInfeasibleSelection: return "infeasible-selection";
    case ErrorCode::kDegenerateSupport: return "degenerate-support";
    case ErrorCode::kSpacingViolated: return "spacing-violated";
    case ErrorCode::kIo: return "io-error";
  }
  return "unknown";
}

double distance(const Point2& a, const Point2& b) noexcept {
  return std::hypot(a.x - b.x, a.y - b.y);
}

namespace {

void check_axis(const RVector& axis, const char* name) {
  if (axis.size() == 0) {
    throw Error(ErrorCode::kInvalidArgument, std::string(name) + " axis is empty");
  }
  bool has_zero = false;
  for (double s : axis) {
    if (!std::isfinite(s) || std::abs(s) > 1.0) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string(name) + " samples must be finite direction cosines in [-1, 1]");
    }
    has_zero = has_zero || s == 0.0;
  }
  if (!has_zero) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(name) + " axis must contain 0 so broadside is sampled");
  }
}

}  // namespace

ObservationGrid::ObservationGrid(RVector u_axis, RVector v_axis)
    : u_axis_(std::move(u_axis)), v_axis_(std::move(v_axis)) {
  check_axis(u_axis_, "u");
  check_axis(v_axis_, "v");
}

RVector ObservationGrid::u_samples() const {
  RVector out(size());
  for (Eigen::Index i = 0; i < size(); ++i) out[i] = u(i);
  return out;
}

RVector ObservationGrid::v_samples() const {
  RVector out(size());
  for (Eigen::Index i = 0; i < size(); ++i) out[i] = v(i);
  return out;
}

ArrayLayout::ArrayLayout(std::vector<Point2> positions, Aperture aperture)
    : positions_(std::move(positions)), aperture_(aperture) {
  if (!(aperture_.x_min <= aperture_.x_max && aperture_.y_min <= aperture_.y_max)) {
    throw Error(ErrorCode::kInvalidArgument, "aperture bounds are inverted");
  }
  std::set<std::pair<double, double>> seen;
  for (const auto& p : positions_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(ErrorCode::kInvalidArgument, "element position is not finite");
    }
    if (!aperture_.contains(p)) {
      throw Error(ErrorCode::kInvalidArgument, "element position lies outside the aperture");
    }
    if (!seen.emplace(p.x, p.y).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate element position");
    }
  }
}

ArrayLayout ArrayLayout::uniform(int M, int N, double spacing) {
  if (M < 1 || N < 1) throw Error(ErrorCode::kInvalidArgument, "M and N must be >= 1");
  if (!(spacing > 0.0) || !std::isfinite(spacing)) {
    throw Error(ErrorCode::kInvalidArgument, "spacing must be positive");
  }
  std::vector<Point2> pos;
  pos.reserve(static_cast<std::size_t>(M) * N);
  for (int m = 0; m < M; ++m) {
    for (int n = 0; n < N; ++n) {
      pos.push_back({(m + 0.5) * spacing, (n + 0.5) * spacing});
    }
  }
  return ArrayLayout(std::move(pos), Aperture{0.0, M * spacing, 0.0, N * spacing});
}

Pattern::Pattern(CVector v, ObservationGrid g) : values(std::move(v)), grid(std::move(g)) {
  if (values.size() != grid.size()) {
    throw Error(ErrorCode::kInvalidArgument, "pattern length does not match grid size");
  }
}

ObservationGrid make_uv_grid(int P, int Q) {
  if (P < 3 || Q < 3) throw Error(ErrorCode::kInvalidArgument, "P and Q must be >= 3");
  if (P % 2 == 0 || Q % 2 == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "P and Q must be odd so that (u, v) = (0, 0) is a grid sample");
  }
  auto axis = [](int n) {
    RVector a(n);
    const int half = n / 2;
    // Integer ratios keep the centre sample exactly 0 and the grid symmetric.
    for (int i = 0; i < n; ++i) a[i] = static_cast<double>(i - half) / half;
    return a;
  };
  return ObservationGrid(axis(P), axis(Q));
}

CVector steering_vector(double x, double y, const ObservationGrid& grid) {
  if (!std::isfinite(x) || !std::isfinite(y)) {
    throw Error(ErrorCode::kInvalidArgument, "steering position is not finite");
  }
  CVector a(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    a[i] = std::polar(1.0, 2.0 * std::numbers::pi * (x * grid.u(i) + y * grid.v(i)));
  }
  return a;
}

CMatrix build_dictionary(std::span<const Point2> positions, const ObservationGrid& grid) {
  if (positions.empty()) throw Error(ErrorCode::kInvalidArgument, "layout is empty");
  CMatrix A(grid.size(), static_cast<Eigen::Index>(positions.size()));
  for (Eigen::Index k = 0; k < A.cols(); ++k) {
    A.col(k) = steering_vector(positions[k].x, positions[k].y, grid);
  }
  return A;
}

CMatrix build_dictionary(const ArrayLayout& layout, const ObservationGrid& grid) {
  return build_dictionary(std::span<const Point2>(layout.positions()), grid);
}

Pattern evaluate_pattern(std::span<const Point2> positions, const CVector& weights,
                         const ObservationGrid& grid) {
  if (static_cast<Eigen::Index>(positions.size()) != weights.size()) {
    throw Error(ErrorCode::kInvalidArgument, "excitation count does not match element count");
  }
  if (positions.empty()) return Pattern(CVector::Zero(grid.size()), grid);
  return Pattern(build_dictionary(positions, grid) * weights, grid);
}

Pattern evaluate_pattern(const ArrayLayout& layout, const Excitations& exc,
                         const ObservationGrid& grid) {
  return evaluate_pattern(std::span<const Point2>(layout.positions()), exc.weights, grid);
}

}  // namespace sparse_array
