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

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace sparse_array {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

/// Element position in wavelength units.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

double distance(const Point2& a, const Point2& b) noexcept;

/// Axis-aligned bounding box in wavelength units.
struct Aperture {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;

  bool contains(const Point2& p) const noexcept {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
  friend bool operator==(const Aperture&, const Aperture&) = default;
};

/// Tensor grid of direction cosines (u, v).
///
/// Samples are flattened row-major with v varying fastest, so sample
/// `i = p * Q + q` sits at `(u_axis[p], v_axis[q])`. Both axes must contain
/// 0 so that broadside is sampled exactly.
class ObservationGrid {
 public:
  ObservationGrid(RVector u_axis, RVector v_axis);

  Eigen::Index P() const noexcept { return u_axis_.size(); }
  Eigen::Index Q() const noexcept { return v_axis_.size(); }
  Eigen::Index size() const noexcept { return P() * Q(); }

  const RVector& u_axis() const noexcept { return u_axis_; }
  const RVector& v_axis() const noexcept { return v_axis_; }

  double u(Eigen::Index i) const { return u_axis_[i / Q()]; }
  double v(Eigen::Index i) const { return v_axis_[i % Q()]; }

  /// Flattened sample coordinates, length P*Q.
  RVector u_samples() const;
  RVector v_samples() const;

  friend bool operator==(const ObservationGrid& a, const ObservationGrid& b) {
    return a.u_axis_ == b.u_axis_ && a.v_axis_ == b.v_axis_;
  }

 private:
  RVector u_axis_;
  RVector v_axis_;
};

/// Ordered element positions with the box they are allowed to occupy.
class ArrayLayout {
 public:
  ArrayLayout(std::vector<Point2> positions, Aperture aperture);

  /// M x N uniform planar array with the given spacing. Element (m, n) sits at
  /// ((m + 1/2) d, (n + 1/2) d), index m * N + n; the aperture is [0, M d] x [0, N d].
  static ArrayLayout uniform(int M, int N, double spacing);

  std::size_t size() const noexcept { return positions_.size(); }
  bool empty() const noexcept { return positions_.empty(); }
  const std::vector<Point2>& positions() const noexcept { return positions_; }
  const Point2& operator[](std::size_t k) const { return positions_[k]; }
  const Aperture& aperture() const noexcept { return aperture_; }

 private:
  std::vector<Point2> positions_;
  Aperture aperture_;
};

struct Excitations {
  CVector weights;
};

/// Complex field samples on an observation grid.
struct Pattern {
  CVector values;
  ObservationGrid grid;

  Pattern(CVector values, ObservationGrid grid);
};

/// Uniform P x Q grid over [-1, 1]^2. P and Q must be odd and at least 3.
ObservationGrid make_uv_grid(int P, int Q);

/// exp(j 2 pi (x u_i + y v_i)) for every sample i.
CVector steering_vector(double x, double y, const ObservationGrid& grid);

/// PQ x K matrix whose k-th column is the steering vector of element k.
CMatrix build_dictionary(const ArrayLayout& layout, const ObservationGrid& grid);
CMatrix build_dictionary(std::span<const Point2> positions, const ObservationGrid& grid);

Pattern evaluate_pattern(const ArrayLayout& layout, const Excitations& exc,
                         const ObservationGrid& grid);
Pattern evaluate_pattern(std::span<const Point2> positions, const CVector& weights,
                         const ObservationGrid& grid);

}  // namespace sparse_array
