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

// Separable evaluation of steering-vector products on tensor observation grids.
//
// On a tensor grid the steering vector factorises as
//   a(x, y)[p * Q + q] = exp(j 2 pi x u_p) * exp(j 2 pi y v_q),
// so a pattern, a correlation with a field, or a Gram matrix can be computed
// from the small per-axis factor matrices instead of PQ-long columns.

#include <span>

#include "sparse_array/array_model.hpp"

namespace sparse_array::detail {

/// Per-axis factors of a set of steering vectors: eu is P x t, ev is Q x t.
struct AxisFactors {
  CMatrix eu;
  CMatrix ev;

  Eigen::Index count() const noexcept { return eu.cols(); }
};

AxisFactors axis_factors(std::span<const Point2> positions, const ObservationGrid& grid);

/// Factors of the partial derivatives d a / d x (u-axis scaled by j 2 pi u)
/// and d a / d y (v-axis scaled by j 2 pi v).
AxisFactors derivative_x(const AxisFactors& f, const ObservationGrid& grid);
AxisFactors derivative_y(const AxisFactors& f, const ObservationGrid& grid);

/// Field sum_k w_k a_k as a Q x P matrix. Column-major storage of the
/// result is exactly the flattened sample order of the grid.
CMatrix synthesize(const AxisFactors& f, const CVector& weights);

/// View a flattened field as the Q x P matrix used above.
inline Eigen::Map<const CMatrix> as_field(const CVector& flat, const ObservationGrid& grid) {
  return {flat.data(), grid.Q(), grid.P()};
}
inline CVector flatten(const CMatrix& field) {
  return Eigen::Map<const CVector>(field.data(), field.size());
}

/// Phi^H r for a Q x P field r.
CVector correlate(const AxisFactors& f, const Eigen::Ref<const CMatrix>& field);

/// Phi_a^H Phi_b.
CMatrix gram(const AxisFactors& a, const AxisFactors& b);

}  // namespace sparse_array::detail
