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

// Shared machinery of the greedy solvers and the off-grid refinement.

#include <span>

#include "sparse_array/array_model.hpp"
#include "sparse_array/detail/tensor_ops.hpp"

namespace sparse_array::detail {

struct LsFit {
  CVector weights;
  CMatrix residual;  // Q x P field
  double residual_norm = 0.0;
};

/// Least squares of a desired Q x P field onto the steering vectors in `f`.
/// Solved through the (separably evaluated) Gram matrix with one sweep of
/// iterative refinement on the explicit residual. Throws
/// Error(kDegenerateSupport) if the Gram matrix is numerically singular.
LsFit fit_weights(const AxisFactors& f, const Eigen::Ref<const CMatrix>& desired);

/// Solve a Hermitian positive semi-definite system, adding a ridge of
/// 1e-10 * trace when it is (near) singular.
CVector solve_with_ridge(const CMatrix& gram, const CVector& rhs);

double min_pairwise_distance(std::span<const Point2> positions);

bool keeps_spacing(const Point2& p, std::span<const Point2> placed, double d_min);

}  // namespace sparse_array::detail
