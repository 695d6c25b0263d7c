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

#include <span>
#include <vector>

#include "sparse_array/array_model.hpp"
#include "sparse_array/sparse_solvers.hpp"

namespace sparse_array {

/// Positions, excitations and the residual r = S_d - sum_k w_k a(x_k, y_k).
struct RefineState {
  std::vector<Point2> positions;
  CVector weights;
  CVector residual;
  int iteration = 0;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Admissible coordinate range of every element for one refinement step.
struct SpacingBounds {
  std::vector<Interval> x;
  std::vector<Interval> y;
};

struct PartialMatrices {
  CMatrix px;  // column k: w_k x_k d a(x_k, y_k) / d x_k
  CMatrix py;  // column k: w_k y_k d a(x_k, y_k) / d y_k
};

/// Residual of the state's positions and weights against the desired pattern.
CVector compute_residual(std::span<const Point2> positions, const CVector& weights,
                         const Pattern& desired);

PartialMatrices partial_matrices(const RefineState& state, const ObservationGrid& grid);

/// Per-axis clamp intervals. Along x, only elements closer than d_min in y
/// can collide, so the nearest such element on each side limits the move to
/// within delta = d_min / sqrt(2) of it; the aperture bounds the rest. The
/// current coordinate is always inside its interval.
SpacingBounds spacing_bounds(std::span<const Point2> positions, double d_min,
                             const Aperture& aperture);

struct PositionStep {
  std::vector<Point2> positions;
  double kappa = 0.0;
  bool moved = false;  // false when every proposed move was clamped or reverted
  int reverted = 0;    // offending pairs whose move was cancelled
};

/// Relative Gauss-Newton perturbations eta = Re{P^+ r} for both axes.
std::pair<RVector, RVector> relative_perturbations(const RefineState& state,
                                                   const ObservationGrid& grid);

/// One clamped multiplicative update x_k <- x_k + kappa * eta_k * x_k.
/// Coordinates pinned at a bound and pushed outward are left out of the
/// pseudoinverse. Pairs brought closer than d_min by simultaneous moves keep
/// their current positions.
PositionStep position_step(const RefineState& state, const SpacingBounds& bounds,
                           const ObservationGrid& grid, double kappa, double d_min);

/// Restore the minimum spacing after a new element was appended at its grid
/// anchor. Refined elements that conflict with it are pulled back along the
/// segment to their own anchors (together with any element those moves
/// would hit) by the smallest common fraction that makes the layout
/// feasible. `anchors` must be pairwise feasible; positions other than the
/// last one must be pairwise feasible.
std::vector<Point2> make_room(std::span<const Point2> positions, std::span<const Point2> anchors,
                              double d_min);

struct RefineResult {
  SupportSet support;
  std::vector<double> residual_norms;  // after each of the J iterations
};

/// J alternating iterations of position update and least-squares
/// re-estimation. Moves that would increase the residual are rejected.
RefineResult refine(const SupportSet& support, const Pattern& desired, const SolverConfig& cfg,
                    const Aperture& aperture);

}  // namespace sparse_array
