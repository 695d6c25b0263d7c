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

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "sparse_array/array_model.hpp"

namespace sparse_array {

/// Pairwise distances may undershoot the minimum spacing by this much.
inline constexpr double kSpacingSlack = 1e-9;

/// Selected elements: grid atom each one came from, its current (possibly
/// refined) position, and its excitation.
struct SupportSet {
  std::vector<std::size_t> atom_indices;
  std::vector<Point2> positions;
  CVector weights;

  std::size_t size() const noexcept { return atom_indices.size(); }
  bool contains(std::size_t atom) const noexcept;
};

struct SolverConfig {
  std::optional<int> target_sparsity = 160;  // T
  std::optional<double> tolerance;           // stop once ||residual||^2 <= tolerance
  double d_min = 0.5;                        // minimum inter-element spacing, wavelengths
  int lookahead = 0;                         // L; 0 selects plain OMP atoms
  int lookahead_depth = 0;                   // extra atoms simulated per candidate; 0 = up to T
  int refine_iters = 10;                     // J
  double learning_rate = 1.0;                // kappa
  int threads = 1;                           // workers for look-ahead candidates

  void validate() const;
};

enum class SolveStatus {
  kSparsityReached,
  kToleranceMet,
  kNotConverged,  // ran out of iterations before meeting the requested tolerance
};

const char* to_string(SolveStatus status) noexcept;

/// Wall-clock seconds spent in each phase of a synthesis run.
struct PhaseTimings {
  double dictionary = 0.0;
  double match = 0.0;
  double least_squares = 0.0;
  double lookahead = 0.0;
  double refine = 0.0;
  double total = 0.0;
};

struct SynthesisSolution {
  SupportSet support;
  SolveStatus status = SolveStatus::kSparsityReached;
  double initial_residual = 0.0;        // ||S_d||
  std::vector<double> residual_history;  // ||residual|| after each outer iteration
  std::vector<std::vector<double>> refine_history;  // per outer iteration, per refine step
  PhaseTimings timings;

  double final_residual() const noexcept {
    return residual_history.empty() ? initial_residual : residual_history.back();
  }
};

/// z = A^H r.
CVector match_step(const CMatrix& A, const CVector& r);

/// Index of the largest |z_p| among atoms outside the support that keep at
/// least d_min distance from every support position. Lowest index wins ties.
/// Throws Error(kInfeasibleSelection) when no atom qualifies.
std::size_t select_atom(const CVector& z, const SupportSet& support, const ArrayLayout& layout,
                        double d_min);

/// Least-squares excitations of the given element positions against the
/// desired pattern, solved by column-pivoted Householder QR. Throws
/// Error(kDegenerateSupport) when the steering matrix is rank deficient.
CVector ls_excitations(std::span<const Point2> positions, const Pattern& desired);

/// Look-ahead atom choice: each of the top-L feasible atoms is tentatively
/// added and plain constrained OMP is run forward; the candidate with the
/// smallest final residual wins (ties: larger |z_p|, then lower index).
std::size_t laomp_select(const CVector& z, const SupportSet& support, const ArrayLayout& layout,
                         const ObservationGrid& grid, const Pattern& desired,
                         const SolverConfig& cfg);

/// Greedy synthesis over the candidate layout. With `refine` set, the
/// off-grid position refinement runs after every atom addition.
SynthesisSolution omp_synthesize(const Pattern& desired, const ArrayLayout& layout,
                                 const ObservationGrid& grid, const SolverConfig& cfg,
                                 bool refine);

SynthesisSolution laomp_synthesize(const Pattern& desired, const ArrayLayout& layout,
                                   const ObservationGrid& grid, const SolverConfig& cfg,
                                   bool refine);

}  // namespace sparse_array
