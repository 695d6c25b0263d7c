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

#include "sparse_array/sparse_solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <thread>
#include <utility>

#include "solver_internals.hpp"
#include "sparse_array/error.hpp"
#include "sparse_array/offgrid_refinement.hpp"

namespace sparse_array {

// ---------------------------------------------------------------------------
// Shared internals

namespace detail {

LsFit fit_weights(const AxisFactors& f, const Eigen::Ref<const CMatrix>& desired) {
  LsFit fit;
  if (f.count() == 0) {
    fit.residual = desired;
    fit.residual_norm = desired.norm();
    return fit;
  }
  const CMatrix g = gram(f, f);
  Eigen::LLT<CMatrix> llt(g);
  if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-12)) {
    throw Error(ErrorCode::kDegenerateSupport,
                "steering vectors of the support are linearly dependent");
  }
  fit.weights = llt.solve(correlate(f, desired));
  fit.residual = desired - synthesize(f, fit.weights);
  fit.weights += llt.solve(correlate(f, fit.residual));
  fit.residual = desired - synthesize(f, fit.weights);
  fit.residual_norm = fit.residual.norm();
  return fit;
}

CVector solve_with_ridge(const CMatrix& gram, const CVector& rhs) {
  if (gram.rows() == 0) return CVector();
  const double trace = gram.diagonal().real().sum();
  if (!(trace > 0.0)) return CVector::Zero(rhs.size());
  Eigen::LLT<CMatrix> llt(gram);
  if (llt.info() == Eigen::Success && llt.rcond() > 1e-12) return llt.solve(rhs);
  CMatrix ridged = gram;
  ridged.diagonal().array() += 1e-10 * trace;
  return ridged.llt().solve(rhs);
}

double min_pairwise_distance(std::span<const Point2> positions) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < positions.size(); ++i) {
    for (std::size_t j = i + 1; j < positions.size(); ++j) {
      best = std::min(best, distance(positions[i], positions[j]));
    }
  }
  return best;
}

bool keeps_spacing(const Point2& p, std::span<const Point2> placed, double d_min) {
  return std::all_of(placed.begin(), placed.end(), [&](const Point2& q) {
    return distance(p, q) >= d_min - kSpacingSlack;
  });
}

}  // namespace detail

// ---------------------------------------------------------------------------

bool SupportSet::contains(std::size_t atom) const noexcept {
  return std::find(atom_indices.begin(), atom_indices.end(), atom) != atom_indices.end();
}

void SolverConfig::validate() const {
  if (!target_sparsity && !tolerance) {
    throw Error(ErrorCode::kInvalidArgument, "set a target sparsity, a tolerance, or both");
  }
  if (target_sparsity && *target_sparsity < 0) {
    throw Error(ErrorCode::kInvalidArgument, "target sparsity must be >= 0");
  }
  if (tolerance && !(*tolerance >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "tolerance must be >= 0");
  }
  if (!(d_min > 0.0)) throw Error(ErrorCode::kInvalidArgument, "d_min must be positive");
  if (!(learning_rate > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "learning rate must be positive");
  }
  if (lookahead < 0 || lookahead_depth < 0 || refine_iters < 0) {
    throw Error(ErrorCode::kInvalidArgument, "look-ahead and iteration counts must be >= 0");
  }
  if (threads < 1) throw Error(ErrorCode::kInvalidArgument, "threads must be >= 1");
}

const char* to_string(SolveStatus status) noexcept {
  switch (status) {
    case SolveStatus::kSparsityReached: return "sparsity-reached";
    case SolveStatus::kToleranceMet: return "tolerance-met";
    case SolveStatus::kNotConverged: return "not-converged";
  }
  return "unknown";
}

CVector match_step(const CMatrix& A, const CVector& r) {
  if (A.rows() != r.size()) {
    throw Error(ErrorCode::kInvalidArgument, "dictionary rows do not match residual length");
  }
  return A.adjoint() * r;
}

namespace {

// Atoms ordered by decreasing |z|, lowest index first among equals.
std::vector<std::size_t> feasible_by_magnitude(const CVector& z, const SupportSet& support,
                                               std::span<const Point2> occupied,
                                               const ArrayLayout& layout, double d_min) {
  if (static_cast<std::size_t>(z.size()) != layout.size()) {
    throw Error(ErrorCode::kInvalidArgument, "correlation length does not match layout size");
  }
  std::vector<std::size_t> out;
  for (std::size_t p = 0; p < layout.size(); ++p) {
    if (support.contains(p)) continue;
    if (!detail::keeps_spacing(layout[p], occupied, d_min)) continue;
    out.push_back(p);
  }
  std::stable_sort(out.begin(), out.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(z[a]) > std::abs(z[b]); });
  return out;
}

std::vector<Point2> anchor_positions(const SupportSet& support, const ArrayLayout& layout) {
  std::vector<Point2> out;
  out.reserve(support.size());
  for (std::size_t a : support.atom_indices) out.push_back(layout[a]);
  return out;
}

[[noreturn]] void throw_infeasible(std::size_t t) {
  throw Error(ErrorCode::kInfeasibleSelection,
              "no candidate atom keeps the minimum spacing after " + std::to_string(t) +
                  " selections");
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Candidate grid in separable form together with its correlations with the
// desired pattern.
class Dictionary {
 public:
  Dictionary(const ArrayLayout& layout, const Pattern& desired)
      : layout_(layout),
        desired_(desired),
        atoms_(detail::axis_factors(layout.positions(), desired.grid)),
        field_(detail::as_field(desired.values, desired.grid)),
        desired_corr_(detail::correlate(atoms_, field_)),
        desired_energy_(desired.values.squaredNorm()) {}

  const ArrayLayout& layout() const { return layout_; }
  const Pattern& desired() const { return desired_; }
  const detail::AxisFactors& atoms() const { return atoms_; }
  const CMatrix& field() const { return field_; }
  const CVector& desired_corr() const { return desired_corr_; }
  double desired_energy() const { return desired_energy_; }
  Eigen::Index size() const { return atoms_.count(); }

  const CMatrix& atom_gram() {
    if (atom_gram_.size() == 0) atom_gram_ = detail::gram(atoms_, atoms_);
    return atom_gram_;
  }

 private:
  const ArrayLayout& layout_;
  const Pattern& desired_;
  detail::AxisFactors atoms_;
  CMatrix field_;
  CVector desired_corr_;
  double desired_energy_;
  CMatrix atom_gram_;
};

// Largest dictionary handled by the look-ahead, which keeps the full K x K
// Gram matrix in memory.
constexpr Eigen::Index kMaxLookaheadAtoms = 4096;

// Greedy OMP continuation over grid atoms, evaluated entirely in coefficient
// space with an incrementally grown Cholesky factor of the selected Gram
// matrix. Starts from the current (possibly off-grid) support.
class ForwardPass {
 public:
  struct Shared {
    const Dictionary* dict = nullptr;
    const CMatrix* atom_gram = nullptr;
    CMatrix chol;                 // lower Cholesky factor of the support Gram, t x t
    CMatrix cross;                // K x t, a_i^H phi_k
    CVector support_corr;         // phi_k^H S_d
    std::vector<char> blocked;    // atoms excluded by support membership or spacing
    double d_min = 0.0;
    std::optional<double> tolerance;
  };

  ForwardPass(const Shared& s, Eigen::Index capacity)
      : s_(s),
        chol_(CMatrix::Zero(capacity, capacity)),
        cross_(s.dict->size(), capacity),
        y_(capacity),
        blocked_(s.blocked) {
    size_ = s.chol.rows();
    chol_.topLeftCorner(size_, size_) = s.chol;
    cross_.leftCols(size_) = s.cross;
    if (size_ > 0) {
      y_.head(size_) = s.chol.triangularView<Eigen::Lower>().solve(s.support_corr);
    }
    energy_ = s.dict->desired_energy() - y_.head(size_).squaredNorm();
  }

  double energy() const { return energy_; }
  Eigen::Index size() const { return size_; }

  // Returns false (and blocks the atom) if it is linearly dependent on the
  // current selection.
  bool add(Eigen::Index j) {
    const CMatrix& G = *s_.atom_gram;
    const double d = G(j, j).real();
    CVector m;
    double lambda2 = d;
    if (size_ > 0) {
      const CVector g = cross_.row(j).head(size_).adjoint();
      m = chol_.topLeftCorner(size_, size_).triangularView<Eigen::Lower>().solve(g);
      lambda2 -= m.squaredNorm();
    }
    if (!(lambda2 > 1e-10 * d)) {
      blocked_[j] = 1;
      return false;
    }
    const double lambda = std::sqrt(lambda2);
    if (size_ > 0) chol_.row(size_).head(size_) = m.adjoint();
    chol_(size_, size_) = lambda;
    cross_.col(size_) = G.col(j);
    Complex yj = s_.dict->desired_corr()[j];
    if (size_ > 0) yj -= (m.adjoint() * y_.head(size_)).value();
    y_[size_] = yj / lambda;
    energy_ -= std::norm(y_[size_]);
    ++size_;

    const auto& layout = s_.dict->layout();
    const Point2 p = layout[static_cast<std::size_t>(j)];
    for (std::size_t i = 0; i < layout.size(); ++i) {
      if (!blocked_[i] && distance(layout[i], p) < s_.d_min - kSpacingSlack) blocked_[i] = 1;
    }
    blocked_[j] = 1;
    return true;
  }

  // Run plain OMP until `horizon` atoms are selected, the tolerance is met,
  // or no feasible atom remains.
  void run(Eigen::Index horizon) {
    while (size_ < horizon) {
      if (s_.tolerance && energy_ <= *s_.tolerance) return;
      const auto chol = chol_.topLeftCorner(size_, size_);
      const CVector w = chol.adjoint().triangularView<Eigen::Upper>().solve(y_.head(size_));
      const CVector z = s_.dict->desired_corr() - cross_.leftCols(size_) * w;
      bool added = false;
      while (!added) {
        Eigen::Index best = -1;
        double best_mag = -1.0;
        for (Eigen::Index i = 0; i < z.size(); ++i) {
          if (blocked_[i]) continue;
          const double mag = std::abs(z[i]);
          if (mag > best_mag) {
            best_mag = mag;
            best = i;
          }
        }
        if (best < 0) return;
        added = add(best);
      }
    }
  }

 private:
  const Shared& s_;
  CMatrix chol_;
  CMatrix cross_;
  CVector y_;
  std::vector<char> blocked_;
  Eigen::Index size_ = 0;
  double energy_ = 0.0;
};

std::size_t lookahead_choose(Dictionary& dict, const CVector& z, const SupportSet& support,
                             const SolverConfig& cfg) {
  const auto anchors = anchor_positions(support, dict.layout());
  const auto order = feasible_by_magnitude(z, support, anchors, dict.layout(), cfg.d_min);
  if (order.empty()) throw_infeasible(support.size());
  const std::size_t n_cand =
      std::min<std::size_t>(order.size(), static_cast<std::size_t>(std::max(cfg.lookahead, 1)));
  if (n_cand == 1) return order.front();
  if (dict.size() > kMaxLookaheadAtoms) {
    throw Error(ErrorCode::kInvalidArgument,
                "look-ahead supports at most " + std::to_string(kMaxLookaheadAtoms) +
                    " candidate atoms");
  }

  const auto t = static_cast<Eigen::Index>(support.size());
  const Eigen::Index max_atoms =
      cfg.target_sparsity ? std::min<Eigen::Index>(*cfg.target_sparsity, t + dict.size())
                          : t + dict.size();
  Eigen::Index horizon = std::max<Eigen::Index>(max_atoms, t + 1);
  if (cfg.lookahead_depth > 0) horizon = std::min(horizon, t + 1 + cfg.lookahead_depth);

  ForwardPass::Shared shared;
  shared.dict = &dict;
  shared.atom_gram = &dict.atom_gram();
  shared.d_min = cfg.d_min;
  shared.tolerance = cfg.tolerance;
  shared.blocked.assign(dict.layout().size(), 0);
  for (std::size_t i = 0; i < dict.layout().size(); ++i) {
    if (support.contains(i) || !detail::keeps_spacing(dict.layout()[i], anchors, cfg.d_min)) {
      shared.blocked[i] = 1;
    }
  }
  if (t > 0) {
    const auto fs = detail::axis_factors(support.positions, dict.desired().grid);
    Eigen::LLT<CMatrix> llt(detail::gram(fs, fs));
    if (llt.info() != Eigen::Success) {
      throw Error(ErrorCode::kDegenerateSupport, "support Gram matrix is not positive definite");
    }
    shared.chol = llt.matrixL();
    shared.cross = detail::gram(dict.atoms(), fs);
    shared.support_corr = detail::correlate(fs, dict.field());
  } else {
    shared.chol.resize(0, 0);
    shared.cross.resize(dict.size(), 0);
  }

  std::vector<double> energies(n_cand, std::numeric_limits<double>::infinity());
  auto evaluate = [&](std::size_t c) {
    ForwardPass pass(shared, horizon);
    if (pass.add(static_cast<Eigen::Index>(order[c]))) {
      pass.run(horizon);
      energies[c] = pass.energy();
    }
  };
  const auto workers = std::min<std::size_t>(n_cand, static_cast<std::size_t>(cfg.threads));
  if (workers <= 1) {
    for (std::size_t c = 0; c < n_cand; ++c) evaluate(c);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t c = w; c < n_cand; c += workers) evaluate(c);
      });
    }
  }

  // Candidates are already in (|z| desc, index asc) order, so the first
  // strict minimum implements the tie-breaking rule.
  std::size_t best = 0;
  for (std::size_t c = 1; c < n_cand; ++c) {
    if (energies[c] < energies[best]) best = c;
  }
  if (!std::isfinite(energies[best])) throw_infeasible(support.size());
  return order[best];
}

SynthesisSolution run_greedy(const Pattern& desired, const ArrayLayout& layout,
                             const ObservationGrid& grid, const SolverConfig& cfg, bool refine,
                             bool lookahead) {
  cfg.validate();
  if (!(desired.grid == grid)) {
    throw Error(ErrorCode::kInvalidArgument, "desired pattern is sampled on a different grid");
  }
  if (layout.empty()) throw Error(ErrorCode::kInvalidArgument, "candidate layout is empty");
  if (lookahead && cfg.lookahead < 1) {
    throw Error(ErrorCode::kInvalidArgument, "look-ahead solver needs L >= 1");
  }

  const auto start = std::chrono::steady_clock::now();
  SynthesisSolution sol;
  auto phase = std::chrono::steady_clock::now();
  Dictionary dict(layout, desired);
  sol.timings.dictionary = seconds_since(phase);
  sol.initial_residual = std::sqrt(dict.desired_energy());

  const auto budget = static_cast<std::size_t>(
      cfg.target_sparsity ? std::min<std::size_t>(*cfg.target_sparsity, layout.size())
                          : layout.size());
  CMatrix residual = dict.field();
  double energy = dict.desired_energy();
  SupportSet& support = sol.support;

  while (true) {
    if (cfg.tolerance && energy <= *cfg.tolerance) {
      sol.status = SolveStatus::kToleranceMet;
      break;
    }
    if (support.size() >= budget) {
      sol.status = (cfg.tolerance || !cfg.target_sparsity) ? SolveStatus::kNotConverged
                                                            : SolveStatus::kSparsityReached;
      break;
    }

    phase = std::chrono::steady_clock::now();
    const CVector z = detail::correlate(dict.atoms(), residual);
    sol.timings.match += seconds_since(phase);

    std::size_t atom;
    if (lookahead && cfg.lookahead > 1) {
      phase = std::chrono::steady_clock::now();
      atom = lookahead_choose(dict, z, support, cfg);
      sol.timings.lookahead += seconds_since(phase);
    } else {
      const auto order =
          feasible_by_magnitude(z, support, anchor_positions(support, layout), layout, cfg.d_min);
      if (order.empty()) throw_infeasible(support.size());
      atom = order.front();
    }
    support.atom_indices.push_back(atom);
    support.positions.push_back(layout[atom]);
    if (refine) {
      support.positions =
          make_room(support.positions, anchor_positions(support, layout), cfg.d_min);
    }

    phase = std::chrono::steady_clock::now();
    auto fit = detail::fit_weights(detail::axis_factors(support.positions, grid), dict.field());
    sol.timings.least_squares += seconds_since(phase);
    support.weights = std::move(fit.weights);
    residual = std::move(fit.residual);
    double norm = fit.residual_norm;

    if (refine && cfg.refine_iters > 0) {
      phase = std::chrono::steady_clock::now();
      auto refined = sparse_array::refine(support, desired, cfg, layout.aperture());
      sol.timings.refine += seconds_since(phase);
      support = std::move(refined.support);
      residual = dict.field() -
                 detail::synthesize(detail::axis_factors(support.positions, grid), support.weights);
      norm = residual.norm();
      sol.refine_history.push_back(std::move(refined.residual_norms));
    }
    energy = norm * norm;
    sol.residual_history.push_back(norm);
  }
  sol.timings.total = seconds_since(start);
  return sol;
}

}  // namespace

std::size_t select_atom(const CVector& z, const SupportSet& support, const ArrayLayout& layout,
                        double d_min) {
  if (z.size() == 0) throw Error(ErrorCode::kInvalidArgument, "correlation vector is empty");
  const auto order = feasible_by_magnitude(z, support, support.positions, layout, d_min);
  if (order.empty()) throw_infeasible(support.size());
  return order.front();
}

CVector ls_excitations(std::span<const Point2> positions, const Pattern& desired) {
  if (positions.empty()) throw Error(ErrorCode::kInvalidArgument, "no positions to fit");
  if (static_cast<Eigen::Index>(positions.size()) > desired.grid.size()) {
    throw Error(ErrorCode::kDegenerateSupport, "more elements than observation samples");
  }
  const CMatrix phi = build_dictionary(positions, desired.grid);
  Eigen::ColPivHouseholderQR<CMatrix> qr(phi);
  qr.setThreshold(1e-10);
  if (qr.rank() < phi.cols()) {
    throw Error(ErrorCode::kDegenerateSupport, "steering matrix is rank deficient");
  }
  return qr.solve(desired.values);
}

std::size_t laomp_select(const CVector& z, const SupportSet& support, const ArrayLayout& layout,
                         const ObservationGrid& grid, const Pattern& desired,
                         const SolverConfig& cfg) {
  cfg.validate();
  if (cfg.lookahead < 1) throw Error(ErrorCode::kInvalidArgument, "look-ahead needs L >= 1");
  if (!(desired.grid == grid)) {
    throw Error(ErrorCode::kInvalidArgument, "desired pattern is sampled on a different grid");
  }
  if (z.size() == 0) throw Error(ErrorCode::kInvalidArgument, "correlation vector is empty");
  Dictionary dict(layout, desired);
  return lookahead_choose(dict, z, support, cfg);
}

SynthesisSolution omp_synthesize(const Pattern& desired, const ArrayLayout& layout,
                                 const ObservationGrid& grid, const SolverConfig& cfg,
                                 bool refine) {
  return run_greedy(desired, layout, grid, cfg, refine, false);
}

SynthesisSolution laomp_synthesize(const Pattern& desired, const ArrayLayout& layout,
                                   const ObservationGrid& grid, const SolverConfig& cfg,
                                   bool refine) {
  return run_greedy(desired, layout, grid, cfg, refine, true);
}

}  // namespace sparse_array
