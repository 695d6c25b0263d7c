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

#include "sparse_array/offgrid_refinement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "solver_internals.hpp"
#include "sparse_array/error.hpp"

namespace sparse_array {

namespace {

constexpr int kMaxHalvings = 20;

void check_state(const RefineState& state, const ObservationGrid& grid) {
  if (static_cast<Eigen::Index>(state.positions.size()) != state.weights.size()) {
    throw Error(ErrorCode::kInvalidArgument, "weights do not match positions");
  }
  if (state.residual.size() != grid.size()) {
    throw Error(ErrorCode::kInvalidArgument, "residual length does not match grid size");
  }
}

// Re{(D^H D)^-1 D^H r ./ c} restricted to columns with c_k != 0, i.e. the
// real part of the pseudoinverse of P = D diag(c) applied to r.
RVector scaled_pseudoinverse(const detail::AxisFactors& d, const CVector& c,
                             const Eigen::Ref<const CMatrix>& field,
                             const std::vector<char>& frozen) {
  RVector eta = RVector::Zero(c.size());
  std::vector<Eigen::Index> active;
  for (Eigen::Index k = 0; k < c.size(); ++k) {
    if (c[k] != Complex(0.0, 0.0) && !frozen[k]) active.push_back(k);
  }
  if (active.empty()) return eta;
  detail::AxisFactors sub{CMatrix(d.eu.rows(), static_cast<Eigen::Index>(active.size())),
                          CMatrix(d.ev.rows(), static_cast<Eigen::Index>(active.size()))};
  for (std::size_t i = 0; i < active.size(); ++i) {
    sub.eu.col(i) = d.eu.col(active[i]);
    sub.ev.col(i) = d.ev.col(active[i]);
  }
  const CVector xi = detail::solve_with_ridge(detail::gram(sub, sub), detail::correlate(sub, field));
  for (std::size_t i = 0; i < active.size(); ++i) {
    eta[active[i]] = (xi[i] / c[active[i]]).real();
  }
  return eta;
}

}  // namespace

CVector compute_residual(std::span<const Point2> positions, const CVector& weights,
                         const Pattern& desired) {
  return desired.values - evaluate_pattern(positions, weights, desired.grid).values;
}

PartialMatrices partial_matrices(const RefineState& state, const ObservationGrid& grid) {
  if (static_cast<Eigen::Index>(state.positions.size()) != state.weights.size()) {
    throw Error(ErrorCode::kInvalidArgument, "weights do not match positions");
  }
  const auto t = static_cast<Eigen::Index>(state.positions.size());
  PartialMatrices out{CMatrix(grid.size(), t), CMatrix(grid.size(), t)};
  if (t == 0) return out;
  const CMatrix a = build_dictionary(state.positions, grid);
  const Complex j2pi(0.0, 2.0 * std::numbers::pi);
  const RVector u = grid.u_samples();
  const RVector v = grid.v_samples();
  for (Eigen::Index k = 0; k < t; ++k) {
    const Point2& p = state.positions[k];
    const Complex w = state.weights[k];
    out.px.col(k) = (w * p.x * j2pi) * u.cast<Complex>().cwiseProduct(a.col(k));
    out.py.col(k) = (w * p.y * j2pi) * v.cast<Complex>().cwiseProduct(a.col(k));
  }
  return out;
}

SpacingBounds spacing_bounds(std::span<const Point2> positions, double d_min,
                             const Aperture& aperture) {
  if (!(d_min > 0.0)) throw Error(ErrorCode::kInvalidArgument, "d_min must be positive");
  if (detail::min_pairwise_distance(positions) < d_min - kSpacingSlack) {
    throw Error(ErrorCode::kSpacingViolated, "current positions violate the minimum spacing");
  }
  const double delta = std::numbers::sqrt2 / 2.0 * d_min;
  constexpr double inf = std::numeric_limits<double>::infinity();

  SpacingBounds b;
  b.x.resize(positions.size());
  b.y.resize(positions.size());
  for (std::size_t k = 0; k < positions.size(); ++k) {
    const Point2& pk = positions[k];
    double below_x = -inf, above_x = inf, below_y = -inf, above_y = inf;
    for (std::size_t j = 0; j < positions.size(); ++j) {
      if (j == k) continue;
      const Point2& pj = positions[j];
      if (std::abs(pj.y - pk.y) < d_min) {
        if (pj.x < pk.x) below_x = std::max(below_x, pj.x);
        if (pj.x > pk.x) above_x = std::min(above_x, pj.x);
      }
      if (std::abs(pj.x - pk.x) < d_min) {
        if (pj.y < pk.y) below_y = std::max(below_y, pj.y);
        if (pj.y > pk.y) above_y = std::min(above_y, pj.y);
      }
    }
    // An obliquely placed neighbour can sit closer than delta along one axis;
    // the element then may not move towards it, but is never forced away.
    b.x[k].lo = std::min(pk.x, std::max(aperture.x_min, below_x + delta));
    b.x[k].hi = std::max(pk.x, std::min(aperture.x_max, above_x - delta));
    b.y[k].lo = std::min(pk.y, std::max(aperture.y_min, below_y + delta));
    b.y[k].hi = std::max(pk.y, std::min(aperture.y_max, above_y - delta));
  }
  return b;
}

std::pair<RVector, RVector> relative_perturbations(const RefineState& state,
                                                   const ObservationGrid& grid) {
  check_state(state, grid);
  const auto t = static_cast<Eigen::Index>(state.positions.size());
  if (t == 0) return {RVector(), RVector()};
  const auto f = detail::axis_factors(state.positions, grid);
  const auto field = detail::as_field(state.residual, grid);
  CVector cx(t), cy(t);
  for (Eigen::Index k = 0; k < t; ++k) {
    cx[k] = state.weights[k] * state.positions[k].x;
    cy[k] = state.weights[k] * state.positions[k].y;
  }
  const std::vector<char> none(static_cast<std::size_t>(t), 0);
  return {scaled_pseudoinverse(detail::derivative_x(f, grid), cx, field, none),
          scaled_pseudoinverse(detail::derivative_y(f, grid), cy, field, none)};
}

namespace {

// Pseudoinverse step for one axis with coordinates pinned at a bound that
// would be pushed further out removed from the system, repeated until no
// more coordinates pin.
RVector bounded_perturbation(const detail::AxisFactors& d, const CVector& c,
                             const Eigen::Ref<const CMatrix>& field, const RVector& coord,
                             const std::vector<Interval>& bounds) {
  std::vector<char> frozen(static_cast<std::size_t>(c.size()), 0);
  RVector eta;
  for (Eigen::Index round = 0; round <= c.size(); ++round) {
    eta = scaled_pseudoinverse(d, c, field, frozen);
    bool grew = false;
    for (Eigen::Index k = 0; k < c.size(); ++k) {
      if (frozen[k]) continue;
      const double step = eta[k] * coord[k];
      const bool at_lo = coord[k] <= bounds[k].lo && step < 0.0;
      const bool at_hi = coord[k] >= bounds[k].hi && step > 0.0;
      if (at_lo || at_hi) frozen[k] = grew = true;
    }
    if (!grew) break;
  }
  return eta;
}

}  // namespace

PositionStep position_step(const RefineState& state, const SpacingBounds& bounds,
                           const ObservationGrid& grid, double kappa, double d_min) {
  const std::size_t t = state.positions.size();
  if (bounds.x.size() != t || bounds.y.size() != t) {
    throw Error(ErrorCode::kInvalidArgument, "bounds do not match the number of elements");
  }
  if (!(kappa > 0.0)) throw Error(ErrorCode::kInvalidArgument, "learning rate must be positive");
  check_state(state, grid);
  RVector eta_x = RVector::Zero(static_cast<Eigen::Index>(t));
  RVector eta_y = RVector::Zero(static_cast<Eigen::Index>(t));
  if (t > 0) {
    const auto f = detail::axis_factors(state.positions, grid);
    const auto field = detail::as_field(state.residual, grid);
    CVector cx(eta_x.size()), cy(eta_y.size());
    RVector xs(eta_x.size()), ys(eta_y.size());
    for (std::size_t k = 0; k < t; ++k) {
      xs[k] = state.positions[k].x;
      ys[k] = state.positions[k].y;
      cx[k] = state.weights[k] * xs[k];
      cy[k] = state.weights[k] * ys[k];
    }
    eta_x = bounded_perturbation(detail::derivative_x(f, grid), cx, field, xs, bounds.x);
    eta_y = bounded_perturbation(detail::derivative_y(f, grid), cy, field, ys, bounds.y);
  }

  std::vector<Point2> proposed(t);
  for (std::size_t k = 0; k < t; ++k) {
    const Point2& p = state.positions[k];
    proposed[k].x = std::clamp(p.x + kappa * eta_x[k] * p.x, bounds.x[k].lo, bounds.x[k].hi);
    proposed[k].y = std::clamp(p.y + kappa * eta_y[k] * p.y, bounds.y[k].lo, bounds.y[k].hi);
  }

  // Simultaneous moves can still bring two elements too close. Both members
  // of every offending pair keep their current position; repeat until no
  // pair offends, which terminates because the current layout is feasible.
  PositionStep step;
  for (bool again = true; again;) {
    again = false;
    for (std::size_t i = 0; i < t; ++i) {
      for (std::size_t j = i + 1; j < t; ++j) {
        if (distance(proposed[i], proposed[j]) >= d_min - kSpacingSlack) continue;
        if (proposed[i] == state.positions[i] && proposed[j] == state.positions[j]) continue;
        proposed[i] = state.positions[i];
        proposed[j] = state.positions[j];
        ++step.reverted;
        again = true;
      }
    }
  }
  step.moved = proposed != state.positions;
  step.positions = std::move(proposed);
  step.kappa = kappa;
  return step;
}

std::vector<Point2> make_room(std::span<const Point2> positions, std::span<const Point2> anchors,
                              double d_min) {
  const std::size_t n = positions.size();
  if (anchors.size() != n) {
    throw Error(ErrorCode::kInvalidArgument, "anchors do not match positions");
  }
  std::vector<Point2> out(positions.begin(), positions.end());
  if (n < 2) return out;
  const std::size_t last = n - 1;
  auto too_close = [&](const Point2& a, const Point2& b) {
    return distance(a, b) < d_min - kSpacingSlack;
  };

  std::vector<char> pulled(n, 0);
  bool any = false;
  for (std::size_t k = 0; k < last; ++k) {
    if (too_close(positions[k], positions[last])) pulled[k] = any = 1;
  }
  if (!any) return out;

  auto at = [&](std::size_t k, double s) {
    if (!pulled[k]) return positions[k];
    return Point2{anchors[k].x + s * (positions[k].x - anchors[k].x),
                  anchors[k].y + s * (positions[k].y - anchors[k].y)};
  };
  auto feasible = [&](double s) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!pulled[i]) continue;
      const Point2 pi = at(i, s);
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i && too_close(pi, at(j, s))) return false;
      }
    }
    return true;
  };

  // Grow the pulled set until fully reverting it is feasible.
  for (bool grew = true; grew;) {
    grew = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (!pulled[i]) continue;
      for (std::size_t j = 0; j < last; ++j) {
        if (!pulled[j] && too_close(anchors[i], positions[j])) pulled[j] = grew = 1;
      }
    }
  }
  if (!feasible(0.0)) {
    throw Error(ErrorCode::kSpacingViolated, "grid anchors violate the minimum spacing");
  }

  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 50; ++it) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? lo : hi) = mid;
  }
  for (std::size_t k = 0; k < n; ++k) out[k] = at(k, lo);
  return out;
}

RefineResult refine(const SupportSet& support, const Pattern& desired, const SolverConfig& cfg,
                    const Aperture& aperture) {
  RefineResult out{support, {}};
  const int iters = cfg.refine_iters;
  if (iters <= 0 || support.size() == 0) return out;
  if (static_cast<Eigen::Index>(support.positions.size()) != support.weights.size()) {
    throw Error(ErrorCode::kInvalidArgument, "support weights do not match positions");
  }
  const ObservationGrid& grid = desired.grid;
  const CMatrix target = detail::as_field(desired.values, grid);

  SupportSet& cur = out.support;
  CMatrix residual =
      target - detail::synthesize(detail::axis_factors(cur.positions, grid), cur.weights);
  double norm = residual.norm();
  out.residual_norms.reserve(iters);

  for (int i = 0; i < iters; ++i) {
    RefineState state{cur.positions, cur.weights, detail::flatten(residual), i};
    const auto bounds = spacing_bounds(cur.positions, cfg.d_min, aperture);
    auto step = position_step(state, bounds, grid, cfg.learning_rate, cfg.d_min);

    // A move that worsens the fit is retried with half the step.
    bool accepted = false;
    for (int h = 0; h <= kMaxHalvings && step.moved; ++h) {
      auto fit = detail::fit_weights(detail::axis_factors(step.positions, grid), target);
      if (fit.residual_norm <= norm) {
        cur.positions = std::move(step.positions);
        cur.weights = std::move(fit.weights);
        residual = std::move(fit.residual);
        norm = fit.residual_norm;
        accepted = true;
        break;
      }
      step = position_step(state, bounds, grid, step.kappa * 0.5, cfg.d_min);
    }
    out.residual_norms.push_back(norm);
    if (!accepted) {
      // The state is unchanged, so every remaining iteration would repeat
      // this one exactly.
      out.residual_norms.resize(iters, norm);
      break;
    }
  }
  return out;
}

}  // namespace sparse_array
