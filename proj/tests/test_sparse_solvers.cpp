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

#include <random>
#include <set>

#include "doctest.h"
#include "sparse_array/error.hpp"
#include "sparse_array/metrics.hpp"
#include "sparse_array/reference_patterns.hpp"
#include "sparse_array/sparse_solvers.hpp"
#include "test_support.hpp"

using namespace sparse_array;

namespace {

// Independent LS residual through a complete orthogonal decomposition.
double cod_residual(const CMatrix& phi, const CVector& b) {
  const CVector w = phi.completeOrthogonalDecomposition().solve(b);
  return (b - phi * w).norm();
}

struct Instance {
  ArrayLayout layout;
  Pattern desired;
};

Instance sparse_instance(std::mt19937_64& rng, const ArrayLayout& layout, const ObservationGrid& g,
                         const std::vector<std::size_t>& atoms) {
  const CVector w = sparse_array::testing::random_weights(rng, static_cast<Eigen::Index>(atoms.size()));
  CVector s = CVector::Zero(g.size());
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    const auto p = layout[atoms[k]];
    s += w[static_cast<Eigen::Index>(k)] * steering_vector(p.x, p.y, g);
  }
  return {layout, Pattern(s, g)};
}

SolverConfig sparsity(int t) {
  SolverConfig c;
  c.target_sparsity = t;
  c.refine_iters = 0;
  return c;
}

}  // namespace

TEST_CASE("match step against explicit inner products") {
  std::mt19937_64 rng(3);
  CMatrix A(3, 3);
  for (Eigen::Index j = 0; j < 3; ++j) A.col(j) = sparse_array::testing::random_weights(rng, 3);
  const CVector r = sparse_array::testing::random_weights(rng, 3);
  const CVector z = match_step(A, r);
  for (Eigen::Index j = 0; j < 3; ++j) {
    Complex acc = 0.0;
    for (Eigen::Index i = 0; i < 3; ++i) acc += std::conj(A(i, j)) * r[i];
    CHECK(std::abs(acc - z[j]) < 1e-12);
  }
  CHECK(match_step(A, CVector::Zero(3)).norm() == 0.0);
  CHECK_THROWS_AS(match_step(A, CVector::Zero(4)), Error);

  const auto g = make_uv_grid(9, 9);
  const CMatrix D = build_dictionary(ArrayLayout::uniform(3, 3, 0.5), g);
  const CVector zc = match_step(D, D.col(4));
  Eigen::Index arg = 0;
  CHECK(zc.cwiseAbs().maxCoeff(&arg) == doctest::Approx(81.0));
  CHECK(arg == 4);
}

TEST_CASE("spacing-feasible atom selection") {
  const auto layout = ArrayLayout::uniform(4, 4, 0.3);
  CVector z = CVector::Zero(16);
  for (Eigen::Index i = 0; i < 16; ++i) z[i] = static_cast<double>(i);
  SupportSet empty;
  CHECK(select_atom(z, empty, layout, 0.5) == 15);

  // Ties go to the lowest index.
  CVector flat = CVector::Ones(16);
  CHECK(select_atom(flat, empty, layout, 0.5) == 0);

  // Best atom sits 0.3 from an element; the next feasible one wins.
  SupportSet s;
  s.atom_indices = {10};
  s.positions = {layout[10]};
  s.weights = CVector::Ones(1);
  z[11] = 100.0;  // 0.3 away from atom 10
  z[3] = 50.0;    // at (0.15, 1.05), 0.67 away from atom 10
  const auto picked = select_atom(z, s, layout, 0.5);
  CHECK(picked == 3);
  CHECK(distance(layout[picked], layout[10]) >= 0.5);

  // Every atom within d_min of the support.
  SupportSet crowd;
  crowd.atom_indices = {5};
  crowd.positions = {Point2{0.6, 0.6}};
  crowd.weights = CVector::Ones(1);
  CHECK_THROWS_AS(select_atom(z, crowd, layout, 2.0), Error);
  try {
    select_atom(z, crowd, layout, 2.0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInfeasibleSelection);
  }
}

TEST_CASE("least-squares excitations") {
  std::mt19937_64 rng(17);
  const auto g = make_uv_grid(15, 15);
  const std::vector<Point2> pos = {{0.25, 0.25}, {1.1, 0.4}, {0.3, 1.7}, {1.9, 1.3}};
  const CVector w0 = sparse_array::testing::random_weights(rng, 4);
  const CMatrix phi = build_dictionary(pos, g);
  const Pattern exact(phi * w0, g);
  CHECK((ls_excitations(pos, exact) - w0).norm() < 1e-10);

  // Single element at the origin: the mean of the samples.
  const Pattern noisy(sparse_array::testing::random_weights(rng, g.size()), g);
  const std::vector<Point2> origin = {{0.0, 0.0}};
  const CVector w1 = ls_excitations(origin, noisy);
  CHECK(std::abs(w1[0] - noisy.values.mean()) < 1e-12);

  // Normal-equations optimality and agreement with an independent solver.
  const CVector w = ls_excitations(pos, noisy);
  CHECK((phi.adjoint() * (noisy.values - phi * w)).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((noisy.values - phi * w).norm() == doctest::Approx(cod_residual(phi, noisy.values)).epsilon(1e-12));

  const std::vector<Point2> dup = {{0.5, 0.5}, {0.5, 0.5}};
  try {
    ls_excitations(dup, noisy);
    FAIL("duplicate positions accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDegenerateSupport);
  }
}

TEST_CASE("exact on-grid recovery") {
  std::mt19937_64 rng(23);
  const auto g = make_uv_grid(33, 33);
  const auto layout = ArrayLayout::uniform(8, 8, 0.5);
  const std::vector<std::size_t> atoms = {0, 27, 61};
  const auto inst = sparse_instance(rng, layout, g, atoms);
  for (bool la : {false, true}) {
    SolverConfig cfg = sparsity(3);
    cfg.lookahead = la ? 5 : 0;
    const auto sol = la ? laomp_synthesize(inst.desired, layout, g, cfg, false)
                        : omp_synthesize(inst.desired, layout, g, cfg, false);
    const std::set<std::size_t> got(sol.support.atom_indices.begin(), sol.support.atom_indices.end());
    CHECK(got == std::set<std::size_t>(atoms.begin(), atoms.end()));
    CHECK(sol.final_residual() <= 1e-10);
    CHECK(sol.status == SolveStatus::kSparsityReached);
  }
}

TEST_CASE("zero budget returns an empty solution") {
  const auto g = make_uv_grid(9, 9);
  const auto layout = ArrayLayout::uniform(3, 3, 0.5);
  const Pattern d(CVector::Ones(g.size()), g);
  const auto sol = omp_synthesize(d, layout, g, sparsity(0), false);
  CHECK(sol.support.size() == 0);
  CHECK(sol.final_residual() == doctest::Approx(9.0));
}

TEST_CASE("greedy solvers against exhaustive support search") {
  const auto g = make_uv_grid(9, 9);
  const auto layout = ArrayLayout::uniform(3, 3, 0.5);
  const CMatrix A = build_dictionary(layout, g);
  std::mt19937_64 rng(2024);
  int omp_hits = 0, laomp_hits = 0, first_hits = 0;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::size_t> idx(9);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    auto inst = sparse_instance(rng, layout, g, {idx[0], idx[1]});
    // Off-support noise keeps the problem from being trivially exact.
    inst.desired.values += 0.3 * sparse_array::testing::random_weights(rng, g.size());

    double best = std::numeric_limits<double>::infinity();
    std::size_t best_first = 0;
    for (Eigen::Index a = 0; a < 9; ++a) {
      for (Eigen::Index b = a + 1; b < 9; ++b) {
        CMatrix phi(A.rows(), 2);
        phi << A.col(a), A.col(b);
        const double r = cod_residual(phi, inst.desired.values);
        if (r < best) {
          best = r;
          best_first = static_cast<std::size_t>(a);
        }
      }
    }
    const auto omp = omp_synthesize(inst.desired, layout, g, sparsity(2), false);
    SolverConfig la = sparsity(2);
    la.lookahead = 9;
    const auto laomp = laomp_synthesize(inst.desired, layout, g, la, false);
    omp_hits += omp.final_residual() <= best + 1e-8;
    laomp_hits += laomp.final_residual() <= best + 1e-8;
    CHECK(laomp.final_residual() <= omp.final_residual() + 1e-9);

    // The first look-ahead pick belongs to an optimal support.
    const auto pick = laomp_select(match_step(A, inst.desired.values), SupportSet{}, layout, g,
                                   inst.desired, la);
    SupportSet one;
    one.atom_indices = {pick};
    one.positions = {layout[pick]};
    double with_pick = std::numeric_limits<double>::infinity();
    for (Eigen::Index b = 0; b < 9; ++b) {
      if (static_cast<std::size_t>(b) == pick) continue;
      CMatrix phi(A.rows(), 2);
      phi << A.col(static_cast<Eigen::Index>(pick)), A.col(b);
      with_pick = std::min(with_pick, cod_residual(phi, inst.desired.values));
    }
    first_hits += with_pick <= best + 1e-8;
    (void)best_first;
  }
  CHECK(omp_hits >= 45);
  CHECK(laomp_hits >= 48);
  CHECK(first_hits >= 48);
}

TEST_CASE("grid-only invariants on a tapered reference") {
  const auto g = make_uv_grid(33, 33);
  const auto ref = reference_pattern(8, 8, 0.5, TaperSpec{TaperKind::kChebyshev, -30.0, 5}, g);
  SolverConfig cfg = sparsity(30);
  const auto sol = omp_synthesize(ref.pattern, ref.layout, g, cfg, false);
  REQUIRE(sol.support.size() == 30);
  for (std::size_t i = 1; i < sol.residual_history.size(); ++i) {
    CHECK(sol.residual_history[i] <= sol.residual_history[i - 1] + 1e-9);
  }
  CHECK(sol.residual_history.front() <= sol.initial_residual);
  const std::set<std::size_t> uniq(sol.support.atom_indices.begin(), sol.support.atom_indices.end());
  CHECK(uniq.size() == 30);
  for (std::size_t k = 0; k < sol.support.size(); ++k) {
    CHECK(sol.support.positions[k] == ref.layout[sol.support.atom_indices[k]]);
  }
  const ArrayLayout out(sol.support.positions, ref.layout.aperture());
  CHECK(verify_spacing(out, 0.5).ok);

  // L = 1 takes the same path bit for bit.
  cfg.lookahead = 1;
  const auto la1 = laomp_synthesize(ref.pattern, ref.layout, g, cfg, false);
  CHECK(la1.support.atom_indices == sol.support.atom_indices);
  CHECK(la1.support.weights == sol.support.weights);
  CHECK(la1.residual_history == sol.residual_history);

  // Candidate evaluation order does not change the result.
  cfg.lookahead = 6;
  const auto serial = laomp_synthesize(ref.pattern, ref.layout, g, cfg, false);
  cfg.threads = 3;
  const auto threaded = laomp_synthesize(ref.pattern, ref.layout, g, cfg, false);
  CHECK(serial.support.atom_indices == threaded.support.atom_indices);
  CHECK(serial.support.weights == threaded.support.weights);
}

TEST_CASE("tolerance stopping") {
  std::mt19937_64 rng(8);
  const auto g = make_uv_grid(17, 17);
  const auto layout = ArrayLayout::uniform(6, 6, 0.5);
  const auto inst = sparse_instance(rng, layout, g, {0, 14, 35});
  SolverConfig cfg;
  cfg.target_sparsity.reset();
  cfg.tolerance = 1e-12;
  cfg.refine_iters = 0;
  const auto sol = omp_synthesize(inst.desired, layout, g, cfg, false);
  CHECK(sol.status == SolveStatus::kToleranceMet);
  CHECK(sol.support.size() == 3);

  cfg.target_sparsity = 2;
  const auto capped = omp_synthesize(inst.desired, layout, g, cfg, false);
  CHECK(capped.status == SolveStatus::kNotConverged);
  CHECK(capped.support.size() == 2);
}

TEST_CASE("off-grid synthesis keeps spacing and improves on the grid") {
  const auto g = make_uv_grid(33, 33);
  const auto ref = reference_pattern(8, 8, 0.5, TaperSpec{TaperKind::kTaylor, -30.0, 3}, g);
  SolverConfig cfg = sparsity(24);
  cfg.refine_iters = 5;
  const auto grid_only = omp_synthesize(ref.pattern, ref.layout, g, cfg, false);
  const auto off = omp_synthesize(ref.pattern, ref.layout, g, cfg, true);
  REQUIRE(off.support.size() == 24);
  const ArrayLayout out(off.support.positions, ref.layout.aperture());
  const auto chk = verify_spacing(out, 0.5);
  CHECK(chk.ok);
  CHECK(off.final_residual() < grid_only.final_residual());
  for (const auto& run : off.refine_history) {
    for (std::size_t i = 1; i < run.size(); ++i) CHECK(run[i] <= run[i - 1] + 1e-9);
  }
}

TEST_CASE("solver configuration validation") {
  SolverConfig c;
  c.target_sparsity.reset();
  CHECK_THROWS_AS(c.validate(), Error);
  c = SolverConfig{};
  c.d_min = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = SolverConfig{};
  c.learning_rate = -1.0;
  CHECK_THROWS_AS(c.validate(), Error);
}
