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

#include <benchmark/benchmark.h>

#include <random>

#include "sparse_array/detail/tensor_ops.hpp"
#include "sparse_array/offgrid_refinement.hpp"
#include "sparse_array/reference_patterns.hpp"
#include "sparse_array/sparse_solvers.hpp"

namespace {

using namespace sparse_array;

CVector noise(Eigen::Index n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  CVector v(n);
  for (auto& c : v) c = Complex(g(rng), g(rng));
  return v;
}

// Correlation of every candidate with a residual, explicit dictionary.
void BM_MatchDense(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const auto grid = make_uv_grid(65, 65);
  const auto layout = ArrayLayout::uniform(m, m, 0.5);
  const CMatrix A = build_dictionary(layout, grid);
  const CVector r = noise(grid.size(), 1);
  for (auto _ : state) benchmark::DoNotOptimize(match_step(A, r));
  state.SetItemsProcessed(state.iterations() * A.cols());
}
BENCHMARK(BM_MatchDense)->Arg(16)->Arg(32)->Unit(benchmark::kMicrosecond);

// Same correlation through the separable axis factors.
void BM_MatchSeparable(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const auto grid = make_uv_grid(65, 65);
  const auto layout = ArrayLayout::uniform(m, m, 0.5);
  const auto f = detail::axis_factors(layout.positions(), grid);
  const CVector r = noise(grid.size(), 1);
  const auto field = detail::as_field(r, grid);
  for (auto _ : state) benchmark::DoNotOptimize(detail::correlate(f, field));
  state.SetItemsProcessed(state.iterations() * f.count());
}
BENCHMARK(BM_MatchSeparable)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMicrosecond);

void BM_LeastSquares(benchmark::State& state) {
  const auto grid = make_uv_grid(65, 65);
  const auto ref = reference_pattern(16, 16, 0.5, TaperSpec{}, grid);
  std::vector<Point2> pos(ref.layout.positions().begin(),
                          ref.layout.positions().begin() + state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ls_excitations(pos, ref.pattern));
}
BENCHMARK(BM_LeastSquares)->Arg(40)->Arg(160)->Unit(benchmark::kMillisecond);

void BM_PositionStep(benchmark::State& state) {
  const auto grid = make_uv_grid(65, 65);
  const auto ref = reference_pattern(16, 16, 0.5, TaperSpec{}, grid);
  std::vector<Point2> pos;
  for (std::size_t i = 0; i < ref.layout.size(); i += 2) pos.push_back(ref.layout[i]);
  const CVector w = ls_excitations(pos, ref.pattern);
  const RefineState st{pos, w, compute_residual(pos, w, ref.pattern), 0};
  const auto bounds = spacing_bounds(pos, 0.5, ref.layout.aperture());
  for (auto _ : state) benchmark::DoNotOptimize(position_step(st, bounds, grid, 1.0, 0.5));
}
BENCHMARK(BM_PositionStep)->Unit(benchmark::kMillisecond);

void BM_GridOmp(benchmark::State& state) {
  const auto grid = make_uv_grid(65, 65);
  const auto ref = reference_pattern(16, 16, 0.5, TaperSpec{}, grid);
  SolverConfig cfg;
  cfg.target_sparsity = static_cast<int>(state.range(0));
  cfg.refine_iters = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(omp_synthesize(ref.pattern, ref.layout, grid, cfg, false));
  }
}
BENCHMARK(BM_GridOmp)->Arg(48)->Arg(160)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
