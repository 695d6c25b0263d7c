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

#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "json.hpp"
#include "sparse_array/error.hpp"
#include "sparse_array/experiments.hpp"
#include "sparse_array/io.hpp"
#include "test_support.hpp"

using namespace sparse_array;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const char* name) {
  const auto p = fs::temp_directory_path() / ("sparse_array_test_" + std::string(name));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

ExperimentConfig small_config(const fs::path& out) {
  ExperimentConfig c;
  c.M = c.N = 6;
  c.grid_P = c.grid_Q = 21;
  c.measure_P = c.measure_Q = 41;
  c.solver.target_sparsity = 12;
  c.solver.lookahead = 4;
  c.solver.refine_iters = 3;
  c.sweep_t = {6, 12};
  c.convergence_j_max = 3;
  c.bench_dense_factor = 2;
  c.output_dir = out;
  return c;
}

}  // namespace

TEST_CASE("CSV round trips are bit exact") {
  const auto dir = scratch_dir("csv");
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> c(0.0, 1.0);
  std::vector<Point2> pos;
  for (int i = 0; i < 7; ++i) pos.push_back({c(rng) + 2 * i, c(rng) / 3.0});
  const ArrayLayout layout(pos, Aperture{0.0, 20.0, 0.0, 1.0});
  write_layout_csv(dir / "layout.csv", layout);
  CHECK(read_layout_csv(dir / "layout.csv") == pos);

  const CVector w = sparse_array::testing::random_weights(rng, 7) / 3.0;
  write_excitations_csv(dir / "w.csv", w);
  CHECK(read_excitations_csv(dir / "w.csv") == w);

  const auto g = make_uv_grid(7, 5);
  const Pattern p(sparse_array::testing::random_weights(rng, g.size()) * 1e-7, g);
  write_pattern_csv(dir / "p.csv", p);
  const Pattern back = read_pattern_csv(dir / "p.csv");
  CHECK(back.grid == g);
  CHECK(back.values == p.values);

  CHECK(format_real(0.1) == "0.10000000000000001");
  CHECK_THROWS_AS(read_layout_csv(dir / "missing.csv"), Error);
  fs::remove_all(dir);
}

TEST_CASE("config parsing") {
  const ExperimentConfig d;
  CHECK(d.M == 16);
  CHECK(d.N == 16);
  CHECK(d.spacing == 0.5);
  CHECK(d.solver.d_min == 0.5);
  CHECK(d.solver.lookahead == 15);
  CHECK(d.solver.refine_iters == 10);
  CHECK(d.grid_P == 65);
  CHECK(d.measure_P == 129);
  CHECK(d.method == Method::kLaompOffgrid);

  const auto c = config_from_json(R"({"reference": {"taper": "taylor", "sll_db": -40},
                                      "solver": {"method": "omp", "sparsity": 48, "kappa": 0.5},
                                      "grid": {"P": 33, "Q": 31}})");
  CHECK(c.taper.kind == TaperKind::kTaylor);
  CHECK(c.taper.sll_db == -40.0);
  CHECK(c.method == Method::kOmp);
  CHECK(*c.solver.target_sparsity == 48);
  CHECK(c.solver.learning_rate == 0.5);
  CHECK(c.grid_Q == 31);

  const auto again = config_from_json(config_to_json(c));
  CHECK(config_to_json(again) == config_to_json(c));

  CHECK_THROWS_AS(config_from_json(R"({"solver": {"method": "lasso"}})"), Error);
  CHECK_THROWS_AS(config_from_json(R"({"solver": {"method": "laomp", "lookahead": 0}})"), Error);
  CHECK_THROWS_AS(config_from_json(R"({"solver": {"method": "omp-offgrid", "refine_iters": 0}})"), Error);
  CHECK_THROWS_AS(config_from_json("{not json"), Error);
  CHECK_THROWS_AS(config_from_json(R"({"grid": {"P": 64}})"), Error);
}

TEST_CASE("reference command") {
  const auto dir = scratch_dir("reference");
  auto cfg = small_config(dir);
  std::ostringstream log;
  const auto out = cmd_reference(cfg, log);
  CHECK(out.ok);
  const auto m = read_json(dir / "reference_metrics.json");
  CHECK(m["schema_version"] == kMetricsSchemaVersion);
  CHECK(m["element_count"] == 36);
  CHECK(read_layout_csv(dir / "reference_layout.csv").size() == 36);

  cfg.M = cfg.N = 1;
  cmd_reference(cfg, log);
  CHECK(read_layout_csv(dir / "reference_layout.csv").size() == 1);
  CHECK(read_json(dir / "reference_metrics.json")["sll_db"].is_null());
  fs::remove_all(dir);
}

TEST_CASE("synthesize, sweep and convergence commands") {
  const auto dir = scratch_dir("commands");
  auto cfg = small_config(dir);
  std::ostringstream log;

  const auto syn = cmd_synthesize(cfg, log);
  CHECK(syn.ok);
  const auto m = read_json(dir / "metrics.json");
  CHECK(m["element_count"] == 12);
  CHECK(m["sparsity_rate"].get<double>() == doctest::Approx(12.0 / 36.0));
  CHECK(m["min_spacing"].get<double>() >= 0.5 - 1e-9);
  CHECK(m["spacing_ok"] == true);
  CHECK(m.contains("wall_clock_seconds"));
  std::ifstream hist(dir / "residual_history.csv");
  std::string line;
  int rows = -1;
  while (std::getline(hist, line)) ++rows;
  CHECK(rows == 12);

  const auto sw = cmd_sweep(cfg, log);
  CHECK(sw.ok);
  std::ifstream sweep(dir / "sweep.csv");
  std::getline(sweep, line);
  CHECK(line == "method,t,chi,nmse,sll_db,min_spacing,spacing_ok,seconds");
  rows = 0;
  while (std::getline(sweep, line)) ++rows;
  CHECK(rows == 2 * 3);

  const auto cv = cmd_convergence(cfg, log);
  CHECK(cv.ok);
  std::ifstream conv(dir / "convergence.csv");
  std::getline(conv, line);
  rows = 0;
  while (std::getline(conv, line)) ++rows;
  CHECK(rows == 2 * 2 * 4);
  fs::remove_all(dir);
}

TEST_CASE("bench command") {
  const auto dir = scratch_dir("bench");
  auto cfg = small_config(dir);
  std::ostringstream log;
  const auto out = cmd_bench(cfg, log);
  CHECK(out.ok);
  const auto j = read_json(dir / "bench.json");
  CHECK(j["deterministic"] == true);
  for (const auto& [name, run] : j["runs"].items()) {
    const auto& t = run["timings"];
    const double parts = t["dictionary"].get<double>() + t["match"].get<double>() +
                         t["least_squares"].get<double>() + t["lookahead"].get<double>() +
                         t["refine"].get<double>();
    CHECK(parts <= 1.05 * t["total"].get<double>());
  }
  CHECK(j["runs"]["omp-dense"]["candidates"] == 144);
  fs::remove_all(dir);
}
