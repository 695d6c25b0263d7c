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

// Command-line driver: reference | synthesize | convergence | sweep | bench.
//
// Exit status is 0 only if every run completed and every synthesized layout
// kept the minimum spacing; 2 for invalid input or solver errors, 3 otherwise.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "sparse_array/error.hpp"
#include "sparse_array/experiments.hpp"

namespace {

using namespace sparse_array;

struct Overrides {
  std::string config;
  std::string method;
  std::string out;
  std::string grid;
  std::string taper;
  std::optional<double> sll_db;
  std::optional<int> sparsity;
  std::optional<int> lookahead;
  std::optional<int> refine_iters;
  std::optional<double> dmin;
  std::optional<double> kappa;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  std::optional<int> j_max;
  std::vector<int> t_list;
  std::optional<int> dense_factor;
};

void parse_grid(const std::string& s, int& P, int& Q) {
  const auto x = s.find_first_of("xX");
  try {
    if (x == std::string::npos) throw std::invalid_argument(s);
    std::size_t used = 0;
    P = std::stoi(s.substr(0, x), &used);
    if (used != x) throw std::invalid_argument(s);
    Q = std::stoi(s.substr(x + 1), &used);
    if (used != s.size() - x - 1) throw std::invalid_argument(s);
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::kInvalidArgument, "--grid expects PxQ, got '" + s + "'");
  }
}

ExperimentConfig resolve(const Overrides& o) {
  ExperimentConfig c = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
  if (!o.method.empty()) c.method = parse_method(o.method);
  if (!o.out.empty()) c.output_dir = o.out;
  if (!o.grid.empty()) parse_grid(o.grid, c.grid_P, c.grid_Q);
  if (!o.taper.empty()) {
    if (o.taper == "chebyshev" || o.taper == "dolph") {
      c.taper.kind = TaperKind::kChebyshev;
    } else if (o.taper == "taylor") {
      c.taper.kind = TaperKind::kTaylor;
    } else {
      throw Error(ErrorCode::kInvalidArgument, "unknown taper '" + o.taper + "'");
    }
  }
  if (o.sll_db) c.taper.sll_db = *o.sll_db;
  if (o.sparsity) c.solver.target_sparsity = *o.sparsity;
  if (o.lookahead) c.solver.lookahead = *o.lookahead;
  if (o.refine_iters) c.solver.refine_iters = *o.refine_iters;
  if (o.dmin) c.solver.d_min = *o.dmin;
  if (o.kappa) c.solver.learning_rate = *o.kappa;
  if (o.threads) c.solver.threads = *o.threads;
  if (o.seed) c.seed = *o.seed;
  if (o.j_max) c.convergence_j_max = *o.j_max;
  if (!o.t_list.empty()) c.sweep_t = o.t_list;
  if (o.dense_factor) c.bench_dense_factor = *o.dense_factor;
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse planar array synthesis"};
  app.require_subcommand(1);
  Overrides o;

  app.add_option("--config", o.config, "JSON experiment configuration")->check(CLI::ExistingFile);
  app.add_option("--method", o.method, "omp | omp-offgrid | laomp | laomp-offgrid");
  app.add_option("--out", o.out, "Output directory");
  app.add_option("--grid", o.grid, "Synthesis grid as PxQ (odd sizes)");
  app.add_option("--taper", o.taper, "Reference taper: chebyshev | taylor");
  app.add_option("--sll", o.sll_db, "Reference design sidelobe level in dB (negative)");
  app.add_option("--sparsity", o.sparsity, "Target element count T");
  app.add_option("--lookahead", o.lookahead, "Look-ahead candidate count L");
  app.add_option("--refine-iters", o.refine_iters, "Position refinement iterations J");
  app.add_option("--dmin", o.dmin, "Minimum element spacing in wavelengths");
  app.add_option("--kappa", o.kappa, "Refinement learning rate");
  app.add_option("--threads", o.threads, "Worker threads for look-ahead candidates");
  app.add_option("--seed", o.seed, "Seed recorded with the run");

  auto* reference = app.add_subcommand("reference", "Write the uniform reference array and pattern");
  auto* synthesize = app.add_subcommand("synthesize", "Run one synthesis");
  auto* convergence = app.add_subcommand("convergence", "NMSE versus refinement iterations");
  convergence->add_option("--j-max", o.j_max, "Largest J");
  auto* sweep = app.add_subcommand("sweep", "NMSE versus element count");
  sweep->add_option("--t", o.t_list, "Element counts")->delimiter(',');
  auto* bench = app.add_subcommand("bench", "Timing and determinism report");
  bench->add_option("--dense-factor", o.dense_factor, "Per-axis density of the grid-only run");

  CLI11_PARSE(app, argc, argv);

  try {
    const ExperimentConfig cfg = resolve(o);
    CommandOutcome outcome;
    if (*reference) {
      outcome = cmd_reference(cfg, std::cout);
    } else if (*synthesize) {
      outcome = cmd_synthesize(cfg, std::cout);
    } else if (*convergence) {
      outcome = cmd_convergence(cfg, std::cout);
    } else if (*sweep) {
      outcome = cmd_sweep(cfg, std::cout);
    } else if (*bench) {
      outcome = cmd_bench(cfg, std::cout);
    }
    for (const auto& f : outcome.files) std::cout << "wrote " << f.string() << '\n';
    if (!outcome.ok) {
      for (const auto& p : outcome.problems) std::cerr << "error: " << p << '\n';
      if (outcome.problems.empty()) {
        std::cerr << "error: a synthesized layout violates the minimum spacing\n";
      }
      return 3;
    }
    return EXIT_SUCCESS;
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
