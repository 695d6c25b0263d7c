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

#include "sparse_array/experiments.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

#include "json.hpp"
#include "solver_internals.hpp"
#include "sparse_array/error.hpp"
#include "sparse_array/offgrid_refinement.hpp"

namespace sparse_array {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Setup {
  ReferenceArray reference;  // on the synthesis grid
  ObservationGrid measure_grid;
};

Setup make_setup(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto grid = make_uv_grid(cfg.grid_P, cfg.grid_Q);
  return {reference_pattern(cfg.M, cfg.N, cfg.spacing, cfg.taper, grid),
          make_uv_grid(cfg.measure_P, cfg.measure_Q)};
}

double sll_or_nan(const Pattern& p) {
  try {
    return sidelobe_level(p);
  } catch (const Error&) {
    return kNaN;
  }
}

bool spacing_ok(const MetricsReport& m, double d_min) {
  return m.element_count < 2 || m.min_spacing >= d_min - kSpacingSlack;
}

json timings_json(const PhaseTimings& t) {
  return {{"dictionary", t.dictionary}, {"match", t.match},
          {"least_squares", t.least_squares}, {"lookahead", t.lookahead},
          {"refine", t.refine}, {"total", t.total}};
}

json null_if_nan(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::ofstream open_csv(const fs::path& path, const char* header) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  out << header << '\n';
  return out;
}

void close_csv(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

bool same_support(const SupportSet& a, const SupportSet& b) {
  return a.atom_indices == b.atom_indices && a.positions == b.positions &&
         a.weights.size() == b.weights.size() && a.weights == b.weights;
}

}  // namespace

MetricsReport measure(const SupportSet& support, const Pattern& desired,
                      const ObservationGrid& measure_grid, int M, int N) {
  MetricsReport m;
  m.element_count = support.size();
  if (support.size() == 0) {
    m.sparsity_rate = 0.0;
    m.nmse = 1.0;
    m.sll_db = kNaN;
    m.min_spacing = std::numeric_limits<double>::infinity();
    return m;
  }
  m.sparsity_rate = sparsity_rate(support.size(), M, N);
  m.nmse = nmse(evaluate_pattern(support.positions, support.weights, desired.grid), desired);
  m.sll_db = sll_or_nan(evaluate_pattern(support.positions, support.weights, measure_grid));
  m.min_spacing = detail::min_pairwise_distance(support.positions);
  return m;
}

CommandOutcome cmd_reference(const ExperimentConfig& cfg, std::ostream& log) {
  const auto setup = make_setup(cfg);
  const auto& ref = setup.reference;
  const Pattern fine = evaluate_pattern(ref.layout, ref.excitations, setup.measure_grid);

  MetricsReport m;
  m.nmse = 0.0;
  m.sparsity_rate = 1.0;
  m.sll_db = sll_or_nan(fine);
  m.min_spacing = detail::min_pairwise_distance(ref.layout.positions());
  m.element_count = ref.layout.size();

  CommandOutcome out;
  const auto& dir = cfg.output_dir;
  out.files = {dir / "reference_layout.csv", dir / "reference_excitations.csv",
               dir / "reference_pattern.csv", dir / "reference_metrics.json"};
  write_layout_csv(out.files[0], ref.layout);
  write_excitations_csv(out.files[1], ref.excitations.weights);
  write_pattern_csv(out.files[2], fine);
  json extra = {{"taper", cfg.taper.kind == TaperKind::kChebyshev ? "chebyshev" : "taylor"},
                {"design_sll_db", cfg.taper.sll_db},
                {"M", cfg.M},
                {"N", cfg.N},
                {"spacing", cfg.spacing}};
  write_metrics_json(out.files[3], m, "reference", extra.dump());
  log << "reference " << cfg.M << "x" << cfg.N << " sll_db=" << m.sll_db << '\n';
  return out;
}

CommandOutcome cmd_synthesize(const ExperimentConfig& cfg, std::ostream& log) {
  const auto setup = make_setup(cfg);
  const auto& ref = setup.reference;
  const auto sol = run_method(cfg.method, ref.pattern, ref.layout, cfg.solver);
  const auto m = measure(sol.support, ref.pattern, setup.measure_grid, cfg.M, cfg.N);

  CommandOutcome out;
  out.ok = spacing_ok(m, cfg.solver.d_min);
  const auto& dir = cfg.output_dir;
  out.files = {dir / "solution.csv", dir / "pattern.csv", dir / "residual_history.csv",
               dir / "metrics.json"};
  write_solution_csv(out.files[0], sol.support);
  write_pattern_csv(out.files[1], evaluate_pattern(sol.support.positions, sol.support.weights,
                                                   setup.measure_grid));
  write_residual_csv(out.files[2], sol.residual_history);
  const Pattern fine_ref = evaluate_pattern(ref.layout, ref.excitations, setup.measure_grid);
  json extra = {{"method", std::string(to_string(cfg.method))},
                {"status", to_string(sol.status)},
                {"spacing_ok", out.ok},
                {"reference_sll_db", null_if_nan(sll_or_nan(fine_ref))},
                {"final_residual", sol.final_residual()},
                {"wall_clock_seconds", sol.timings.total},
                {"timings", timings_json(sol.timings)},
                {"config", json::parse(config_to_json(cfg))}};
  write_metrics_json(out.files[3], m, "synthesis", extra.dump());
  log << to_string(cfg.method) << " t=" << m.element_count << " nmse=" << m.nmse
      << " sll_db=" << m.sll_db << " min_spacing=" << m.min_spacing
      << " seconds=" << sol.timings.total << (out.ok ? "" : " SPACING VIOLATED") << '\n';
  return out;
}

CommandOutcome cmd_convergence(const ExperimentConfig& cfg, std::ostream& log) {
  const auto setup = make_setup(cfg);
  const auto& ref = setup.reference;
  CommandOutcome out;
  const auto path = cfg.output_dir / "convergence.csv";
  auto csv = open_csv(path, "method,protocol,J,nmse,sll_db,min_spacing,seconds");
  auto emit = [&](Method method, const char* protocol, int J, const SupportSet& support,
                  double seconds) {
    const auto m = measure(support, ref.pattern, setup.measure_grid, cfg.M, cfg.N);
    const bool ok = spacing_ok(m, cfg.solver.d_min);
    out.ok = out.ok && ok;
    csv << to_string(method) << ',' << protocol << ',' << J << ',' << format_real(m.nmse) << ','
        << format_real(m.sll_db) << ',' << format_real(m.min_spacing) << ','
        << format_real(seconds) << '\n';
    csv.flush();
    log << to_string(method) << ' ' << protocol << " J=" << J << " nmse=" << m.nmse
        << (ok ? "" : " SPACING VIOLATED") << '\n';
  };
  for (Method method : cfg.convergence_methods) {
    // Separate runs with J refinement iterations after every atom addition.
    for (int J = 0; J <= cfg.convergence_j_max; ++J) {
      SolverConfig s = cfg.solver;
      s.refine_iters = J;
      const auto sol = run_method(method, ref.pattern, ref.layout, s);
      emit(method, "rerun", J, sol.support, sol.timings.total);
    }
    // One refinement pass over the final grid-only support, measured after
    // each iteration.
    SolverConfig s = cfg.solver;
    s.refine_iters = 0;
    const auto start = std::chrono::steady_clock::now();
    auto sol = run_method(method, ref.pattern, ref.layout, s);
    emit(method, "final", 0, sol.support,
         std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    s.refine_iters = 1;
    for (int J = 1; J <= cfg.convergence_j_max; ++J) {
      sol.support = refine(sol.support, ref.pattern, s, ref.layout.aperture()).support;
      emit(method, "final", J, sol.support,
           std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    }
  }
  close_csv(csv, path);
  out.files = {path};
  return out;
}

CommandOutcome cmd_sweep(const ExperimentConfig& cfg, std::ostream& log) {
  const auto setup = make_setup(cfg);
  const auto& ref = setup.reference;
  CommandOutcome out;
  const auto path = cfg.output_dir / "sweep.csv";
  auto csv = open_csv(path, "method,t,chi,nmse,sll_db,min_spacing,spacing_ok,seconds");
  for (int t : cfg.sweep_t) {
    for (Method method : cfg.sweep_methods) {
      SolverConfig s = cfg.solver;
      s.target_sparsity = t;
      s.tolerance.reset();
      const auto sol = run_method(method, ref.pattern, ref.layout, s);
      const auto m = measure(sol.support, ref.pattern, setup.measure_grid, cfg.M, cfg.N);
      const bool ok = spacing_ok(m, s.d_min);
      out.ok = out.ok && ok;
      csv << to_string(method) << ',' << t << ',' << format_real(m.sparsity_rate) << ','
          << format_real(m.nmse) << ',' << format_real(m.sll_db) << ','
          << format_real(m.min_spacing) << ',' << (ok ? 1 : 0) << ','
          << format_real(sol.timings.total) << '\n';
      csv.flush();
      log << to_string(method) << " t=" << t << " nmse=" << m.nmse << " seconds="
          << sol.timings.total << (ok ? "" : " SPACING VIOLATED") << '\n';
    }
  }
  close_csv(csv, path);
  out.files = {path};
  return out;
}

CommandOutcome cmd_bench(const ExperimentConfig& cfg, std::ostream& log) {
  const auto setup = make_setup(cfg);
  const auto& ref = setup.reference;
  const int f = cfg.bench_dense_factor;
  const auto dense = ArrayLayout::uniform(cfg.M * f, cfg.N * f, cfg.spacing / f);

  struct Case {
    std::string name;
    Method method;
    const ArrayLayout* layout;
  };
  const std::vector<Case> cases = {
      {"omp-offgrid", Method::kOmpOffgrid, &ref.layout},
      {"laomp-offgrid", Method::kLaompOffgrid, &ref.layout},
      {"omp-dense", Method::kOmp, &dense},
  };

  CommandOutcome out;
  const auto csv_path = cfg.output_dir / "bench.csv";
  auto csv = open_csv(csv_path,
                      "case,candidates,repeat,total,dictionary,match,least_squares,lookahead,"
                      "refine,nmse");
  json report;
  report["schema_version"] = kMetricsSchemaVersion;
  report["dense_factor"] = f;
  report["config"] = json::parse(config_to_json(cfg));
  json runs = json::object();
  bool deterministic = true;
  for (const auto& c : cases) {
    std::vector<SynthesisSolution> sols;
    double best = std::numeric_limits<double>::infinity();
    std::string failure;
    for (int r = 0; r < cfg.bench_repeats && failure.empty(); ++r) {
      const auto start = std::chrono::steady_clock::now();
      try {
        sols.push_back(run_method(c.method, ref.pattern, *c.layout, cfg.solver));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kInfeasibleSelection) throw;
        failure = e.what();
        best = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        log << c.name << " repeat=" << r << " failed after " << best << " s: " << failure << '\n';
        break;
      }
      const auto& sol = sols.back();
      const auto m = measure(sol.support, ref.pattern, setup.measure_grid, cfg.M, cfg.N);
      out.ok = out.ok && spacing_ok(m, cfg.solver.d_min);
      const auto& t = sol.timings;
      best = std::min(best, t.total);
      csv << c.name << ',' << c.layout->size() << ',' << r << ',' << format_real(t.total) << ','
          << format_real(t.dictionary) << ',' << format_real(t.match) << ','
          << format_real(t.least_squares) << ',' << format_real(t.lookahead) << ','
          << format_real(t.refine) << ',' << format_real(m.nmse) << '\n';
      log << c.name << " repeat=" << r << " seconds=" << t.total << " nmse=" << m.nmse << '\n';
    }
    json run = {{"candidates", c.layout->size()},
                {"completed", failure.empty()},
                {"best_seconds", best}};
    if (failure.empty()) {
      bool same = true;
      for (std::size_t r = 1; r < sols.size(); ++r) {
        same = same && same_support(sols[0].support, sols[r].support);
      }
      deterministic = deterministic && same;
      run["deterministic"] = same;
      run["timings"] = timings_json(sols.front().timings);
    } else {
      run["error"] = failure;
      out.ok = false;
      out.problems.push_back(c.name + ": " + failure);
    }
    runs[c.name] = run;
  }
  close_csv(csv, csv_path);
  report["runs"] = runs;
  report["deterministic"] = deterministic;
  report["dense_completed"] = runs["omp-dense"]["completed"];
  report["offgrid_omp_faster_than_dense_omp"] =
      runs["omp-offgrid"]["best_seconds"].get<double>() <
      runs["omp-dense"]["best_seconds"].get<double>();

  const auto json_path = cfg.output_dir / "bench.json";
  std::ofstream js(json_path);
  js << report.dump(2) << '\n';
  if (!js) throw Error(ErrorCode::kIo, "write failed: " + json_path.string());
  if (!deterministic) {
    out.ok = false;
    out.problems.push_back("repeated runs produced different solutions");
  }
  out.files = {csv_path, json_path};
  return out;
}

}  // namespace sparse_array
