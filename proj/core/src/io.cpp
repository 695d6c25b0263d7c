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

#include "sparse_array/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sparse_array/error.hpp"

namespace sparse_array {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

[[noreturn]] void io_error(const std::string& what) { throw Error(ErrorCode::kIo, what); }

[[noreturn]] void bad_config(const std::string& what) {
  throw Error(ErrorCode::kInvalidArgument, "config: " + what);
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) io_error("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path);
  if (!out) io_error("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) io_error("write failed: " + path.string());
}

// Reads a CSV with the given header; returns the data rows as doubles.
std::vector<std::vector<double>> read_csv(const fs::path& path,
                                          const std::vector<std::string>& header) {
  std::ifstream in(path);
  if (!in) io_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) io_error(path.string() + ": missing header");
  std::vector<std::string> cols;
  {
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cols.push_back(c);
  }
  if (cols.size() < header.size() || !std::equal(header.begin(), header.end(), cols.begin())) {
    io_error(path.string() + ": unexpected header '" + line + "'");
  }
  std::vector<std::vector<double>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0') {
        io_error(path.string() + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
      row.push_back(v);
    }
    if (row.size() < header.size()) {
      io_error(path.string() + ":" + std::to_string(lineno) + ": too few columns");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

json method_list(const std::vector<Method>& ms) {
  json a = json::array();
  for (Method m : ms) a.push_back(std::string(to_string(m)));
  return a;
}

std::vector<Method> parse_methods(const json& j) {
  std::vector<Method> out;
  for (const auto& e : j) out.push_back(parse_method(e.get<std::string>()));
  return out;
}

std::string taper_name(TaperKind k) { return k == TaperKind::kChebyshev ? "chebyshev" : "taylor"; }

TaperKind parse_taper(const std::string& s) {
  if (s == "chebyshev" || s == "dolph") return TaperKind::kChebyshev;
  if (s == "taylor") return TaperKind::kTaylor;
  bad_config("unknown taper '" + s + "'");
}

json real_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::kOmp:
      return "omp";
    case Method::kOmpOffgrid:
      return "omp-offgrid";
    case Method::kLaomp:
      return "laomp";
    case Method::kLaompOffgrid:
      return "laomp-offgrid";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::kOmp, Method::kOmpOffgrid, Method::kLaomp, Method::kLaompOffgrid}) {
    if (to_string(m) == name) return m;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown method '" + std::string(name) + "'");
}

bool is_offgrid(Method m) noexcept { return m == Method::kOmpOffgrid || m == Method::kLaompOffgrid; }
bool is_lookahead(Method m) noexcept { return m == Method::kLaomp || m == Method::kLaompOffgrid; }

SynthesisSolution run_method(Method m, const Pattern& desired, const ArrayLayout& layout,
                             const SolverConfig& cfg) {
  SolverConfig c = cfg;
  if (!is_offgrid(m)) c.refine_iters = 0;
  const bool refine = is_offgrid(m) && c.refine_iters > 0;
  return is_lookahead(m) ? laomp_synthesize(desired, layout, desired.grid, c, refine)
                         : omp_synthesize(desired, layout, desired.grid, c, refine);
}

SolverConfig ExperimentConfig::default_solver() {
  SolverConfig s;
  s.target_sparsity = 160;
  s.d_min = 0.5;
  s.lookahead = 15;
  s.refine_iters = 10;
  return s;
}

void ExperimentConfig::validate() const {
  taper.validate();
  if (M < 1 || N < 1) bad_config("M and N must be positive");
  if (!(spacing > 0.0) || !std::isfinite(spacing)) bad_config("spacing must be positive");
  for (int g : {grid_P, grid_Q, measure_P, measure_Q}) {
    if (g < 3 || g % 2 == 0) bad_config("grid sizes must be odd and at least 3");
  }
  solver.validate();
  if (is_lookahead(method) && solver.lookahead < 1) bad_config("look-ahead methods need L >= 1");
  if (is_offgrid(method) && solver.refine_iters < 1) bad_config("off-grid methods need J >= 1");
  for (int t : sweep_t) {
    if (t < 1) bad_config("sweep sparsities must be positive");
  }
  if (convergence_j_max < 0) bad_config("convergence.j_max must be non-negative");
  if (bench_dense_factor < 1) bad_config("bench.dense_factor must be positive");
  if (bench_repeats < 1) bad_config("bench.repeats must be positive");
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["reference"] = {{"taper", taper_name(c.taper.kind)},
                    {"sll_db", c.taper.sll_db},
                    {"nbar", c.taper.nbar},
                    {"M", c.M},
                    {"N", c.N},
                    {"spacing", c.spacing}};
  j["grid"] = {{"P", c.grid_P}, {"Q", c.grid_Q}};
  j["measurement_grid"] = {{"P", c.measure_P}, {"Q", c.measure_Q}};
  const auto& s = c.solver;
  j["solver"] = {{"method", std::string(to_string(c.method))},
                 {"sparsity", s.target_sparsity ? json(*s.target_sparsity) : json(nullptr)},
                 {"tolerance", s.tolerance ? json(*s.tolerance) : json(nullptr)},
                 {"dmin", s.d_min},
                 {"lookahead", s.lookahead},
                 {"lookahead_depth", s.lookahead_depth},
                 {"refine_iters", s.refine_iters},
                 {"kappa", s.learning_rate},
                 {"threads", s.threads}};
  j["sweep"] = {{"t", c.sweep_t}, {"methods", method_list(c.sweep_methods)}};
  j["convergence"] = {{"j_max", c.convergence_j_max},
                      {"methods", method_list(c.convergence_methods)}};
  j["bench"] = {{"dense_factor", c.bench_dense_factor}, {"repeats", c.bench_repeats}};
  j["output_dir"] = c.output_dir.string();
  j["seed"] = c.seed;
  return j.dump(2);
}

ExperimentConfig config_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    bad_config(e.what());
  }
  if (!j.is_object()) bad_config("top level must be an object");

  ExperimentConfig c;
  try {
    if (auto it = j.find("reference"); it != j.end()) {
      const auto& r = *it;
      if (r.contains("taper")) c.taper.kind = parse_taper(r["taper"].get<std::string>());
      c.taper.sll_db = r.value("sll_db", c.taper.sll_db);
      c.taper.nbar = r.value("nbar", c.taper.nbar);
      c.M = r.value("M", c.M);
      c.N = r.value("N", c.N);
      c.spacing = r.value("spacing", c.spacing);
    }
    if (auto it = j.find("grid"); it != j.end()) {
      c.grid_P = it->value("P", c.grid_P);
      c.grid_Q = it->value("Q", c.grid_Q);
    }
    if (auto it = j.find("measurement_grid"); it != j.end()) {
      c.measure_P = it->value("P", c.measure_P);
      c.measure_Q = it->value("Q", c.measure_Q);
    }
    if (auto it = j.find("solver"); it != j.end()) {
      const auto& s = *it;
      auto& o = c.solver;
      if (s.contains("method")) c.method = parse_method(s["method"].get<std::string>());
      if (s.contains("sparsity")) {
        o.target_sparsity = s["sparsity"].is_null() ? std::nullopt
                                                    : std::optional<int>(s["sparsity"].get<int>());
      }
      if (s.contains("tolerance")) {
        o.tolerance = s["tolerance"].is_null()
                          ? std::nullopt
                          : std::optional<double>(s["tolerance"].get<double>());
      }
      o.d_min = s.value("dmin", o.d_min);
      o.lookahead = s.value("lookahead", o.lookahead);
      o.lookahead_depth = s.value("lookahead_depth", o.lookahead_depth);
      o.refine_iters = s.value("refine_iters", o.refine_iters);
      o.learning_rate = s.value("kappa", o.learning_rate);
      o.threads = s.value("threads", o.threads);
    }
    if (auto it = j.find("sweep"); it != j.end()) {
      if (it->contains("t")) c.sweep_t = (*it)["t"].get<std::vector<int>>();
      if (it->contains("methods")) c.sweep_methods = parse_methods((*it)["methods"]);
    }
    if (auto it = j.find("convergence"); it != j.end()) {
      c.convergence_j_max = it->value("j_max", c.convergence_j_max);
      if (it->contains("methods")) c.convergence_methods = parse_methods((*it)["methods"]);
    }
    if (auto it = j.find("bench"); it != j.end()) {
      c.bench_dense_factor = it->value("dense_factor", c.bench_dense_factor);
      c.bench_repeats = it->value("repeats", c.bench_repeats);
    }
    if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
    c.seed = j.value("seed", c.seed);
  } catch (const json::exception& e) {
    bad_config(e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) io_error("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_layout_csv(const fs::path& path, const ArrayLayout& layout) {
  auto out = open_out(path);
  out << "index,x,y\n";
  for (std::size_t i = 0; i < layout.size(); ++i) {
    out << i << ',' << format_real(layout[i].x) << ',' << format_real(layout[i].y) << '\n';
  }
  finish(out, path);
}

std::vector<Point2> read_layout_csv(const fs::path& path) {
  std::vector<Point2> out;
  for (const auto& r : read_csv(path, {"index", "x", "y"})) out.push_back({r[1], r[2]});
  return out;
}

void write_excitations_csv(const fs::path& path, const CVector& weights) {
  auto out = open_out(path);
  out << "index,re,im\n";
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    out << i << ',' << format_real(weights[i].real()) << ',' << format_real(weights[i].imag())
        << '\n';
  }
  finish(out, path);
}

CVector read_excitations_csv(const fs::path& path) {
  const auto rows = read_csv(path, {"index", "re", "im"});
  CVector w(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    w[static_cast<Eigen::Index>(i)] = Complex(rows[i][1], rows[i][2]);
  }
  return w;
}

void write_solution_csv(const fs::path& path, const SupportSet& support) {
  const double peak = support.weights.size() ? support.weights.cwiseAbs().maxCoeff() : 0.0;
  auto out = open_out(path);
  out << "x,y,re_w,im_w,abs_w_norm\n";
  for (std::size_t k = 0; k < support.size(); ++k) {
    const Complex w = support.weights[static_cast<Eigen::Index>(k)];
    out << format_real(support.positions[k].x) << ',' << format_real(support.positions[k].y)
        << ',' << format_real(w.real()) << ',' << format_real(w.imag()) << ','
        << format_real(peak > 0.0 ? std::abs(w) / peak : 0.0) << '\n';
  }
  finish(out, path);
}

void write_pattern_csv(const fs::path& path, const Pattern& pattern) {
  const double peak = pattern.values.size() ? pattern.values.cwiseAbs().maxCoeff() : 0.0;
  auto out = open_out(path);
  out << "u,v,re,im,mag_db\n";
  const auto& g = pattern.grid;
  for (Eigen::Index p = 0; p < g.P(); ++p) {
    for (Eigen::Index q = 0; q < g.Q(); ++q) {
      const Eigen::Index i = p * g.Q() + q;
      const Complex s = pattern.values[i];
      const double db = peak > 0.0 ? 20.0 * std::log10(std::abs(s) / peak) : 0.0;
      out << format_real(g.u(i)) << ',' << format_real(g.v(i)) << ',' << format_real(s.real())
          << ',' << format_real(s.imag()) << ',' << (std::isfinite(db) ? format_real(db) : "-inf")
          << '\n';
    }
  }
  finish(out, path);
}

Pattern read_pattern_csv(const fs::path& path) {
  const auto rows = read_csv(path, {"u", "v", "re", "im"});
  if (rows.empty()) io_error(path.string() + ": no samples");
  // Rows are in grid order: u is constant over each run of Q rows.
  std::vector<double> us, vs;
  for (const auto& r : rows) {
    if (us.empty() || r[0] != us.back()) us.push_back(r[0]);
    if (us.size() == 1) vs.push_back(r[1]);
  }
  if (us.size() * vs.size() != rows.size()) io_error(path.string() + ": not a full u-v grid");
  RVector u = Eigen::Map<const RVector>(us.data(), static_cast<Eigen::Index>(us.size()));
  RVector v = Eigen::Map<const RVector>(vs.data(), static_cast<Eigen::Index>(vs.size()));
  ObservationGrid grid(u, v);
  CVector values(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    if (rows[i][0] != grid.u(k) || rows[i][1] != grid.v(k)) {
      io_error(path.string() + ": samples are not in grid order");
    }
    values[static_cast<Eigen::Index>(i)] = Complex(rows[i][2], rows[i][3]);
  }
  return Pattern(std::move(values), std::move(grid));
}

void write_residual_csv(const fs::path& path, const std::vector<double>& history) {
  auto out = open_out(path);
  out << "iteration,residual_norm\n";
  for (std::size_t i = 0; i < history.size(); ++i) {
    out << i + 1 << ',' << format_real(history[i]) << '\n';
  }
  finish(out, path);
}

void write_metrics_json(const fs::path& path, const MetricsReport& m, std::string_view kind,
                        std::string_view extra_json) {
  json j;
  j["schema_version"] = kMetricsSchemaVersion;
  j["kind"] = std::string(kind);
  j["nmse"] = real_or_null(m.nmse);
  j["sparsity_rate"] = real_or_null(m.sparsity_rate);
  j["sll_db"] = real_or_null(m.sll_db);
  j["min_spacing"] = real_or_null(m.min_spacing);
  j["element_count"] = m.element_count;
  json extra = json::parse(extra_json);
  if (!extra.is_object()) throw Error(ErrorCode::kInvalidArgument, "extra metrics must be an object");
  for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  finish(out, path);
}

}  // namespace sparse_array
