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

// Experiment configuration and the on-disk formats of the command-line
// driver.
//
// CSV files are UTF-8 with a header row, ',' separators and '.' decimals.
// Reals are written with 17 significant digits so that reading a file back
// reproduces every double bit for bit.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sparse_array/array_model.hpp"
#include "sparse_array/metrics.hpp"
#include "sparse_array/reference_patterns.hpp"
#include "sparse_array/sparse_solvers.hpp"

namespace sparse_array {

enum class Method { kOmp, kOmpOffgrid, kLaomp, kLaompOffgrid };

std::string_view to_string(Method m) noexcept;
Method parse_method(std::string_view name);
bool is_offgrid(Method m) noexcept;
bool is_lookahead(Method m) noexcept;

/// Runs `m` on the given candidate layout.
SynthesisSolution run_method(Method m, const Pattern& desired, const ArrayLayout& layout,
                             const SolverConfig& cfg);

struct ExperimentConfig {
  TaperSpec taper{TaperKind::kChebyshev, -30.0, 5};
  int M = 16;
  int N = 16;
  double spacing = 0.5;
  int grid_P = 65;
  int grid_Q = 65;
  int measure_P = 129;
  int measure_Q = 129;

  SolverConfig solver = default_solver();
  Method method = Method::kLaompOffgrid;

  std::vector<int> sweep_t = {48, 64, 80, 96, 112, 128, 144, 160, 176, 192};
  std::vector<Method> sweep_methods = {Method::kOmp, Method::kOmpOffgrid, Method::kLaompOffgrid};
  int convergence_j_max = 10;
  std::vector<Method> convergence_methods = {Method::kOmpOffgrid, Method::kLaompOffgrid};
  int bench_dense_factor = 2;  // candidate density multiplier per axis for the grid-only run
  int bench_repeats = 2;

  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 1;

  static SolverConfig default_solver();
  void validate() const;
};

ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(std::string_view text);

std::string format_real(double x);

// -- CSV ---------------------------------------------------------------------

/// index,x,y
void write_layout_csv(const std::filesystem::path& path, const ArrayLayout& layout);
std::vector<Point2> read_layout_csv(const std::filesystem::path& path);

/// index,re,im
void write_excitations_csv(const std::filesystem::path& path, const CVector& weights);
CVector read_excitations_csv(const std::filesystem::path& path);

/// x,y,re_w,im_w,abs_w_norm (|w| divided by the largest |w|)
void write_solution_csv(const std::filesystem::path& path, const SupportSet& support);

/// u,v,re,im,mag_db (|S| in dB relative to the pattern peak), grid order.
void write_pattern_csv(const std::filesystem::path& path, const Pattern& pattern);
Pattern read_pattern_csv(const std::filesystem::path& path);

/// iteration,residual_norm
void write_residual_csv(const std::filesystem::path& path, const std::vector<double>& history);

/// Metrics JSON; `extra` holds additional top-level members as a JSON object text.
void write_metrics_json(const std::filesystem::path& path, const MetricsReport& m,
                        std::string_view kind, std::string_view extra_json = "{}");

inline constexpr int kMetricsSchemaVersion = 1;

}  // namespace sparse_array
