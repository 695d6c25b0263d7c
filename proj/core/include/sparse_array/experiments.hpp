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

// Experiment drivers behind the command-line tool. Each command writes its
// files under ExperimentConfig::output_dir and reports whether every run
// completed with a spacing-feasible layout.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "sparse_array/io.hpp"

namespace sparse_array {

/// Metrics of a synthesized support. NMSE is taken on the desired pattern's
/// grid, SLL on `measure_grid`. Undefined values are NaN.
MetricsReport measure(const SupportSet& support, const Pattern& desired,
                      const ObservationGrid& measure_grid, int M, int N);

struct CommandOutcome {
  bool ok = true;  // false if a run did not complete or a layout violates the spacing
  std::vector<std::filesystem::path> files;
  std::vector<std::string> problems;
};

/// reference_layout.csv, reference_excitations.csv, reference_pattern.csv,
/// reference_metrics.json
CommandOutcome cmd_reference(const ExperimentConfig& cfg, std::ostream& log);

/// solution.csv, pattern.csv, residual_history.csv, metrics.json
CommandOutcome cmd_synthesize(const ExperimentConfig& cfg, std::ostream& log);

/// convergence.csv, J = 0 .. convergence_j_max per method under two protocols:
/// "rerun" repeats the synthesis with J refinement iterations per addition;
/// "final" refines the grid-only solution once, reporting each iteration.
CommandOutcome cmd_convergence(const ExperimentConfig& cfg, std::ostream& log);

/// sweep.csv with one row per (method, t).
CommandOutcome cmd_sweep(const ExperimentConfig& cfg, std::ostream& log);

/// bench.csv and bench.json: wall clock per method and phase, a grid-only
/// OMP run on a denser candidate grid, and a repeat-run determinism check.
/// A case that runs out of feasible atoms is reported as not completed.
CommandOutcome cmd_bench(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace sparse_array
