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

#include <cstddef>
#include <optional>
#include <utility>

#include "sparse_array/array_model.hpp"

namespace sparse_array {

struct MetricsReport {
  double nmse = 0.0;
  double sparsity_rate = 0.0;
  double sll_db = 0.0;
  double min_spacing = 0.0;
  std::size_t element_count = 0;
};

/// sum |S - S_d|^2 / sum |S_d|^2 over the grid. On a uniform grid this is the
/// midpoint-rule ratio of the two integrals over [-1, 1]^2.
double nmse(const Pattern& synth, const Pattern& desired);

/// t / (M N).
double sparsity_rate(std::size_t t, int M, int N);

/// Peak sidelobe level in dB relative to the pattern maximum.
///
/// The mainlobe is the set of samples reachable from the peak through
/// 4-connected grid steps along which |S| never increases; the result is the
/// largest |S| outside that set.
double sidelobe_level(const Pattern& p);

struct SpacingCheck {
  bool ok = true;
  double min_dist = 0.0;  // +inf for fewer than two elements
  std::optional<std::pair<std::size_t, std::size_t>> violating_pair;
};

SpacingCheck verify_spacing(const ArrayLayout& layout, double d_min);

}  // namespace sparse_array
