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

#include "sparse_array/metrics.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "sparse_array/error.hpp"
#include "sparse_array/sparse_solvers.hpp"

namespace sparse_array {

double nmse(const Pattern& synth, const Pattern& desired) {
  if (!(synth.grid == desired.grid)) {
    throw Error(ErrorCode::kInvalidArgument, "patterns are sampled on different grids");
  }
  const double energy = desired.values.squaredNorm();
  if (!(energy > 0.0)) throw Error(ErrorCode::kInvalidArgument, "desired pattern has zero energy");
  return (synth.values - desired.values).squaredNorm() / energy;
}

double sparsity_rate(std::size_t t, int M, int N) {
  if (M < 1 || N < 1) throw Error(ErrorCode::kInvalidArgument, "M and N must be >= 1");
  const auto total = static_cast<std::size_t>(M) * static_cast<std::size_t>(N);
  if (t < 1 || t > total) {
    throw Error(ErrorCode::kInvalidArgument, "element count must lie in [1, M N]");
  }
  return static_cast<double>(t) / static_cast<double>(total);
}

double sidelobe_level(const Pattern& p) {
  const Eigen::Index P = p.grid.P();
  const Eigen::Index Q = p.grid.Q();
  if (P < 3 || Q < 3) {
    throw Error(ErrorCode::kInvalidArgument, "sidelobe measurement needs at least a 3 x 3 grid");
  }
  const RVector mag = p.values.cwiseAbs();
  Eigen::Index peak_idx = 0;
  const double peak = mag.maxCoeff(&peak_idx);
  if (!(peak > 0.0) || peak - mag.minCoeff() <= 1e-12 * peak) {
    throw Error(ErrorCode::kInvalidArgument, "pattern is constant; no mainlobe can be delimited");
  }

  std::vector<char> in_main(static_cast<std::size_t>(mag.size()), 0);
  std::vector<Eigen::Index> stack{peak_idx};
  in_main[peak_idx] = 1;
  while (!stack.empty()) {
    const Eigen::Index i = stack.back();
    stack.pop_back();
    const Eigen::Index row = i / Q, col = i % Q;
    const Eigen::Index nbrs[4][2] = {{row - 1, col}, {row + 1, col}, {row, col - 1}, {row, col + 1}};
    for (const auto& n : nbrs) {
      if (n[0] < 0 || n[0] >= P || n[1] < 0 || n[1] >= Q) continue;
      const Eigen::Index j = n[0] * Q + n[1];
      if (!in_main[j] && mag[j] <= mag[i]) {
        in_main[j] = 1;
        stack.push_back(j);
      }
    }
  }

  double side = -1.0;
  for (Eigen::Index i = 0; i < mag.size(); ++i) {
    if (!in_main[i]) side = std::max(side, mag[i]);
  }
  if (side < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "pattern has no sidelobe region on this grid");
  }
  if (side == 0.0) return -std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(side / peak);
}

SpacingCheck verify_spacing(const ArrayLayout& layout, double d_min) {
  SpacingCheck out;
  out.min_dist = std::numeric_limits<double>::infinity();
  const auto& pos = layout.positions();
  for (std::size_t i = 0; i < pos.size(); ++i) {
    for (std::size_t j = i + 1; j < pos.size(); ++j) {
      const double d = distance(pos[i], pos[j]);
      if (d < out.min_dist) {
        out.min_dist = d;
        if (d < d_min - kSpacingSlack) out.violating_pair = std::make_pair(i, j);
      }
    }
  }
  out.ok = !out.violating_pair.has_value();
  return out;
}

}  // namespace sparse_array
