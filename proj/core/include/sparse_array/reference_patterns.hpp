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

#include <vector>

#include "sparse_array/array_model.hpp"

namespace sparse_array {

enum class TaperKind { kChebyshev, kTaylor };

struct TaperSpec {
  TaperKind kind = TaperKind::kChebyshev;
  double sll_db = -30.0;  // design sidelobe level, must be negative
  int nbar = 5;           // Taylor only

  void validate() const;
};

/// Dolph-Chebyshev weights for an n-element line array, peak normalised to 1.
std::vector<double> chebyshev_taper(int n, double sll_db);

/// Discrete Taylor n-bar (Villeneuve) weights, peak normalised to 1.
/// Requires 2 <= nbar <= n / 2.
std::vector<double> taylor_taper(int n, double sll_db, int nbar);

std::vector<double> make_taper(int n, const TaperSpec& spec);

struct ReferenceArray {
  ArrayLayout layout;
  Excitations excitations;
  Pattern pattern;
};

/// M x N uniform planar array with separable weights w_mn = c_m * c_n.
///
/// A single-element axis gets weight 1, so M = N = 1 yields an isotropic
/// pattern.
ReferenceArray reference_pattern(int M, int N, double spacing, const TaperSpec& taper,
                                 const ObservationGrid& grid);

}  // namespace sparse_array
