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

#include "sparse_array/reference_patterns.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sparse_array/error.hpp"

namespace sparse_array {

namespace {

void normalise_peak(std::vector<double>& w) {
  const double peak = *std::max_element(w.begin(), w.end());
  for (double& x : w) x /= peak;
}

// Chebyshev polynomial of the given order evaluated anywhere on the real line.
double chebyshev(double order, double x) {
  if (x > 1.0) return std::cosh(order * std::acosh(x));
  if (x < -1.0) {
    const double sign = std::fmod(order, 2.0) == 0.0 ? 1.0 : -1.0;
    return sign * std::cosh(order * std::acosh(-x));
  }
  return std::cos(order * std::acos(x));
}

}  // namespace

void TaperSpec::validate() const {
  if (!(sll_db < 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "design sidelobe level must be negative dB");
  }
  if (kind == TaperKind::kTaylor && nbar < 2) {
    throw Error(ErrorCode::kInvalidArgument, "Taylor nbar must be >= 2");
  }
}

std::vector<double> chebyshev_taper(int n, double sll_db) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "taper length must be >= 1");
  if (!(sll_db < 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "design sidelobe level must be negative dB");
  }
  if (n == 1) return {1.0};

  // Sample the Chebyshev response at the n DFT frequencies and invert; the
  // half-sample phase shift for even n centres the weights.
  const double order = n - 1.0;
  const double ratio = std::pow(10.0, -sll_db / 20.0);
  const double x0 = std::cosh(std::acosh(ratio) / order);

  std::vector<Complex> spectrum(n);
  for (int k = 0; k < n; ++k) {
    const double p = chebyshev(order, x0 * std::cos(std::numbers::pi * k / n));
    spectrum[k] = (n % 2 == 0) ? std::polar(p, std::numbers::pi * k / n) : Complex(p, 0.0);
  }
  std::vector<double> dft(n);
  for (int m = 0; m < n; ++m) {
    Complex acc = 0.0;
    for (int k = 0; k < n; ++k) {
      acc += spectrum[k] * std::polar(1.0, -2.0 * std::numbers::pi * k * m / n);
    }
    dft[m] = acc.real();
  }

  std::vector<double> w;
  w.reserve(n);
  if (n % 2 == 1) {
    const int half = (n + 1) / 2;
    for (int m = half - 1; m >= 1; --m) w.push_back(dft[m]);
    for (int m = 0; m < half; ++m) w.push_back(dft[m]);
  } else {
    const int half = n / 2 + 1;
    for (int m = half - 1; m >= 1; --m) w.push_back(dft[m]);
    for (int m = 1; m < half; ++m) w.push_back(dft[m]);
  }
  normalise_peak(w);
  return w;
}

std::vector<double> taylor_taper(int n, double sll_db, int nbar) {
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "Taylor taper needs n >= 2");
  if (!(sll_db < 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "design sidelobe level must be negative dB");
  }
  if (nbar < 2 || nbar > n / 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "Taylor nbar must satisfy 2 <= nbar <= n/2 (got " + std::to_string(nbar) + ")");
  }

  // Discrete n-bar distribution: the first nbar - 1 pattern zeros are the
  // Dolph-Chebyshev zeros dilated so that zero nbar lands on the uniform
  // array's zero; the remaining zeros are the uniform array's. Weights are
  // the coefficients of the resulting polynomial in exp(j psi).
  const double ratio = std::pow(10.0, -sll_db / 20.0);
  const double x0 = std::cosh(std::acosh(ratio) / (n - 1.0));
  auto chebyshev_zero = [&](int p) {
    return 2.0 * std::acos(std::cos((2.0 * p - 1.0) * std::numbers::pi / (2.0 * (n - 1))) / x0);
  };
  const double sigma = (2.0 * std::numbers::pi * nbar / n) / chebyshev_zero(nbar);

  std::vector<Complex> zeros;
  for (int p = 1; 2 * p < n; ++p) {
    const double psi =
        p < nbar ? sigma * chebyshev_zero(p) : 2.0 * std::numbers::pi * p / n;
    zeros.push_back(std::polar(1.0, psi));
    zeros.push_back(std::polar(1.0, -psi));
  }
  if (n % 2 == 0) zeros.emplace_back(-1.0, 0.0);

  std::vector<Complex> poly{1.0};
  for (const Complex& z : zeros) {
    std::vector<Complex> next(poly.size() + 1, 0.0);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      next[i] += poly[i];
      next[i + 1] -= z * poly[i];
    }
    poly = std::move(next);
  }
  std::vector<double> w(n);
  for (int k = 0; k < n; ++k) w[k] = poly[k].real();
  normalise_peak(w);
  return w;
}

std::vector<double> make_taper(int n, const TaperSpec& spec) {
  spec.validate();
  if (n == 1) return {1.0};
  switch (spec.kind) {
    case TaperKind::kChebyshev: return chebyshev_taper(n, spec.sll_db);
    case TaperKind::kTaylor: return taylor_taper(n, spec.sll_db, spec.nbar);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown taper kind");
}

ReferenceArray reference_pattern(int M, int N, double spacing, const TaperSpec& taper,
                                 const ObservationGrid& grid) {
  auto layout = ArrayLayout::uniform(M, N, spacing);
  const auto cm = make_taper(M, taper);
  const auto cn = make_taper(N, taper);

  CVector w(static_cast<Eigen::Index>(M) * N);
  for (int m = 0; m < M; ++m) {
    for (int n = 0; n < N; ++n) w[m * N + n] = cm[m] * cn[n];
  }
  w /= w.cwiseAbs().maxCoeff();

  auto pattern = evaluate_pattern(layout, Excitations{w}, grid);
  return {std::move(layout), Excitations{std::move(w)}, std::move(pattern)};
}

}  // namespace sparse_array
