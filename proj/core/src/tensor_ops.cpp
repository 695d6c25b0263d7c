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

#include "sparse_array/detail/tensor_ops.hpp"

#include <numbers>

namespace sparse_array::detail {

namespace {

CMatrix axis_phasors(std::span<const Point2> positions, const RVector& axis, bool use_x) {
  CMatrix out(axis.size(), static_cast<Eigen::Index>(positions.size()));
  for (Eigen::Index k = 0; k < out.cols(); ++k) {
    const double c = use_x ? positions[k].x : positions[k].y;
    for (Eigen::Index i = 0; i < axis.size(); ++i) {
      out(i, k) = std::polar(1.0, 2.0 * std::numbers::pi * c * axis[i]);
    }
  }
  return out;
}

CMatrix scale_rows(const CMatrix& m, const RVector& axis) {
  const CVector s = (Complex(0.0, 2.0 * std::numbers::pi) * axis.cast<Complex>()).eval();
  return s.asDiagonal() * m;
}

}  // namespace

AxisFactors axis_factors(std::span<const Point2> positions, const ObservationGrid& grid) {
  return {axis_phasors(positions, grid.u_axis(), true),
          axis_phasors(positions, grid.v_axis(), false)};
}

AxisFactors derivative_x(const AxisFactors& f, const ObservationGrid& grid) {
  return {scale_rows(f.eu, grid.u_axis()), f.ev};
}

AxisFactors derivative_y(const AxisFactors& f, const ObservationGrid& grid) {
  return {f.eu, scale_rows(f.ev, grid.v_axis())};
}

CMatrix synthesize(const AxisFactors& f, const CVector& weights) {
  if (f.count() == 0) return CMatrix::Zero(f.ev.rows(), f.eu.rows());
  return (f.ev * weights.asDiagonal()) * f.eu.transpose();
}

CVector correlate(const AxisFactors& f, const Eigen::Ref<const CMatrix>& field) {
  if (f.count() == 0) return CVector();
  const CMatrix x = f.ev.adjoint() * field;  // t x P
  return x.cwiseProduct(f.eu.adjoint()).rowwise().sum();
}

CMatrix gram(const AxisFactors& a, const AxisFactors& b) {
  if (a.count() == 0 || b.count() == 0) return CMatrix(a.count(), b.count());
  const CMatrix gu = a.eu.adjoint() * b.eu;
  const CMatrix gv = a.ev.adjoint() * b.ev;
  return gu.cwiseProduct(gv);
}

}  // namespace sparse_array::detail
