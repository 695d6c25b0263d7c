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

#include <random>

#include "doctest.h"
#include "sparse_array/array_model.hpp"
#include "sparse_array/error.hpp"
#include "test_support.hpp"

using namespace sparse_array;
using sparse_array::testing::naive_steer;

TEST_CASE("uv grid layout") {
  const auto g3 = make_uv_grid(3, 3);
  CHECK(g3.size() == 9);
  CHECK(g3.u(0) == -1.0);
  CHECK(g3.u(3) == 0.0);
  CHECK(g3.v(2) == 1.0);

  const auto g = make_uv_grid(65, 65);
  CHECK(g.size() == 4225);
  const RVector us65 = g.u_samples();
  for (Eigen::Index p = 1; p < g.P(); ++p) {
    CHECK(us65[p * 65] - us65[(p - 1) * 65] == doctest::Approx(1.0 / 32));
  }
  CHECK(g.u(32 * 65 + 32) == 0.0);
  CHECK(g.v(32 * 65 + 32) == 0.0);

  // Row-major with v fastest.
  const auto us = g3.u_samples();
  const auto vs = g3.v_samples();
  CHECK(us[1] == -1.0);
  CHECK(vs[1] == 0.0);
  CHECK(us[3] == 0.0);

  CHECK_THROWS_AS(make_uv_grid(4, 5), Error);
  CHECK_THROWS_AS(make_uv_grid(1, 3), Error);
}

TEST_CASE("steering vector values") {
  const auto g = make_uv_grid(3, 3);
  const CVector a0 = steering_vector(0.0, 0.0, g);
  CHECK((a0.array() - Complex(1.0, 0.0)).abs().maxCoeff() == 0.0);

  // index p*Q + q with u = -1 + p, v = -1 + q; (u=1, v=0) is index 7, (u=1, v=1) index 8.
  const CVector a1 = steering_vector(0.5, 0.0, g);
  CHECK(std::abs(a1[7] - Complex(-1.0, 0.0)) < 1e-15);
  const CVector a2 = steering_vector(0.25, 0.25, g);
  CHECK(std::abs(a2[8] - Complex(-1.0, 0.0)) < 1e-15);

  CHECK_THROWS_AS(steering_vector(std::nan(""), 0.0, g), Error);
}

TEST_CASE("dictionary columns are steering vectors of unit modulus") {
  const auto g = make_uv_grid(9, 7);
  const auto layout = ArrayLayout::uniform(2, 2, 0.5);
  const CMatrix A = build_dictionary(layout, g);
  REQUIRE(A.cols() == 4);
  REQUIRE(A.rows() == g.size());
  CHECK((A.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-12);
  for (Eigen::Index k = 0; k < 4; ++k) {
    const auto p = layout[static_cast<std::size_t>(k)];
    CHECK((A.col(k) - steering_vector(p.x, p.y, g)).norm() == 0.0);
  }

  const ArrayLayout origin({{0.0, 0.0}}, Aperture{0.0, 1.0, 0.0, 1.0});
  const CMatrix A1 = build_dictionary(origin, g);
  CHECK(A1.cols() == 1);
  CHECK((A1.array() - Complex(1.0, 0.0)).abs().maxCoeff() < 1e-15);

  CHECK_THROWS_AS(build_dictionary(std::span<const Point2>{}, g), Error);
}

TEST_CASE("pattern evaluation against the direct double sum") {
  std::mt19937_64 rng(11);
  const auto g = make_uv_grid(11, 13);
  const auto layout = ArrayLayout::uniform(2, 2, 0.5);
  const CVector w = sparse_array::testing::random_weights(rng, 4);
  const Pattern s = evaluate_pattern(layout, Excitations{w}, g);

  const auto us = g.u_samples();
  const auto vs = g.v_samples();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    Complex ref = 0.0;
    for (int m = 0; m < 2; ++m) {
      for (int n = 0; n < 2; ++n) {
        ref += w[m * 2 + n] * naive_steer((m + 0.5) * 0.5, (n + 0.5) * 0.5, us[i], vs[i]);
      }
    }
    worst = std::max(worst, std::abs(ref - s.values[i]));
  }
  CHECK(worst < 1e-12);

  // Exactly the dictionary product.
  const CVector direct = build_dictionary(layout, g) * w;
  CHECK(s.values == direct);

  const ArrayLayout one({{0.3, 0.7}}, Aperture{0.0, 1.0, 0.0, 1.0});
  CVector unit(1);
  unit[0] = 1.0;
  const Pattern single = evaluate_pattern(one, Excitations{unit}, g);
  CHECK((single.values.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-12);

  const Pattern zero = evaluate_pattern(layout, Excitations{CVector::Zero(4)}, g);
  CHECK(zero.values.cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(evaluate_pattern(layout, Excitations{CVector::Zero(3)}, g), Error);
}

TEST_CASE("translation multiplies the pattern by a phase ramp") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> pos(0.0, 3.0);
  const auto g = make_uv_grid(17, 17);
  std::vector<Point2> p(6), shifted(6);
  const double dx = 0.37, dy = -0.21;
  for (int i = 0; i < 6; ++i) {
    p[i] = {pos(rng), pos(rng)};
    shifted[i] = {p[i].x + dx, p[i].y + dy};
  }
  const CVector w = sparse_array::testing::random_weights(rng, 6);
  const Pattern a = evaluate_pattern(p, w, g);
  const Pattern b = evaluate_pattern(shifted, w, g);
  const auto us = g.u_samples();
  const auto vs = g.v_samples();
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    CHECK(std::abs(b.values[i] - a.values[i] * naive_steer(dx, dy, us[i], vs[i])) < 1e-10);
    CHECK(std::abs(std::abs(b.values[i]) - std::abs(a.values[i])) < 1e-10);
  }
}

TEST_CASE("layout validation") {
  const auto u = ArrayLayout::uniform(16, 16, 0.5);
  CHECK(u.size() == 256);
  CHECK(u[0] == Point2{0.25, 0.25});
  CHECK(u[17] == Point2{0.75, 0.75});
  CHECK(u.aperture().x_max == 8.0);

  const Aperture box{0.0, 1.0, 0.0, 1.0};
  CHECK_THROWS_AS(ArrayLayout({{0.5, 0.5}, {0.5, 0.5}}, box), Error);
  CHECK_THROWS_AS(ArrayLayout({{1.5, 0.5}}, box), Error);
  CHECK_THROWS_AS(ArrayLayout::uniform(0, 3, 0.5), Error);
}
