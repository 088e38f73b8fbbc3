// Copyright 2026 The pqs Authors
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

#include <cmath>
#include <random>

#include "doctest.h"
#include "pqs/core.hpp"
#include "test_util.hpp"

using namespace pqs;

TEST_SUITE("core") {
  TEST_CASE("operator algebra in the g/e basis") {
    const auto sm = QubitOperator::sigma_minus();
    const auto sp = QubitOperator::sigma_plus();
    CHECK(sm.adjoint() == sp);
    // s+ s- projects on |e>.
    CHECK(max_abs_diff(sp * sm, QubitOperator::excited()) == 0.0);
    CHECK(max_abs_diff(sm + sp, QubitOperator::sigma_x()) == 0.0);
    CHECK(max_abs_diff(QubitOperator::sigma_y() * QubitOperator::sigma_y(), QubitOperator::identity()) == 0.0);
    const Complex i(0.0, 1.0);
    CHECK(max_abs_diff(QubitOperator::sigma_x() * QubitOperator::sigma_y(), QubitOperator::sigma_z() * i) <
          1e-15);
  }

  TEST_CASE("matrix product agrees with the reference implementation") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> n;
    for (int k = 0; k < 100; ++k) {
      QubitOperator a{{n(rng), n(rng)}, {n(rng), n(rng)}, {n(rng), n(rng)}, {n(rng), n(rng)}};
      QubitOperator b{{n(rng), n(rng)}, {n(rng), n(rng)}, {n(rng), n(rng)}, {n(rng), n(rng)}};
      const auto ref = testutil::from_mat(oracle::mul(testutil::to_mat(a), testutil::to_mat(b)));
      CHECK(max_abs_diff(a * b, ref) < 1e-13);
      CHECK(std::abs(trace_product(a, b) - oracle::trace(oracle::mul(testutil::to_mat(a), testutil::to_mat(b)))) <
            1e-13);
    }
  }

  TEST_CASE("Bloch round trip and orientation") {
    CHECK(to_bloch(QubitOperator::ground()).z == 1.0);
    CHECK(to_bloch(QubitOperator::excited()).z == -1.0);
    std::mt19937_64 rng(3);
    for (int k = 0; k < 200; ++k) {
      const BlochVector b = testutil::random_ball(rng);
      const BlochVector r = to_bloch(from_bloch(b));
      CHECK(std::abs(r.x - b.x) < 1e-15);
      CHECK(std::abs(r.y - b.y) < 1e-15);
      CHECK(std::abs(r.z - b.z) < 1e-15);
      const QubitOperator rho = from_bloch(b);
      CHECK(std::abs(trace_product(rho, QubitOperator::sigma_y()).real() - b.y) < 1e-15);
    }
  }

  TEST_CASE("theta states lie on the x-z great circle") {
    for (double th : {-kPi, -1.0, 0.0, 0.3, kPi / 2, 2.5}) {
      const BlochVector b = to_bloch(from_theta(th));
      CHECK(std::abs(b.x - std::sin(th)) < 1e-15);
      CHECK(std::abs(b.z - std::cos(th)) < 1e-15);
      CHECK(b.y == 0.0);
      CHECK(std::abs(purity(from_theta(th)) - 1.0) < 1e-15);
    }
    CHECK(to_bloch(from_theta(kPi / 2)).x == doctest::Approx(1.0));
  }

  TEST_CASE("validation of operators") {
    CHECK_THROWS_AS(to_bloch(QubitOperator::sigma_minus()), InvalidOperator);
    CHECK_THROWS_AS(to_bloch(QubitOperator::identity()), InvalidOperator);
    CHECK(is_physical_state(QubitOperator::identity() * 0.5));
    CHECK_FALSE(is_physical_state(from_bloch({1.2, 0.0, 0.0})));
    CHECK_THROWS_AS(normalized(QubitOperator::zero()), InvalidOperator);
  }

  TEST_CASE("physical projection floors the lower eigenvalue") {
    const QubitOperator outside = from_bloch({1.5, 0.0, 0.0});
    const auto ev = eigenvalues(outside);
    CHECK(ev[0] == doctest::Approx(-0.25));
    const QubitOperator fixed = project_physical(outside);
    CHECK(is_physical_state(fixed));
    CHECK(to_bloch(fixed).x == doctest::Approx(1.0));
    // Inside the ball the projection only normalizes the trace.
    const QubitOperator inside = from_bloch({0.2, -0.1, 0.4}) * 3.0;
    const BlochVector b = to_bloch(project_physical(inside));
    CHECK(b.x == doctest::Approx(0.2));
    CHECK(b.y == doctest::Approx(-0.1));
    CHECK(b.z == doctest::Approx(0.4));
  }

  TEST_CASE("parameter validation") {
    SimParams p;
    CHECK_NOTHROW(p.validate());
    CHECK(p.steps() == 84);
    CHECK(p.signal_bound() == doctest::Approx(std::sqrt(0.3) * 1.628 * 0.02));
    SimParams bad = p;
    bad.eta = 1.5;
    CHECK_THROWS_AS(bad.validate(), InvalidParams);
    bad = p;
    bad.dt = 0.1;
    CHECK_THROWS_AS(bad.validate(), InvalidParams);
    bad = p;
    bad.gamma = -1.0;
    CHECK_THROWS_AS(bad.validate(), InvalidParams);
    bad = p;
    bad.eta_p = 1.1;
    CHECK_THROWS_AS(bad.validate(), InvalidParams);
  }
}
