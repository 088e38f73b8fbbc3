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
#include "pqs/trajectory.hpp"
#include "test_util.hpp"

using namespace pqs;
using namespace pqs::trajectory;

namespace {

SimParams params(double eta = 0.3) {
  SimParams p;
  p.eta = eta;
  return p;
}

double signal_draw(std::mt19937_64& rng, const SimParams& p) {
  std::normal_distribution<double> n(0.0, 2.0 * std::sqrt(p.gamma_dt()));
  return n(rng);
}

}  // namespace

TEST_SUITE("trajectory") {
  TEST_CASE("operator and Bloch forward steps agree") {
    std::mt19937_64 rng(31);
    for (double eta : {0.0, 0.3, 0.8}) {
      const SimParams p = params(eta);
      for (int k = 0; k < 300; ++k) {
        const BlochVector b = testutil::random_ball(rng, true);
        const double V = signal_draw(rng, p);
        const BlochVector op = to_bloch(step_rho_forward(from_bloch(b), V, p));
        const BlochVector bl = step_bloch_rho(b, V, p);
        CHECK(std::abs(op.x - bl.x) < 1e-12);
        CHECK(std::abs(op.z - bl.z) < 1e-12);
        CHECK(std::abs(op.y) < 1e-15);
      }
    }
  }

  TEST_CASE("operator and Bloch backward steps agree") {
    std::mt19937_64 rng(32);
    for (double eta : {0.0, 0.3, 0.8}) {
      const SimParams p = params(eta);
      for (int k = 0; k < 300; ++k) {
        const BlochVector b = testutil::random_ball(rng, true);
        const double V = signal_draw(rng, p);
        const BlochVector op = to_bloch(step_effect_backward(from_bloch(b), V, p));
        const BlochVector bl = step_bloch_effect(b, V, p);
        CHECK(std::abs(op.x - bl.x) < 1e-12);
        CHECK(std::abs(op.z - bl.z) < 1e-12);
      }
    }
  }

  TEST_CASE("steps keep states physical") {
    std::mt19937_64 rng(33);
    const SimParams p = params(0.5);
    for (int k = 0; k < 500; ++k) {
      const QubitOperator rho = testutil::random_state(rng);
      const double V = 3.0 * signal_draw(rng, p);
      CHECK(is_physical_state(step_rho_forward(rho, V, p)));
      CHECK(is_physical_state(step_effect_backward(rho, V, p)));
    }
  }

  TEST_CASE("unit efficiency preserves purity") {
    std::mt19937_64 rng(34);
    const SimParams p = params(1.0);
    QubitOperator rho = from_theta(1.0);
    QubitOperator e = from_theta(-0.5);
    for (int k = 0; k < 200; ++k) {
      const double V = signal_draw(rng, p);
      rho = step_rho_forward(rho, V, p);
      e = step_effect_backward(e, V, p);
    }
    CHECK(purity(rho) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(purity(e) == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("input validation") {
    const SimParams p = params();
    CHECK_THROWS_AS(step_bloch_rho({0.1, 0.2, 0.0}, 0.0, p), InvalidState);
    CHECK_THROWS_AS(step_bloch_rho({1.0, 0.0, 0.5}, 0.0, p), InvalidState);
    CHECK_THROWS_AS(step_effect_backward(QubitOperator::identity(), 0.0, p), InvalidOperator);
  }

  TEST_CASE("linear steps are exact adjoints") {
    std::mt19937_64 rng(35);
    const SimParams p = params();
    for (int k = 0; k < 200; ++k) {
      const QubitOperator rho = testutil::random_state(rng);
      const QubitOperator e = testutil::random_state(rng) * 2.0;
      const double V = signal_draw(rng, p);
      const Complex lhs = trace_product(step_rho_linear(rho, V, p), e);
      const Complex rhs = trace_product(rho, step_effect_linear(e, V, p));
      CHECK(std::abs(lhs - rhs) < 1e-15);
    }
  }

  TEST_CASE("normalized step equals the normalized linear step to first order") {
    std::mt19937_64 rng(36);
    SimParams p = params();
    p.dt = 1e-5;
    for (int k = 0; k < 50; ++k) {
      const QubitOperator rho = testutil::random_state(rng);
      const double V = signal_draw(rng, p);
      const QubitOperator lin = normalized(step_rho_linear(rho, V, p));
      // Difference is second order in the noise, O(gamma dt).
      CHECK(max_abs_diff(lin, step_rho_forward(rho, V, p)) < 20.0 * p.gamma_dt());
    }
  }

  TEST_CASE("retrodicted components") {
    const auto r = retrodicted_bloch({0.5, 0.0, -0.2}, {0.4, 0.0, 0.9});
    CHECK(r.x == doctest::Approx(0.9 / 1.2));
    CHECK(r.z == doctest::Approx(0.7 / (1.0 - 0.18)));
    const auto same = retrodicted_bloch({0.3, 0.1, -0.6}, {0.0, 0.0, 0.0});
    CHECK(same.x == doctest::Approx(0.3));
    CHECK(same.z == doctest::Approx(-0.6));
    // Each axis stays in [-1, 1] while the vector can leave the sphere.
    const auto out = retrodicted_bloch({0.0, 0.0, 1.0}, {1.0, 0.0, 0.0});
    CHECK(out.x == doctest::Approx(1.0));
    CHECK(out.z == doctest::Approx(1.0));
    CHECK(out.norm_squared() > 1.0);
    CHECK_THROWS_AS(retrodicted_bloch({0.0, 0.0, 1.0}, {0.0, 0.0, -1.0}), IncompatibleSelection);
  }

  TEST_CASE("generated records are reproducible and replay through the filter") {
    SimParams p = params();
    const auto a = generate_record(from_theta(kPi), p, 77);
    const auto b = generate_record(from_theta(kPi), p, 77);
    REQUIRE(a.record.samples.size() == p.steps());
    CHECK(a.rho_trajectory.size() == p.steps() + 1);
    CHECK(a.record.seed == 77u);
    CHECK_NOTHROW(a.record.validate());
    for (std::size_t k = 0; k < a.record.samples.size(); ++k) {
      CHECK(a.record.samples[k].V == b.record.samples[k].V);
      CHECK(a.record.samples[k].t == doctest::Approx(k * p.dt));
    }
    ForwardFilter f(from_theta(kPi), p);
    for (std::size_t k = 0; k < a.record.samples.size(); ++k) f.update(a.record.samples[k].V);
    CHECK(to_bloch(f.state()) == a.rho_trajectory.back());
    const auto c = generate_record(from_theta(kPi), p, 78);
    CHECK(c.record.samples[0].V != a.record.samples[0].V);
  }

  TEST_CASE("record validation") {
    HomodyneRecord r;
    r.params = params();
    CHECK_THROWS_AS(r.validate(), InvalidParams);
  }

  TEST_CASE("smoothing with an uninformative future reduces to filtering") {
    const SimParams p = params(0.0);
    const auto gen = generate_record(from_theta(2.0), p, 5);
    const auto pairs = smooth_record(gen.record, from_theta(2.0), QubitOperator::identity());
    REQUIRE(pairs.size() == p.steps() + 1);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      CHECK(pairs[k].t == doctest::Approx(k * p.dt));
      CHECK(pairs[k].retro.x == doctest::Approx(gen.rho_trajectory[k].x).epsilon(1e-12));
      CHECK(pairs[k].retro.z == doctest::Approx(gen.rho_trajectory[k].z).epsilon(1e-12));
    }
  }

  TEST_CASE("smoothing ends on the post-selected effect") {
    const SimParams p = params();
    const auto gen = generate_record(from_theta(kPi), p, 6);
    const auto pairs = smooth_record(gen.record, from_theta(kPi), from_theta(kPi / 2) * 3.0);
    CHECK(pairs.back().effect_bloch.x == doctest::Approx(1.0));
    CHECK(pairs.back().retro.x == doctest::Approx(1.0));
    for (const auto& pp : pairs) {
      CHECK(std::abs(pp.retro.x) <= 1.0);
      CHECK(std::abs(pp.retro.z) <= 1.0);
    }
  }

  TEST_CASE("incompatible selection is reported with its time") {
    const SimParams p = params(0.0);
    const auto gen = generate_record(QubitOperator::ground(), p, 1);
    try {
      smooth_record(gen.record, QubitOperator::ground(), QubitOperator::excited());
      FAIL("expected IncompatibleSelection");
    } catch (const IncompatibleSelection& e) {
      REQUIRE(e.time_us().has_value());
      CHECK(*e.time_us() == doctest::Approx(p.T));
    }
  }

  TEST_CASE("substeps integrate the signal over each interval") {
    SimParams p = params();
    Rng rng = make_stream(3, 0);
    const auto gen = generate_record(from_theta(kPi / 2), p, rng, 4);
    CHECK(gen.record.samples.size() == p.steps());
    CHECK(gen.rho_trajectory.size() == p.steps() + 1);
  }
}
