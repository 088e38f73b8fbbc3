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
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "pqs/ensemble.hpp"
#include "pqs/geometry.hpp"

using namespace pqs;
using namespace pqs::ensemble;

namespace {

ExperimentConfig base_config() {
  ExperimentConfig c;
  c.params.T = 0.84;
  c.theta_prepare = kPi;
  c.theta_postselect = kPi / 2;
  c.n_trajectories = 1500;
  c.snapshot_times = {0.0, 0.42, 0.84};
  c.seed = 2024;
  return c;
}

}  // namespace

TEST_SUITE("ensemble") {
  TEST_CASE("results do not depend on the thread count") {
    ExperimentConfig c = base_config();
    c.n_trajectories = 2500;  // three work blocks
    c.threads = 1;
    const auto a = run_ensemble(c);
    c.threads = 3;
    const auto b = run_ensemble(c);
    CHECK(a.n_accepted == b.n_accepted);
    CHECK(a.window_signal.mean == b.window_signal.mean);
    CHECK(a.window_signal.m2 == b.window_signal.m2);
    for (std::size_t s = 0; s < a.snapshots.size(); ++s) {
      for (std::size_t q = 0; q < kQuantityCount; ++q) {
        CHECK(a.snapshots[s].stats[q].mean == b.snapshots[s].stats[q].mean);
        CHECK(a.snapshots[s].stats[q].m2 == b.snapshots[s].stats[q].m2);
        CHECK(a.snapshots[s].histograms[q].counts() == b.snapshots[s].histograms[q].counts());
      }
    }
    std::ostringstream ja, jb;
    write_stats_json(ja, a);
    write_stats_json(jb, b);
    CHECK(ja.str() == jb.str());
  }

  TEST_CASE("acceptance matches the Born probability") {
    ExperimentConfig c = base_config();
    c.snapshot_times.clear();
    c.n_trajectories = 4000;
    c.params.eta_p = 0.9;
    const auto s = run_ensemble(c);
    const double p = theory_acceptance(c, c.params.T);
    const double se = std::sqrt(p * (1 - p) / static_cast<double>(s.n_run));
    CHECK(std::abs(s.acceptance_fraction() - p) < 3.0 * se);
  }

  TEST_CASE("no post-selection accepts everything") {
    ExperimentConfig c = base_config();
    c.theta_postselect.reset();
    c.n_trajectories = 300;
    const auto s = run_ensemble(c);
    CHECK(s.n_accepted == s.n_run);
    CHECK(s.acceptance_fraction() == 1.0);
  }

  TEST_CASE("impossible selection raises EmptySelection") {
    ExperimentConfig c = base_config();
    c.theta_prepare = 0.0;        // ground state never re-excites
    c.theta_postselect = kPi;     // report |e>
    c.params.eta_p = 1.0;
    c.n_trajectories = 50;
    try {
      run_ensemble(c);
      FAIL("expected EmptySelection");
    } catch (const EmptySelection& e) {
      CHECK(e.acceptance_rate() == 0.0);
    }
  }

  TEST_CASE("unselected conditional signal is the predicted signal") {
    ExperimentConfig c;
    c.theta_postselect.reset();
    c.n_trajectories = 20000;
    for (double th : {0.0, kPi / 2, 2.2}) {
      c.theta_prepare = th;
      const auto est = conditional_mean_signal(c);
      const double expect = theory_window_signal_continuous(c);
      CHECK(std::abs(est.mean - expect) < 3.0 * est.std_error);
      if (th == 0.0) CHECK(std::abs(est.mean) < 3.0 * est.std_error);
    }
    // At the window start the theory reduces to sqrt(eta) gamma dt sin(theta).
    c.theta_prepare = 1.0;
    c.integration_window = 1;
    CHECK(theory_window_signal(c) == doctest::Approx(c.params.signal_bound() * std::sin(1.0)).epsilon(1e-12));
  }

  TEST_CASE("standard error shrinks as one over root N") {
    ExperimentConfig c = base_config();
    c.theta_prepare = kPi / 2;
    c.theta_postselect = 0.0;
    c.n_trajectories = 2000;
    const auto small = conditional_mean_signal(c);
    c.n_trajectories = 8000;
    const auto large = conditional_mean_signal(c);
    const double ratio = small.std_error / large.std_error;
    const double n_ratio = std::sqrt(static_cast<double>(large.n_accepted) / small.n_accepted);
    CHECK(ratio == doctest::Approx(n_ratio).epsilon(0.1));
  }

  TEST_CASE("minimum accepted count repeats batches") {
    ExperimentConfig c = base_config();
    c.snapshot_times.clear();
    c.n_trajectories = 200;
    c.min_accepted = 500;
    const auto s = run_ensemble(c);
    CHECK(s.n_accepted >= 500u);
    CHECK(s.n_run % 200 == 0);
  }

  TEST_CASE("snapshot statistics") {
    ExperimentConfig c = base_config();
    c.params.dt = 0.002;  // Euler drift off the ellipse is first order in gamma dt
    c.n_trajectories = 800;
    c.keep_points = true;
    const auto s = bloch_histograms(c);
    REQUIRE(s.snapshots.size() == 3);
    for (const auto& snap : s.snapshots) {
      CHECK(snap.points.size() == s.n_accepted);
      for (std::size_t q = 0; q < kQuantityCount; ++q) {
        double mass = 0.0;
        for (double m : snap.histograms[q].mass()) mass += m;
        CHECK(mass == doctest::Approx(1.0));
        CHECK(snap.histograms[q].total() == s.n_accepted);
        CHECK(snap.stats[q].stderr_of_mean() ==
              doctest::Approx(snap.stats[q].stddev() / std::sqrt(static_cast<double>(s.n_accepted))));
      }
      // rho support inside the bounding box of its alpha ellipse
      const auto e = geometry::EllipseParam::rho(geometry::alpha_at_time(1.0, snap.t, c.params));
      const auto& hx = snap.histograms[kXRho];
      const auto& hz = snap.histograms[kZRho];
      const double slack = hx.width() + 0.05;
      for (std::size_t i = 0; i < hx.bins(); ++i) {
        if (hx.counts()[i] > 0) CHECK(std::abs(hx.center(i)) <= e.semi_x() + slack);
        if (hz.counts()[i] > 0) CHECK(hz.center(i) >= e.center_z() - e.semi_z() - slack);
      }
    }
    // The initial snapshot holds the prepared state.
    CHECK(s.snapshots[0].stats[kZRho].mean == doctest::Approx(-1.0));
  }

  TEST_CASE("configuration errors") {
    ExperimentConfig c = base_config();
    c.snapshot_times = {0.43};
    CHECK_THROWS_AS(run_ensemble(c), InvalidParams);
    c.snapshot_times = {2.0};
    CHECK_THROWS_AS(run_ensemble(c), InvalidParams);
    c = base_config();
    c.snapshot_times.clear();
    CHECK_THROWS_AS(bloch_histograms(c), InvalidParams);
    c.integration_window = 0;
    CHECK_THROWS_AS(run_ensemble(c), InvalidParams);
  }

  TEST_CASE("stats export") {
    ExperimentConfig c = base_config();
    c.n_trajectories = 200;
    const auto s = run_ensemble(c);
    std::ostringstream os;
    write_stats_json(os, s);
    const auto j = nlohmann::json::parse(os.str());
    CHECK(j.at("n_run").get<std::uint64_t>() == 200u);
    CHECK(j.at("snapshots").size() == 3);
    CHECK(j.at("snapshots")[1].at("x_p").contains("stderr"));
    std::ostringstream hs;
    write_histogram_csv(hs, s.snapshots[0].histograms[0]);
    CHECK(hs.str().rfind("bin_center,count\n", 0) == 0);
  }
}
