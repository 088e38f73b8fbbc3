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

#include "pqs/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <random>
#include <string>
#include <thread>

#include "json.hpp"
#include "pqs/deterministic.hpp"
#include "pqs/errors.hpp"
#include "pqs/measurement.hpp"
#include "pqs/record_io.hpp"
#include "pqs/rng.hpp"

namespace pqs::ensemble {

namespace {

// Trajectories per work unit. Fixed so that the reduction order, and with it
// every floating-point sum, is independent of the thread count.
constexpr std::size_t kBlockSize = 1024;
constexpr std::size_t kMaxBatches = 1000;
constexpr double kGridTol = 1e-9;

std::size_t snapshot_step(double t, const SimParams& p) {
  const double k = t / p.dt;
  const double r = std::round(k);
  if (std::abs(k - r) > kGridTol * std::max(1.0, k) || r < 0.0) {
    throw InvalidParams("snapshot time " + std::to_string(t) + " is not a multiple of dt");
  }
  if (static_cast<std::size_t>(r) > p.steps()) {
    throw InvalidParams("snapshot time " + std::to_string(t) + " lies beyond T");
  }
  return static_cast<std::size_t>(r);
}

EnsembleStats empty_stats(const ExperimentConfig& cfg) {
  EnsembleStats s;
  for (double t : cfg.snapshot_times) {
    Snapshot snap;
    snap.t = t;
    snap.step = snapshot_step(t, cfg.params);
    for (auto& h : snap.histograms) {
      h = Histogram::with_width(kHistogramLo, kHistogramHi, kHistogramWidth);
    }
    s.snapshots.push_back(std::move(snap));
  }
  return s;
}

void merge_into(EnsembleStats& into, EnsembleStats&& from) {
  into.n_run += from.n_run;
  into.n_accepted += from.n_accepted;
  into.window_signal.merge(from.window_signal);
  for (std::size_t s = 0; s < into.snapshots.size(); ++s) {
    Snapshot& a = into.snapshots[s];
    Snapshot& b = from.snapshots[s];
    for (std::size_t q = 0; q < kQuantityCount; ++q) {
      a.stats[q].merge(b.stats[q]);
      a.histograms[q].merge(b.histograms[q]);
    }
    a.outside_unit_disk += b.outside_unit_disk;
    a.points.insert(a.points.end(), std::make_move_iterator(b.points.begin()),
                    std::make_move_iterator(b.points.end()));
  }
}

struct TrajectoryRunner {
  const ExperimentConfig& cfg;
  QubitOperator rho0;
  QubitOperator effect_T;

  explicit TrajectoryRunner(const ExperimentConfig& c)
      : cfg(c), rho0(from_theta(c.theta_prepare)), effect_T(analysis_effect(c)) {}

  void run(std::uint64_t index, EnsembleStats& acc) const {
    Rng rng = make_stream(cfg.seed, index);
    trajectory::GeneratedRecord gen =
        trajectory::generate_record(rho0, cfg.params, rng, cfg.substeps);
    ++acc.n_run;
    if (!accepted(gen, rng)) return;
    ++acc.n_accepted;

    const auto& samples = gen.record.samples;
    const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(cfg.integration_window),
                                                samples.size());
    double sum = 0.0;
    for (std::size_t k = 0; k < w; ++k) sum += samples[k].V;
    acc.window_signal.add(sum / static_cast<double>(w));

    if (acc.snapshots.empty()) return;
    const auto pairs = trajectory::smooth_record(gen.record, rho0, effect_T);
    for (Snapshot& snap : acc.snapshots) {
      const trajectory::PastPair& pp = pairs[snap.step];
      const std::array<double, kQuantityCount> v{pp.rho_bloch.x,    pp.rho_bloch.z, pp.effect_bloch.x,
                                                 pp.effect_bloch.z, pp.retro.x,     pp.retro.z};
      for (std::size_t q = 0; q < kQuantityCount; ++q) {
        snap.stats[q].add(v[q]);
        snap.histograms[q].add(v[q]);
      }
      if (pp.retro.x * pp.retro.x + pp.retro.z * pp.retro.z > 1.0) ++snap.outside_unit_disk;
      if (cfg.keep_points) snap.points.push_back(pp);
    }
  }

  // Physical projective measurement of |phi> on rho_T, reported wrongly with
  // probability 1 - eta_p. Accepted when the report is |phi>.
  bool accepted(const trajectory::GeneratedRecord& gen, Rng& rng) const {
    if (!cfg.theta_postselect) return true;
    const QubitOperator rho_T = from_bloch(gen.rho_trajectory.back());
    const double p_phi =
        std::clamp(trace_product(rho_T, from_theta(*cfg.theta_postselect)).real(), 0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const bool outcome_phi = u(rng) < p_phi;
    const bool flipped = u(rng) >= cfg.params.eta_p;
    return outcome_phi != flipped;
  }
};

EnsembleStats run_batch(const ExperimentConfig& cfg, std::uint64_t first_index) {
  const TrajectoryRunner runner(cfg);
  const std::size_t n = cfg.n_trajectories;
  const std::size_t blocks = (n + kBlockSize - 1) / kBlockSize;
  std::vector<EnsembleStats> partial(blocks, empty_stats(cfg));

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t b = next++; b < blocks; b = next++) {
      const std::size_t lo = b * kBlockSize;
      const std::size_t hi = std::min(n, lo + kBlockSize);
      for (std::size_t i = lo; i < hi; ++i) runner.run(first_index + i, partial[b]);
    }
  };

  unsigned threads = cfg.threads != 0 ? cfg.threads : std::thread::hardware_concurrency();
  threads = static_cast<unsigned>(std::clamp<std::size_t>(threads, 1, blocks));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  EnsembleStats total = empty_stats(cfg);
  for (auto& part : partial) merge_into(total, std::move(part));
  return total;
}

QubitOperator back_evolved_effect(const QubitOperator& effect_T, double t, double T, double gamma) {
  return normalized(deterministic::effect_unmonitored(effect_T, t, T, gamma));
}

}  // namespace

void ExperimentConfig::validate() const {
  params.validate();
  if (n_trajectories < 1) throw InvalidParams("n_trajectories must be at least 1");
  if (integration_window < 1) throw InvalidParams("integration_window must be at least 1");
  if (substeps < 1) throw InvalidParams("substeps must be at least 1");
  if (!(postselect_delay > 0.0)) throw InvalidParams("postselect_delay must be positive");
  if (!std::isfinite(theta_prepare)) throw InvalidParams("theta_prepare must be finite");
  if (theta_postselect && !std::isfinite(*theta_postselect)) {
    throw InvalidParams("theta_postselect must be finite");
  }
  if (params.steps() < 1) throw InvalidParams("record horizon T is shorter than dt");
  for (double t : snapshot_times) snapshot_step(t, params);
}

std::string_view quantity_name(std::size_t q) {
  static constexpr std::array<std::string_view, kQuantityCount> names{
      "x_rho", "z_rho", "x_E", "z_E", "x_p", "z_p"};
  return names.at(q);
}

QubitOperator analysis_effect(const ExperimentConfig& cfg) {
  if (!cfg.theta_postselect) return QubitOperator::identity() * 0.5;
  return measurement::mixed_projector_effect(*cfg.theta_postselect, cfg.params.eta_p);
}

EnsembleStats run_ensemble(const ExperimentConfig& cfg) {
  cfg.validate();
  EnsembleStats total = empty_stats(cfg);
  std::uint64_t first = 0;
  for (std::size_t batch = 0; batch < kMaxBatches; ++batch) {
    merge_into(total, run_batch(cfg, first));
    first += cfg.n_trajectories;
    if (total.n_accepted >= cfg.min_accepted && total.n_accepted > 0) return total;
    if (cfg.min_accepted == 0) break;
  }
  if (total.n_accepted == 0) {
    throw EmptySelection("run_ensemble: no trajectory passed post-selection (" +
                             std::to_string(total.n_run) + " run)",
                         total.acceptance_fraction());
  }
  return total;
}

SignalEstimate conditional_mean_signal(const ExperimentConfig& cfg) {
  ExperimentConfig c = cfg;
  c.params.T = cfg.postselect_delay;
  c.snapshot_times.clear();
  c.keep_points = false;
  if (static_cast<std::size_t>(c.integration_window) > c.params.steps()) {
    throw InvalidParams("integration window is longer than the post-selection delay");
  }
  const EnsembleStats s = run_ensemble(c);
  return {s.window_signal.mean, s.window_signal.stderr_of_mean(), s.n_accepted,
          s.acceptance_fraction()};
}

EnsembleStats bloch_histograms(const ExperimentConfig& cfg) {
  if (cfg.snapshot_times.empty()) throw InvalidParams("bloch_histograms: no snapshot times");
  return run_ensemble(cfg);
}

double theory_window_signal(const ExperimentConfig& cfg) {
  cfg.validate();
  const SimParams& p = cfg.params;
  const QubitOperator rho0 = from_theta(cfg.theta_prepare);
  const QubitOperator eff = analysis_effect(cfg);
  double sum = 0.0;
  for (int k = 0; k < cfg.integration_window; ++k) {
    const double t = k * p.dt;
    sum += measurement::retrodicted_mean_signal(
        deterministic::rho_unmonitored(rho0, t, p.gamma),
        back_evolved_effect(eff, t, cfg.postselect_delay, p.gamma), p);
  }
  return sum / cfg.integration_window;
}

double theory_window_signal_continuous(const ExperimentConfig& cfg) {
  cfg.validate();
  const SimParams& p = cfg.params;
  const QubitOperator rho0 = from_theta(cfg.theta_prepare);
  const QubitOperator eff = analysis_effect(cfg);
  // Composite Simpson over [0, window dt] of the retrodicted rate.
  const int intervals = 64 * cfg.integration_window;
  const double span = cfg.integration_window * p.dt;
  const double h = span / intervals;
  double sum = 0.0;
  for (int i = 0; i <= intervals; ++i) {
    const double t = i * h;
    const double f = measurement::retrodicted_mean_signal(
        deterministic::rho_unmonitored(rho0, t, p.gamma),
        back_evolved_effect(eff, t, cfg.postselect_delay, p.gamma), p);
    const double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    sum += w * f;
  }
  return sum * h / 3.0 / span;
}

double theory_acceptance(const ExperimentConfig& cfg, double horizon) {
  const QubitOperator rho_T = deterministic::rho_unmonitored(from_theta(cfg.theta_prepare), horizon,
                                                             cfg.params.gamma);
  if (!cfg.theta_postselect) return 1.0;
  return trace_product(rho_T, analysis_effect(cfg)).real();
}

void write_stats_json(std::ostream& os, const EnsembleStats& stats) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["n_run"] = stats.n_run;
  j["n_accepted"] = stats.n_accepted;
  j["acceptance_fraction"] = stats.acceptance_fraction();
  j["window_signal"] = {{"mean", stats.window_signal.mean},
                        {"stderr", stats.window_signal.stderr_of_mean()},
                        {"n", stats.window_signal.n}};
  ordered_json snaps = ordered_json::array();
  for (const Snapshot& s : stats.snapshots) {
    ordered_json js;
    js["t_us"] = s.t;
    js["step"] = s.step;
    for (std::size_t q = 0; q < kQuantityCount; ++q) {
      js[std::string(quantity_name(q))] = {{"mean", s.stats[q].mean},
                                           {"stderr", s.stats[q].stderr_of_mean()}};
    }
    js["outside_unit_disk"] = s.outside_unit_disk;
    snaps.push_back(std::move(js));
  }
  j["snapshots"] = std::move(snaps);
  os << j.dump(2) << '\n';
}

void write_histogram_csv(std::ostream& os, const Histogram& h) {
  os << "bin_center,count\n";
  for (std::size_t i = 0; i < h.bins(); ++i) {
    os << io::format_double(h.center(i)) << ',' << h.counts()[i] << '\n';
  }
}

}  // namespace pqs::ensemble
