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

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "pqs/core.hpp"
#include "pqs/histogram.hpp"
#include "pqs/trajectory.hpp"

namespace pqs::ensemble {

struct ExperimentConfig {
  /// params.T is the record horizon of run_ensemble; params.eta_p is the
  /// post-selection fidelity.
  SimParams params;
  double theta_prepare = kPi / 2;
  /// Angle phi of the post-selection projector |phi><phi|. Empty means no
  /// post-selection: every run is accepted and E_T = identity / 2.
  std::optional<double> theta_postselect;
  std::size_t n_trajectories = 10000;
  /// Samples averaged for the conditional signal, from t = 0 (3 x 20 ns = 60 ns).
  int integration_window = 3;
  /// Record horizon of conditional_mean_signal, us.
  double postselect_delay = 0.5;
  /// Times (us, multiples of dt) at which PastPair statistics are gathered.
  std::vector<double> snapshot_times;
  std::uint64_t seed = 0;
  /// Integration substeps per recorded sample (see trajectory::generate_record).
  int substeps = 1;
  /// When nonzero, further batches of n_trajectories are run until at least
  /// this many are accepted.
  std::size_t min_accepted = 0;
  /// Keep every accepted PastPair at each snapshot.
  bool keep_points = false;
  /// Worker threads; 0 means hardware concurrency. Results do not depend on it.
  unsigned threads = 0;

  /// Throws InvalidParams.
  void validate() const;
};

/// The six tracked components, in this order everywhere.
enum Quantity : std::size_t { kXRho, kZRho, kXEffect, kZEffect, kXRetro, kZRetro, kQuantityCount };

std::string_view quantity_name(std::size_t q);

inline constexpr double kHistogramLo = -1.2;
inline constexpr double kHistogramHi = 1.2;
inline constexpr double kHistogramWidth = 0.02;

struct Snapshot {
  double t = 0.0;
  std::size_t step = 0;
  std::array<RunningStats, kQuantityCount> stats;
  std::array<Histogram, kQuantityCount> histograms;
  /// Fraction of accepted pairs whose retrodicted (x, z) leaves the unit disk.
  std::uint64_t outside_unit_disk = 0;
  std::vector<trajectory::PastPair> points;  ///< filled only with keep_points
};

struct EnsembleStats {
  std::uint64_t n_run = 0;
  std::uint64_t n_accepted = 0;
  std::vector<Snapshot> snapshots;
  /// Per accepted run, the mean of the first integration_window samples.
  RunningStats window_signal;

  double acceptance_fraction() const {
    return n_run == 0 ? 0.0 : static_cast<double>(n_accepted) / static_cast<double>(n_run);
  }
};

/// Simulates each trajectory from |theta_prepare> over [0, T], samples the
/// post-selection outcome from rho_T with Born probabilities, flips it with
/// probability 1 - eta_p, and for accepted runs smooths the record with the
/// fidelity-corrected effect to collect PastPair statistics. Bit-identical for
/// a given config regardless of thread count. Throws EmptySelection if no run
/// is accepted.
EnsembleStats run_ensemble(const ExperimentConfig& cfg);

struct SignalEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t n_accepted = 0;
  double acceptance_fraction = 0.0;
};

/// Conditional mean signal per dt sample over the first integration_window
/// samples, with records of length postselect_delay.
SignalEstimate conditional_mean_signal(const ExperimentConfig& cfg);

/// Snapshot histograms; requires snapshot_times to be nonempty.
EnsembleStats bloch_histograms(const ExperimentConfig& cfg);

/// Post-selection effect used in the analysis: the corrected mixture for
/// the configured projector, or identity / 2.
QubitOperator analysis_effect(const ExperimentConfig& cfg);

/// Retrodicted mean signal evaluated at sample start times t_k = k dt,
/// averaged over the window, with unmonitored rho(t) and E(t) back-evolved
/// from postselect_delay.
double theory_window_signal(const ExperimentConfig& cfg);

/// The same, with the sample-start average replaced by the time average of
/// the retrodicted rate over [0, window dt]. This is the quantity a
/// finely-integrated simulation converges to.
double theory_window_signal_continuous(const ExperimentConfig& cfg);

/// Born acceptance probability Tr(rho_T E_T) of the physical selection.
double theory_acceptance(const ExperimentConfig& cfg, double horizon);

/// JSON with run counts, acceptance and per-snapshot means and standard errors.
void write_stats_json(std::ostream& os, const EnsembleStats& stats);
/// `bin_center,count` table.
void write_histogram_csv(std::ostream& os, const Histogram& h);

}  // namespace pqs::ensemble
