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

#include <cstddef>
#include <span>
#include <vector>

#include "pqs/core.hpp"

namespace pqs::measurement {

/// One homodyne sample, dimensionless and scaled so that Var V = gamma dt.
struct SignalSample {
  double V = 0.0;
  double t = 0.0;  ///< us
};

/// Which form of the single-step signal density to evaluate.
enum class SignalModel {
  /// Gaussian of variance gamma dt shifted by sqrt(eta) gamma <sx> dt.
  kGaussianShift,
  /// N(V; 0, gamma dt) * (1 + sqrt(eta) <sx> V); exactly normalized.
  kLinearized,
  /// Trace of the full first-order instrument (M_V plus the unobserved
  /// decay channel), normalized by quadrature.
  kKraus,
};

double gaussian_density(double V, double mean, double variance);

/// Homodyne measurement operator
///   M_V = (2 pi gamma dt)^{-1/4} exp(-V^2 / (4 gamma dt))
///         (1 - (gamma dt / 2) sigma_+ sigma_- + sqrt(eta) sigma_- V).
///
/// The sigma_- coefficient is sqrt(eta): it is the only choice that gives the
/// signal mean sqrt(eta) gamma <sx> dt at variance gamma dt. For eta < 1,
/// int M_V^dag M_V dV = 1 - (1 - eta) gamma dt sigma_+ sigma_- + O((gamma dt)^2);
/// the missing weight belongs to the unobserved channel below.
QubitOperator povm_element(double V, const SimParams& p);

/// Unobserved decay channel sqrt((1 - eta) gamma dt) sigma_-. Its signal
/// distribution is pure vacuum noise N(V; 0, gamma dt).
QubitOperator unobserved_kraus(const SimParams& p);

/// Joint (unnormalized) density Tr(M_V rho M_V^dag E) plus the unobserved
/// channel's contribution. Integrates to Tr(rho E) + O((gamma dt)^2).
double instrument_weight(const QubitOperator& rho, const QubitOperator& effect, double V,
                         const SimParams& p);

/// Density of a single homodyne sample given rho.
double signal_probability(const QubitOperator& rho, double V, const SimParams& p,
                          SignalModel model = SignalModel::kGaussianShift);

/// sqrt(eta) gamma <sx> dt; bounded in magnitude by sqrt(eta) gamma dt.
double predicted_mean_signal(const QubitOperator& rho, const SimParams& p);

/// Past-quantum-state outcome probabilities
///   P_p(m) = Tr(M_m rho M_m^dag E) / sum_n Tr(M_n rho M_n^dag E).
/// Throws InvalidOperator if the set is not complete within 1e-8 and
/// IncompatibleSelection if the joint likelihood vanishes.
std::vector<double> pqs_probabilities(const QubitOperator& rho, const QubitOperator& effect,
                                      std::span<const QubitOperator> povm);

/// First-order retrodicted mean signal
///   2 sqrt(eta) gamma dt Re[E^gg rho^eg + rho^ee E^ge] / Tr(rho E).
/// May exceed sqrt(eta) gamma dt in magnitude.
double retrodicted_mean_signal(const QubitOperator& rho, const QubitOperator& effect,
                               const SimParams& p);

/// P_p(V) = Tr(M_V rho M_V^dag E) / int Tr(M_V' rho M_V'^dag E) dV'
/// (instrument form, see instrument_weight).
double retrodicted_signal_distribution(const QubitOperator& rho, const QubitOperator& effect,
                                       double V, const SimParams& p);

struct SignalMoments {
  double norm = 0.0;  ///< integral of the unnormalized joint weight
  double mean = 0.0;
  double variance = 0.0;
};

/// Moments of retrodicted_signal_distribution by Gauss-Hermite quadrature.
SignalMoments retrodicted_signal_moments(const QubitOperator& rho, const QubitOperator& effect,
                                         const SimParams& p);

/// eta_p |phi><phi| + (1 - eta_p) |phi - pi><phi - pi|: a projective
/// post-selection on |phi> that reports the wrong outcome with probability
/// 1 - eta_p. Trace one.
QubitOperator mixed_projector_effect(double phi, double eta_p);

/// Fidelity-corrected effect for the post-selection on |theta - pi/2>
/// used with the preparation |theta>.
QubitOperator corrected_effect(double theta, double eta_p);

struct EfficiencyEstimate {
  double eta_hat = 0.0;
  double eta_std_error = 0.0;
  double mean_plus = 0.0;
  double mean_minus = 0.0;
  double delta_v = 0.0;
  double delta_v_std_error = 0.0;
  /// Unconstrained sample variances, reported for diagnostics only.
  double variance_plus = 0.0;
  double variance_minus = 0.0;
  std::size_t n_plus = 0;
  std::size_t n_minus = 0;
};

inline constexpr std::size_t kMinCalibrationSamples = 10000;

/// Detector efficiency from signal histograms of |+x> and |-x> preparations.
///
/// Each histogram is fit by maximum likelihood with a Gaussian of fixed
/// variance gamma dt, whose MLE center is the sample mean. With the centers
/// separated by Delta V = 2 sqrt(eta) gamma dt, eta_hat = (Delta V / (2 gamma dt))^2
/// and its standard error follows by the delta method. Throws
/// EstimationFailed if Delta V is within two standard errors of zero.
EfficiencyEstimate estimate_efficiency(std::span<const SignalSample> plus,
                                       std::span<const SignalSample> minus, const SimParams& p);

}  // namespace pqs::measurement
