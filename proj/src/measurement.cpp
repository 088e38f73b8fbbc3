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

#include "pqs/measurement.hpp"

#include <cmath>
#include <string>

#include "quadrature.hpp"

namespace pqs::measurement {

namespace {

// Zero-likelihood threshold for the joint pre/post-selection event.
constexpr double kMinJointLikelihood = 1e-14;

// Polynomial part of the instrument: Tr(A rho A^dag E) + (1 - eta) gamma dt
// Tr(sigma_- rho sigma_+ E) with A = 1 - (gamma dt/2) sigma_+ sigma_- + sqrt(eta) V sigma_-.
// Multiplying by N(V; 0, gamma dt) gives instrument_weight.
double instrument_polynomial(const QubitOperator& rho, const QubitOperator& effect, double V,
                             const SimParams& p) {
  const double gdt = p.gamma_dt();
  const QubitOperator a{1.0, std::sqrt(p.eta) * V, 0.0, 1.0 - 0.5 * gdt};
  const QubitOperator lowered = QubitOperator::sigma_minus() * rho * QubitOperator::sigma_plus();
  return trace_product(a * rho * a.adjoint(), effect).real() +
         (1.0 - p.eta) * gdt * trace_product(lowered, effect).real();
}

double joint_norm(const QubitOperator& rho, const QubitOperator& effect, const SimParams& p) {
  return detail::gaussian_expectation(
      [&](double V) { return instrument_polynomial(rho, effect, V, p); }, std::sqrt(p.gamma_dt()));
}

}  // namespace

double gaussian_density(double V, double mean, double variance) {
  const double d = V - mean;
  return std::exp(-0.5 * d * d / variance) / std::sqrt(2.0 * kPi * variance);
}

QubitOperator povm_element(double V, const SimParams& p) {
  const double gdt = p.gamma_dt();
  const double envelope = std::pow(2.0 * kPi * gdt, -0.25) * std::exp(-V * V / (4.0 * gdt));
  return QubitOperator{1.0, std::sqrt(p.eta) * V, 0.0, 1.0 - 0.5 * gdt} * envelope;
}

QubitOperator unobserved_kraus(const SimParams& p) {
  return QubitOperator::sigma_minus() * std::sqrt((1.0 - p.eta) * p.gamma_dt());
}

double instrument_weight(const QubitOperator& rho, const QubitOperator& effect, double V,
                         const SimParams& p) {
  return gaussian_density(V, 0.0, p.gamma_dt()) * instrument_polynomial(rho, effect, V, p);
}

double signal_probability(const QubitOperator& rho, double V, const SimParams& p,
                          SignalModel model) {
  const double gdt = p.gamma_dt();
  const double sx = trace_product(QubitOperator::sigma_x(), rho).real();
  switch (model) {
    case SignalModel::kGaussianShift:
      return gaussian_density(V, std::sqrt(p.eta) * sx * gdt, gdt);
    case SignalModel::kLinearized:
      return gaussian_density(V, 0.0, gdt) * (1.0 + std::sqrt(p.eta) * sx * V);
    case SignalModel::kKraus:
      return retrodicted_signal_distribution(rho, QubitOperator::identity(), V, p);
  }
  return 0.0;
}

double predicted_mean_signal(const QubitOperator& rho, const SimParams& p) {
  return std::sqrt(p.eta) * p.gamma_dt() * trace_product(QubitOperator::sigma_x(), rho).real();
}

std::vector<double> pqs_probabilities(const QubitOperator& rho, const QubitOperator& effect,
                                      std::span<const QubitOperator> povm) {
  QubitOperator completeness = QubitOperator::zero();
  for (const auto& m : povm) completeness += m.adjoint() * m;
  if (max_abs_diff(completeness, QubitOperator::identity()) > 1e-8) {
    throw InvalidOperator("pqs_probabilities: POVM is not complete");
  }
  if (!(trace_product(rho, effect).real() > kMinJointLikelihood)) {
    throw IncompatibleSelection("pqs_probabilities: Tr(rho E) vanishes");
  }
  std::vector<double> out;
  out.reserve(povm.size());
  double total = 0.0;
  for (const auto& m : povm) {
    const double w = trace_product(m * rho * m.adjoint(), effect).real();
    out.push_back(w);
    total += w;
  }
  if (!(total > kMinJointLikelihood)) {
    throw IncompatibleSelection("pqs_probabilities: joint likelihood vanishes");
  }
  for (double& w : out) w /= total;
  return out;
}

double retrodicted_mean_signal(const QubitOperator& rho, const QubitOperator& effect,
                               const SimParams& p) {
  const double overlap = trace_product(rho, effect).real();
  if (!(overlap > kMinJointLikelihood)) {
    throw IncompatibleSelection("retrodicted_mean_signal: Tr(rho E) vanishes");
  }
  const double re = (effect.gg * rho.eg + rho.ee * effect.ge).real();
  return 2.0 * std::sqrt(p.eta) * p.gamma_dt() * re / overlap;
}

double retrodicted_signal_distribution(const QubitOperator& rho, const QubitOperator& effect,
                                       double V, const SimParams& p) {
  const double norm = joint_norm(rho, effect, p);
  if (!(norm > kMinJointLikelihood)) {
    throw IncompatibleSelection("retrodicted_signal_distribution: joint likelihood vanishes");
  }
  return instrument_weight(rho, effect, V, p) / norm;
}

SignalMoments retrodicted_signal_moments(const QubitOperator& rho, const QubitOperator& effect,
                                         const SimParams& p) {
  const double sigma = std::sqrt(p.gamma_dt());
  SignalMoments m;
  m.norm = joint_norm(rho, effect, p);
  if (!(m.norm > kMinJointLikelihood)) {
    throw IncompatibleSelection("retrodicted_signal_moments: joint likelihood vanishes");
  }
  const double first = detail::gaussian_expectation(
      [&](double V) { return V * instrument_polynomial(rho, effect, V, p); }, sigma);
  const double second = detail::gaussian_expectation(
      [&](double V) { return V * V * instrument_polynomial(rho, effect, V, p); }, sigma);
  m.mean = first / m.norm;
  m.variance = second / m.norm - m.mean * m.mean;
  return m;
}

QubitOperator mixed_projector_effect(double phi, double eta_p) {
  if (!(eta_p >= 0.0 && eta_p <= 1.0)) {
    throw DomainError("mixed_projector_effect: eta_p must lie in [0, 1]");
  }
  return from_theta(phi) * eta_p + from_theta(phi - kPi) * (1.0 - eta_p);
}

QubitOperator corrected_effect(double theta, double eta_p) {
  return mixed_projector_effect(theta - 0.5 * kPi, eta_p);
}

EfficiencyEstimate estimate_efficiency(std::span<const SignalSample> plus,
                                       std::span<const SignalSample> minus, const SimParams& p) {
  if (plus.size() < kMinCalibrationSamples || minus.size() < kMinCalibrationSamples) {
    throw InvalidParams("estimate_efficiency: each record set needs at least " +
                        std::to_string(kMinCalibrationSamples) + " samples");
  }
  const double gdt = p.gamma_dt();
  auto moments = [](std::span<const SignalSample> s) {
    double mean = 0.0;
    for (const auto& x : s) mean += x.V;
    mean /= static_cast<double>(s.size());
    double var = 0.0;
    for (const auto& x : s) var += (x.V - mean) * (x.V - mean);
    var /= static_cast<double>(s.size() - 1);
    return std::pair{mean, var};
  };
  const auto [mean_plus, var_plus] = moments(plus);
  const auto [mean_minus, var_minus] = moments(minus);

  EfficiencyEstimate est;
  est.n_plus = plus.size();
  est.n_minus = minus.size();
  est.mean_plus = mean_plus;
  est.mean_minus = mean_minus;
  est.variance_plus = var_plus;
  est.variance_minus = var_minus;
  est.delta_v = mean_plus - mean_minus;
  est.delta_v_std_error = std::sqrt(gdt / static_cast<double>(est.n_plus) +
                                    gdt / static_cast<double>(est.n_minus));
  if (!std::isfinite(est.delta_v) || std::abs(est.delta_v) <= 2.0 * est.delta_v_std_error) {
    throw EstimationFailed("estimate_efficiency: histogram separation " +
                           std::to_string(est.delta_v) + " is consistent with zero");
  }
  const double ratio = est.delta_v / (2.0 * gdt);
  est.eta_hat = ratio * ratio;
  est.eta_std_error = 2.0 * std::abs(ratio) * est.delta_v_std_error / (2.0 * gdt);
  return est;
}

}  // namespace pqs::measurement
