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

#include "pqs/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pqs/deterministic.hpp"

namespace pqs::trajectory {

namespace {

constexpr double kPureTol = 1e-9;
constexpr double kPlaneTol = 1e-12;
constexpr double kMinDenominator = 1e-12;

bool keeps_purity(const SimParams& p, double input_norm) {
  return p.eta == 1.0 && input_norm >= 1.0 - kPureTol;
}

BlochVector clip_to_ball(BlochVector b, bool force_unit) {
  const double n = b.norm();
  if ((n > 1.0 || force_unit) && n > 0.0) {
    b.x /= n;
    b.y /= n;
    b.z /= n;
  }
  return b;
}

QubitOperator finish_step(const QubitOperator& raw, bool force_pure) {
  QubitOperator out = project_physical(raw);
  if (force_pure) out = from_bloch(clip_to_ball(to_bloch(out), true));
  return out;
}

double bloch_norm_of(const QubitOperator& op) {
  const double dz = (op.gg - op.ee).real();
  return std::sqrt(4.0 * std::norm(op.ge) + dz * dz);
}

void require_plane_state(const BlochVector& b, const char* where) {
  if (b.norm() > 1.0 + kBlochNormTol) {
    throw InvalidState(std::string(where) + ": Bloch vector outside the unit ball");
  }
  if (std::abs(b.y) > kPlaneTol) {
    throw InvalidState(std::string(where) + ": state must lie in the x-z plane");
  }
}

}  // namespace

void HomodyneRecord::validate() const {
  params.validate();
  if (samples.size() != params.steps()) {
    throw InvalidParams("HomodyneRecord: expected " + std::to_string(params.steps()) +
                        " samples, got " + std::to_string(samples.size()));
  }
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const double expected = static_cast<double>(k) * params.dt;
    if (std::abs(samples[k].t - expected) > 1e-9 * std::max(1.0, expected)) {
      throw InvalidParams("HomodyneRecord: sample " + std::to_string(k) +
                          " is not on the t = k dt grid");
    }
    if (!std::isfinite(samples[k].V)) {
      throw InvalidParams("HomodyneRecord: non-finite sample " + std::to_string(k));
    }
  }
}

QubitOperator step_rho_forward(const QubitOperator& rho, double V, const SimParams& p) {
  const double gdt = p.gamma_dt();
  const double se = std::sqrt(p.eta);
  const double sx = (rho.ge + rho.eg).real();
  const double innovation = V - se * p.gamma * sx * p.dt;
  // H[s-]rho = s- rho + rho s+ - Tr[(s- + s+) rho] rho
  const QubitOperator backaction =
      QubitOperator{rho.eg + rho.ge, rho.ee, rho.ee, 0.0} - rho * sx;
  const QubitOperator raw =
      rho + deterministic::lindblad_increment(rho, gdt) + backaction * (se * innovation);
  return finish_step(raw, keeps_purity(p, bloch_norm_of(rho)));
}

BlochVector step_bloch_rho(const BlochVector& b, double V, const SimParams& p) {
  require_plane_state(b, "step_bloch_rho");
  const double se = std::sqrt(p.eta);
  const double dt = p.dt;
  const double u = 1.0 - b.z;
  const double innovation = V - se * p.gamma * b.x * dt;
  BlochVector next{b.x - 0.5 * p.gamma * b.x * dt + se * (u - b.x * b.x) * innovation, 0.0,
                   b.z + p.gamma * u * dt + se * u * b.x * innovation};
  return clip_to_ball(next, keeps_purity(p, b.norm()));
}

QubitOperator step_effect_backward(const QubitOperator& effect, double V, const SimParams& p) {
  if (std::abs(effect.trace().real() - 1.0) > kTraceTol) {
    throw InvalidOperator("step_effect_backward: effect must be trace-normalized");
  }
  const double gdt = p.gamma_dt();
  const double se = std::sqrt(p.eta);
  const double sx = (effect.ge + effect.eg).real();
  const double sz = (effect.gg - effect.ee).real();
  const double innovation = V - se * p.gamma * sx * p.dt;
  // H[s+]E = s+ E + E s- - Tr[(s+ + s-) E] E
  const QubitOperator backaction =
      QubitOperator{0.0, effect.gg, effect.gg, effect.ge + effect.eg} - effect * sx;
  const QubitOperator raw = effect + deterministic::adjoint_lindblad_increment(effect, gdt) -
                            effect * (gdt * sz) + backaction * (se * innovation);
  return finish_step(raw, keeps_purity(p, bloch_norm_of(effect)));
}

BlochVector step_bloch_effect(const BlochVector& b, double V, const SimParams& p) {
  require_plane_state(b, "step_bloch_effect");
  const double se = std::sqrt(p.eta);
  const double gdt = p.gamma_dt();
  const double w = 1.0 + b.z;
  const double x2 = b.x * b.x;
  BlochVector next{
      b.x - 0.5 * gdt * b.x * (1.0 + 2.0 * b.z + 2.0 * p.eta * (w - x2)) + se * (w - x2) * V, 0.0,
      b.z - gdt * (b.z + b.z * b.z - p.eta * w * x2) - se * w * b.x * V};
  return clip_to_ball(next, keeps_purity(p, b.norm()));
}

QubitOperator step_rho_linear(const QubitOperator& rho, double V, const SimParams& p) {
  const QubitOperator kick{rho.eg + rho.ge, rho.ee, rho.ee, 0.0};
  return rho + deterministic::lindblad_increment(rho, p.gamma_dt()) + kick * (std::sqrt(p.eta) * V);
}

QubitOperator step_effect_linear(const QubitOperator& effect, double V, const SimParams& p) {
  const QubitOperator kick{0.0, effect.gg, effect.gg, effect.ge + effect.eg};
  return effect + deterministic::adjoint_lindblad_increment(effect, p.gamma_dt()) +
         kick * (std::sqrt(p.eta) * V);
}

RetrodictedComponents retrodicted_bloch(const BlochVector& rho_b, const BlochVector& effect_b) {
  auto axis = [](double a, double b, const char* name) {
    const double den = 1.0 + a * b;
    if (std::abs(den) < kMinDenominator) {
      throw IncompatibleSelection(std::string("retrodicted_bloch: orthogonal pre/post-selection on ") +
                                  name + " axis");
    }
    return std::clamp((a + b) / den, -1.0, 1.0);
  };
  return {axis(rho_b.x, effect_b.x, "x"), axis(rho_b.y, effect_b.y, "y"),
          axis(rho_b.z, effect_b.z, "z")};
}

ForwardFilter::ForwardFilter(const QubitOperator& rho0, const SimParams& p)
    : rho_(rho0), params_(p) {}

GeneratedRecord generate_record(const QubitOperator& rho0, const SimParams& p, Rng& rng,
                                int substeps) {
  p.validate();
  if (substeps < 1) throw InvalidParams("generate_record: substeps must be >= 1");
  SimParams fine = p;
  fine.dt = p.dt / substeps;

  const std::size_t n = p.steps();
  GeneratedRecord out;
  out.record.params = p;
  out.record.samples.reserve(n);
  out.rho_trajectory.reserve(n + 1);

  ForwardFilter filter(rho0, fine);
  std::normal_distribution<double> wiener(0.0, std::sqrt(fine.dt));
  const double sqrt_gamma = std::sqrt(p.gamma);
  out.rho_trajectory.push_back(to_bloch(filter.state()));
  for (std::size_t k = 0; k < n; ++k) {
    double integrated = 0.0;
    for (int s = 0; s < substeps; ++s) {
      const double V = filter.predicted_signal() + sqrt_gamma * wiener(rng);
      filter.update(V);
      integrated += V;
    }
    out.record.samples.push_back({integrated, static_cast<double>(k) * p.dt});
    out.rho_trajectory.push_back(to_bloch(filter.state()));
  }
  return out;
}

GeneratedRecord generate_record(const QubitOperator& rho0, const SimParams& p, std::uint64_t seed) {
  Rng rng = make_stream(seed, 0);
  GeneratedRecord out = generate_record(rho0, p, rng);
  out.record.seed = seed;
  return out;
}

std::vector<PastPair> smooth_record(const HomodyneRecord& record, const QubitOperator& rho0,
                                    const QubitOperator& effect_T) {
  record.validate();
  const SimParams& p = record.params;
  const std::size_t n = record.samples.size();

  std::vector<QubitOperator> rhos;
  rhos.reserve(n + 1);
  ForwardFilter filter(rho0, p);
  rhos.push_back(filter.state());
  for (const auto& s : record.samples) {
    filter.update(s.V);
    rhos.push_back(filter.state());
  }

  std::vector<PastPair> pairs(n + 1);
  QubitOperator effect = normalized(hermitian_part(effect_T));
  for (std::size_t i = n + 1; i-- > 0;) {
    if (i < n) effect = step_effect_backward(effect, record.samples[i].V, p);
    const double t = static_cast<double>(i) * p.dt;
    PastPair& pair = pairs[i];
    pair.t = t;
    pair.rho_bloch = to_bloch(rhos[i]);
    pair.effect_bloch = to_bloch(effect);
    if (!(trace_product(rhos[i], effect).real() > 1e-14)) {
      throw IncompatibleSelection("smooth_record: zero joint likelihood", t);
    }
    try {
      pair.retro = retrodicted_bloch(pair.rho_bloch, pair.effect_bloch);
    } catch (const IncompatibleSelection& e) {
      throw IncompatibleSelection(e.what(), t);
    }
  }
  return pairs;
}

}  // namespace pqs::trajectory
