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

#include "pqs/deterministic.hpp"

#include <cmath>

namespace pqs::deterministic {

double classical_conditional_excited(double gamma, double t, double T) {
  if (!(t >= 0.0) || !(t <= T)) {
    throw DomainError("classical_conditional_excited: requires 0 <= t <= T");
  }
  if (T == 0.0) return 1.0;
  // e^{-gt}(1 - e^{-g(T-t)}) / [ ... + (1 - e^{-gt})] simplifies to
  // (e^{-gt} - e^{-gT}) / (1 - e^{-gT}).
  const double num = std::expm1(-gamma * t) - std::expm1(-gamma * T);
  const double den = -std::expm1(-gamma * T);
  return num / den;
}

ClassicalDecay classical_decay(double gamma, double t, double T) {
  return {std::exp(-gamma * t), 1.0, classical_conditional_excited(gamma, t, T)};
}

QubitOperator rho_unmonitored(const QubitOperator& rho0, double t, double gamma) {
  if (!(t >= 0.0)) throw DomainError("rho_unmonitored: t must be non-negative");
  const double pop = std::exp(-gamma * t);
  const double coh = std::exp(-0.5 * gamma * t);
  const Complex ee = rho0.ee * pop;
  return {rho0.gg + rho0.ee - ee, rho0.ge * coh, rho0.eg * coh, ee};
}

QubitOperator effect_unmonitored(const QubitOperator& effect_T, double t, double T, double gamma) {
  if (!(t <= T)) throw DomainError("effect_unmonitored: requires t <= T");
  const double pop = std::exp(-gamma * (T - t));
  const double coh = std::exp(-0.5 * gamma * (T - t));
  return {effect_T.gg, effect_T.ge * coh, effect_T.eg * coh,
          effect_T.gg + (effect_T.ee - effect_T.gg) * pop};
}

QubitOperator lindblad_increment(const QubitOperator& rho, double gamma_dt) {
  // sigma_- rho sigma_+ - {sigma_+ sigma_-, rho}/2
  return QubitOperator{rho.ee, -0.5 * rho.ge, -0.5 * rho.eg, -rho.ee} * gamma_dt;
}

QubitOperator adjoint_lindblad_increment(const QubitOperator& effect, double gamma_dt) {
  // sigma_+ E sigma_- - {sigma_+ sigma_-, E}/2
  return QubitOperator{0.0, -0.5 * effect.ge, -0.5 * effect.eg, effect.gg - effect.ee} * gamma_dt;
}

}  // namespace pqs::deterministic
