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

#include "pqs/core.hpp"

namespace pqs::deterministic {

/// Excitation probabilities of an initially excited two-level system that
/// decays at rate gamma, with and without knowledge of its state at T.
struct ClassicalDecay {
  double unconditioned;       ///< P(e,t) = exp(-gamma t)
  double given_excited_final; ///< P(e,t|e,T), identically 1
  double given_ground_final;  ///< P(e,t|g,T)
};

/// P(e,t|g,T) for an initially excited emitter found in |g> at T.
/// Throws DomainError unless 0 <= t <= T. Returns 1 at t = T = 0.
double classical_conditional_excited(double gamma, double t, double T);

ClassicalDecay classical_decay(double gamma, double t, double T);

/// Closed-form solution of the unmonitored decay master equation.
QubitOperator rho_unmonitored(const QubitOperator& rho0, double t, double gamma);

/// Closed-form backward solution of the adjoint equation from E_T at time T
/// down to t. The result is not normalized.
QubitOperator effect_unmonitored(const QubitOperator& effect_T, double t, double T, double gamma);

/// gamma dt D[sigma_-] rho, the Lindblad decay increment.
QubitOperator lindblad_increment(const QubitOperator& rho, double gamma_dt);

/// gamma dt D^dagger[sigma_-] E, the adjoint decay increment.
QubitOperator adjoint_lindblad_increment(const QubitOperator& effect, double gamma_dt);

}  // namespace pqs::deterministic
