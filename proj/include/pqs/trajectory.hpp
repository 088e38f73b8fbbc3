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

#include <cstdint>
#include <optional>
#include <vector>

#include "pqs/core.hpp"
#include "pqs/measurement.hpp"
#include "pqs/rng.hpp"

namespace pqs::trajectory {

using measurement::SignalSample;

/// Time-ordered homodyne samples, t_k = k dt covering [0, T).
struct HomodyneRecord {
  std::vector<SignalSample> samples;
  SimParams params;
  std::optional<std::uint64_t> seed;  ///< present iff the record is synthetic

  /// Throws InvalidParams if the timestamps or the sample count do not match
  /// the parameters.
  void validate() const;
};

/// Retrodicted Pauli expectation values. Each component lies in [-1, 1];
/// the vector as a whole may leave the unit ball.
struct RetrodictedComponents {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm_squared() const { return x * x + y * y + z * z; }
};

/// Forward and backward filter states at a common time.
struct PastPair {
  double t = 0.0;
  BlochVector rho_bloch;
  BlochVector effect_bloch;
  RetrodictedComponents retro;
};

// Single Euler-Maruyama steps. Every normalized step is followed by Hermitian
// projection, an eigenvalue floor at zero and trace renormalization. At unit
// efficiency a pure input is returned pure, since purity is then an exact
// invariant of the monitored dynamics.

/// rho + gamma dt D[s-]rho + sqrt(eta)(V - sqrt(eta) gamma Tr[sx rho] dt) H[s-]rho.
QubitOperator step_rho_forward(const QubitOperator& rho, double V, const SimParams& p);

/// The same step on (x, z) Bloch components; requires y = 0.
BlochVector step_bloch_rho(const BlochVector& b, double V, const SimParams& p);

/// One step backward in time (E_{t-dt} from E_t) of the trace-normalized
/// adjoint equation. Requires Tr E = 1.
QubitOperator step_effect_backward(const QubitOperator& effect, double V, const SimParams& p);

/// The same step on Bloch components; requires y = 0.
BlochVector step_bloch_effect(const BlochVector& b, double V, const SimParams& p);

/// Unnormalized linear forward propagation,
/// rho + gamma dt D[s-]rho + sqrt(eta) V (s- rho + rho s+).
QubitOperator step_rho_linear(const QubitOperator& rho, double V, const SimParams& p);

/// Exact adjoint of step_rho_linear, applied backward in time:
/// Tr(step_rho_linear(rho) E) == Tr(rho step_effect_linear(E)).
QubitOperator step_effect_linear(const QubitOperator& effect, double V, const SimParams& p);

/// <s_u>_p = (u_rho + u_E) / (1 + u_rho u_E) per axis. Throws
/// IncompatibleSelection when a denominator falls below 1e-12.
RetrodictedComponents retrodicted_bloch(const BlochVector& rho_b, const BlochVector& effect_b);

/// Forward filter fed one sample at a time. Replay and synthetic generation
/// both go through update().
class ForwardFilter {
 public:
  ForwardFilter(const QubitOperator& rho0, const SimParams& p);

  const QubitOperator& state() const { return rho_; }
  double predicted_signal() const { return measurement::predicted_mean_signal(rho_, params_); }
  void update(double V) { rho_ = step_rho_forward(rho_, V, params_); }

 private:
  QubitOperator rho_;
  SimParams params_;
};

struct GeneratedRecord {
  HomodyneRecord record;
  /// Filtered rho Bloch vectors at t_k = k dt, k = 0..N (N + 1 entries).
  std::vector<BlochVector> rho_trajectory;
};

/// Synthetic record: V_k = sqrt(eta) gamma <sx>_k dt + sqrt(gamma) dW_k with
/// dW_k ~ N(0, dt), each sample fed back into the forward filter.
///
/// With substeps > 1 the dynamics are integrated at dt / substeps and each
/// recorded sample is the sum of `substeps` consecutive sub-samples, i.e. the
/// signal integrated over one recording interval dt.
GeneratedRecord generate_record(const QubitOperator& rho0, const SimParams& p, Rng& rng,
                                int substeps = 1);

/// Deterministic in `seed` (stream 0 of make_stream).
GeneratedRecord generate_record(const QubitOperator& rho0, const SimParams& p, std::uint64_t seed);

/// Forward-backward smoothing of a record. The rho at step k has seen
/// samples [0, k) and the effect at step k has seen samples [k, N), so the
/// result holds N + 1 pairs at t_k = k dt. E_T need not be normalized.
/// Throws IncompatibleSelection carrying the failing timestamp if the
/// joint likelihood vanishes.
std::vector<PastPair> smooth_record(const HomodyneRecord& record, const QubitOperator& rho0,
                                    const QubitOperator& effect_T);

}  // namespace pqs::trajectory
