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
#include <complex>
#include <cstddef>
#include <cstdint>

#include "pqs/errors.hpp"

namespace pqs {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Tolerances shared by the validation helpers.
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kEigenFloorTol = 1e-10;
inline constexpr double kBlochNormTol = 1e-8;

/// 2x2 complex matrix in the (|g>, |e>) basis.
///
/// Used for density matrices, effect matrices and (non-Hermitian) measurement
/// operators alike. sigma_minus maps |e> to |g>, so in this basis it has a
/// single unit entry in the ge slot.
struct QubitOperator {
  Complex gg{0.0};
  Complex ge{0.0};
  Complex eg{0.0};
  Complex ee{0.0};

  static constexpr QubitOperator identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static constexpr QubitOperator zero() { return {}; }
  static constexpr QubitOperator sigma_minus() { return {0.0, 1.0, 0.0, 0.0}; }
  static constexpr QubitOperator sigma_plus() { return {0.0, 0.0, 1.0, 0.0}; }
  static constexpr QubitOperator sigma_x() { return {0.0, 1.0, 1.0, 0.0}; }
  static QubitOperator sigma_y() { return {0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0}; }
  /// +1 on |g>, -1 on |e>.
  static constexpr QubitOperator sigma_z() { return {1.0, 0.0, 0.0, -1.0}; }
  static constexpr QubitOperator ground() { return {1.0, 0.0, 0.0, 0.0}; }
  static constexpr QubitOperator excited() { return {0.0, 0.0, 0.0, 1.0}; }

  Complex trace() const { return gg + ee; }
  QubitOperator adjoint() const { return {std::conj(gg), std::conj(eg), std::conj(ge), std::conj(ee)}; }

  QubitOperator& operator+=(const QubitOperator& o) {
    gg += o.gg;
    ge += o.ge;
    eg += o.eg;
    ee += o.ee;
    return *this;
  }
  QubitOperator& operator-=(const QubitOperator& o) {
    gg -= o.gg;
    ge -= o.ge;
    eg -= o.eg;
    ee -= o.ee;
    return *this;
  }
  QubitOperator& operator*=(Complex s) {
    gg *= s;
    ge *= s;
    eg *= s;
    ee *= s;
    return *this;
  }

  friend QubitOperator operator+(QubitOperator a, const QubitOperator& b) { return a += b; }
  friend QubitOperator operator-(QubitOperator a, const QubitOperator& b) { return a -= b; }
  friend QubitOperator operator*(QubitOperator a, Complex s) { return a *= s; }
  friend QubitOperator operator*(Complex s, QubitOperator a) { return a *= s; }
  friend QubitOperator operator*(QubitOperator a, double s) { return a *= Complex(s); }
  friend QubitOperator operator*(double s, QubitOperator a) { return a *= Complex(s); }
  friend QubitOperator operator*(const QubitOperator& a, const QubitOperator& b) {
    return {a.gg * b.gg + a.ge * b.eg, a.gg * b.ge + a.ge * b.ee,
            a.eg * b.gg + a.ee * b.eg, a.eg * b.ge + a.ee * b.ee};
  }
  friend bool operator==(const QubitOperator&, const QubitOperator&) = default;
};

/// Tr(a b) without forming the product.
inline Complex trace_product(const QubitOperator& a, const QubitOperator& b) {
  return a.gg * b.gg + a.ge * b.eg + a.eg * b.ge + a.ee * b.ee;
}

double max_abs_diff(const QubitOperator& a, const QubitOperator& b);
bool is_hermitian(const QubitOperator& op, double tol = kHermitianTol);
QubitOperator hermitian_part(const QubitOperator& op);

/// Eigenvalues of the Hermitian part, ascending.
std::array<double, 2> eigenvalues(const QubitOperator& op);

/// Hermitian, trace one, eigenvalues in [-1e-10, 1 + 1e-10].
bool is_physical_state(const QubitOperator& op);

/// Hermitian projection, eigenvalue floor at zero, then trace normalization.
/// Throws InvalidOperator when nothing positive is left to normalize.
QubitOperator project_physical(const QubitOperator& op);

/// Scales a positive operator to unit trace (effect matrices carry no
/// meaningful normalization). Throws InvalidOperator on non-positive trace.
QubitOperator normalized(const QubitOperator& op);

double purity(const QubitOperator& op);

/// Real Bloch components with z = +1 on the ground state.
struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const;
  double norm_squared() const { return x * x + y * y + z * z; }
  friend bool operator==(const BlochVector&, const BlochVector&) = default;
};

/// u = Tr(sigma_u op). Requires a Hermitian, unit-trace operator.
BlochVector to_bloch(const QubitOperator& op);

/// (1 + x sx + y sy + z sz) / 2.
QubitOperator from_bloch(const BlochVector& b);

/// |theta><theta| with |theta> = cos(theta/2)|g> + sin(theta/2)|e>.
QubitOperator from_theta(double theta);

/// Preparation angle in the x-z plane of the Bloch sphere.
struct PreparedState {
  double theta = 0.0;

  QubitOperator density() const { return from_theta(theta); }
  BlochVector bloch() const;
};

/// Physical and numerical parameters. Rates in 1/us, times in us.
struct SimParams {
  double gamma = 1.628;
  double eta = 0.3;
  double dt = 0.02;
  double T = 1.68;
  double eta_p = 1.0;

  /// Throws InvalidParams when any invariant is violated.
  void validate() const;
  /// Number of dt steps covering [0, T).
  std::size_t steps() const;
  double gamma_dt() const { return gamma * dt; }
  /// Largest attainable unconditioned mean signal, sqrt(eta) gamma dt.
  double signal_bound() const;
};

inline constexpr double kMaxGammaDt = 0.1;

}  // namespace pqs
