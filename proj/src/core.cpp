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

#include "pqs/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pqs {

double max_abs_diff(const QubitOperator& a, const QubitOperator& b) {
  return std::max({std::abs(a.gg - b.gg), std::abs(a.ge - b.ge), std::abs(a.eg - b.eg),
                   std::abs(a.ee - b.ee)});
}

bool is_hermitian(const QubitOperator& op, double tol) {
  return std::abs(op.gg.imag()) <= tol && std::abs(op.ee.imag()) <= tol &&
         std::abs(op.eg - std::conj(op.ge)) <= tol;
}

QubitOperator hermitian_part(const QubitOperator& op) {
  const Complex off = 0.5 * (op.ge + std::conj(op.eg));
  return {op.gg.real(), off, std::conj(off), op.ee.real()};
}

namespace {

// H = a*1 + b.sigma for the Hermitian part of op.
struct PauliDecomposition {
  double a;
  double bx;
  double by;
  double bz;

  double b_norm() const { return std::sqrt(bx * bx + by * by + bz * bz); }
};

PauliDecomposition decompose(const QubitOperator& op) {
  const QubitOperator h = hermitian_part(op);
  return {0.5 * (h.gg.real() + h.ee.real()), h.ge.real(), -h.ge.imag(),
          0.5 * (h.gg.real() - h.ee.real())};
}

}  // namespace

std::array<double, 2> eigenvalues(const QubitOperator& op) {
  const PauliDecomposition d = decompose(op);
  const double r = d.b_norm();
  return {d.a - r, d.a + r};
}

bool is_physical_state(const QubitOperator& op) {
  if (!is_hermitian(op)) return false;
  if (std::abs(op.trace().real() - 1.0) > kTraceTol) return false;
  const auto ev = eigenvalues(op);
  return ev[0] >= -kEigenFloorTol && ev[1] <= 1.0 + kEigenFloorTol;
}

QubitOperator project_physical(const QubitOperator& op) {
  const PauliDecomposition d = decompose(op);
  const double r = d.b_norm();
  if (!(d.a + r > 0.0)) {
    throw InvalidOperator("project_physical: operator has no positive eigenvalue");
  }
  if (d.a - r >= 0.0) {
    return from_bloch({d.bx / d.a, d.by / d.a, d.bz / d.a});
  }
  // Lower eigenvalue floored at zero: only the upper eigenprojector survives.
  return from_bloch({d.bx / r, d.by / r, d.bz / r});
}

QubitOperator normalized(const QubitOperator& op) {
  const double tr = op.trace().real();
  if (!(tr > 0.0)) {
    throw InvalidOperator("normalized: trace must be positive, got " + std::to_string(tr));
  }
  return op * (1.0 / tr);
}

double purity(const QubitOperator& op) { return trace_product(op, op).real(); }

double BlochVector::norm() const { return std::sqrt(norm_squared()); }

BlochVector to_bloch(const QubitOperator& op) {
  if (!is_hermitian(op)) {
    throw InvalidOperator("to_bloch: operator is not Hermitian");
  }
  const double tr = op.trace().real();
  if (std::abs(tr - 1.0) > kTraceTol) {
    throw InvalidOperator("to_bloch: trace must be 1, got " + std::to_string(tr));
  }
  return {op.ge.real() + op.eg.real(), (Complex(0.0, 1.0) * (op.ge - op.eg)).real(),
          op.gg.real() - op.ee.real()};
}

QubitOperator from_bloch(const BlochVector& b) {
  const Complex ge(0.5 * b.x, -0.5 * b.y);
  return {0.5 * (1.0 + b.z), ge, std::conj(ge), 0.5 * (1.0 - b.z)};
}

QubitOperator from_theta(double theta) {
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  return {c * c, c * s, c * s, s * s};
}

BlochVector PreparedState::bloch() const { return {std::sin(theta), 0.0, std::cos(theta)}; }

void SimParams::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw InvalidParams("gamma must be positive and finite");
  }
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw InvalidParams("eta must lie in [0, 1]");
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw InvalidParams("dt must be positive and finite");
  }
  if (gamma * dt > kMaxGammaDt) {
    throw InvalidParams("gamma*dt = " + std::to_string(gamma * dt) +
                        " exceeds the first-order stepping limit 0.1");
  }
  if (!(T > 0.0) || !std::isfinite(T)) {
    throw InvalidParams("T must be positive and finite");
  }
  const double n = T / dt;
  if (std::abs(n - std::round(n)) > 1e-9 * std::max(1.0, n)) {
    throw InvalidParams("T must be an integer multiple of dt");
  }
  if (!(eta_p > 0.5 && eta_p <= 1.0)) {
    throw InvalidParams("eta_p must lie in (0.5, 1]");
  }
}

std::size_t SimParams::steps() const { return static_cast<std::size_t>(std::llround(T / dt)); }

double SimParams::signal_bound() const { return std::sqrt(eta) * gamma * dt; }

}  // namespace pqs
