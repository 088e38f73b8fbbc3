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

#include "oracles.hpp"

#include <cmath>
#include <random>

namespace oracle {

Mat2 mul(const Mat2& a, const Mat2& b) {
  Mat2 c{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) c[i][j] += a[i][k] * b[k][j];
  return c;
}

Mat2 dagger(const Mat2& a) {
  Mat2 c{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) c[i][j] = std::conj(a[j][i]);
  return c;
}

Mat2 add(const Mat2& a, const Mat2& b) {
  Mat2 c{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) c[i][j] = a[i][j] + b[i][j];
  return c;
}

Mat2 scale(const Mat2& a, cplx s) {
  Mat2 c{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) c[i][j] = a[i][j] * s;
  return c;
}

cplx trace(const Mat2& a) { return a[0][0] + a[1][1]; }

Mat2 projector(double theta) {
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  Mat2 m{};
  m[0][0] = c * c;
  m[0][1] = c * s;
  m[1][0] = c * s;
  m[1][1] = s * s;
  return m;
}

MarkovEstimate markov_conditional_excited(double gamma, double T, const std::vector<double>& times,
                                          std::size_t runs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> decay(gamma);
  MarkovEstimate out;
  std::vector<std::size_t> excited(times.size(), 0);
  for (std::size_t r = 0; r < runs; ++r) {
    const double tau = decay(rng);
    if (tau > T) continue;  // still excited at T: rejected
    ++out.accepted;
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (tau > times[i]) ++excited[i];
    }
  }
  for (std::size_t n : excited) out.p.push_back(static_cast<double>(n) / static_cast<double>(out.accepted));
  return out;
}

double rk4(const std::function<double(double, double)>& f, double y0, double t0, double t1,
           int steps) {
  const double h = (t1 - t0) / steps;
  double y = y0, t = t0;
  for (int i = 0; i < steps; ++i) {
    const double k1 = f(t, y);
    const double k2 = f(t + h / 2, y + h / 2 * k1);
    const double k3 = f(t + h / 2, y + h / 2 * k2);
    const double k4 = f(t + h, y + h * k3);
    y += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    t += h;
  }
  return y;
}

namespace {

Mat2 lowering() {
  Mat2 m{};
  m[0][1] = 1.0;  // |g><e|
  return m;
}

Mat2 rk4_mat(const std::function<Mat2(const Mat2&)>& f, Mat2 y, double h, int steps) {
  for (int i = 0; i < steps; ++i) {
    const Mat2 k1 = f(y);
    const Mat2 k2 = f(add(y, scale(k1, h / 2)));
    const Mat2 k3 = f(add(y, scale(k2, h / 2)));
    const Mat2 k4 = f(add(y, scale(k3, h)));
    y = add(y, scale(add(add(k1, scale(k2, 2.0)), add(scale(k3, 2.0), k4)), h / 6));
  }
  return y;
}

}  // namespace

Mat2 lindblad_rk4(const Mat2& rho0, double gamma, double t, int steps) {
  const Mat2 L = lowering(), Ld = dagger(lowering()), n = mul(Ld, L);
  auto f = [&](const Mat2& r) {
    const Mat2 jump = mul(mul(L, r), Ld);
    const Mat2 anti = add(mul(n, r), mul(r, n));
    return scale(add(jump, scale(anti, -0.5)), gamma);
  };
  return rk4_mat(f, rho0, t / steps, steps);
}

Mat2 adjoint_lindblad_rk4(const Mat2& effect_T, double gamma, double t, double T, int steps) {
  const Mat2 L = lowering(), Ld = dagger(lowering()), n = mul(Ld, L);
  // -dE/dt = gamma (s+ E s- - {s+ s-, E}/2), integrated in reversed time.
  auto f = [&](const Mat2& e) {
    const Mat2 jump = mul(mul(Ld, e), L);
    const Mat2 anti = add(mul(n, e), mul(e, n));
    return scale(add(jump, scale(anti, -0.5)), gamma);
  };
  return rk4_mat(f, effect_T, (T - t) / steps, steps);
}

InstrumentMoments instrument_moments_trapezoid(const Mat2& rho, const Mat2& effect, double gamma,
                                               double eta, double dt, int points) {
  const double gdt = gamma * dt;
  const double sigma = std::sqrt(gdt);
  const double lim = 14.0 * sigma;
  const double h = 2.0 * lim / (points - 1);
  const Mat2 L = lowering(), Ld = dagger(L);
  const double unobserved = (1.0 - eta) * gdt * std::real(trace(mul(mul(mul(L, rho), Ld), effect)));
  double norm = 0.0, first = 0.0;
  for (int i = 0; i < points; ++i) {
    const double V = -lim + i * h;
    const double env = std::pow(2.0 * M_PI * gdt, -0.25) * std::exp(-V * V / (4.0 * gdt));
    Mat2 M{};
    M[0][0] = env;
    M[1][1] = env * (1.0 - gdt / 2);
    M[0][1] = env * std::sqrt(eta) * V;
    const double gauss = std::exp(-V * V / (2.0 * gdt)) / std::sqrt(2.0 * M_PI * gdt);
    const double w = std::real(trace(mul(mul(mul(M, rho), dagger(M)), effect))) + gauss * unobserved;
    const double tw = (i == 0 || i == points - 1) ? 0.5 : 1.0;
    norm += tw * w * h;
    first += tw * w * V * h;
  }
  return {norm, first / norm};
}

}  // namespace oracle
