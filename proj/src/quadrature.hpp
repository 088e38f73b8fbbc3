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

#include <cmath>
#include <vector>

#include "pqs/core.hpp"

namespace pqs::detail {

/// Nodes and weights for integrals against exp(-x^2) on the real line.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Golub-Welsch construction; n >= 1.
GaussHermiteRule make_gauss_hermite_rule(int n);

/// Shared 64-node table, built on first use and read-only afterwards.
const GaussHermiteRule& gauss_hermite_64();

/// Integral of N(V; 0, sigma^2) * f(V) over the real line. Exact for
/// polynomial f up to degree 127.
template <class F>
double gaussian_expectation(F&& f, double sigma) {
  const GaussHermiteRule& rule = gauss_hermite_64();
  const double scale = std::sqrt(2.0) * sigma;
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    acc += rule.weights[i] * f(scale * rule.nodes[i]);
  }
  return acc / std::sqrt(kPi);
}

}  // namespace pqs::detail
