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
#include <iosfwd>
#include <vector>

#include "pqs/core.hpp"

namespace pqs::geometry {

enum class EllipseKind { kRho, kEffect };

/// The ellipse in the x-z plane on which a rho (value alpha) or an effect
/// (value beta) is confined. Infinite values are allowed and describe the
/// degenerate ellipse at a pole: alpha = +inf is the ground state, beta = -inf
/// the excited-state projector.
struct EllipseParam {
  double value = 1.0;
  EllipseKind kind = EllipseKind::kRho;

  /// Throws InvalidParams unless alpha > 0.
  static EllipseParam rho(double alpha);
  /// Throws InvalidParams unless beta < 0.
  static EllipseParam effect(double beta);

  /// 1/alpha for rho, -1/beta for effect. Zero at the poles.
  double reciprocal() const;
  double center_z() const;
  /// Semi-axes: rho (1/sqrt(alpha), 1/alpha), effect (1/sqrt(-beta), 1/|beta|).
  double semi_x() const;
  double semi_z() const;
  /// Point at angle phi, (center_z + semi_z sin phi, semi_x cos phi).
  BlochVector point(double phi) const;

  /// rho:    alpha^2 (1 - z - 1/alpha)^2 + alpha x^2 - 1
  /// effect: beta^2 (z + 1 + 1/beta)^2 - beta (x^2 + y^2) - 1
  /// At a pole, the distance to the pole instead.
  double residual(const BlochVector& b) const;
};

/// alpha = 2/(1-z) - x^2/(1-z)^2. Throws SingularPoint at z = 1.
double alpha_of(double x, double z);
/// 1/alpha, well conditioned near z = 1.
double alpha_reciprocal_of(double x, double z);
/// alpha(t) = eta + (alpha0 - eta) e^{gamma t}. Throws DomainError for t < 0.
double alpha_at_time(double alpha0, double t, const SimParams& p);

/// beta = -2/(1+z) + x^2/(1+z)^2. Throws SingularPoint at z = -1.
double beta_of(double x, double z);
/// -1/beta, well conditioned near z = -1.
double beta_reciprocal_of(double x, double z);
/// beta(t) = eta - 2 + (beta_T - eta + 2) e^{gamma (t - T)}. Throws
/// DomainError unless 0 <= t <= T.
double beta_at_time(double beta_T, double t, double T, const SimParams& p);

/// Ellipse parameter of a rho or effect Bloch vector, infinite at its pole.
EllipseParam rho_ellipse_of(const BlochVector& b);
EllipseParam effect_ellipse_of(const BlochVector& b);

bool on_rho_ellipse(const BlochVector& b, double alpha, double tol);
bool on_effect_ellipse(const BlochVector& b, double beta, double tol);

struct PlanePoint {
  double x = 0.0;
  double z = 0.0;
};

using Polygon = std::vector<PlanePoint>;

/// Signed area, positive for counter-clockwise vertex order.
double polygon_area(const Polygon& poly);
/// Even-odd rule.
bool polygon_contains(const Polygon& poly, PlanePoint p);
double distance_to_boundary(const Polygon& poly, PlanePoint p);

struct RegionOptions {
  int grid_n = 128;       ///< sweep angles per ellipse, at least 64
  int resolution = 512;   ///< raster cells per axis over [-1, 1]
};

/// Set of retrodicted (x, z) values reachable from a rho ellipse and an
/// effect ellipse (or a fixed effect).
struct RetrodictionRegion {
  /// Outer boundary loops, largest area first. A connected region has one.
  std::vector<Polygon> loops;
  /// Sweep pairs dropped because an axis denominator vanished.
  std::size_t skipped = 0;
  std::size_t evaluated = 0;
  /// Raster cell size; the loops overcover the region by at most ~2 cells.
  double cell = 0.0;

  const Polygon& outer() const { return loops.front(); }
  /// Inside some loop, or within tol of one.
  bool contains(PlanePoint p, double tol) const;
};

/// Sweeps grid_n^2 (rho, effect) angle pairs over both ellipses, maps each
/// through the retrodiction formula and traces the outer boundary of the
/// image. The image need not be convex; it is rasterized rather than hulled.
RetrodictionRegion retrodiction_region(double alpha, double beta, const RegionOptions& opt = {});
RetrodictionRegion retrodiction_region(double alpha, double beta, int grid_n);

/// Same, with the effect held at a single Bloch vector. With the identity
/// effect (zero vector) the region is the rho ellipse itself.
RetrodictionRegion retrodiction_region(double alpha, const BlochVector& fixed_effect,
                                       const RegionOptions& opt = {});

/// `x,z` header then one vertex per row, 17 significant digits.
void write_polygon_csv(std::ostream& os, const Polygon& poly);

}  // namespace pqs::geometry
