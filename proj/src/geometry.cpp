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

#include "pqs/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>

#include "pqs/errors.hpp"
#include "pqs/record_io.hpp"
#include "pqs/trajectory.hpp"

namespace pqs::geometry {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPoleTol = 1e-6;

// Residual of a point against an ellipse given by its reciprocal parameter r,
// written in the distance d from the pole (d = 1 - z for rho, 1 + z for effects).
double reciprocal_residual(double r, double d, double x2) {
  if (r == 0.0) return std::sqrt(d * d + x2);
  const double a = (d - r) / r;
  return a * a + x2 / r - 1.0;
}

// Reciprocal parameter d^2 / (2d - x^2); zero at the pole itself.
double reciprocal_from_pole_distance(double x, double d, const char* where) {
  if (d == 0.0 && x == 0.0) return 0.0;
  const double den = 2.0 * d - x * x;
  if (!(den > 0.0)) {
    throw SingularPoint(std::string(where) + ": point lies outside the ellipse family");
  }
  return d * d / den;
}

}  // namespace

EllipseParam EllipseParam::rho(double alpha) {
  if (!(alpha > 0.0)) throw InvalidParams("EllipseParam::rho: alpha must be positive");
  return {alpha, EllipseKind::kRho};
}

EllipseParam EllipseParam::effect(double beta) {
  if (!(beta < 0.0)) throw InvalidParams("EllipseParam::effect: beta must be negative");
  return {beta, EllipseKind::kEffect};
}

double EllipseParam::reciprocal() const {
  if (std::isinf(value)) return 0.0;
  return kind == EllipseKind::kRho ? 1.0 / value : -1.0 / value;
}

double EllipseParam::center_z() const {
  const double r = reciprocal();
  return kind == EllipseKind::kRho ? 1.0 - r : -1.0 + r;
}

double EllipseParam::semi_x() const { return std::sqrt(reciprocal()); }

double EllipseParam::semi_z() const { return reciprocal(); }

BlochVector EllipseParam::point(double phi) const {
  return {semi_x() * std::cos(phi), 0.0, center_z() + semi_z() * std::sin(phi)};
}

double EllipseParam::residual(const BlochVector& b) const {
  const double x2 = b.x * b.x + b.y * b.y;
  const double d = kind == EllipseKind::kRho ? 1.0 - b.z : 1.0 + b.z;
  return reciprocal_residual(reciprocal(), d, x2);
}

double alpha_reciprocal_of(double x, double z) {
  return reciprocal_from_pole_distance(x, 1.0 - z, "alpha_reciprocal_of");
}

double alpha_of(double x, double z) {
  const double u = 1.0 - z;
  if (u == 0.0) throw SingularPoint("alpha_of: z = 1 (ground state) is the alpha -> inf limit");
  if (std::abs(u) < kPoleTol) return 1.0 / alpha_reciprocal_of(x, z);
  return 2.0 / u - x * x / (u * u);
}

double alpha_at_time(double alpha0, double t, const SimParams& p) {
  if (t < 0.0) throw DomainError("alpha_at_time: t must be non-negative");
  if (std::isinf(alpha0)) return alpha0;
  return p.eta + (alpha0 - p.eta) * std::exp(p.gamma * t);
}

double beta_reciprocal_of(double x, double z) {
  return reciprocal_from_pole_distance(x, 1.0 + z, "beta_reciprocal_of");
}

double beta_of(double x, double z) {
  const double w = 1.0 + z;
  if (w == 0.0) throw SingularPoint("beta_of: z = -1 (excited projector) is the beta -> -inf limit");
  if (std::abs(w) < kPoleTol) return -1.0 / beta_reciprocal_of(x, z);
  return -2.0 / w + x * x / (w * w);
}

double beta_at_time(double beta_T, double t, double T, const SimParams& p) {
  if (t < 0.0 || t > T) throw DomainError("beta_at_time: requires 0 <= t <= T");
  if (std::isinf(beta_T)) return beta_T;
  return p.eta - 2.0 + (beta_T - p.eta + 2.0) * std::exp(p.gamma * (t - T));
}

EllipseParam rho_ellipse_of(const BlochVector& b) {
  const double r = alpha_reciprocal_of(std::hypot(b.x, b.y), b.z);
  return EllipseParam::rho(r == 0.0 ? kInf : 1.0 / r);
}

EllipseParam effect_ellipse_of(const BlochVector& b) {
  const double r = beta_reciprocal_of(std::hypot(b.x, b.y), b.z);
  return EllipseParam::effect(r == 0.0 ? -kInf : -1.0 / r);
}

bool on_rho_ellipse(const BlochVector& b, double alpha, double tol) {
  return std::abs(EllipseParam::rho(alpha).residual(b)) <= tol;
}

bool on_effect_ellipse(const BlochVector& b, double beta, double tol) {
  return std::abs(EllipseParam::effect(beta).residual(b)) <= tol;
}

double polygon_area(const Polygon& poly) {
  double twice = 0.0;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    const PlanePoint& a = poly[i];
    const PlanePoint& b = poly[(i + 1) % n];
    twice += a.x * b.z - b.x * a.z;
  }
  return 0.5 * twice;
}

bool polygon_contains(const Polygon& poly, PlanePoint p) {
  bool inside = false;
  for (std::size_t i = 0, n = poly.size(), j = n - 1; i < n; j = i++) {
    const PlanePoint& a = poly[i];
    const PlanePoint& b = poly[j];
    if ((a.z > p.z) != (b.z > p.z) && p.x < (b.x - a.x) * (p.z - a.z) / (b.z - a.z) + a.x) {
      inside = !inside;
    }
  }
  return inside;
}

double distance_to_boundary(const Polygon& poly, PlanePoint p) {
  double best = kInf;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    const PlanePoint& a = poly[i];
    const PlanePoint& b = poly[(i + 1) % n];
    const double ex = b.x - a.x;
    const double ez = b.z - a.z;
    const double len2 = ex * ex + ez * ez;
    double s = len2 > 0.0 ? ((p.x - a.x) * ex + (p.z - a.z) * ez) / len2 : 0.0;
    s = std::clamp(s, 0.0, 1.0);
    best = std::min(best, std::hypot(p.x - (a.x + s * ex), p.z - (a.z + s * ez)));
  }
  return best;
}

bool RetrodictionRegion::contains(PlanePoint p, double tol) const {
  for (const Polygon& loop : loops) {
    if (polygon_contains(loop, p) || distance_to_boundary(loop, p) <= tol) return true;
  }
  return false;
}

namespace {

// Occupancy raster over [-lim, lim]^2 with conservative rasterization of
// triangles and segments, followed by boundary tracing of the filled shape.
class Raster {
 public:
  Raster(int resolution, double lim)
      : n_(resolution), lim_(lim), cell_(2.0 * lim / resolution),
        occupied_(static_cast<std::size_t>(n_) * n_, 0) {}

  double cell() const { return cell_; }

  void mark_point(PlanePoint p) {
    const int i = index_of(p.x);
    const int j = index_of(p.z);
    occupied_[offset(i, j)] = 1;
  }

  void mark_segment(PlanePoint a, PlanePoint b) {
    const double len = std::hypot(b.x - a.x, b.z - a.z);
    const int steps = 1 + static_cast<int>(std::ceil(4.0 * len / cell_));
    for (int s = 0; s <= steps; ++s) {
      const double f = static_cast<double>(s) / steps;
      mark_point({a.x + f * (b.x - a.x), a.z + f * (b.z - a.z)});
    }
  }

  void mark_triangle(PlanePoint a, PlanePoint b, PlanePoint c) {
    mark_segment(a, b);
    mark_segment(b, c);
    mark_segment(c, a);
    const double area = (b.x - a.x) * (c.z - a.z) - (c.x - a.x) * (b.z - a.z);
    if (std::abs(area) < 1e-18) return;
    const int i0 = index_of(std::min({a.x, b.x, c.x}));
    const int i1 = index_of(std::max({a.x, b.x, c.x}));
    const int j0 = index_of(std::min({a.z, b.z, c.z}));
    const int j1 = index_of(std::max({a.z, b.z, c.z}));
    for (int j = j0; j <= j1; ++j) {
      const double pz = -lim_ + (j + 0.5) * cell_;
      for (int i = i0; i <= i1; ++i) {
        const double px = -lim_ + (i + 0.5) * cell_;
        const double w0 = (b.x - px) * (c.z - pz) - (c.x - px) * (b.z - pz);
        const double w1 = (c.x - px) * (a.z - pz) - (a.x - px) * (c.z - pz);
        const double w2 = (a.x - px) * (b.z - pz) - (b.x - px) * (a.z - pz);
        const bool pos = w0 >= 0 && w1 >= 0 && w2 >= 0;
        const bool neg = w0 <= 0 && w1 <= 0 && w2 <= 0;
        if (pos || neg) occupied_[offset(i, j)] = 1;
      }
    }
  }

  std::vector<Polygon> trace_outer_loops() const {
    const std::vector<std::uint8_t> inside = fill_holes();
    return trace(inside);
  }

 private:
  int index_of(double v) const {
    return std::clamp(static_cast<int>(std::floor((v + lim_) / cell_)), 0, n_ - 1);
  }
  std::size_t offset(int i, int j) const {
    return static_cast<std::size_t>(j) * n_ + static_cast<std::size_t>(i);
  }

  // Everything not 4-connected to the raster border through empty cells.
  std::vector<std::uint8_t> fill_holes() const {
    std::vector<std::uint8_t> exterior(occupied_.size(), 0);
    std::vector<std::pair<int, int>> stack;
    auto push = [&](int i, int j) {
      if (i < 0 || j < 0 || i >= n_ || j >= n_) return;
      const std::size_t o = offset(i, j);
      if (occupied_[o] || exterior[o]) return;
      exterior[o] = 1;
      stack.emplace_back(i, j);
    };
    for (int k = 0; k < n_; ++k) {
      push(k, 0);
      push(k, n_ - 1);
      push(0, k);
      push(n_ - 1, k);
    }
    while (!stack.empty()) {
      const auto [i, j] = stack.back();
      stack.pop_back();
      push(i + 1, j);
      push(i - 1, j);
      push(i, j + 1);
      push(i, j - 1);
    }
    std::vector<std::uint8_t> inside(occupied_.size());
    for (std::size_t o = 0; o < inside.size(); ++o) inside[o] = exterior[o] ? 0 : 1;
    return inside;
  }

  std::vector<Polygon> trace(const std::vector<std::uint8_t>& inside) const {
    const int nv = n_ + 1;
    auto vid = [nv](int i, int j) { return j * nv + i; };
    auto in = [&](int i, int j) {
      return i >= 0 && j >= 0 && i < n_ && j < n_ && inside[offset(i, j)] != 0;
    };

    // Directed boundary edges, interior on the left (counter-clockwise).
    struct Edge {
      int from;
      int to;
    };
    std::vector<Edge> edges;
    for (int j = 0; j < n_; ++j) {
      for (int i = 0; i < n_; ++i) {
        if (!in(i, j)) continue;
        if (!in(i, j - 1)) edges.push_back({vid(i, j), vid(i + 1, j)});
        if (!in(i + 1, j)) edges.push_back({vid(i + 1, j), vid(i + 1, j + 1)});
        if (!in(i, j + 1)) edges.push_back({vid(i + 1, j + 1), vid(i, j + 1)});
        if (!in(i - 1, j)) edges.push_back({vid(i, j + 1), vid(i, j)});
      }
    }

    std::vector<std::array<int, 2>> out(static_cast<std::size_t>(nv) * nv, {-1, -1});
    for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
      auto& slot = out[static_cast<std::size_t>(edges[e].from)];
      (slot[0] < 0 ? slot[0] : slot[1]) = e;
    }

    auto point_of = [&](int v) {
      return PlanePoint{-lim_ + (v % nv) * cell_, -lim_ + (v / nv) * cell_};
    };
    auto direction = [&](const Edge& e) {
      return std::pair<int, int>{e.to % nv - e.from % nv, e.to / nv - e.from / nv};
    };

    std::vector<std::uint8_t> used(edges.size(), 0);
    std::vector<Polygon> loops;
    for (std::size_t start = 0; start < edges.size(); ++start) {
      if (used[start]) continue;
      Polygon loop;
      int e = static_cast<int>(start);
      while (!used[static_cast<std::size_t>(e)]) {
        used[static_cast<std::size_t>(e)] = 1;
        const Edge& cur = edges[static_cast<std::size_t>(e)];
        const auto [dx, dz] = direction(cur);
        const auto& next = out[static_cast<std::size_t>(cur.to)];
        int chosen = next[0];
        if (next[1] >= 0) {
          // Pinch vertex: turn left so diagonal cells stay separate loops.
          for (int cand : next) {
            const auto [nx, nz] = direction(edges[static_cast<std::size_t>(cand)]);
            if (dx * nz - dz * nx > 0) chosen = cand;
          }
        }
        const auto [nx, nz] = direction(edges[static_cast<std::size_t>(chosen)]);
        if (nx != dx || nz != dz) loop.push_back(point_of(cur.to));
        e = chosen;
      }
      if (loop.size() >= 3) loops.push_back(std::move(loop));
    }
    std::sort(loops.begin(), loops.end(), [](const Polygon& a, const Polygon& b) {
      return std::abs(polygon_area(a)) > std::abs(polygon_area(b));
    });
    // Outer boundaries only; holes were filled above, so every loop is one.
    return loops;
  }

  int n_;
  double lim_;
  double cell_;
  std::vector<std::uint8_t> occupied_;
};

// Retrodicted values are clamped to [-1, 1]; two cells of margin keep the
// flood fill's border empty.
Raster make_raster(int resolution) {
  const double lim = 1.0 + 2.0 * (2.0 / resolution);
  return Raster(resolution + 4, lim);
}

void check_options(const RegionOptions& opt) {
  if (opt.grid_n < 64) throw InvalidParams("retrodiction_region: grid_n must be at least 64");
  if (opt.resolution < 16) throw InvalidParams("retrodiction_region: resolution too small");
}

struct Mapped {
  PlanePoint p;
  bool ok = false;
};

Mapped map_pair(const BlochVector& rho, const BlochVector& effect) {
  try {
    const auto r = trajectory::retrodicted_bloch(rho, effect);
    return {{r.x, r.z}, true};
  } catch (const IncompatibleSelection&) {
    return {};
  }
}

RetrodictionRegion finish(Raster& raster, std::size_t skipped, std::size_t evaluated) {
  RetrodictionRegion region;
  region.loops = raster.trace_outer_loops();
  region.skipped = skipped;
  region.evaluated = evaluated;
  region.cell = raster.cell();
  if (region.loops.empty()) {
    throw IncompatibleSelection("retrodiction_region: every sweep pair was incompatible");
  }
  return region;
}

}  // namespace

RetrodictionRegion retrodiction_region(double alpha, double beta, const RegionOptions& opt) {
  check_options(opt);
  const EllipseParam rho_e = EllipseParam::rho(alpha);
  const EllipseParam eff_e = EllipseParam::effect(beta);
  const int n = opt.grid_n;
  const double step = 2.0 * kPi / n;

  std::vector<BlochVector> rho_pts(static_cast<std::size_t>(n));
  std::vector<BlochVector> eff_pts(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    rho_pts[static_cast<std::size_t>(k)] = rho_e.point(k * step);
    eff_pts[static_cast<std::size_t>(k)] = eff_e.point(k * step);
  }

  std::vector<Mapped> grid(static_cast<std::size_t>(n) * n);
  std::size_t skipped = 0;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      Mapped m = map_pair(rho_pts[static_cast<std::size_t>(a)], eff_pts[static_cast<std::size_t>(b)]);
      if (!m.ok) ++skipped;
      grid[static_cast<std::size_t>(a) * n + b] = m;
    }
  }

  Raster raster = make_raster(opt.resolution);
  auto at = [&](int a, int b) -> const Mapped& {
    return grid[static_cast<std::size_t>((a + n) % n) * n + static_cast<std::size_t>((b + n) % n)];
  };
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const Mapped& p00 = at(a, b);
      const Mapped& p10 = at(a + 1, b);
      const Mapped& p01 = at(a, b + 1);
      const Mapped& p11 = at(a + 1, b + 1);
      if (p00.ok) raster.mark_point(p00.p);
      if (p00.ok && p10.ok && p11.ok) raster.mark_triangle(p00.p, p10.p, p11.p);
      if (p00.ok && p11.ok && p01.ok) raster.mark_triangle(p00.p, p11.p, p01.p);
      if (p00.ok && p10.ok) raster.mark_segment(p00.p, p10.p);
      if (p00.ok && p01.ok) raster.mark_segment(p00.p, p01.p);
    }
  }
  return finish(raster, skipped, grid.size());
}

RetrodictionRegion retrodiction_region(double alpha, double beta, int grid_n) {
  RegionOptions opt;
  opt.grid_n = grid_n;
  return retrodiction_region(alpha, beta, opt);
}

RetrodictionRegion retrodiction_region(double alpha, const BlochVector& fixed_effect,
                                       const RegionOptions& opt) {
  check_options(opt);
  const EllipseParam rho_e = EllipseParam::rho(alpha);
  const int n = opt.grid_n * opt.grid_n;
  const double step = 2.0 * kPi / n;

  Raster raster = make_raster(opt.resolution);
  std::size_t skipped = 0;
  Mapped prev = map_pair(rho_e.point(-step), fixed_effect);
  for (int k = 0; k < n; ++k) {
    const Mapped cur = map_pair(rho_e.point(k * step), fixed_effect);
    if (!cur.ok) ++skipped;
    if (cur.ok) raster.mark_point(cur.p);
    if (cur.ok && prev.ok) raster.mark_segment(prev.p, cur.p);
    prev = cur;
  }
  return finish(raster, skipped, static_cast<std::size_t>(n));
}

void write_polygon_csv(std::ostream& os, const Polygon& poly) {
  os << "x,z\n";
  for (const PlanePoint& p : poly) {
    os << io::format_double(p.x) << ',' << io::format_double(p.z) << '\n';
  }
}

}  // namespace pqs::geometry
