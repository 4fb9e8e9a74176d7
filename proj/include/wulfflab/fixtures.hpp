#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "anisotropy.hpp"
#include "errors.hpp"
#include "geomset.hpp"
#include "rng.hpp"

/// Named test domains and shape families. Every fixture regenerates from its
/// parameters (and seed, where random) alone.
namespace wulfflab::fixtures {

inline PolygonSystem disc(int vertices = 1024, double radius = 1.0, const Vec2& center = {}) {
  return PolygonSystem(regular_polygon(vertices, radius, center));
}

inline PolygonSystem rectangle(double x0, double y0, double x1, double y1) {
  return PolygonSystem(Loop{{{x0, y0}}, {{x1, y0}}, {{x1, y1}}, {{x0, y1}}});
}

inline PolygonSystem unit_square() { return rectangle(0, 0, 1, 1); }

inline PolygonSystem hexagon(double circumradius = 1.0) { return PolygonSystem(regular_polygon(6, circumradius)); }

inline PolygonSystem l_shape() {
  return PolygonSystem(Loop{{{0, 0}}, {{1, 0}}, {{1, 0.5}}, {{0.5, 0.5}}, {{0.5, 1}}, {{0, 1}}});
}

/// {0 < x < 1, |y| < x²}, sampled geometrically toward the tip.
inline PolygonSystem cusp() {
  std::vector<double> xs;
  for (int k = 0; k <= 96; ++k) xs.push_back(std::pow(2.0, -k / 4.0));
  for (int i = 1; i < 256; ++i) xs.push_back(i / 256.0);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end(), [](double a, double b) { return std::fabs(a - b) < 1e-12; }), xs.end());
  Loop l;
  l.push_back({{0.0, 0.0}});
  for (double x : xs) l.push_back({{x, -x * x}});
  for (auto it = xs.rbegin(); it != xs.rend(); ++it) l.push_back({{*it, *it * *it}});
  return PolygonSystem(std::move(l));
}

/// Base [0,1]×[-0.25,0] with 2^k teeth of height 0.5 and period 2^-k (half solid).
inline PolygonSystem comb(int k) {
  const int teeth = 1 << k;
  const double period = 1.0 / teeth;
  Loop l{{{0, -0.25}}, {{1, -0.25}}, {{1, 0}}};
  for (int t = teeth - 1; t >= 0; --t) {
    const double x0 = t * period, x1 = x0 + 0.5 * period;
    l.push_back({{x1, 0.0}});
    l.push_back({{x1, 0.5}});
    l.push_back({{x0, 0.5}});
    if (t > 0) l.push_back({{x0, 0.0}});
  }
  return PolygonSystem(std::move(l));
}

/// Square [-a,a]² with its right side bulged outward by height t·sin(πs).
inline PolygonSystem bumped_square(double a, double t, int side_vertices = 64) {
  Loop l{{{-a, -a}}};
  for (int i = 0; i <= side_vertices; ++i) {
    const double s = double(i) / side_vertices;
    const double y = -a + 2.0 * a * s;
    l.push_back({{a + t * std::sin(kPi * s), y}});
  }
  l.push_back({{-a, a}});
  return PolygonSystem(std::move(l));
}

inline PolygonSystem ellipse(double sx, double sy, int vertices = 1024) {
  return disc(vertices).mapped([&](const Vec2& p) { return Vec2{{sx * p[0], sy * p[1]}}; });
}

/// Star-shaped polygon around the origin: jittered equispaced angles, radii in [rmin, rmax].
inline PolygonSystem random_star(std::uint64_t seed, int vertices, double rmin, double rmax) {
  Rng rng(seed);
  Loop l;
  for (int i = 0; i < vertices; ++i) {
    const double ang = 2.0 * kPi * (i + rng.uniform(-0.3, 0.3)) / vertices;
    l.push_back(polar(ang, rng.uniform(rmin, rmax)));
  }
  return PolygonSystem(std::move(l));
}

/// Smooth star-shaped perturbation of the unit disc: r(θ) = 1 + Σ_k a_k cos(kθ + φ_k).
inline PolygonSystem random_smooth_star(std::uint64_t seed, int vertices, double amplitude, int modes = 5) {
  Rng rng(seed);
  std::vector<double> amp(modes), phase(modes);
  for (int k = 0; k < modes; ++k) {
    amp[k] = amplitude * rng.uniform(-1.0, 1.0) / (k + 1);
    phase[k] = rng.uniform(0.0, 2.0 * kPi);
  }
  const Vec2 shift{{rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2)}};
  Loop l;
  for (int i = 0; i < vertices; ++i) {
    const double th = 2.0 * kPi * i / vertices;
    double r = 1.0;
    for (int k = 0; k < modes; ++k) r += amp[k] * std::cos((k + 2) * th + phase[k]);
    l.push_back(shift + polar(th, r));
  }
  return PolygonSystem(std::move(l));
}

inline WulffShape2 wulff_polygon(const PolygonSystem& P) { return WulffShape2::from_vertices(P.loops.front()); }

/// Normalized Wulff shapes used across the suites.
inline WulffShape2 disc_shape(int vertices = 256) { return normalize_shape(wulff_polygon(disc(vertices))); }
inline WulffShape2 square_shape() { return normalize_shape(wulff_polygon(rectangle(-1, -1, 1, 1))); }
inline WulffShape2 hexagon_shape() { return normalize_shape(wulff_polygon(hexagon())); }

inline PolygonSystem as_polygon(const WulffShape2& K) { return PolygonSystem(K.vertices()); }

/// Resolves a fixture name: disc, square, unit_square, hexagon, lshape, cusp, comb<k>.
inline PolygonSystem by_name(const std::string& name) {
  if (name == "disc") return disc();
  if (name == "square") return rectangle(-1, -1, 1, 1);
  if (name == "unit_square") return unit_square();
  if (name == "hexagon") return hexagon();
  if (name == "lshape") return l_shape();
  if (name == "cusp") return cusp();
  if (name.rfind("comb", 0) == 0 && name.size() > 4) return comb(std::stoi(name.substr(4)));
  fail(ErrorCode::InvalidInput, "unknown fixture '" + name + "'");
}

}  // namespace wulfflab::fixtures
