#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "predicates.hpp"
#include "vec.hpp"

namespace wulfflab {

/// Closed polygonal loop; the last vertex connects back to the first.
using Loop = std::vector<Vec2>;

inline double signed_area(std::span<const Vec2> loop) {
  double a = 0.0;
  const std::size_t n = loop.size();
  for (std::size_t i = 0; i < n; ++i) a += cross(loop[i], loop[(i + 1) % n]);
  return 0.5 * a;
}

/// First moment ∫ x dx of the region bounded by a loop (signed like the area).
inline Vec2 first_moment(std::span<const Vec2> loop) {
  Vec2 m{};
  const std::size_t n = loop.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = loop[i];
    const Vec2& q = loop[(i + 1) % n];
    const double w = cross(p, q);
    m[0] += (p[0] + q[0]) * w;
    m[1] += (p[1] + q[1]) * w;
  }
  return m * (1.0 / 6.0);
}

inline double loop_length(std::span<const Vec2> loop) {
  double l = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i) l += norm(loop[(i + 1) % loop.size()] - loop[i]);
  return l;
}

struct Box2 {
  Vec2 lo{{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()}};
  Vec2 hi{{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()}};

  void add(const Vec2& p) {
    for (int i = 0; i < 2; ++i) {
      lo[i] = std::min(lo[i], p[i]);
      hi[i] = std::max(hi[i], p[i]);
    }
  }
  bool empty() const { return lo[0] > hi[0]; }
  bool overlaps(const Box2& o) const {
    return lo[0] <= o.hi[0] && o.lo[0] <= hi[0] && lo[1] <= o.hi[1] && o.lo[1] <= hi[1];
  }
};

inline Box2 bounding_box(std::span<const Vec2> pts) {
  Box2 b;
  for (const auto& p : pts) b.add(p);
  return b;
}

inline Vec2 closest_point_on_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  const double dd = dot(d, d);
  if (dd == 0.0) return a;
  const double t = std::clamp(dot(p - a, d) / dd, 0.0, 1.0);
  return a + d * t;
}

inline double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  return norm(p - closest_point_on_segment(p, a, b));
}

/// Winding number of a loop around p (p must not lie on the loop for a meaningful value).
inline int winding_number(std::span<const Vec2> loop, const Vec2& p) {
  int w = 0;
  const std::size_t n = loop.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = loop[i];
    const Vec2& b = loop[(i + 1) % n];
    if (a[1] <= p[1]) {
      if (b[1] > p[1] && orient(a, b, p) > 0) ++w;
    } else if (b[1] <= p[1] && orient(a, b, p) < 0) {
      --w;
    }
  }
  return w;
}

/// True if p lies on the segment [a, b] (exact on the snap grid).
inline bool on_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  if (orient(a, b, p) != 0) return false;
  return std::min(a[0], b[0]) <= p[0] && p[0] <= std::max(a[0], b[0]) && std::min(a[1], b[1]) <= p[1] &&
         p[1] <= std::max(a[1], b[1]);
}

/// Clips a loop against the half-plane {x : dot(n, x) <= h}.
inline void clip_halfplane(const Loop& in, const Vec2& n, double h, Loop& out) {
  out.clear();
  const std::size_t m = in.size();
  if (m == 0) return;
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2& p = in[i];
    const Vec2& q = in[(i + 1) % m];
    const double sp = dot(n, p) - h;
    const double sq = dot(n, q) - h;
    if (sp <= 0.0) out.push_back(p);
    if ((sp < 0.0 && sq > 0.0) || (sp > 0.0 && sq < 0.0)) {
      const double t = sp / (sp - sq);
      out.push_back(p + (q - p) * t);
    }
  }
}

/// Convex clipping region stored as outward half-planes {x : dot(normal, x) <= offset}.
struct ConvexClipper {
  std::vector<Vec2> normals;
  std::vector<double> offsets;
  Box2 box;

  static ConvexClipper from_ccw_polygon(std::span<const Vec2> poly) {
    ConvexClipper c;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 e = poly[(i + 1) % n] - poly[i];
      const double len = norm(e);
      if (len == 0.0) continue;
      const Vec2 nrm{{e[1] / len, -e[0] / len}};
      c.normals.push_back(nrm);
      c.offsets.push_back(dot(nrm, poly[i]));
    }
    c.box = bounding_box(poly);
    return c;
  }

  /// Signed area of (loop ∩ (shift + region)). Exact in area for simple loops, including
  /// nonconvex ones (Sutherland–Hodgman may leave zero-width bridges, which carry no area).
  double clipped_area(std::span<const Vec2> loop, const Vec2& shift, Loop& a, Loop& b) const {
    a.assign(loop.begin(), loop.end());
    for (std::size_t k = 0; k < normals.size() && !a.empty(); ++k) {
      const double h = offsets[k] + dot(normals[k], shift);
      bool all_inside = true;
      for (const auto& p : a)
        if (dot(normals[k], p) > h) {
          all_inside = false;
          break;
        }
      if (all_inside) continue;
      clip_halfplane(a, normals[k], h, b);
      a.swap(b);
    }
    return a.size() < 3 ? 0.0 : signed_area(a);
  }
};

/// Length of the part of segment [a, b] inside the closed disc B_r(c).
inline double segment_length_in_disc(const Vec2& a, const Vec2& b, const Vec2& c, double r) {
  const Vec2 d = b - a;
  const Vec2 f = a - c;
  const double A = dot(d, d);
  if (A == 0.0) return 0.0;
  const double B = 2.0 * dot(f, d);
  const double C = dot(f, f) - r * r;
  const double disc = B * B - 4.0 * A * C;
  if (disc <= 0.0) return 0.0;
  const double s = std::sqrt(disc);
  const double t0 = std::max(0.0, (-B - s) / (2.0 * A));
  const double t1 = std::min(1.0, (-B + s) / (2.0 * A));
  return t1 > t0 ? (t1 - t0) * std::sqrt(A) : 0.0;
}

/// Regular polygon with `n` vertices, counterclockwise, first vertex at angle `phase`.
inline Loop regular_polygon(int n, double circumradius, const Vec2& center = {}, double phase = 0.0) {
  Loop l;
  l.reserve(n);
  for (int i = 0; i < n; ++i) l.push_back(center + polar(phase + 2.0 * kPi * i / n, circumradius));
  return l;
}

}  // namespace wulfflab
