#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "polygon.hpp"
#include "predicates.hpp"

namespace wulfflab {

namespace detail {

struct Overlap {
  double t0, t1;
  bool same_direction;
};

/// Sum of winding numbers of all loops; > 0 means inside for well-formed systems.
inline int system_winding(std::span<const Loop> loops, const Vec2& p) {
  int w = 0;
  for (const auto& l : loops) w += winding_number(l, p);
  return w;
}

/// ∫ over the parts of ∂A lying inside B of (x dy - y dx)/2. Boundary portions shared
/// with ∂B count only when `keep_shared` is set and the orientations agree.
inline double boundary_part_inside(std::span<const Loop> A, std::span<const Loop> B, bool keep_shared) {
  double total = 0.0;
  std::vector<double> ts;
  std::vector<Overlap> overlaps;
  std::vector<Box2> edge_boxes;
  for (const auto& lb : B) {
    for (std::size_t j = 0; j < lb.size(); ++j) {
      Box2 bx;
      bx.add(lb[j]);
      bx.add(lb[(j + 1) % lb.size()]);
      edge_boxes.push_back(bx);
    }
  }
  for (const auto& la : A) {
    const std::size_t na = la.size();
    for (std::size_t i = 0; i < na; ++i) {
      const Vec2 a = la[i], b = la[(i + 1) % na];
      const Vec2 d = b - a;
      const double dd = dot(d, d);
      if (dd == 0.0) continue;
      Box2 ea;
      ea.add(a);
      ea.add(b);
      ts.assign({0.0, 1.0});
      overlaps.clear();
      std::size_t box_index = 0;
      for (const auto& lb : B) {
        const std::size_t nb = lb.size();
        for (std::size_t j = 0; j < nb; ++j, ++box_index) {
          if (!ea.overlaps(edge_boxes[box_index])) continue;
          const Vec2 c = lb[j], e = lb[(j + 1) % nb];
          const int o1 = orient(a, b, c), o2 = orient(a, b, e);
          if (o1 == 0 && o2 == 0) {
            // Collinear: record the overlap interval in a's parameter.
            double tc = dot(c - a, d) / dd, te = dot(e - a, d) / dd;
            const bool same = dot(e - c, d) > 0.0;
            if (tc > te) std::swap(tc, te);
            const double lo = std::max(0.0, tc), hi = std::min(1.0, te);
            if (hi > lo) {
              overlaps.push_back({lo, hi, same});
              ts.push_back(lo);
              ts.push_back(hi);
            }
            continue;
          }
          if (o1 == o2) continue;
          const int o3 = orient(c, e, a), o4 = orient(c, e, b);
          if (o3 == o4 && o3 != 0) continue;
          // Segments cross or touch; parameter along a→b.
          const double den = cross(d, e - c);
          if (den == 0.0) continue;
          const double t = cross(c - a, e - c) / den;
          ts.push_back(std::clamp(t, 0.0, 1.0));
        }
      }
      std::sort(ts.begin(), ts.end());
      for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
        const double t0 = ts[k], t1 = ts[k + 1];
        if (t1 - t0 <= 1e-15) continue;
        const double tm = 0.5 * (t0 + t1);
        int shared = 0;  // 0 none, 1 same direction, -1 opposite
        for (const auto& o : overlaps)
          if (o.t0 <= tm && tm <= o.t1) shared = o.same_direction ? 1 : -1;
        bool include;
        if (shared != 0) {
          include = keep_shared && shared == 1;
        } else {
          include = system_winding(B, a + d * tm) > 0;
        }
        if (include) total += 0.5 * cross(a + d * t0, a + d * t1);
      }
    }
  }
  return total;
}

}  // namespace detail

/// |A ∩ B| for polygon systems (counterclockwise outer loops, clockwise holes).
inline double intersection_area(std::span<const Loop> A, std::span<const Loop> B) {
  return detail::boundary_part_inside(A, B, true) + detail::boundary_part_inside(B, A, false);
}

}  // namespace wulfflab
