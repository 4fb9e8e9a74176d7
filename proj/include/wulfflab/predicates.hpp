#pragma once

#include <cmath>
#include <cstdint>

#include "vec.hpp"

namespace wulfflab {

/// Coordinates are snapped to this grid before any orientation test.
inline constexpr double kSnapGrid = 1e-12;
/// Snapped coordinates must satisfy |x| < kSnapRange for exact integer predicates.
inline constexpr double kSnapRange = 4.0e6;

inline double snap(double x) { return std::nearbyint(x / kSnapGrid) * kSnapGrid; }
inline Vec2 snap(const Vec2& p) { return {{snap(p[0]), snap(p[1])}}; }

namespace detail {
inline bool in_snap_range(const Vec2& p) {
  return std::fabs(p[0]) < kSnapRange && std::fabs(p[1]) < kSnapRange;
}
inline std::int64_t grid_units(double x) { return static_cast<std::int64_t>(std::nearbyint(x / kSnapGrid)); }
}  // namespace detail

/// Sign of the orientation of (a, b, c): +1 counterclockwise, -1 clockwise, 0 collinear.
/// Exact for points on the snap grid (128-bit integer arithmetic); inputs outside the
/// snap range fall back to long double.
inline int orient(const Vec2& a, const Vec2& b, const Vec2& c) {
  if (detail::in_snap_range(a) && detail::in_snap_range(b) && detail::in_snap_range(c)) {
    using detail::grid_units;
    const __int128 ax = grid_units(a[0]), ay = grid_units(a[1]);
    const __int128 bx = grid_units(b[0]) - ax, by = grid_units(b[1]) - ay;
    const __int128 cx = grid_units(c[0]) - ax, cy = grid_units(c[1]) - ay;
    const __int128 d = bx * cy - by * cx;
    return d > 0 ? 1 : (d < 0 ? -1 : 0);
  }
  const long double d = (static_cast<long double>(b[0]) - a[0]) * (static_cast<long double>(c[1]) - a[1]) -
                        (static_cast<long double>(b[1]) - a[1]) * (static_cast<long double>(c[0]) - a[0]);
  return d > 0 ? 1 : (d < 0 ? -1 : 0);
}

}  // namespace wulfflab
