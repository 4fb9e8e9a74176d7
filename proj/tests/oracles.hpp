#pragma once

// Independent reference computations used as test oracles. Nothing here calls the
// library routine under test.

#include <algorithm>
#include <cmath>
#include <vector>

#include "wulfflab/vec.hpp"

namespace oracle {

using P2 = std::pair<double, double>;
using Poly = std::vector<P2>;

inline double area(const Poly& p) {
  double a = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& [x0, y0] = p[i];
    const auto& [x1, y1] = p[(i + 1) % p.size()];
    a += x0 * y1 - x1 * y0;
  }
  return 0.5 * a;
}

/// Keeps {x : dx·x + dy·y ≤ v}.
inline Poly clip(const Poly& in, double dx, double dy, double v) {
  Poly out;
  for (std::size_t i = 0; i < in.size(); ++i) {
    const P2 a = in[i], b = in[(i + 1) % in.size()];
    const double fa = dx * a.first + dy * a.second - v, fb = dx * b.first + dy * b.second - v;
    if (fa <= 0) out.push_back(a);
    if ((fa < 0 && fb > 0) || (fa > 0 && fb < 0)) {
      const double t = fa / (fa - fb);
      out.push_back({a.first + t * (b.first - a.first), a.second + t * (b.second - a.second)});
    }
  }
  return out;
}

/// Intersection of half-planes by clipping a large box.
inline Poly halfplanes(const std::vector<std::pair<P2, double>>& hs, double box = 1e3) {
  Poly p = {{-box, -box}, {box, -box}, {box, box}, {-box, box}};
  for (const auto& [d, v] : hs) p = clip(p, d.first, d.second, v);
  return p;
}

inline double seg_dist(P2 p, P2 a, P2 b) {
  const double ux = b.first - a.first, uy = b.second - a.second;
  const double L = ux * ux + uy * uy;
  double t = L > 0 ? ((p.first - a.first) * ux + (p.second - a.second) * uy) / L : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.first - a.first - t * ux, p.second - a.second - t * uy);
}

inline double dist_to_boundary(P2 p, const Poly& q) {
  double d = INFINITY;
  for (std::size_t i = 0; i < q.size(); ++i) d = std::min(d, seg_dist(p, q[i], q[(i + 1) % q.size()]));
  return d;
}

/// Hausdorff distance between two convex polygon boundaries, vertices against edges.
inline double hausdorff(const Poly& a, const Poly& b) {
  double h = 0;
  for (const auto& p : a) h = std::max(h, dist_to_boundary(p, b));
  for (const auto& p : b) h = std::max(h, dist_to_boundary(p, a));
  return h;
}

/// Even-odd ray casting.
inline bool inside(const std::vector<Poly>& loops, P2 p) {
  bool in = false;
  for (const auto& l : loops)
    for (std::size_t i = 0, j = l.size() - 1; i < l.size(); j = i++) {
      const auto& [xi, yi] = l[i];
      const auto& [xj, yj] = l[j];
      if ((yi > p.second) != (yj > p.second) && p.first < (xj - xi) * (p.second - yi) / (yj - yi) + xi) in = !in;
    }
  return in;
}

/// |A Δ B| by midpoint sampling of an h-grid over [lo, hi]².
inline double raster_xor(const std::vector<Poly>& A, const std::vector<Poly>& B, double lo, double hi, double h) {
  const int n = static_cast<int>(std::ceil((hi - lo) / h));
  long cnt = 0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const P2 p{lo + (i + 0.5) * h, lo + (j + 0.5) * h};
      cnt += inside(A, p) != inside(B, p);
    }
  return cnt * h * h;
}

template <class Loop>
Poly from(const Loop& l) {
  Poly p;
  for (const auto& v : l) p.push_back({v[0], v[1]});
  return p;
}

}  // namespace oracle
