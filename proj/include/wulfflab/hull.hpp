#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "predicates.hpp"
#include "vec.hpp"

namespace wulfflab {

/// Counterclockwise convex hull (Andrew's monotone chain). Turn decisions use the exact
/// orientation of the snapped points, so the chain is a true hull of a consistent point
/// set; nearly collinear vertices are pruned afterwards, which keeps it convex.
inline std::vector<Vec2> convex_hull(std::vector<Vec2> input) {
  std::vector<std::pair<Vec2, Vec2>> pts;  // (snapped, original)
  pts.reserve(input.size());
  for (const auto& p : input) pts.emplace_back(snap(p), p);
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.first[0] < b.first[0] || (a.first[0] == b.first[0] && a.first[1] < b.first[1]);
  });
  pts.erase(std::unique(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first == b.first; }), pts.end());
  if (pts.size() < 3) {
    std::vector<Vec2> out;
    for (const auto& p : pts) out.push_back(p.second);
    return out;
  }
  std::vector<std::size_t> h(2 * pts.size());
  std::size_t k = 0;
  auto turn = [&](std::size_t a, std::size_t b, std::size_t c) { return orient(pts[a].first, pts[b].first, pts[c].first); };
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && turn(h[k - 2], h[k - 1], i) <= 0) --k;
    h[k++] = i;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && turn(h[k - 2], h[k - 1], i) <= 0) --k;
    h[k++] = i;
  }
  h.resize(k - 1);
  std::vector<Vec2> out;
  for (std::size_t i : h) out.push_back(pts[i].second);

  double scale = 0.0;
  for (const auto& p : out) scale = std::max({scale, std::fabs(p[0]), std::fabs(p[1])});
  const double eps = 1e-14 * scale * scale;
  for (bool changed = true; changed && out.size() > 3;) {
    changed = false;
    for (std::size_t i = 0; i < out.size() && out.size() > 3; ++i) {
      const Vec2& a = out[(i + out.size() - 1) % out.size()];
      const Vec2& c = out[(i + 1) % out.size()];
      if (cross(out[i] - a, c - a) <= eps) {
        out.erase(out.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        --i;
      }
    }
  }
  return out;
}

/// Triangulated boundary of a 3D convex hull with outward-oriented faces.
struct Hull3 {
  std::vector<Vec3> points;                 // input points, indexed by faces
  std::vector<std::array<int, 3>> faces;    // counterclockwise seen from outside

  Vec3 face_normal(const std::array<int, 3>& f) const {
    return cross(points[f[1]] - points[f[0]], points[f[2]] - points[f[0]]);
  }

  std::vector<int> vertex_indices() const {
    std::vector<int> v;
    for (const auto& f : faces) v.insert(v.end(), f.begin(), f.end());
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  }
};

/// Incremental O(n^2) convex hull in 3D. Throws EmptyShape when the points are coplanar.
inline Hull3 convex_hull3(std::span<const Vec3> input) {
  Hull3 h;
  h.points.assign(input.begin(), input.end());
  const auto& P = h.points;
  const int n = static_cast<int>(P.size());
  if (n < 4) fail(ErrorCode::EmptyShape, "fewer than 4 points for a 3D hull");
  double scale = 0.0;
  for (const auto& p : P) scale = std::max(scale, norm(p));
  const double eps = 1e-12 * scale;

  // Initial tetrahedron from extreme points.
  int i0 = 0, i1 = -1, i2 = -1, i3 = -1;
  for (int i = 1; i < n; ++i)
    if (P[i][0] < P[i0][0]) i0 = i;
  double best = 0.0;
  for (int i = 0; i < n; ++i)
    if (double d = norm(P[i] - P[i0]); d > best) best = d, i1 = i;
  best = 0.0;
  for (int i = 0; i < n && i1 >= 0; ++i)
    if (double d = norm(cross(P[i1] - P[i0], P[i] - P[i0])); d > best) best = d, i2 = i;
  best = 0.0;
  if (i2 >= 0) {
    const Vec3 nrm = cross(P[i1] - P[i0], P[i2] - P[i0]);
    for (int i = 0; i < n; ++i)
      if (double d = std::fabs(dot(nrm, P[i] - P[i0])); d > best) best = d, i3 = i;
  }
  if (i3 < 0 || best <= eps * scale * scale) fail(ErrorCode::EmptyShape, "points are coplanar");

  const Vec3 inner = (P[i0] + P[i1] + P[i2] + P[i3]) * 0.25;
  auto add_face = [&](int a, int b, int c) {
    std::array<int, 3> f{a, b, c};
    if (dot(h.face_normal(f), P[a] - inner) < 0) std::swap(f[1], f[2]);
    h.faces.push_back(f);
  };
  add_face(i0, i1, i2);
  add_face(i0, i1, i3);
  add_face(i0, i2, i3);
  add_face(i1, i2, i3);

  for (int p = 0; p < n; ++p) {
    if (p == i0 || p == i1 || p == i2 || p == i3) continue;
    std::vector<char> visible(h.faces.size(), 0);
    bool any = false;
    for (std::size_t f = 0; f < h.faces.size(); ++f) {
      const auto& F = h.faces[f];
      const Vec3 nrm = h.face_normal(F);
      const double nn = norm(nrm);
      if (dot(nrm, P[p] - P[F[0]]) > eps * nn) visible[f] = 1, any = true;
    }
    if (!any) continue;
    // Horizon edges: directed edges of visible faces whose twin belongs to a hidden face.
    std::map<std::pair<int, int>, int> edge_count;
    for (std::size_t f = 0; f < h.faces.size(); ++f) {
      if (!visible[f]) continue;
      const auto& F = h.faces[f];
      for (int e = 0; e < 3; ++e) edge_count[{F[e], F[(e + 1) % 3]}]++;
    }
    std::vector<std::array<int, 3>> kept;
    for (std::size_t f = 0; f < h.faces.size(); ++f)
      if (!visible[f]) kept.push_back(h.faces[f]);
    for (const auto& [edge, cnt] : edge_count) {
      if (edge_count.count({edge.second, edge.first})) continue;
      kept.push_back({edge.first, edge.second, p});
    }
    h.faces.swap(kept);
  }
  return h;
}

}  // namespace wulfflab
