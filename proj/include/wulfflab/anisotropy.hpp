#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "hull.hpp"
#include "vec.hpp"

namespace wulfflab {

/// Sampled surface tension: positive values of the dual norm at unit directions.
template <std::size_t N>
struct TensionSpec {
  struct Sample {
    Vec<N> dir;
    double value = 0.0;
  };
  std::vector<Sample> samples;

  void validate() const {
    if (samples.size() < N + 1) fail(ErrorCode::UnboundedShape, "fewer than n+1 directions cannot positively span the space");
    for (const auto& s : samples) {
      if (std::fabs(norm(s.dir) - 1.0) > 1e-12) fail(ErrorCode::InvalidInput, "tension direction is not a unit vector");
      if (!(s.value > 0.0)) fail(ErrorCode::InvalidInput, "tension value must be positive");
    }
  }
};

/// Supporting hyperplane {x : normal·x = offset} of a polytope facet, normal outward and unit.
template <std::size_t N>
struct Facet {
  Vec<N> normal;
  double offset = 0.0;
};

/// Convex polytope K stored by its vertices (counterclockwise in 2D).
template <std::size_t N>
class WulffShape {
 public:
  WulffShape() = default;

  /// Builds the convex hull of `pts`. Interior points are dropped.
  static WulffShape from_vertices(std::vector<Vec<N>> pts) {
    WulffShape k;
    if constexpr (N == 2) {
      k.vertices_ = convex_hull(std::move(pts));
      if (k.vertices_.size() < 3) fail(ErrorCode::EmptyShape, "polygon has no interior");
      const std::size_t n = k.vertices_.size();
      double area = 0.0;
      Vec2 moment{};
      for (std::size_t i = 0; i < n; ++i) {
        const Vec2& p = k.vertices_[i];
        const Vec2& q = k.vertices_[(i + 1) % n];
        const double w = cross(p, q);
        area += 0.5 * w;
        moment += (p + q) * (w / 6.0);
        const Vec2 e = q - p;
        const Vec2 nrm = normalized(Vec2{{e[1], -e[0]}});
        k.facets_.push_back({nrm, dot(nrm, p)});
      }
      k.volume_ = area;
      k.barycenter_ = moment * (1.0 / area);
    } else {
      const Hull3 h = convex_hull3(pts);
      for (int idx : h.vertex_indices()) k.vertices_.push_back(h.points[idx]);
      double vol = 0.0;
      Vec3 moment{};
      const Vec3 ref = h.points[h.faces.front()[0]];
      for (const auto& f : h.faces) {
        const Vec3 a = h.points[f[0]] - ref, b = h.points[f[1]] - ref, c = h.points[f[2]] - ref;
        const double v = dot(a, cross(b, c)) / 6.0;
        vol += v;
        moment += (a + b + c) * (v / 4.0);
        const Vec3 nrm = normalized(h.face_normal(f));
        k.facets_.push_back({nrm, dot(nrm, h.points[f[0]])});
        k.triangles_.push_back({h.points[f[0]], h.points[f[1]], h.points[f[2]]});
      }
      if (!(vol > 0.0)) fail(ErrorCode::EmptyShape, "polytope has no interior");
      k.volume_ = vol;
      k.barycenter_ = ref + moment * (1.0 / vol);
    }
    k.compute_gauge_bounds();
    return k;
  }

  const std::vector<Vec<N>>& vertices() const { return vertices_; }
  const std::vector<Facet<N>>& facets() const { return facets_; }
  /// Boundary triangles (3D only).
  const std::vector<std::array<Vec3, 3>>& triangles() const { return triangles_; }
  double volume() const { return volume_; }
  Vec<N> barycenter() const { return barycenter_; }
  double m_K() const { return m_k_; }
  double M_K() const { return M_k_; }
  static constexpr int dim() { return static_cast<int>(N); }

  /// sup over K of x·y, a max over the vertex list.
  double support(const Vec<N>& y) const {
    double s = -std::numeric_limits<double>::infinity();
    for (const auto& v : vertices_) s = std::max(s, dot(v, y));
    return s;
  }

  /// Minkowski gauge inf{t > 0 : x ∈ tK}. Requires the origin inside K.
  double gauge(const Vec<N>& x) const {
    double g = 0.0;
    for (const auto& f : facets_) g = std::max(g, dot(f.normal, x) / f.offset);
    return g;
  }

  bool contains_origin_strictly() const {
    return std::all_of(facets_.begin(), facets_.end(), [](const Facet<N>& f) { return f.offset > 0.0; });
  }

  WulffShape translated(const Vec<N>& t) const {
    std::vector<Vec<N>> v = vertices_;
    for (auto& p : v) p += t;
    return from_vertices(std::move(v));
  }

  WulffShape scaled(double s) const {
    std::vector<Vec<N>> v = vertices_;
    for (auto& p : v) p *= s;
    return from_vertices(std::move(v));
  }

 private:
  void compute_gauge_bounds() {
    m_k_ = std::numeric_limits<double>::infinity();
    for (const auto& f : facets_) m_k_ = std::min(m_k_, f.offset);
    M_k_ = 0.0;
    for (const auto& v : vertices_) M_k_ = std::max(M_k_, norm(v));
  }

  std::vector<Vec<N>> vertices_;
  std::vector<Facet<N>> facets_;
  std::vector<std::array<Vec3, 3>> triangles_;
  double volume_ = 0.0;
  Vec<N> barycenter_{};
  double m_k_ = 0.0;
  double M_k_ = 0.0;
};

using WulffShape2 = WulffShape<2>;
using WulffShape3 = WulffShape<3>;

template <std::size_t N>
double support_value(const WulffShape<N>& K, const Vec<N>& y) {
  if (y == Vec<N>{}) return 0.0;
  return K.support(y);
}

struct GaugeBounds {
  double m_K = 0.0;
  double M_K = 0.0;
};

/// Exact for polytopes: inradius about the origin and circumradius about the origin.
template <std::size_t N>
GaugeBounds mk_Mk(const WulffShape<N>& K) {
  return {K.m_K(), K.M_K()};
}

/// Intersection of the half-spaces {x·dir < value}. Computed through the polar body:
/// each facet of conv{dir/value} with plane n·p = d yields the vertex n/d.
template <std::size_t N>
WulffShape<N> wulff_from_tension(const TensionSpec<N>& T) {
  T.validate();
  std::vector<Vec<N>> dual;
  dual.reserve(T.samples.size());
  for (const auto& s : T.samples) dual.push_back(s.dir * (1.0 / s.value));
  double scale = 0.0;
  for (const auto& p : dual) scale = std::max(scale, norm(p));
  const double eps = 1e-12 * scale;

  std::vector<Vec<N>> verts;
  if constexpr (N == 2) {
    const auto h = convex_hull(dual);
    if (h.size() < 3) fail(ErrorCode::UnboundedShape, "directions do not positively span the plane");
    for (std::size_t i = 0; i < h.size(); ++i) {
      const Vec2 e = h[(i + 1) % h.size()] - h[i];
      const Vec2 nrm = normalized(Vec2{{e[1], -e[0]}});
      const double d = dot(nrm, h[i]);
      if (d <= eps) fail(ErrorCode::UnboundedShape, "directions do not positively span the plane");
      verts.push_back(nrm * (1.0 / d));
    }
  } else {
    Hull3 h;
    try {
      h = convex_hull3(dual);
    } catch (const Error&) {
      fail(ErrorCode::UnboundedShape, "directions do not positively span space");
    }
    std::map<std::array<long long, 3>, Vec3> unique;
    for (const auto& f : h.faces) {
      const Vec3 nrm = normalized(h.face_normal(f));
      const double d = dot(nrm, h.points[f[0]]);
      if (d <= eps) fail(ErrorCode::UnboundedShape, "directions do not positively span space");
      const Vec3 v = nrm * (1.0 / d);
      std::array<long long, 3> key{};
      for (int i = 0; i < 3; ++i) key[i] = std::llround(v[i] * 1e9);
      unique.emplace(key, v);
    }
    for (const auto& [key, v] : unique) verts.push_back(v);
  }
  auto K = WulffShape<N>::from_vertices(std::move(verts));
  if (!(K.volume() > 0.0)) fail(ErrorCode::EmptyShape, "half-space intersection has no interior");
  return K;
}

/// Translates the barycenter to the origin and scales to the volume of the unit ball.
template <std::size_t N>
WulffShape<N> normalize_shape(const WulffShape<N>& raw) {
  if (!(raw.volume() > 0.0)) fail(ErrorCode::EmptyShape, "shape has no interior");
  const double s = std::pow(unit_ball_volume(N) / raw.volume(), 1.0 / N);
  std::vector<Vec<N>> v = raw.vertices();
  const Vec<N> b = raw.barycenter();
  for (auto& p : v) p = (p - b) * s;
  auto K = WulffShape<N>::from_vertices(std::move(v));
  // Remove the residual barycenter drift left by rounding.
  const Vec<N> drift = K.barycenter();
  if (norm(drift) > 0.0) K = K.translated(-drift);
  if (!K.contains_origin_strictly() || K.M_K() > static_cast<double>(N) * K.m_K() * (1.0 + 1e-12))
    fail(ErrorCode::GaugeRatioExceeded,
         "M_K/m_K = " + std::to_string(K.M_K() / K.m_K()) + " exceeds n after normalization (m_K=" +
             std::to_string(K.m_K()) + ", M_K=" + std::to_string(K.M_K()) + ")");
  return K;
}

/// Unit directions: equispaced angles in 2D, a subdivided icosahedron in 3D.
template <std::size_t N>
std::vector<Vec<N>> sphere_directions(int count_hint);

template <>
inline std::vector<Vec2> sphere_directions<2>(int count) {
  std::vector<Vec2> d;
  for (int i = 0; i < count; ++i) d.push_back(polar(2.0 * kPi * i / count));
  return d;
}

/// Icosphere with 10·4^k + 2 vertices; picks the smallest k reaching `count`.
template <>
inline std::vector<Vec3> sphere_directions<3>(int count) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {{{-1, t, 0}}, {{1, t, 0}},  {{-1, -t, 0}}, {{1, -t, 0}}, {{0, -1, t}}, {{0, 1, t}},
                         {{0, -1, -t}}, {{0, 1, -t}}, {{t, 0, -1}},  {{t, 0, 1}},   {{-t, 0, -1}}, {{-t, 0, 1}}};
  for (auto& p : v) p = normalized(p);
  std::vector<std::array<int, 3>> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                       {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                       {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                       {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  while (static_cast<int>(v.size()) < count) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      v.push_back(normalized(v[a] + v[b]));
      const int idx = static_cast<int>(v.size()) - 1;
      mid.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> nf;
    for (const auto& tri : f) {
      const int a = midpoint(tri[0], tri[1]), b = midpoint(tri[1], tri[2]), c = midpoint(tri[2], tri[0]);
      nf.push_back({tri[0], a, c});
      nf.push_back({tri[1], b, a});
      nf.push_back({tri[2], c, b});
      nf.push_back({a, b, c});
    }
    f.swap(nf);
  }
  return v;
}

/// Default sampling density: 360 directions in 2D, 2562 in 3D.
template <std::size_t N>
constexpr int default_tension_samples() {
  return N == 2 ? 360 : 2562;
}

/// Samples y ↦ support_value(K, y) on the default direction set.
template <std::size_t N>
TensionSpec<N> sample_tension(const WulffShape<N>& K, int count = default_tension_samples<N>()) {
  TensionSpec<N> T;
  for (const auto& d : sphere_directions<N>(count)) T.samples.push_back({d, K.support(d)});
  return T;
}

}  // namespace wulfflab
