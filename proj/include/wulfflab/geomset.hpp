#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "anisotropy.hpp"
#include "boolean.hpp"
#include "errors.hpp"
#include "marching.hpp"
#include "polygon.hpp"
#include "voxel.hpp"

namespace wulfflab {

/// Planar set bounded by simple closed loops: counterclockwise outer loops, clockwise holes.
struct PolygonSystem {
  std::vector<Loop> loops;

  PolygonSystem() = default;
  explicit PolygonSystem(std::vector<Loop> l) : loops(std::move(l)) {}
  explicit PolygonSystem(Loop outer) { loops.push_back(std::move(outer)); }

  double area() const {
    double a = 0.0;
    for (const auto& l : loops) a += signed_area(l);
    return a;
  }

  Vec2 barycenter() const {
    Vec2 m{};
    for (const auto& l : loops) m += first_moment(l);
    return m * (1.0 / area());
  }

  double perimeter() const {
    double p = 0.0;
    for (const auto& l : loops) p += loop_length(l);
    return p;
  }

  Box2 bbox() const {
    Box2 b;
    for (const auto& l : loops)
      for (const auto& p : l) b.add(p);
    return b;
  }

  std::size_t vertex_count() const {
    std::size_t n = 0;
    for (const auto& l : loops) n += l.size();
    return n;
  }

  bool contains(const Vec2& p) const { return detail::system_winding(loops, p) > 0; }

  /// Closest point on the boundary and its distance.
  std::pair<Vec2, double> closest_boundary_point(const Vec2& p) const {
    double best = std::numeric_limits<double>::infinity();
    Vec2 arg{};
    for (const auto& l : loops)
      for (std::size_t i = 0; i < l.size(); ++i) {
        const Vec2 c = closest_point_on_segment(p, l[i], l[(i + 1) % l.size()]);
        const double d = norm(p - c);
        if (d < best) best = d, arg = c;
      }
    return {arg, best};
  }

  double boundary_distance(const Vec2& p) const { return closest_boundary_point(p).second; }

  /// Positive inside, negative outside.
  double signed_distance(const Vec2& p) const {
    const double d = boundary_distance(p);
    return contains(p) ? d : -d;
  }

  template <class F>
  PolygonSystem mapped(F&& f) const {
    PolygonSystem out = *this;
    for (auto& l : out.loops)
      for (auto& p : l) p = f(p);
    return out;
  }

  PolygonSystem translated(const Vec2& t) const {
    return mapped([&](const Vec2& p) { return p + t; });
  }
  PolygonSystem scaled(double s) const {
    return mapped([&](const Vec2& p) { return p * s; });
  }

  /// Rounds every vertex to the predicate snap grid.
  PolygonSystem snapped() const {
    return mapped([](const Vec2& p) { return snap(p); });
  }

  /// Loops must be simple and pairwise non-crossing with positive enclosed area.
  void validate() const {
    if (loops.empty()) fail(ErrorCode::InvalidInput, "polygon system has no loops");
    std::vector<std::pair<Vec2, Vec2>> edges;
    for (const auto& l : loops) {
      if (l.size() < 3) fail(ErrorCode::InvalidInput, "loop with fewer than 3 vertices");
      for (std::size_t i = 0; i < l.size(); ++i) edges.push_back({l[i], l[(i + 1) % l.size()]});
    }
    const std::size_t m = edges.size();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j) {
        const auto& [a, b] = edges[i];
        const auto& [c, d] = edges[j];
        const bool adjacent = a == d || b == c || a == c || b == d;
        const int o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
        if (o1 * o2 < 0 && o3 * o4 < 0) fail(ErrorCode::InvalidInput, "polygon edges cross");
        if (!adjacent && ((o1 == 0 && on_segment(c, a, b)) || (o2 == 0 && on_segment(d, a, b))))
          fail(ErrorCode::InvalidInput, "polygon edges touch");
      }
    if (!(area() > 0.0)) fail(ErrorCode::InvalidInput, "polygon system has non-positive area");
  }
};

/// A discretized set of finite perimeter.
class GeomSet {
 public:
  using Rep = std::variant<PolygonSystem, VoxelGrid2, VoxelGrid3>;

  GeomSet() = default;
  GeomSet(PolygonSystem p) : rep_(std::move(p)) {}
  GeomSet(Loop outer) : rep_(PolygonSystem(std::move(outer))) {}
  GeomSet(VoxelGrid2 g) : rep_(std::move(g)) {}
  GeomSet(VoxelGrid3 g) : rep_(std::move(g)) {}

  int dim() const { return std::holds_alternative<VoxelGrid3>(rep_) ? 3 : 2; }
  bool is_polygon() const { return std::holds_alternative<PolygonSystem>(rep_); }
  bool is_voxel() const { return !is_polygon(); }

  const PolygonSystem& polygon() const {
    if (!is_polygon()) fail(ErrorCode::MixedRepresentation, "set is not polygonal");
    return std::get<PolygonSystem>(rep_);
  }
  template <std::size_t N>
  const VoxelGrid<N>& voxels() const {
    if (!std::holds_alternative<VoxelGrid<N>>(rep_)) fail(ErrorCode::MixedRepresentation, "set is not a voxel grid of this dimension");
    return std::get<VoxelGrid<N>>(rep_);
  }
  const Rep& rep() const { return rep_; }

  /// Length scale below which the representation cannot resolve geometry.
  double resolution() const {
    return std::visit(
        [](const auto& r) -> double {
          if constexpr (std::is_same_v<std::decay_t<decltype(r)>, PolygonSystem>) return 0.0;
          else return r.h;
        },
        rep_);
  }

 private:
  Rep rep_;
};

/// Cell-center sampling of a polygon system onto a grid by scanlines.
inline VoxelGrid2 rasterize(const PolygonSystem& P, double h, const Vec2& origin, std::array<int, 2> dims) {
  VoxelGrid2 g(h, origin, dims);
  std::vector<double> xs;
  for (int j = 0; j < dims[1]; ++j) {
    const double y = origin[1] + (j + 0.5) * h;
    xs.clear();
    for (const auto& l : P.loops)
      for (std::size_t i = 0; i < l.size(); ++i) {
        const Vec2& a = l[i];
        const Vec2& b = l[(i + 1) % l.size()];
        if ((a[1] <= y && y < b[1]) || (b[1] <= y && y < a[1]))
          xs.push_back(a[0] + (y - a[1]) * (b[0] - a[0]) / (b[1] - a[1]));
      }
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      const int i0 = std::max(0, static_cast<int>(std::ceil((xs[k] - origin[0]) / h - 0.5)));
      const int i1 = std::min(dims[0] - 1, static_cast<int>(std::ceil((xs[k + 1] - origin[0]) / h - 0.5)) - 1);
      for (int i = i0; i <= i1; ++i) g.set({i, j}, true);
    }
  }
  return g;
}

/// Rasterizes on a grid aligned to multiples of h that covers the set plus `pad` cells.
inline VoxelGrid2 rasterize(const PolygonSystem& P, double h, int pad = 2) {
  const Box2 b = P.bbox();
  const Vec2 origin{{(std::floor(b.lo[0] / h) - pad) * h, (std::floor(b.lo[1] / h) - pad) * h}};
  const std::array<int, 2> dims{static_cast<int>(std::ceil((b.hi[0] - origin[0]) / h)) + pad,
                                static_cast<int>(std::ceil((b.hi[1] - origin[1]) / h)) + pad};
  return rasterize(P, h, origin, dims);
}

inline double volume(const GeomSet& E) {
  return std::visit(
      [](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, PolygonSystem>) return std::max(0.0, r.area());
        else return static_cast<double>(r.count()) * std::pow(r.h, T{}.dims.size());
      },
      E.rep());
}

namespace detail {

template <std::size_t N>
double voxel_symm_diff(const VoxelGrid<N>& a, const VoxelGrid<N>& b) {
  if (std::fabs(a.h - b.h) > 1e-12 * a.h) fail(ErrorCode::GridMismatch, "voxel spacings differ");
  std::array<int, N> shift{};
  for (std::size_t k = 0; k < N; ++k) {
    const double s = (b.origin[k] - a.origin[k]) / a.h;
    shift[k] = static_cast<int>(std::llround(s));
    if (std::fabs(s - shift[k]) > 1e-9) fail(ErrorCode::GridMismatch, "voxel grids are not aligned");
  }
  std::size_t diff = 0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    auto i = a.coords(c);
    for (std::size_t k = 0; k < N; ++k) i[k] -= shift[k];
    if ((a.cells[c] != 0) != b.at(i)) ++diff;
  }
  for (std::size_t c = 0; c < b.size(); ++c) {
    if (!b.cells[c]) continue;
    auto i = b.coords(c);
    for (std::size_t k = 0; k < N; ++k) i[k] += shift[k];
    if (!a.in_range(i)) ++diff;
  }
  return static_cast<double>(diff) * std::pow(a.h, static_cast<double>(N));
}

}  // namespace detail

/// |E \ F| + |F \ E|.
inline double symm_diff_volume(const GeomSet& E, const GeomSet& F) {
  if (E.dim() != F.dim()) fail(ErrorCode::InvalidInput, "sets have different dimensions");
  if (E.is_polygon() != F.is_polygon())
    fail(ErrorCode::MixedRepresentation, "rasterize the polygonal set before comparing with voxels");
  if (E.is_polygon()) {
    const auto a = E.polygon().snapped();
    const auto b = F.polygon().snapped();
    const double inter = intersection_area(a.loops, b.loops);
    return std::max(0.0, a.area() + b.area() - 2.0 * inter);
  }
  if (E.dim() == 2) return detail::voxel_symm_diff(E.voxels<2>(), F.voxels<2>());
  return detail::voxel_symm_diff(E.voxels<3>(), F.voxels<3>());
}

inline BoundaryMesh<2> polygon_boundary(const PolygonSystem& P) {
  BoundaryMesh<2> m;
  for (const auto& l : P.loops)
    for (std::size_t i = 0; i < l.size(); ++i) {
      const Vec2& a = l[i];
      const Vec2& b = l[(i + 1) % l.size()];
      const Vec2 e = b - a;
      const double len = norm(e);
      if (len == 0.0) continue;
      m.facets.push_back({(a + b) * 0.5, Vec2{{e[1] / len, -e[0] / len}}, len});
    }
  return m;
}

template <std::size_t N>
BoundaryMesh<N> boundary_mesh(const GeomSet& E) {
  if (E.dim() != static_cast<int>(N)) fail(ErrorCode::InvalidInput, "dimension mismatch");
  if constexpr (N == 2) {
    if (E.is_polygon()) return polygon_boundary(E.polygon());
    return marching_squares(E.voxels<2>());
  } else {
    return marching_tetrahedra(E.voxels<3>());
  }
}

/// Euclidean perimeter (total boundary measure).
inline double perimeter(const GeomSet& E) {
  return E.dim() == 2 ? boundary_mesh<2>(E).total_measure() : boundary_mesh<3>(E).total_measure();
}

template <std::size_t N>
double anisotropic_perimeter(const BoundaryMesh<N>& mesh, const WulffShape<N>& K) {
  double s = 0.0;
  for (const auto& f : mesh.facets) s += support_value(K, f.normal) * f.measure;
  return s;
}

/// P_K(E): integral of the dual norm of the outer normal over the boundary.
template <std::size_t N>
double anisotropic_perimeter(const GeomSet& E, const WulffShape<N>& K) {
  return anisotropic_perimeter(boundary_mesh<N>(E), K);
}

inline double anisotropic_perimeter(const PolygonSystem& P, const WulffShape2& K) {
  return anisotropic_perimeter(polygon_boundary(P), K);
}

// ---------------------------------------------------------------------------
// Densities

enum class DensityClass { Zero, One, Essential };

constexpr std::string_view to_string(DensityClass c) {
  return c == DensityClass::Zero ? "Zero" : (c == DensityClass::One ? "One" : "Essential");
}

struct DensityReport {
  std::vector<double> point;
  std::vector<double> radii;
  std::vector<double> density_values;
  double limit = 0.0;
  DensityClass classification = DensityClass::Essential;
};

inline constexpr double kDensityZeroBelow = 0.05;
inline constexpr double kDensityOneAbove = 0.95;
inline constexpr int kBallPolygonVertices = 1024;

namespace detail {

template <std::size_t N>
double voxel_ball_fraction(const VoxelGrid<N>& g, const Vec<N>& x, double r) {
  std::array<int, N> lo{}, hi{};
  for (std::size_t a = 0; a < N; ++a) {
    lo[a] = std::max(0, static_cast<int>(std::floor((x[a] - r - g.origin[a]) / g.h)));
    hi[a] = std::min(g.dims[a] - 1, static_cast<int>(std::floor((x[a] + r - g.origin[a]) / g.h)));
  }
  std::size_t in = 0;
  std::array<int, N> i = lo;
  bool empty = false;
  for (std::size_t a = 0; a < N; ++a) empty |= lo[a] > hi[a];
  if (!empty) {
    while (true) {
      if (g.cells[g.index(i)] && norm(g.center(i) - x) <= r) ++in;
      std::size_t a = 0;
      for (; a < N; ++a) {
        if (++i[a] <= hi[a]) break;
        i[a] = lo[a];
      }
      if (a == N) break;
    }
  }
  return static_cast<double>(in) * std::pow(g.h, double(N)) / (unit_ball_volume(N) * std::pow(r, double(N)));
}

/// Value at zero of the polynomial through (radii[k], values[k]) (Neville's scheme).
inline double extrapolate_to_zero(std::span<const double> r, std::span<const double> v) {
  std::vector<double> p(v.begin(), v.end());
  const std::size_t n = p.size();
  for (std::size_t m = 1; m < n; ++m)
    for (std::size_t i = 0; i + m < n; ++i) p[i] = (r[i + m] * p[i] - r[i] * p[i + 1]) / (r[i + m] - r[i]);
  return p[0];
}

}  // namespace detail

/// |E ∩ B_r(x)| / |B_r| over a radius ladder, classified by the extrapolated limit
/// (three smallest radii).
inline DensityReport density_classify(const GeomSet& E, std::span<const double> x, std::span<const double> radii) {
  if (radii.empty()) fail(ErrorCode::InvalidInput, "empty radius ladder");
  if (static_cast<int>(x.size()) != E.dim()) fail(ErrorCode::InvalidInput, "point dimension mismatch");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] < radii[i - 1])) fail(ErrorCode::InvalidInput, "radii must be strictly decreasing");
  if (radii.back() < 2.0 * E.resolution()) fail(ErrorCode::ResolutionTooCoarse, "smallest radius under twice the resolution");

  DensityReport rep;
  rep.point.assign(x.begin(), x.end());
  rep.radii.assign(radii.begin(), radii.end());
  Loop a, b;
  for (double r : radii) {
    double d = 0.0;
    if (E.is_polygon()) {
      const Vec2 c{{x[0], x[1]}};
      const Loop ball = regular_polygon(kBallPolygonVertices, r, c);
      const auto clip = ConvexClipper::from_ccw_polygon(ball);
      double inter = 0.0;
      for (const auto& l : E.polygon().loops) inter += clip.clipped_area(l, Vec2{}, a, b);
      d = inter / signed_area(ball);
    } else if (E.dim() == 2) {
      d = detail::voxel_ball_fraction(E.voxels<2>(), Vec2{{x[0], x[1]}}, r);
    } else {
      d = detail::voxel_ball_fraction(E.voxels<3>(), Vec3{{x[0], x[1], x[2]}}, r);
    }
    rep.density_values.push_back(std::clamp(d, 0.0, 1.0));
  }
  const std::size_t k = std::min<std::size_t>(3, radii.size());
  const std::span<const double> rr(rep.radii.data() + radii.size() - k, k);
  const std::span<const double> vv(rep.density_values.data() + radii.size() - k, k);
  rep.limit = std::clamp(detail::extrapolate_to_zero(rr, vv), 0.0, 1.0);
  rep.classification = rep.limit < kDensityZeroBelow ? DensityClass::Zero
                       : rep.limit > kDensityOneAbove ? DensityClass::One
                                                       : DensityClass::Essential;
  return rep;
}

struct UpperDensityReport {
  double a0 = 0.0;
  double worst_ratio = 0.0;
  std::vector<double> worst_point;
  double worst_radius = 0.0;
  bool pass = true;
  std::size_t violations = 0;
  std::size_t checks = 0;
};

inline constexpr int kDensityRadiusLadder = 16;

/// Evenly spaced points along the boundary loops (by arclength) with their spacing weight.
inline std::vector<std::pair<Vec2, double>> boundary_samples(const PolygonSystem& P, int count) {
  std::vector<std::pair<Vec2, double>> out;
  const double total = P.perimeter();
  if (count <= 0 || total <= 0.0) return out;
  const double step = total / count;
  double next = 0.5 * step, acc = 0.0;
  for (const auto& l : P.loops)
    for (std::size_t i = 0; i < l.size(); ++i) {
      const Vec2& a = l[i];
      const Vec2& b = l[(i + 1) % l.size()];
      const double len = norm(b - a);
      while (next < acc + len && static_cast<int>(out.size()) < count) {
        out.push_back({a + (b - a) * ((next - acc) / len), step});
        next += step;
      }
      acc += len;
    }
  return out;
}

/// Checks H^{n-1}(∂E ∩ B_r(x)) ≤ a0·r^{n-1} on boundary samples and a log-spaced
/// radius ladder in (resolution, r0].
inline UpperDensityReport upper_density_check(const GeomSet& E, double a0, double r0, int samples) {
  if (!(a0 > 0.0) || !(r0 > 0.0)) fail(ErrorCode::InvalidInput, "a0 and r0 must be positive");
  UpperDensityReport rep;
  rep.a0 = a0;
  const double rmin = std::max(E.resolution() * 2.0, r0 * std::pow(2.0, -10.0));
  std::vector<double> radii;
  for (int k = 0; k < kDensityRadiusLadder; ++k)
    radii.push_back(r0 * std::pow(rmin / r0, double(k) / (kDensityRadiusLadder - 1)));
  auto record = [&](std::vector<double> pt, double r, double measure) {
    const double ratio = measure / std::pow(r, E.dim() - 1);
    ++rep.checks;
    if (ratio > rep.worst_ratio) {
      rep.worst_ratio = ratio;
      rep.worst_point = std::move(pt);
      rep.worst_radius = r;
    }
    if (ratio > a0) ++rep.violations;
  };
  if (E.is_polygon()) {
    const auto& P = E.polygon();
    for (const auto& [x, w] : boundary_samples(P, samples))
      for (double r : radii) {
        double len = 0.0;
        for (const auto& l : P.loops)
          for (std::size_t i = 0; i < l.size(); ++i) len += segment_length_in_disc(l[i], l[(i + 1) % l.size()], x, r);
        record({x[0], x[1]}, r, len);
      }
  } else {
    auto run = [&](const auto& mesh) {
      const std::size_t n = mesh.facets.size();
      const std::size_t stride = std::max<std::size_t>(1, n / std::max(1, samples));
      for (std::size_t s = 0; s < n; s += stride) {
        const auto& x = mesh.facets[s].centroid;
        for (double r : radii) {
          double m = 0.0;
          for (const auto& f : mesh.facets)
            if (norm(f.centroid - x) <= r) m += f.measure;
          record(std::vector<double>(x.c.begin(), x.c.end()), r, m);
        }
      }
    };
    if (E.dim() == 2) run(boundary_mesh<2>(E));
    else run(boundary_mesh<3>(E));
  }
  rep.pass = rep.violations == 0;
  return rep;
}

}  // namespace wulfflab
