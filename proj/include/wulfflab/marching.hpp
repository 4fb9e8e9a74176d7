#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "voxel.hpp"

namespace wulfflab {

/// One oriented piece of a discretized boundary.
template <std::size_t N>
struct BoundaryFacet {
  Vec<N> centroid;
  Vec<N> normal;   // outward, unit
  double measure;  // length (2D) or area (3D)
};

template <std::size_t N>
struct BoundaryMesh {
  std::vector<BoundaryFacet<N>> facets;

  double total_measure() const {
    double s = 0.0;
    for (const auto& f : facets) s += f.measure;
    return s;
  }

  /// Σ measure·normal; vanishes for a closed boundary.
  Vec<N> flux() const {
    Vec<N> s{};
    for (const auto& f : facets) s += f.normal * f.measure;
    return s;
  }
};

namespace detail {

inline constexpr int kSmoothPad = 3;

/// Occupancy smoothed by the separable binomial kernel [1 4 6 4 1]/16, sampled at the
/// cell centers of the grid padded by kSmoothPad cells on every side.
template <std::size_t N>
std::vector<double> smoothed_occupancy(const VoxelGrid<N>& g, std::array<int, N>& ext) {
  for (std::size_t a = 0; a < N; ++a) ext[a] = g.dims[a] + 2 * kSmoothPad;
  std::size_t total = 1;
  for (int v : ext) total *= static_cast<std::size_t>(v);
  std::vector<double> f(total, 0.0), tmp(total);
  auto ext_index = [&](const std::array<int, N>& i) {
    std::size_t idx = 0;
    for (std::size_t a = N; a-- > 0;) idx = idx * ext[a] + i[a];
    return idx;
  };
  for (std::size_t c = 0; c < g.size(); ++c) {
    if (!g.cells[c]) continue;
    auto i = g.coords(c);
    for (auto& v : i) v += kSmoothPad;
    f[ext_index(i)] = 1.0;
  }
  static constexpr double w[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
  std::size_t stride = 1;
  for (std::size_t a = 0; a < N; ++a) {
    const int n = ext[a];
    for (std::size_t idx = 0; idx < total; ++idx) {
      const int pos = static_cast<int>((idx / stride) % n);
      double s = 0.0;
      for (int k = -2; k <= 2; ++k) {
        const int q = pos + k;
        if (q < 0 || q >= n) continue;
        s += w[k + 2] * f[idx + static_cast<std::ptrdiff_t>(k) * static_cast<std::ptrdiff_t>(stride)];
      }
      tmp[idx] = s;
    }
    f.swap(tmp);
    stride *= n;
  }
  return f;
}

}  // namespace detail

/// Marching squares on the smoothed occupancy at iso-level 1/2.
inline BoundaryMesh<2> marching_squares(const VoxelGrid2& g) {
  std::array<int, 2> ext{};
  const auto f = detail::smoothed_occupancy(g, ext);
  const double h = g.h;
  const Vec2 base = g.origin + Vec2{{(0.5 - detail::kSmoothPad) * h, (0.5 - detail::kSmoothPad) * h}};
  auto val = [&](int i, int j) { return f[static_cast<std::size_t>(j) * ext[0] + i]; };
  BoundaryMesh<2> mesh;
  constexpr double iso = 0.5;
  for (int j = 0; j + 1 < ext[1]; ++j) {
    for (int i = 0; i + 1 < ext[0]; ++i) {
      const double v[4] = {val(i, j), val(i + 1, j), val(i + 1, j + 1), val(i, j + 1)};
      int mask = 0;
      for (int k = 0; k < 4; ++k)
        if (v[k] > iso) mask |= 1 << k;
      if (mask == 0 || mask == 15) continue;
      static constexpr int corner[4][2] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
      auto edge_point = [&](int e) {
        const int a = e, b = (e + 1) % 4;
        const double t = (iso - v[a]) / (v[b] - v[a]);
        const double x = corner[a][0] + t * (corner[b][0] - corner[a][0]);
        const double y = corner[a][1] + t * (corner[b][1] - corner[a][1]);
        return base + Vec2{{(i + x) * h, (j + y) * h}};
      };
      // Crossing edges, paired around the square.
      std::array<int, 4> crossing{};
      int nc = 0;
      for (int e = 0; e < 4; ++e)
        if (((mask >> e) & 1) != ((mask >> ((e + 1) % 4)) & 1)) crossing[nc++] = e;
      std::array<std::array<int, 2>, 2> pairs{};
      int np = 0;
      if (nc == 2) {
        pairs[np++] = {crossing[0], crossing[1]};
      } else {
        // Saddle: decide connectivity by the mean of the four corners.
        const bool center_in = 0.25 * (v[0] + v[1] + v[2] + v[3]) > iso;
        const bool c0_in = (mask & 1) != 0;
        if (center_in == c0_in) {
          pairs[np++] = {0, 1};
          pairs[np++] = {2, 3};
        } else {
          pairs[np++] = {3, 0};
          pairs[np++] = {1, 2};
        }
      }
      for (int k = 0; k < np; ++k) {
        const Vec2 p = edge_point(pairs[k][0]);
        const Vec2 q = edge_point(pairs[k][1]);
        const Vec2 d = q - p;
        const double len = norm(d);
        if (len <= 0.0) continue;
        // Outward normal points down the gradient of the bilinear interpolant.
        const Vec2 mid = (p + q) * 0.5;
        const double x = (mid[0] - base[0]) / h - i, y = (mid[1] - base[1]) / h - j;
        const Vec2 grad{{(v[1] - v[0]) * (1 - y) + (v[2] - v[3]) * y, (v[3] - v[0]) * (1 - x) + (v[2] - v[1]) * x}};
        Vec2 n{{d[1] / len, -d[0] / len}};
        if (dot(n, grad) > 0.0) n = -n;
        mesh.facets.push_back({mid, n, len});
      }
    }
  }
  return mesh;
}

/// Marching tetrahedra (six tetrahedra per lattice cube) on the smoothed occupancy.
inline BoundaryMesh<3> marching_tetrahedra(const VoxelGrid3& g) {
  std::array<int, 3> ext{};
  const auto f = detail::smoothed_occupancy(g, ext);
  const double h = g.h;
  const double off = (0.5 - detail::kSmoothPad) * h;
  const Vec3 base = g.origin + Vec3{{off, off, off}};
  auto val = [&](int i, int j, int k) {
    return f[(static_cast<std::size_t>(k) * ext[1] + j) * ext[0] + i];
  };
  static constexpr int corner[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                                       {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
  static constexpr int tets[6][4] = {{0, 5, 1, 6}, {0, 1, 2, 6}, {0, 2, 3, 6},
                                     {0, 3, 7, 6}, {0, 7, 4, 6}, {0, 4, 5, 6}};
  constexpr double iso = 0.5;
  BoundaryMesh<3> mesh;
  auto emit = [&](Vec3 a, Vec3 b, Vec3 c, const Vec3& inside) {
    Vec3 n = cross(b - a, c - a);
    const double twice = norm(n);
    if (twice <= 0.0) return;
    n = n * (1.0 / twice);
    const Vec3 cen = (a + b + c) * (1.0 / 3.0);
    if (dot(n, cen - inside) < 0.0) n = -n;
    mesh.facets.push_back({cen, n, 0.5 * twice});
  };
  for (int k = 0; k + 1 < ext[2]; ++k)
    for (int j = 0; j + 1 < ext[1]; ++j)
      for (int i = 0; i + 1 < ext[0]; ++i) {
        double v[8];
        Vec3 p[8];
        int mask = 0;
        for (int c = 0; c < 8; ++c) {
          v[c] = val(i + corner[c][0], j + corner[c][1], k + corner[c][2]);
          p[c] = base + Vec3{{(i + corner[c][0]) * h, (j + corner[c][1]) * h, (k + corner[c][2]) * h}};
          if (v[c] > iso) mask |= 1 << c;
        }
        if (mask == 0 || mask == 255) continue;
        for (const auto& t : tets) {
          int in[4], out[4], ni = 0, no = 0;
          for (int c : t) (v[c] > iso ? in[ni++] : out[no++]) = c;
          if (ni == 0 || no == 0) continue;
          auto ep = [&](int a, int b) { return p[a] + (p[b] - p[a]) * ((iso - v[a]) / (v[b] - v[a])); };
          Vec3 ic{};
          for (int q = 0; q < ni; ++q) ic += p[in[q]];
          ic = ic * (1.0 / ni);
          if (ni == 1) {
            emit(ep(in[0], out[0]), ep(in[0], out[1]), ep(in[0], out[2]), ic);
          } else if (ni == 3) {
            emit(ep(in[0], out[0]), ep(in[1], out[0]), ep(in[2], out[0]), ic);
          } else {
            const Vec3 a = ep(in[0], out[0]), b = ep(in[0], out[1]), c = ep(in[1], out[1]), d = ep(in[1], out[0]);
            emit(a, b, c, ic);
            emit(a, c, d, ic);
          }
        }
      }
  return mesh;
}

}  // namespace wulfflab
