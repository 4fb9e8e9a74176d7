#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "errors.hpp"
#include "vec.hpp"

namespace wulfflab {

/// Occupancy bitmask on a regular grid; cell i covers origin + h·[i, i+1).
/// Cells are stored with the first axis fastest.
template <std::size_t N>
struct VoxelGrid {
  double h = 1.0;
  Vec<N> origin{};
  std::array<int, N> dims{};
  std::vector<std::uint8_t> cells;

  VoxelGrid() = default;
  VoxelGrid(double spacing, const Vec<N>& org, const std::array<int, N>& d) : h(spacing), origin(org), dims(d) {
    std::size_t total = 1;
    for (int v : dims) total *= static_cast<std::size_t>(v);
    cells.assign(total, 0);
  }

  std::size_t size() const { return cells.size(); }

  std::size_t index(const std::array<int, N>& i) const {
    std::size_t idx = 0;
    for (std::size_t a = N; a-- > 0;) idx = idx * static_cast<std::size_t>(dims[a]) + static_cast<std::size_t>(i[a]);
    return idx;
  }

  std::array<int, N> coords(std::size_t idx) const {
    std::array<int, N> i{};
    for (std::size_t a = 0; a < N; ++a) {
      i[a] = static_cast<int>(idx % static_cast<std::size_t>(dims[a]));
      idx /= static_cast<std::size_t>(dims[a]);
    }
    return i;
  }

  bool in_range(const std::array<int, N>& i) const {
    for (std::size_t a = 0; a < N; ++a)
      if (i[a] < 0 || i[a] >= dims[a]) return false;
    return true;
  }

  bool at(const std::array<int, N>& i) const { return in_range(i) && cells[index(i)] != 0; }
  void set(const std::array<int, N>& i, bool v) { cells[index(i)] = v ? 1 : 0; }

  Vec<N> center(const std::array<int, N>& i) const {
    Vec<N> p = origin;
    for (std::size_t a = 0; a < N; ++a) p[a] += (i[a] + 0.5) * h;
    return p;
  }

  std::size_t count() const { return static_cast<std::size_t>(std::count(cells.begin(), cells.end(), std::uint8_t{1})); }
};

using VoxelGrid2 = VoxelGrid<2>;
using VoxelGrid3 = VoxelGrid<3>;

/// Exact squared Euclidean distance transform (lower-envelope pass per axis).
/// Output: for every cell, squared distance in cell units from its center to the
/// nearest center where `feature` is set; +inf if there is no feature.
template <std::size_t N>
std::vector<double> squared_edt(const std::array<int, N>& dims, const std::vector<std::uint8_t>& feature) {
  constexpr double kInf = 1e300;
  std::vector<double> d(feature.size());
  for (std::size_t i = 0; i < feature.size(); ++i) d[i] = feature[i] ? 0.0 : kInf;
  std::vector<double> f, out;
  std::vector<int> v;
  std::vector<double> z;
  std::size_t stride = 1;
  for (std::size_t axis = 0; axis < N; ++axis) {
    const int n = dims[axis];
    f.resize(n);
    out.resize(n);
    v.resize(n);
    z.resize(n + 1);
    const std::size_t total = d.size();
    const std::size_t block = stride * static_cast<std::size_t>(n);
    for (std::size_t base = 0; base < total; base += block) {
      for (std::size_t off = 0; off < stride; ++off) {
        const std::size_t start = base + off;
        for (int q = 0; q < n; ++q) f[q] = d[start + q * stride];
        // Felzenszwalb–Huttenlocher 1D transform.
        int k = -1;
        for (int q = 0; q < n; ++q) {
          if (f[q] >= kInf) continue;
          if (k < 0) {
            k = 0;
            v[0] = q;
            z[0] = -kInf;
            z[1] = kInf;
            continue;
          }
          double s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) / (2.0 * q - 2.0 * v[k]);
          while (s <= z[k]) {
            --k;
            s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) / (2.0 * q - 2.0 * v[k]);
          }
          ++k;
          v[k] = q;
          z[k] = s;
          z[k + 1] = kInf;
        }
        if (k < 0) {
          for (int q = 0; q < n; ++q) d[start + q * stride] = kInf;
          continue;
        }
        k = 0;
        for (int q = 0; q < n; ++q) {
          while (z[k + 1] < q) ++k;
          const double dq = q - v[k];
          out[q] = dq * dq + f[v[k]];
        }
        for (int q = 0; q < n; ++q) d[start + q * stride] = out[q];
      }
    }
    stride *= static_cast<std::size_t>(n);
  }
  return d;
}

}  // namespace wulfflab
