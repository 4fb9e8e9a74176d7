#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <unordered_map>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "geomset.hpp"
#include "polygon.hpp"
#include "voxel.hpp"

namespace wulfflab {

inline constexpr int kWhitneyMaxLevel = 24;

/// Closed dyadic cube side = base·2^-level at base_origin + index·side.
template <std::size_t N>
struct WhitneyCube {
  int level = 0;
  std::array<std::int64_t, N> index{};
  double side = 0.0;
  double dist_lo = 0.0;  // certified bounds on dist(Q, ∂Ω)
  double dist_hi = 0.0;
  Vec<N> center{};
  double center_dist_lo = 0.0;  // certified lower bound on dist(center, ∂Ω)
};

/// A cell at the truncation level that meets Ω but was not accepted.
template <std::size_t N>
struct UncoveredCell {
  std::array<std::int64_t, N> index{};
  double volume_inside = 0.0;
};

template <std::size_t N>
struct WhitneyDecomposition {
  std::vector<WhitneyCube<N>> cubes;
  std::vector<std::vector<int>> adjacency;
  Vec<N> base_origin{};
  double base_scale = 0.0;
  int max_level = 0;
  double uncovered_volume = 0.0;
  double domain_volume = 0.0;
  std::vector<UncoveredCell<N>> uncovered;

  double side_at(int level) const { return std::ldexp(base_scale, -level); }

  std::size_t edge_count() const {
    std::size_t e = 0;
    for (const auto& a : adjacency) e += a.size();
    return e / 2;
  }

  double covered_volume() const {
    double v = 0.0;
    for (const auto& q : cubes) v += std::pow(q.side, double(N));
    return v;
  }

  /// Index of the cube containing p, or -1.
  int locate(const Vec<N>& p) const {
    for (int l = 0; l <= max_level; ++l) {
      const double s = side_at(l);
      std::array<std::int64_t, N> idx{};
      for (std::size_t a = 0; a < N; ++a) idx[a] = static_cast<std::int64_t>(std::floor((p[a] - base_origin[a]) / s));
      auto it = lookup_.find(key(l, idx));
      if (it != lookup_.end()) return it->second;
    }
    return -1;
  }

  int find(int level, const std::array<std::int64_t, N>& idx) const {
    auto it = lookup_.find(key(level, idx));
    return it == lookup_.end() ? -1 : it->second;
  }

  /// Packs (level, index) into one integer key; indices stay below 2^24 per axis.
  static std::uint64_t key(int level, const std::array<std::int64_t, N>& idx) {
    std::uint64_t k = static_cast<std::uint64_t>(level);
    for (std::size_t a = 0; a < N; ++a) k = (k << (N == 2 ? 26 : 19)) ^ static_cast<std::uint64_t>(idx[a] + 1);
    return k;
  }

  void build_index() {
    lookup_.clear();
    for (std::size_t i = 0; i < cubes.size(); ++i) lookup_.emplace(key(cubes[i].level, cubes[i].index), static_cast<int>(i));
  }

 private:
  std::unordered_map<std::uint64_t, int> lookup_;
};

using WhitneyDecomposition2 = WhitneyDecomposition<2>;
using WhitneyDecomposition3 = WhitneyDecomposition<3>;

/// Distance oracle over axis-aligned boxes for a domain representation.
template <std::size_t N>
struct BoxQuery {
  double dist = 0.0;   // dist(box, ∂Ω), exact up to rounding
  bool inside = false; // box ⊂ Ω (meaningful when dist > 0)
  bool outside = false;
};

namespace detail {

/// Distance between the closed box [lo, hi] and segment [a, b] (0 when they meet).
inline double box_segment_distance(const Vec2& lo, const Vec2& hi, const Vec2& a, const Vec2& b) {
  // Liang–Barsky: does the segment meet the box?
  double t0 = 0.0, t1 = 1.0;
  const Vec2 d = b - a;
  bool meets = true;
  for (int k = 0; k < 2 && meets; ++k) {
    const double p[2] = {-d[k], d[k]};
    const double q[2] = {a[k] - lo[k], hi[k] - a[k]};
    for (int s = 0; s < 2; ++s) {
      if (p[s] == 0.0) {
        if (q[s] < 0.0) meets = false;
      } else {
        const double r = q[s] / p[s];
        if (p[s] < 0.0) t0 = std::max(t0, r);
        else t1 = std::min(t1, r);
      }
    }
    if (t0 > t1) meets = false;
  }
  if (meets) return 0.0;
  auto point_box = [&](const Vec2& p) {
    const double dx = std::max({lo[0] - p[0], 0.0, p[0] - hi[0]});
    const double dy = std::max({lo[1] - p[1], 0.0, p[1] - hi[1]});
    return std::hypot(dx, dy);
  };
  double best = std::min(point_box(a), point_box(b));
  const Vec2 corners[4] = {lo, {{hi[0], lo[1]}}, hi, {{lo[0], hi[1]}}};
  for (const auto& c : corners) best = std::min(best, point_segment_distance(c, a, b));
  return best;
}

/// Uniform bucket grid over polygon edges for nearest-boundary queries.
class EdgeIndex {
 public:
  explicit EdgeIndex(const PolygonSystem& P) : EdgeIndex(segments_of(P)) {}

  explicit EdgeIndex(std::vector<std::pair<Vec2, Vec2>> segments) : edges_(std::move(segments)) {
    if (edges_.empty()) fail(ErrorCode::EmptyShape, "domain has no boundary");
    for (const auto& [a, b] : edges_) box_.add(a), box_.add(b);
    const double ext = std::max(box_.hi[0] - box_.lo[0], box_.hi[1] - box_.lo[1]);
    cells_ = std::clamp(static_cast<int>(std::sqrt(static_cast<double>(edges_.size()))), 1, 256);
    cell_ = ext / cells_ * (1.0 + 1e-9);
    buckets_.assign(static_cast<std::size_t>(cells_) * cells_, {});
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      Box2 eb;
      eb.add(edges_[e].first);
      eb.add(edges_[e].second);
      const auto [i0, j0] = cell_of(eb.lo);
      const auto [i1, j1] = cell_of(eb.hi);
      for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i) buckets_[static_cast<std::size_t>(j) * cells_ + i].push_back(static_cast<int>(e));
    }
    stamp_.assign(edges_.size(), 0);
  }

  /// Exact distance from the closed box to the nearest edge.
  double box_distance(const Vec2& lo, const Vec2& hi) const {
    return search(lo, hi, [&](int e) { return box_segment_distance(lo, hi, edges_[e].first, edges_[e].second); });
  }

  double point_distance(const Vec2& p) const {
    return search(p, p, [&](int e) { return point_segment_distance(p, edges_[e].first, edges_[e].second); });
  }

  static std::vector<std::pair<Vec2, Vec2>> segments_of(const PolygonSystem& P) {
    std::vector<std::pair<Vec2, Vec2>> out;
    for (const auto& l : P.loops)
      for (std::size_t i = 0; i < l.size(); ++i) out.push_back({l[i], l[(i + 1) % l.size()]});
    return out;
  }

  Vec2 closest_point(const Vec2& p) const {
    double best = std::numeric_limits<double>::infinity();
    Vec2 arg = p;
    search(p, p, [&](int e) {
      const Vec2 c = closest_point_on_segment(p, edges_[e].first, edges_[e].second);
      const double d = norm(c - p);
      if (d < best) best = d, arg = c;
      return d;
    });
    return arg;
  }

 private:
  std::pair<int, int> cell_of(const Vec2& p) const {
    const int i = std::clamp(static_cast<int>(std::floor((p[0] - box_.lo[0]) / cell_)), 0, cells_ - 1);
    const int j = std::clamp(static_cast<int>(std::floor((p[1] - box_.lo[1]) / cell_)), 0, cells_ - 1);
    return {i, j};
  }

  /// Ring-by-ring search around the query box; stops once the ring is farther than the best.
  template <class D>
  double search(const Vec2& lo, const Vec2& hi, D&& dist) const {
    ++epoch_;
    double best = std::numeric_limits<double>::infinity();
    const auto [ci0, cj0] = cell_of(lo);
    const auto [ci1, cj1] = cell_of(hi);
    // Gap between the query box and the outside of the bucket grid.
    const double outside_gap = std::max({box_.lo[0] - hi[0], box_.lo[1] - hi[1], lo[0] - box_.hi[0], lo[1] - box_.hi[1], 0.0});
    for (int ring = 0; ring <= cells_; ++ring) {
      if (ring > 0 && outside_gap + (ring - 1) * cell_ > best) break;
      const int i0 = ci0 - ring, i1 = ci1 + ring, j0 = cj0 - ring, j1 = cj1 + ring;
      bool any = false;
      for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i) {
          if (ring > 0 && j != j0 && j != j1 && i != i0 && i != i1) continue;
          if (i < 0 || j < 0 || i >= cells_ || j >= cells_) continue;
          any = true;
          for (int e : buckets_[static_cast<std::size_t>(j) * cells_ + i]) {
            if (stamp_[e] == epoch_) continue;
            stamp_[e] = epoch_;
            best = std::min(best, dist(e));
          }
        }
      if (!any && ring > 0 && i0 < 0 && j0 < 0 && i1 >= cells_ && j1 >= cells_) break;
    }
    return best;
  }

  std::vector<std::pair<Vec2, Vec2>> edges_;
  std::vector<std::vector<int>> buckets_;
  Box2 box_;
  int cells_ = 1;
  double cell_ = 1.0;
  mutable std::vector<std::uint32_t> stamp_;
  mutable std::uint32_t epoch_ = 0;
};

/// Voxel domain: exact box-to-complement distances through the EDT of the complement
/// dilated by the 3^n neighbourhood, aggregated in a min-pyramid over dyadic blocks.
template <std::size_t N>
class VoxelDistance {
 public:
  VoxelDistance(const VoxelGrid<N>& g, int levels) : g_(g), levels_(levels) {
    const int side = 1 << levels;
    std::array<int, N> dims{};
    dims.fill(side + 2);
    std::size_t total = 1;
    for (int d : dims) total *= static_cast<std::size_t>(d);
    // Padded grid shifted by one cell; cells outside the voxel grid are outside Ω.
    std::vector<std::uint8_t> outside(total, 1);
    auto pidx = [&](const std::array<int, N>& i) {
      std::size_t idx = 0;
      for (std::size_t a = N; a-- > 0;) idx = idx * dims[a] + (i[a] + 1);
      return idx;
    };
    for (std::size_t c = 0; c < g.size(); ++c)
      if (g.cells[c]) outside[pidx(g.coords(c))] = 0;
    // Dilate the complement by one cell in every direction (including diagonals).
    std::vector<std::uint8_t> dil = outside;
    std::size_t stride = 1;
    for (std::size_t a = 0; a < N; ++a) {
      std::vector<std::uint8_t> next = dil;
      for (std::size_t idx = 0; idx < total; ++idx) {
        const int pos = static_cast<int>((idx / stride) % dims[a]);
        if (pos > 0 && dil[idx - stride]) next[idx] = 1;
        if (pos + 1 < dims[a] && dil[idx + stride]) next[idx] = 1;
      }
      dil.swap(next);
      stride *= dims[a];
    }
    const auto sq = squared_edt<N>(dims, dil);
    // Level `levels` of the pyramid holds single cells.
    pyramid_.resize(levels + 1);
    counts_.resize(levels + 1);
    const std::size_t leaf = static_cast<std::size_t>(std::pow(double(side), double(N)));
    pyramid_[levels].assign(leaf, 0.0);
    counts_[levels].assign(leaf, 0);
    for (std::size_t c = 0; c < leaf; ++c) {
      std::array<int, N> i{};
      std::size_t rem = c;
      for (std::size_t a = 0; a < N; ++a) i[a] = static_cast<int>(rem % side), rem /= side;
      pyramid_[levels][c] = sq[pidx(i)];
      counts_[levels][c] = g.at(i) ? 1 : 0;
    }
    for (int l = levels - 1; l >= 0; --l) {
      const int s = 1 << l;
      const std::size_t n = static_cast<std::size_t>(std::pow(double(s), double(N)));
      pyramid_[l].assign(n, std::numeric_limits<double>::infinity());
      counts_[l].assign(n, 0);
      for (std::size_t c = 0; c < pyramid_[l + 1].size(); ++c) {
        std::size_t rem = c, parent = 0, mul = 1;
        for (std::size_t a = 0; a < N; ++a) {
          const std::size_t ci = rem % (2 * s);
          rem /= (2 * s);
          parent += (ci / 2) * mul;
          mul *= s;
        }
        pyramid_[l][parent] = std::min(pyramid_[l][parent], pyramid_[l + 1][c]);
        counts_[l][parent] += counts_[l + 1][c];
      }
    }
  }

  std::size_t node(int level, const std::array<std::int64_t, N>& idx) const {
    const std::size_t s = std::size_t{1} << level;
    std::size_t n = 0, mul = 1;
    for (std::size_t a = 0; a < N; ++a) n += static_cast<std::size_t>(idx[a]) * mul, mul *= s;
    return n;
  }

  BoxQuery<N> query(int level, const std::array<std::int64_t, N>& idx) const {
    BoxQuery<N> q;
    const std::size_t n = node(level, idx);
    const std::uint64_t filled = counts_[level][n];
    q.dist = std::sqrt(pyramid_[level][n]) * g_.h;
    q.outside = filled == 0;
    q.inside = q.dist > 0.0;
    return q;
  }

  double filled_volume(int level, const std::array<std::int64_t, N>& idx) const {
    return static_cast<double>(counts_[level][node(level, idx)]) * std::pow(g_.h, double(N));
  }

 private:
  const VoxelGrid<N>& g_;
  int levels_;
  std::vector<std::vector<double>> pyramid_;
  std::vector<std::vector<std::uint64_t>> counts_;
};

/// Widens a double outward by a few ulps.
inline double round_down(double x) { return std::nextafter(std::nextafter(x, -INFINITY), -INFINITY); }
inline double round_up(double x) { return std::nextafter(std::nextafter(x, INFINITY), INFINITY); }

/// Calls fn(id) for every emitted cube at `level` whose closed box meets the closed
/// dyadic box (box_level, idx).
template <std::size_t N, class F>
void for_each_touching(const WhitneyDecomposition<N>& W, int box_level, const std::array<std::int64_t, N>& idx, int level, F&& fn) {
  const int L = std::max(W.max_level, std::max(box_level, level));
  const std::int64_t s = std::int64_t{1} << (L - box_level);
  const std::int64_t s2 = std::int64_t{1} << (L - level);
  std::array<std::int64_t, N> lo{}, hi{};
  for (std::size_t a = 0; a < N; ++a) {
    const std::int64_t a0 = idx[a] * s, a1 = (idx[a] + 1) * s;
    // j·s2 ≤ a1 and (j+1)·s2 ≥ a0
    lo[a] = (a0 >= 0 ? (a0 + s2 - 1) / s2 : -((-a0) / s2)) - 1;
    hi[a] = a1 / s2;
  }
  std::array<std::int64_t, N> j = lo;
  while (true) {
    const int id = W.find(level, j);
    if (id >= 0) fn(id);
    std::size_t a = 0;
    for (; a < N; ++a) {
      if (++j[a] <= hi[a]) break;
      j[a] = lo[a];
    }
    if (a == N) break;
  }
}

template <std::size_t N>
void build_adjacency(WhitneyDecomposition<N>& W) {
  W.build_index();
  W.adjacency.assign(W.cubes.size(), {});
  for (std::size_t q = 0; q < W.cubes.size(); ++q) {
    const auto& Q = W.cubes[q];
    auto& adj = W.adjacency[q];
    for (int l = std::max(0, Q.level - 2); l <= std::min(W.max_level, Q.level + 2); ++l)
      for_each_touching(W, Q.level, Q.index, l, [&](int id) {
        if (id != static_cast<int>(q)) adj.push_back(id);
      });
    std::sort(adj.begin(), adj.end());
    adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
  }
}

}  // namespace detail

/// Dyadic Whitney decomposition. A cube is emitted when √n·ℓ ≤ dist(Q, ∂Ω) (certified);
/// the construction then forces dist(Q, ∂Ω) ≤ 4√n·ℓ. Cells still meeting Ω at
/// `max_level` are recorded as uncovered.
inline WhitneyDecomposition2 whitney_decompose(const PolygonSystem& P, int max_level) {
  if (max_level < 0 || max_level > kWhitneyMaxLevel) fail(ErrorCode::InvalidInput, "max_level must be in [0, 24]");
  if (!(P.area() > 0.0)) fail(ErrorCode::EmptyInterior, "domain has no interior");
  WhitneyDecomposition2 W;
  W.max_level = max_level;
  W.domain_volume = P.area();
  const Box2 bb = P.bbox();
  const double ext = std::max(bb.hi[0] - bb.lo[0], bb.hi[1] - bb.lo[1]);
  W.base_scale = std::exp2(std::ceil(std::log2(ext)));
  W.base_origin = bb.lo;
  const detail::EdgeIndex edges(P);
  const double sqrt_n = std::sqrt(2.0);
  Loop a, b;

  std::function<void(int, std::int64_t, std::int64_t)> visit = [&](int level, std::int64_t i, std::int64_t j) {
    const double s = W.side_at(level);
    const Vec2 lo = W.base_origin + Vec2{{i * s, j * s}};
    const Vec2 hi = lo + Vec2{{s, s}};
    const double d = edges.box_distance(lo, hi);
    const Vec2 c = (lo + hi) * 0.5;
    if (d > 0.0 && !P.contains(c)) return;  // entirely outside
    const double dlo = detail::round_down(d * (1.0 - 1e-14));
    if (d > 0.0 && detail::round_up(sqrt_n * s) <= dlo) {
      WhitneyCube<2> q;
      q.level = level;
      q.index = {i, j};
      q.side = s;
      q.dist_lo = dlo;
      q.dist_hi = detail::round_up(d * (1.0 + 1e-14));
      q.center = c;
      q.center_dist_lo = detail::round_down(edges.point_distance(c) * (1.0 - 1e-14));
      W.cubes.push_back(q);
      return;
    }
    if (level == max_level) {
      const Loop box{lo, {{hi[0], lo[1]}}, hi, {{lo[0], hi[1]}}};
      const auto clip = ConvexClipper::from_ccw_polygon(box);
      double inside = 0.0;
      if (d > 0.0) {
        inside = s * s;
      } else {
        for (const auto& l : P.loops) inside += clip.clipped_area(l, Vec2{}, a, b);
      }
      if (inside > 0.0) {
        W.uncovered.push_back({{i, j}, inside});
        W.uncovered_volume += inside;
      }
      return;
    }
    for (int dj = 0; dj < 2; ++dj)
      for (int di = 0; di < 2; ++di) visit(level + 1, 2 * i + di, 2 * j + dj);
  };
  visit(0, 0, 0);
  if (W.cubes.empty() && W.uncovered.empty()) fail(ErrorCode::EmptyInterior, "no cube meets the domain");
  detail::build_adjacency(W);
  return W;
}

/// Whitney decomposition of the interior of a union of voxels. Cubes are aligned with
/// the voxel grid; the finest admissible side is one voxel.
template <std::size_t N>
WhitneyDecomposition<N> whitney_decompose(const VoxelGrid<N>& g, int max_level) {
  if (max_level < 0 || max_level > kWhitneyMaxLevel) fail(ErrorCode::InvalidInput, "max_level must be in [0, 24]");
  if (g.count() == 0) fail(ErrorCode::EmptyInterior, "voxel domain is empty");
  int levels = 0;
  while ((1 << levels) < *std::max_element(g.dims.begin(), g.dims.end())) ++levels;
  const int L = std::min(max_level, levels);
  const detail::VoxelDistance<N> oracle(g, levels);
  WhitneyDecomposition<N> W;
  W.max_level = L;
  W.base_origin = g.origin;
  W.base_scale = g.h * static_cast<double>(1 << levels);
  W.domain_volume = static_cast<double>(g.count()) * std::pow(g.h, double(N));
  const double sqrt_n = std::sqrt(static_cast<double>(N));

  std::function<void(int, const std::array<std::int64_t, N>&)> visit = [&](int level, const std::array<std::int64_t, N>& idx) {
    // Pyramid level for a cube of this side.
    const BoxQuery<N> q = oracle.query(level, idx);
    if (q.outside) return;
    const double s = W.side_at(level);
    if (q.dist > 0.0 && detail::round_up(sqrt_n * s) <= detail::round_down(q.dist)) {
      WhitneyCube<N> c;
      c.level = level;
      c.index = idx;
      c.side = s;
      c.dist_lo = detail::round_down(q.dist);
      c.dist_hi = detail::round_up(q.dist);
      for (std::size_t a = 0; a < N; ++a) c.center[a] = W.base_origin[a] + (idx[a] + 0.5) * s;
      c.center_dist_lo = detail::round_down(q.dist + 0.5 * s);
      W.cubes.push_back(c);
      return;
    }
    if (level == L) {
      const double inside = oracle.filled_volume(level, idx);
      W.uncovered.push_back({idx, inside});
      W.uncovered_volume += inside;
      return;
    }
    std::array<std::int64_t, N> child{};
    for (int m = 0; m < (1 << N); ++m) {
      for (std::size_t a = 0; a < N; ++a) child[a] = 2 * idx[a] + ((m >> a) & 1);
      visit(level + 1, child);
    }
  };
  visit(0, std::array<std::int64_t, N>{});
  detail::build_adjacency(W);
  return W;
}

inline WhitneyDecomposition2 whitney_decompose(const GeomSet& E, int max_level) {
  if (E.is_polygon()) return whitney_decompose(E.polygon(), max_level);
  if (E.dim() == 2) return whitney_decompose(E.voxels<2>(), max_level);
  fail(ErrorCode::InvalidInput, "use whitney_decompose(VoxelGrid3, level) for 3D sets");
}

/// Adjacency list view (edge iff closed cubes meet).
template <std::size_t N>
const std::vector<std::vector<int>>& cube_graph(const WhitneyDecomposition<N>& W) {
  return W.adjacency;
}

// ---------------------------------------------------------------------------
// Post-hoc verification

struct WhitneyCheck {
  std::size_t cubes = 0;
  std::size_t distance_violations = 0;
  std::size_t ratio_violations = 0;
  std::size_t overlap_violations = 0;  // interiors that intersect
  double coverage_residual = 0.0;      // |Ω| - Σℓ^n - uncovered
  bool connected = false;
  bool pass() const { return distance_violations == 0 && ratio_violations == 0 && overlap_violations == 0; }
};

/// Re-derives dist(Q, ∂Ω) for every emitted cube with interval bounds and checks the
/// Whitney window and neighbour side ratios. Also reports overlaps and coverage.
template <std::size_t N>
WhitneyCheck check_whitney(const WhitneyDecomposition<N>& W, const std::function<double(const WhitneyCube<N>&)>& exact_dist = {}) {
  WhitneyCheck c;
  c.cubes = W.cubes.size();
  const double sqrt_n = std::sqrt(static_cast<double>(N));
  for (const auto& q : W.cubes) {
    double lo = q.dist_lo, hi = q.dist_hi;
    if (exact_dist) {
      const double d = exact_dist(q);
      lo = std::min(lo, detail::round_down(d * (1.0 - 1e-13)));
      hi = std::max(hi, detail::round_up(d * (1.0 + 1e-13)));
    }
    const double low_window = detail::round_up(sqrt_n * q.side);
    const double high_window = detail::round_down(4.0 * sqrt_n * q.side);
    if (!(low_window <= lo && hi <= high_window)) ++c.distance_violations;
  }
  const int L = W.max_level;
  for (std::size_t i = 0; i < W.cubes.size(); ++i)
    for (int j : W.adjacency[i]) {
      const double r = W.cubes[i].side / W.cubes[j].side;
      if (r < 0.25 || r > 4.0) ++c.ratio_violations;
      // Interiors must be disjoint: in finest units the open intervals may not overlap on every axis.
      const auto& A = W.cubes[i];
      const auto& B = W.cubes[j];
      const std::int64_t sa = std::int64_t{1} << (L - A.level), sb = std::int64_t{1} << (L - B.level);
      bool interior_overlap = true;
      for (std::size_t a = 0; a < N; ++a) {
        const std::int64_t a0 = A.index[a] * sa, a1 = a0 + sa, b0 = B.index[a] * sb, b1 = b0 + sb;
        if (!(a0 < b1 && b0 < a1)) interior_overlap = false;
      }
      if (interior_overlap) ++c.overlap_violations;
    }
  c.coverage_residual = W.domain_volume - W.covered_volume() - W.uncovered_volume;
  // Connectivity by BFS from cube 0.
  if (!W.cubes.empty()) {
    std::vector<char> seen(W.cubes.size(), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    std::size_t visited = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int v : W.adjacency[u])
        if (!seen[v]) seen[v] = 1, ++visited, stack.push_back(v);
    }
    c.connected = visited == W.cubes.size();
  }
  return c;
}

/// Exact dist(Q, ∂Ω) for a polygonal domain by brute force over all edges.
inline double polygon_cube_distance(const PolygonSystem& P, const WhitneyCube<2>& q, const WhitneyDecomposition2& W) {
  const Vec2 lo = W.base_origin + Vec2{{q.index[0] * q.side, q.index[1] * q.side}};
  const Vec2 hi = lo + Vec2{{q.side, q.side}};
  double best = std::numeric_limits<double>::infinity();
  for (const auto& l : P.loops)
    for (std::size_t i = 0; i < l.size(); ++i)
      best = std::min(best, detail::box_segment_distance(lo, hi, l[i], l[(i + 1) % l.size()]));
  return best;
}

/// Maximum number of dilated cubes (factor 11/10) covering any point of a
/// samples×samples lattice over the decomposition's bounding box.
inline int overlap_multiplicity(const WhitneyDecomposition2& W, int samples = 1000) {
  Box2 bb;
  for (const auto& q : W.cubes) {
    bb.add(q.center - Vec2{{0.55 * q.side, 0.55 * q.side}});
    bb.add(q.center + Vec2{{0.55 * q.side, 0.55 * q.side}});
  }
  const double dx = (bb.hi[0] - bb.lo[0]) / samples, dy = (bb.hi[1] - bb.lo[1]) / samples;
  std::vector<std::uint16_t> count(static_cast<std::size_t>(samples) * samples, 0);
  int best = 0;
  for (const auto& q : W.cubes) {
    const double r = 0.55 * q.side;
    const int i0 = std::max(0, static_cast<int>(std::ceil((q.center[0] - r - bb.lo[0]) / dx - 0.5)));
    const int i1 = std::min(samples - 1, static_cast<int>(std::floor((q.center[0] + r - bb.lo[0]) / dx - 0.5)));
    const int j0 = std::max(0, static_cast<int>(std::ceil((q.center[1] - r - bb.lo[1]) / dy - 0.5)));
    const int j1 = std::min(samples - 1, static_cast<int>(std::floor((q.center[1] + r - bb.lo[1]) / dy - 0.5)));
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) best = std::max<int>(best, ++count[static_cast<std::size_t>(j) * samples + i]);
  }
  return best;
}

}  // namespace wulfflab
