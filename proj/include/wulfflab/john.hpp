#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <queue>
#include <utility>
#include <variant>
#include <vector>

#include "anisotropy.hpp"
#include "errors.hpp"
#include "geomset.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "whitney.hpp"

namespace wulfflab {

/// Planar domain with exact point-to-boundary distances. Voxel domains use the
/// faces between filled and empty cells as their boundary.
class PlanarDomain {
 public:
  explicit PlanarDomain(const PolygonSystem& P) : rep_(P), edges_(P) {}
  explicit PlanarDomain(const VoxelGrid2& g) : rep_(g), edges_(voxel_faces(g)) {}
  explicit PlanarDomain(const GeomSet& g) : PlanarDomain(from(g)) {}

  bool contains(const Vec2& p) const {
    if (const auto* P = std::get_if<PolygonSystem>(&rep_)) return P->contains(p);
    const auto& g = std::get<VoxelGrid2>(rep_);
    const std::array<int, 2> i{static_cast<int>(std::floor((p[0] - g.origin[0]) / g.h)),
                               static_cast<int>(std::floor((p[1] - g.origin[1]) / g.h))};
    return g.at(i);
  }
  double distance(const Vec2& p) const { return edges_.point_distance(p); }
  Vec2 closest(const Vec2& p) const { return edges_.closest_point(p); }

 private:
  static PlanarDomain from(const GeomSet& g) {
    if (g.is_polygon()) return PlanarDomain(g.polygon());
    if (g.dim() == 2) return PlanarDomain(g.voxels<2>());
    fail(ErrorCode::InvalidInput, "John estimates are planar");
  }

  static std::vector<std::pair<Vec2, Vec2>> voxel_faces(const VoxelGrid2& g) {
    std::vector<std::pair<Vec2, Vec2>> out;
    for (std::size_t c = 0; c < g.size(); ++c) {
      if (!g.cells[c]) continue;
      const auto i = g.coords(c);
      const Vec2 lo = g.origin + Vec2{{i[0] * g.h, i[1] * g.h}};
      const Vec2 p[4] = {lo, lo + Vec2{{g.h, 0}}, lo + Vec2{{g.h, g.h}}, lo + Vec2{{0, g.h}}};
      const std::array<int, 2> nb[4] = {{i[0], i[1] - 1}, {i[0] + 1, i[1]}, {i[0], i[1] + 1}, {i[0] - 1, i[1]}};
      for (int k = 0; k < 4; ++k)
        if (!g.at(nb[k])) out.push_back({p[k], p[(k + 1) % 4]});
    }
    return out;
  }

  std::variant<PolygonSystem, VoxelGrid2> rep_;
  detail::EdgeIndex edges_;
};

struct JohnWitness {
  double length = 0.0;  // ℓ(γ[x, y])
  double dist = 0.0;    // lower bound on dist(y, ∂Ω)
  double ratio() const { return length == 0.0 ? 0.0 : length / dist; }
};

struct JohnCurve {
  std::vector<Vec2> points;
  std::vector<JohnWitness> witness;

  double max_ratio() const {
    double r = 0.0;
    for (const auto& w : witness) r = std::max(r, w.ratio());
    return r;
  }
  double length() const { return witness.empty() ? 0.0 : witness.back().length; }
  bool satisfies(double J, double tol = 1e-9) const {
    for (const auto& w : witness)
      if (w.length > J * w.dist + tol) return false;
    return true;
  }
};

struct JohnEstimate {
  Vec2 center{};
  double J_value = 0.0;
  Vec2 worst_start{};
  int resolution = 0;
  std::size_t targets = 0;
  std::vector<int> worst_targets;
  std::vector<double> worst_ratios;
  std::vector<JohnCurve> curves;  // witness curves of worst_targets, same order
};

namespace detail {

/// Label-correcting search minimizing the maximal prefix ratio length/dist, with
/// ties broken by length then node index. Node n (== cube count) is a virtual goal.
class BottleneckSearch {
 public:
  struct Label {
    double ratio, length;
    int node, parent;
  };

  explicit BottleneckSearch(const WhitneyDecomposition2& W) : W_(W), front_(W.cubes.size() + 1) {}

  /// Virtual goal at `point` reached from the cubes in `from`.
  void set_virtual(std::vector<int> from, const Vec2& point, double dist) {
    vfrom_ = std::move(from);
    std::sort(vfrom_.begin(), vfrom_.end());
    vpoint_ = point;
    vdist_ = dist;
  }

  /// Returns the label id of the first goal popped with ratio ≤ cap, or -1.
  template <class IsGoal>
  int run(int start, double start_length, double cap, IsGoal&& is_goal) {
    for (int t : touched_) front_[t].clear();
    touched_.clear();
    labels_.clear();
    using Key = std::tuple<double, double, int, int>;
    std::priority_queue<Key, std::vector<Key>, std::greater<>> queue;
    auto push = [&](double ratio, double length, int node, int parent) {
      if (ratio > cap) return;
      auto& f = front_[node];
      for (const auto& [r, l] : f)
        if (r <= ratio && l <= length) return;
      if (f.empty()) touched_.push_back(node);
      f.erase(std::remove_if(f.begin(), f.end(), [&](const auto& e) { return ratio <= e.first && length <= e.second; }), f.end());
      f.emplace_back(ratio, length);
      labels_.push_back({ratio, length, node, parent});
      queue.emplace(ratio, length, node, static_cast<int>(labels_.size()) - 1);
    };
    push(ratio_of(start_length, dist(start)), start_length, start, -1);
    const int virt = static_cast<int>(W_.cubes.size());
    while (!queue.empty()) {
      const auto [ratio, length, node, id] = queue.top();
      queue.pop();
      if (!alive(node, ratio, length)) continue;
      if (node == virt || (node != virt && is_goal(node))) return id;
      const Vec2 c = W_.cubes[node].center;
      for (int v : W_.adjacency[node]) {
        const double l = length + norm(W_.cubes[v].center - c);
        push(std::max(ratio, ratio_of(l, dist(v))), l, v, id);
      }
      if (std::binary_search(vfrom_.begin(), vfrom_.end(), node)) {
        const double l = length + norm(vpoint_ - c);
        push(std::max(ratio, ratio_of(l, vdist_)), l, virt, id);
      }
    }
    return -1;
  }

  const Label& label(int id) const { return labels_[id]; }

  /// Node sequence from the start to label id.
  std::vector<int> path(int id) const {
    std::vector<int> out;
    for (; id >= 0; id = labels_[id].parent) out.push_back(labels_[id].node);
    std::reverse(out.begin(), out.end());
    return out;
  }

  std::size_t label_count() const { return labels_.size(); }

 private:
  static double ratio_of(double length, double d) { return length == 0.0 ? 0.0 : (d > 0.0 ? length / d : std::numeric_limits<double>::infinity()); }
  double dist(int node) const { return node == static_cast<int>(W_.cubes.size()) ? vdist_ : W_.cubes[node].center_dist_lo; }
  bool alive(int node, double ratio, double length) const {
    for (const auto& [r, l] : front_[node])
      if (r == ratio && l == length) return true;
    return false;
  }

  const WhitneyDecomposition2& W_;
  std::vector<std::vector<std::pair<double, double>>> front_;
  std::vector<int> touched_;
  std::vector<Label> labels_;
  std::vector<int> vfrom_;
  Vec2 vpoint_{};
  double vdist_ = 0.0;
};

/// Curve from `start` through the cube centers of `nodes`, optionally ending at `tail`.
inline JohnCurve curve_along(const WhitneyDecomposition2& W, const Vec2& start, double start_dist, const std::vector<int>& nodes,
                             std::optional<std::pair<Vec2, double>> tail = std::nullopt) {
  JohnCurve c;
  c.points.push_back(start);
  c.witness.push_back({0.0, start_dist});
  double len = 0.0;
  Vec2 prev = start;
  for (int n : nodes) {
    if (n >= static_cast<int>(W.cubes.size())) continue;
    len += norm(W.cubes[n].center - prev);
    prev = W.cubes[n].center;
    c.points.push_back(prev);
    c.witness.push_back({len, W.cubes[n].center_dist_lo});
  }
  if (tail) {
    len += norm(tail->first - prev);
    c.points.push_back(tail->first);
    c.witness.push_back({len, tail->second});
  }
  return c;
}

/// Cubes adjacent to the uncovered layer.
inline std::vector<int> boundary_targets(const WhitneyDecomposition2& W) {
  std::vector<int> out;
  const int L = W.max_level;
  for (const auto& u : W.uncovered)
    for (int l = std::max(0, L - 1); l <= L; ++l) for_each_touching(W, L, u.index, l, [&](int id) { out.push_back(id); });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace detail

inline constexpr std::size_t kJohnWorstCurves = 10;

/// Certified-at-resolution John constant of Ω with center x₀: for every cube next to
/// the uncovered boundary layer, the minimal max-prefix-ratio over cube chains from
/// the nearest boundary point to x₀. J_value is the worst of these.
inline JohnEstimate estimate_john(const PlanarDomain& D, const Vec2& x0, const WhitneyDecomposition2& W) {
  if (!D.contains(x0)) fail(ErrorCode::CenterOutside, "x0 is not in the domain");
  const int q0 = W.locate(x0);
  if (q0 < 0) fail(ErrorCode::CenterOutside, "x0 lies in the uncovered boundary layer");
  const double d0 = D.distance(x0);
  // x₀ may sit on a face or corner shared by several cubes.
  std::vector<int> q0s;
  for (std::size_t i = 0; i < W.cubes.size(); ++i) {
    const auto& Q = W.cubes[i];
    if (std::abs(x0[0] - Q.center[0]) <= 0.5 * Q.side && std::abs(x0[1] - Q.center[1]) <= 0.5 * Q.side) q0s.push_back(static_cast<int>(i));
  }
  const auto targets = detail::boundary_targets(W);
  if (targets.empty()) fail(ErrorCode::InvalidInput, "decomposition has no uncovered boundary layer");

  struct Result {
    double ratio = std::numeric_limits<double>::infinity();
    double length = 0.0;
    Vec2 start{};
    std::vector<int> path;
  };
  std::vector<Result> results(targets.size());
  const unsigned workers = std::max(1u, std::min<unsigned>(thread_count(), static_cast<unsigned>(targets.size())));
  // One search object per contiguous block keeps scratch memory bounded.
  const std::size_t block = (targets.size() + workers - 1) / workers;
  parallel_for(workers, [&](std::size_t w) {
    detail::BottleneckSearch search(W);
    search.set_virtual(q0s, x0, d0);
    for (std::size_t t = w * block; t < std::min(targets.size(), (w + 1) * block); ++t) {
      const auto& Q = W.cubes[targets[t]];
      const Vec2 p = D.closest(Q.center);
      const int id = search.run(targets[t], norm(Q.center - p), std::numeric_limits<double>::infinity(), [](int) { return false; });
      if (id < 0) continue;
      results[t] = {search.label(id).ratio, search.label(id).length, p, search.path(id)};
    }
  });

  JohnEstimate E;
  E.center = x0;
  E.resolution = W.max_level;
  E.targets = targets.size();
  std::vector<std::size_t> order(targets.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (!std::isfinite(results[i].ratio)) fail(ErrorCode::DisconnectedDomain, "a boundary cube cannot reach x0");
    order[i] = i;
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (results[a].ratio != results[b].ratio) return results[a].ratio > results[b].ratio;
    if (results[a].length != results[b].length) return results[a].length < results[b].length;
    return targets[a] < targets[b];
  });
  E.J_value = results[order.front()].ratio;
  E.worst_start = results[order.front()].start;
  for (std::size_t k = 0; k < std::min(kJohnWorstCurves, order.size()); ++k) {
    const auto& r = results[order[k]];
    E.worst_targets.push_back(targets[order[k]]);
    E.worst_ratios.push_back(r.ratio);
    E.curves.push_back(detail::curve_along(W, r.start, 0.0, r.path, std::make_pair(x0, d0)));
  }
  return E;
}

inline JohnEstimate estimate_john(const GeomSet& omega, const Vec2& x0, const WhitneyDecomposition2& W) {
  return estimate_john(PlanarDomain(omega), x0, W);
}

// ---------------------------------------------------------------------------
// Local (J, s) property

struct LocalJohnOptions {
  std::uint64_t seed = 1;
  std::optional<Vec2> focus;  // sample boundary points near this point only
  double focus_radius = 0.0;
};

struct LocalJohnReport {
  std::size_t samples = 0;
  std::size_t evaluated = 0;  // samples where some x ∈ B_r(z)∩Ω lay in a covered cube
  std::size_t passed = 0;
  double pass_fraction = 0.0;
  // Worst sample: smallest achievable max-ratio margin.
  Vec2 worst_z{}, worst_x{};
  double worst_r = 0.0;
  double worst_ratio = 0.0;  // +inf when no admissible center was reached
};

namespace detail {

/// Arclength-uniform boundary sampler over a segment soup.
class BoundarySampler {
 public:
  explicit BoundarySampler(const std::vector<std::pair<Vec2, Vec2>>& segs) : segs_(segs) {
    double acc = 0.0;
    for (const auto& [a, b] : segs_) cum_.push_back(acc += norm(b - a));
  }
  Vec2 sample(Rng& rng) const {
    const double t = rng.uniform() * cum_.back();
    const std::size_t i = std::min<std::size_t>(std::upper_bound(cum_.begin(), cum_.end(), t) - cum_.begin(), segs_.size() - 1);
    const double start = i == 0 ? 0.0 : cum_[i - 1];
    const double len = cum_[i] - start;
    const double u = len > 0.0 ? (t - start) / len : 0.0;
    return segs_[i].first + (segs_[i].second - segs_[i].first) * u;
  }

 private:
  std::vector<std::pair<Vec2, Vec2>> segs_;
  std::vector<double> cum_;
};

inline std::vector<std::pair<Vec2, Vec2>> segments_of(const GeomSet& omega) {
  if (omega.is_polygon()) return EdgeIndex::segments_of(omega.polygon());
  const auto& g = omega.voxels<2>();
  std::vector<std::pair<Vec2, Vec2>> out;
  for (std::size_t c = 0; c < g.size(); ++c) {
    if (!g.cells[c]) continue;
    const auto i = g.coords(c);
    const Vec2 lo = g.origin + Vec2{{i[0] * g.h, i[1] * g.h}};
    const Vec2 p[4] = {lo, lo + Vec2{{g.h, 0}}, lo + Vec2{{g.h, g.h}}, lo + Vec2{{0, g.h}}};
    const std::array<int, 2> nb[4] = {{i[0], i[1] - 1}, {i[0] + 1, i[1]}, {i[0], i[1] + 1}, {i[0] - 1, i[1]}};
    for (int k = 0; k < 4; ++k)
      if (!g.at(nb[k])) out.push_back({p[k], p[(k + 1) % 4]});
  }
  return out;
}

}  // namespace detail

/// Draws a boundary point z with a log-uniform radius r below s, picks x ∈ B_r(z)∩Ω in a
/// covered cube, then looks for a cube center w with dist ≥ r/J and |w − z| < Jr that x
/// reaches with max prefix ratio ≤ J.
inline LocalJohnReport local_john_check(const GeomSet& omega, double J, double s, const WhitneyDecomposition2& W, std::size_t samples,
                                        const LocalJohnOptions& opt = {}) {
  if (!(J >= 1.0)) fail(ErrorCode::InvalidInput, "J must be at least 1");
  if (!(s > 0.0)) fail(ErrorCode::InvalidInput, "s must be positive");
  const PlanarDomain D(omega);
  auto segs = detail::segments_of(omega);
  if (opt.focus) {
    std::vector<std::pair<Vec2, Vec2>> near;
    for (const auto& e : segs)
      if (point_segment_distance(*opt.focus, e.first, e.second) <= opt.focus_radius) near.push_back(e);
    if (near.empty()) fail(ErrorCode::InvalidInput, "no boundary near the focus point");
    segs = std::move(near);
  }
  const detail::BoundarySampler sampler(segs);
  const double finest = W.side_at(W.max_level);
  const double r_hi = s;
  const double r_lo = std::min(8.0 * finest, 0.5 * s);
  Rng rng(opt.seed);
  detail::BottleneckSearch search(W);

  LocalJohnReport rep;
  rep.samples = samples;
  double worst_margin = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < samples; ++k) {
    Vec2 z = sampler.sample(rng);
    if (opt.focus && norm(z - *opt.focus) > opt.focus_radius) z = D.closest(*opt.focus);
    const double r = r_lo * std::pow(r_hi / r_lo, rng.uniform());
    Vec2 x{};
    int start = -1;
    for (int tries = 0; tries < 256 && start < 0; ++tries) {
      const double rho = r * std::sqrt(rng.uniform());
      const double th = 2.0 * kPi * rng.uniform();
      x = z + polar(th, rho);
      if (D.contains(x)) start = W.locate(x);
    }
    if (start < 0) continue;
    ++rep.evaluated;
    const double need = r / J;
    const int id = search.run(start, norm(W.cubes[start].center - x), J, [&](int n) {
      const auto& Q = W.cubes[n];
      return Q.center_dist_lo >= need && norm(Q.center - z) < J * r;
    });
    const double ratio = id < 0 ? std::numeric_limits<double>::infinity() : search.label(id).ratio;
    if (id >= 0) ++rep.passed;
    const double margin = ratio - J;
    if (margin > worst_margin) {
      worst_margin = margin;
      rep.worst_z = z;
      rep.worst_x = x;
      rep.worst_r = r;
      rep.worst_ratio = ratio;
    }
  }
  rep.pass_fraction = rep.evaluated ? static_cast<double>(rep.passed) / static_cast<double>(rep.evaluated) : 0.0;
  return rep;
}

// ---------------------------------------------------------------------------
// Sandwich test and John curves for sets close to K

struct SandwichReport {
  double inner = 0.0;  // min of the gauge of K over ∂E
  double outer = 0.0;  // max of the gauge over E
  bool origin_inside = false;
  /// Smallest δ with (1−δ)K ⊂ E ⊂ (1+δ)K.
  double delta() const { return origin_inside ? std::max(1.0 - inner, outer - 1.0) : std::numeric_limits<double>::infinity(); }
  bool holds(double d) const { return origin_inside && inner >= 1.0 - d && outer <= 1.0 + d; }
};

/// The gauge is linear on each cone spanned by consecutive vertices of K, so along an
/// edge of E its extremes sit at the endpoints or where the edge crosses those rays.
inline SandwichReport sandwich_report(const PolygonSystem& E, const WulffShape2& K) {
  SandwichReport r;
  r.origin_inside = E.contains(Vec2{});
  r.inner = std::numeric_limits<double>::infinity();
  for (const auto& l : E.loops)
    for (std::size_t i = 0; i < l.size(); ++i) {
      const Vec2 a = l[i], b = l[(i + 1) % l.size()], d = b - a;
      const double ga = K.gauge(a);
      r.outer = std::max(r.outer, ga);
      r.inner = std::min(r.inner, ga);
      for (const auto& v : K.vertices()) {
        const double den = cross(v, d);
        if (den == 0.0) continue;
        const double t = -cross(v, a) / den;
        if (t <= 0.0 || t >= 1.0) continue;
        const Vec2 p = a + d * t;
        if (dot(p, v) <= 0.0) continue;
        r.inner = std::min(r.inner, K.gauge(p));
      }
    }
  return r;
}

struct NearWulffCurve {
  JohnCurve curve;
  int which_case = 1;      // 1: radial segment; 2: escape path then radial segment
  double max_ratio = 1.0;  // measured over the witnesses
  double bound = 0.0;      // n in case 1, 3·J₀ + n in case 2
  double J0 = 0.0;
  bool certified() const { return max_ratio <= bound + 1e-9; }
};

inline constexpr int kRadialWitnesses = 64;

/// Constructive John curve from z to the origin for E with (1−δ)K ⊂ E ⊂ (1+δ)K.
/// `J0` is the John constant used in the case-2 bound; pass a value from estimate_john.
inline NearWulffCurve john_curve_near_wulff(const PolygonSystem& E, const WulffShape2& K, const Vec2& z, double delta, const WhitneyDecomposition2& W,
                                            double J0) {
  constexpr double n = 2.0;
  if (!(delta > 0.0) || delta > 1.0 / (6.0 * n) + 1e-15) fail(ErrorCode::InvalidInput, "delta must lie in (0, 1/(6n)]");
  const auto sw = sandwich_report(E, K);
  if (!sw.holds(delta)) fail(ErrorCode::SandwichViolated, "E is not between (1-delta)K and (1+delta)K");
  const PlanarDomain D(E);
  const double dz = D.distance(z);
  if (!E.contains(z) && dz > 1e-12) fail(ErrorCode::PointOutside, "z is not in E");

  NearWulffCurve out;
  out.J0 = J0;
  if (norm(z) == 0.0) {
    out.curve.points = {z};
    out.curve.witness = {{0.0, dz}};
    out.max_ratio = 1.0;
    out.bound = n;
    return out;
  }

  auto radial = [&](JohnCurve& c, const Vec2& from) {
    double base = c.witness.empty() ? 0.0 : c.witness.back().length;
    if (c.points.empty()) {
      c.points.push_back(from);
      c.witness.push_back({0.0, D.distance(from)});
    }
    for (int k = 1; k <= kRadialWitnesses; ++k) {
      const double t = static_cast<double>(k) / kRadialWitnesses;
      const Vec2 a = from * (1.0 - t);
      c.points.push_back(a);
      c.witness.push_back({base + norm(from) * t, D.distance(a)});
    }
  };

  if (K.gauge(z) <= 1.0 - 2.0 * delta) {
    out.which_case = 1;
    out.bound = n;
    radial(out.curve, z);
  } else {
    out.which_case = 2;
    out.bound = 3.0 * J0 + n;
    int start = W.locate(z);
    if (start < 0) {
      // z in the uncovered layer: attach to the nearest cube center.
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < W.cubes.size(); ++i) {
        const double d = norm(W.cubes[i].center - z);
        if (d < best) best = d, start = static_cast<int>(i);
      }
    }
    detail::BottleneckSearch search(W);
    const double inner = 1.0 - 2.0 * delta;
    const int id = search.run(start, norm(W.cubes[start].center - z), std::numeric_limits<double>::infinity(),
                              [&](int node) { return K.gauge(W.cubes[node].center) <= inner; });
    if (id < 0) fail(ErrorCode::Unreachable, "no cube inside (1-2delta)K is reachable");
    out.curve = detail::curve_along(W, z, dz, search.path(id));
    radial(out.curve, out.curve.points.back());
  }
  out.max_ratio = out.curve.max_ratio();
  return out;
}

}  // namespace wulfflab
