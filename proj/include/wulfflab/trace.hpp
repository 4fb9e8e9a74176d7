#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "errors.hpp"
#include "geomset.hpp"
#include "john.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "whitney.hpp"

namespace wulfflab {

inline constexpr double kCubeDilation = 1.1;
inline constexpr int kCubeSamplesPerSide = 8;
inline constexpr double kMaxSkippedFraction = 0.01;
inline constexpr int kTraceFitCubes = 6;

/// Crude certified Poincaré constant on a dilated cube: n·(11/10)·√n.
inline double cube_poincare_constant(int n) { return n * kCubeDilation * std::sqrt(static_cast<double>(n)); }

/// Analytic test field on a planar domain.
struct ScalarField {
  std::string name;
  std::function<double(const Vec2&)> u;

  double operator()(const Vec2& p) const { return u(p); }

  static ScalarField constant(double c) {
    return {"constant", [c](const Vec2&) { return c; }};
  }
  static ScalarField linear(const Vec2& a, double b) {
    return {"linear", [a, b](const Vec2& p) { return dot(a, p) + b; }};
  }
  /// exp(-|p - c|² / s²)
  static ScalarField radial_bump(const Vec2& c, double s) {
    return {"radial_bump", [c, s](const Vec2& p) { return std::exp(-dot(p - c, p - c) / (s * s)); }};
  }
  static ScalarField dist_to_boundary(std::shared_ptr<const PlanarDomain> D) {
    return {"dist_to_boundary", [D](const Vec2& p) { return D->distance(p); }};
  }
  /// max(0, 1 − 2^j·|p − tip|)
  static ScalarField concentrating(const Vec2& tip, int j) {
    const double s = std::ldexp(1.0, j);
    return {"concentrating_" + std::to_string(j), [tip, s](const Vec2& p) { return std::max(0.0, 1.0 - s * norm(p - tip)); }};
  }
};

/// Midpoint samples of u over the dilated cube (11/10)Q.
struct CubeStats {
  double average = 0.0;       // u_{Q̂}
  double grad_average = 0.0;  // average of |Du| over Q̂ by central differences
};

inline CubeStats cube_stats(const ScalarField& u, const WhitneyCube<2>& Q, int per_side = kCubeSamplesPerSide) {
  if (per_side * per_side < 4) fail(ErrorCode::UndersampledCube, "fewer than 4 samples per cube");
  const double side = kCubeDilation * Q.side;
  const double step = side / per_side;
  const double hd = 0.25 * step;
  CubeStats s;
  for (int j = 0; j < per_side; ++j)
    for (int i = 0; i < per_side; ++i) {
      const Vec2 p = Q.center + Vec2{{-0.5 * side + (i + 0.5) * step, -0.5 * side + (j + 0.5) * step}};
      s.average += u(p);
      const double gx = (u(p + Vec2{{hd, 0}}) - u(p - Vec2{{hd, 0}})) / (2 * hd);
      const double gy = (u(p + Vec2{{0, hd}}) - u(p - Vec2{{0, hd}})) / (2 * hd);
      s.grad_average += std::hypot(gx, gy);
    }
  const double n = static_cast<double>(per_side * per_side);
  s.average /= n;
  s.grad_average /= n;
  return s;
}

/// u_{Q̂} for every cube of the decomposition.
inline std::vector<double> cube_averages(const ScalarField& u, const WhitneyDecomposition2& W, int per_side = kCubeSamplesPerSide) {
  std::vector<double> out(W.cubes.size());
  parallel_for(W.cubes.size(), [&](std::size_t i) { out[i] = cube_stats(u, W.cubes[i], per_side).average; });
  return out;
}

/// Lazily computed cube statistics for one field.
class FieldOnCubes {
 public:
  FieldOnCubes(const ScalarField& u, const WhitneyDecomposition2& W) : u_(u), W_(W), cache_(W.cubes.size()), ready_(W.cubes.size(), 0) {}
  const CubeStats& operator[](int q) const {
    if (!ready_[q]) {
      cache_[q] = cube_stats(u_, W_.cubes[q]);
      ready_[q] = 1;
    }
    return cache_[q];
  }
  const ScalarField& field() const { return u_; }

 private:
  const ScalarField& u_;
  const WhitneyDecomposition2& W_;
  mutable std::vector<CubeStats> cache_;
  mutable std::vector<char> ready_;
};

/// ∫_Ω |Du| on a grid of spacing h: central differences where both neighbours are
/// inside, one-sided at the boundary layer.
inline double gradient_l1(const ScalarField& u, const PolygonSystem& P, double h) {
  const VoxelGrid2 g = rasterize(P, h, 1);
  const int nx = g.dims[0], ny = g.dims[1];
  std::vector<double> val(g.size(), 0.0);
  for (std::size_t c = 0; c < g.size(); ++c)
    if (g.cells[c]) val[c] = u(g.center(g.coords(c)));
  double total = 0.0;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      if (!g.at({i, j})) continue;
      auto diff = [&](int di, int dj) {
        const bool fwd = g.at({i + di, j + dj}), bwd = g.at({i - di, j - dj});
        const double here = val[g.index({i, j})];
        if (fwd && bwd) return (val[g.index({i + di, j + dj})] - val[g.index({i - di, j - dj})]) / (2 * h);
        if (fwd) return (val[g.index({i + di, j + dj})] - here) / h;
        if (bwd) return (here - val[g.index({i - di, j - dj})]) / h;
        return 0.0;
      };
      total += std::hypot(diff(1, 0), diff(0, 1));
    }
  return total * h * h;
}

/// Grid spacing for gradient_l1: the finest cube side, coarsened to keep at most ~4M cells.
inline double gradient_grid_spacing(const PolygonSystem& P, const WhitneyDecomposition2& W) {
  const Box2 b = P.bbox();
  const double area = (b.hi[0] - b.lo[0]) * (b.hi[1] - b.lo[1]);
  return std::max(W.side_at(W.max_level), std::sqrt(area / 4.0e6));
}

// ---------------------------------------------------------------------------
// Chains

struct CubeChain {
  std::vector<int> cubes;        // from the cube of x₀ toward x
  double attach_distance = 0.0;  // dist(x, last cube)
  double C1 = 0.0;               // max over the chain of (|x − c| + half-diagonal of Q̂)/ℓ(Q)
};

namespace detail {

inline double point_box_distance(const Vec2& p, const WhitneyCube<2>& Q) {
  const double h = 0.5 * Q.side;
  const double dx = std::max(std::abs(p[0] - Q.center[0]) - h, 0.0);
  const double dy = std::max(std::abs(p[1] - Q.center[1]) - h, 0.0);
  return std::hypot(dx, dy);
}

inline std::vector<int> cubes_containing(const WhitneyDecomposition2& W, const Vec2& p) {
  std::vector<int> out;
  for (std::size_t i = 0; i < W.cubes.size(); ++i)
    if (point_box_distance(p, W.cubes[i]) == 0.0) out.push_back(static_cast<int>(i));
  return out;
}

/// Reusable chain search from boundary points to x₀.
class ChainFinder {
 public:
  ChainFinder(const PlanarDomain& D, const WhitneyDecomposition2& W, const Vec2& x0) : W_(W), search_(W) {
    if (!D.contains(x0)) fail(ErrorCode::CenterOutside, "x0 is not in the domain");
    const auto q0 = cubes_containing(W, x0);
    if (q0.empty()) fail(ErrorCode::CenterOutside, "x0 lies in the uncovered boundary layer");
    search_.set_virtual(q0, x0, D.distance(x0));
    // Candidate end cubes: the two finest levels carry every cube next to the boundary layer.
    targets_ = boundary_targets(W);
  }

  /// Chain for boundary point x; empty when x is farther than 5√n·(finest side) from every cube.
  CubeChain chain(const Vec2& x) {
    CubeChain out;
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    auto consider = [&](int q) {
      const double d = point_box_distance(x, W_.cubes[q]);
      if (d < bd || (d == bd && q < best)) bd = d, best = q;
    };
    for (int q : targets_) consider(q);
    const double reach = 5.0 * std::sqrt(2.0) * W_.side_at(W_.max_level);
    if (bd > reach) {
      // Cubes away from the boundary layer (coarse x₀ cube, thin necks) are checked last.
      for (std::size_t q = 0; q < W_.cubes.size(); ++q) consider(static_cast<int>(q));
      if (bd > reach) return out;
    }
    const int id = search_.run(best, norm(W_.cubes[best].center - x), std::numeric_limits<double>::infinity(), [](int) { return false; });
    if (id < 0) fail(ErrorCode::Unreachable, "no chain from the boundary point to x0");
    auto path = search_.path(id);
    path.pop_back();  // virtual x₀ node
    std::reverse(path.begin(), path.end());
    out.cubes = std::move(path);
    out.attach_distance = bd;
    for (int q : out.cubes) {
      const auto& Q = W_.cubes[q];
      out.C1 = std::max(out.C1, (norm(x - Q.center) + 0.5 * std::sqrt(2.0) * kCubeDilation * Q.side) / Q.side);
    }
    return out;
  }

 private:
  const WhitneyDecomposition2& W_;
  BottleneckSearch search_;
  std::vector<int> targets_;
};

}  // namespace detail

inline CubeChain chain_to_boundary(const PlanarDomain& D, const WhitneyDecomposition2& W, const Vec2& x, const Vec2& x0) {
  detail::ChainFinder finder(D, W, x0);
  auto c = finder.chain(x);
  if (c.cubes.empty()) fail(ErrorCode::Unreachable, "boundary point is not within reach of any cube");
  return c;
}

struct TraceValue {
  double value = 0.0;         // Tu(x)
  double last_average = 0.0;  // u_{Q̂} of the chain's last cube
  double oscillation = 0.0;   // Σ|u_{Q̂_{k+1}} − u_{Q̂_k}|
};

/// Tu(x) from the chain averages: affine least-squares fit of u_{Q̂_k} against the cube
/// centers over the last few cubes, evaluated at x. Falls back to a fit along the
/// chain direction, then to the last average, when the centers are degenerate.
inline TraceValue trace_eval(const FieldOnCubes& F, const WhitneyDecomposition2& W, const CubeChain& chain, const Vec2& x) {
  if (chain.cubes.empty()) fail(ErrorCode::Unreachable, "empty chain");
  TraceValue t;
  for (std::size_t k = 0; k + 1 < chain.cubes.size(); ++k) t.oscillation += std::abs(F[chain.cubes[k + 1]].average - F[chain.cubes[k]].average);
  t.last_average = F[chain.cubes.back()].average;
  t.value = t.last_average;
  const std::size_t m = std::min<std::size_t>(kTraceFitCubes, chain.cubes.size());
  if (m < 2) return t;
  // Normal equations for a + b·(c − x) with coordinates scaled by the last cube side.
  const double s = W.cubes[chain.cubes.back()].side;
  double A[3][3] = {}, r[3] = {};
  double S[2][2] = {}, sr[2] = {};
  for (std::size_t k = chain.cubes.size() - m; k < chain.cubes.size(); ++k) {
    const int q = chain.cubes[k];
    const Vec2 d = (W.cubes[q].center - x) * (1.0 / s);
    const double f[3] = {1.0, d[0], d[1]};
    const double v = F[q].average;
    for (int a = 0; a < 3; ++a) {
      r[a] += f[a] * v;
      for (int b = 0; b < 3; ++b) A[a][b] += f[a] * f[b];
    }
  }
  const double det = A[0][0] * (A[1][1] * A[2][2] - A[1][2] * A[2][1]) - A[0][1] * (A[1][0] * A[2][2] - A[1][2] * A[2][0]) +
                     A[0][2] * (A[1][0] * A[2][1] - A[1][1] * A[2][0]);
  const double scale = A[0][0] * A[1][1] * A[2][2];
  if (scale > 0.0 && std::abs(det) > 1e-6 * scale) {
    // Cramer's rule for the intercept.
    const double det0 = r[0] * (A[1][1] * A[2][2] - A[1][2] * A[2][1]) - A[0][1] * (r[1] * A[2][2] - A[1][2] * r[2]) +
                        A[0][2] * (r[1] * A[2][1] - A[1][1] * r[2]);
    t.value = det0 / det;
    return t;
  }
  // Collinear centers: fit along the direction of the chain's tail.
  const Vec2 dir = normalized(W.cubes[chain.cubes.back()].center - W.cubes[chain.cubes[chain.cubes.size() - m]].center);
  for (std::size_t k = chain.cubes.size() - m; k < chain.cubes.size(); ++k) {
    const int q = chain.cubes[k];
    const double tk = dot(W.cubes[q].center - x, dir) / s;
    const double f[2] = {1.0, tk};
    for (int a = 0; a < 2; ++a) {
      sr[a] += f[a] * F[q].average;
      for (int b = 0; b < 2; ++b) S[a][b] += f[a] * f[b];
    }
  }
  const double d2 = S[0][0] * S[1][1] - S[0][1] * S[1][0];
  if (std::abs(d2) > 1e-9 * S[0][0] * S[1][1]) t.value = (sr[0] * S[1][1] - S[0][1] * sr[1]) / d2;
  return t;
}

/// Σ_k C_P·ℓ(Q_k)·avg_{Q̂_k}|Du| along the chain.
inline double chain_sum_bound(const FieldOnCubes& F, const WhitneyDecomposition2& W, const CubeChain& chain) {
  if (chain.cubes.empty()) fail(ErrorCode::Unreachable, "empty chain");
  const double cp = cube_poincare_constant(2);
  double s = 0.0;
  for (int q : chain.cubes) s += cp * W.cubes[q].side * F[q].grad_average;
  return s;
}

// ---------------------------------------------------------------------------
// Empirical trace constant

struct TraceFieldReport {
  std::string name;
  double lhs = 0.0;  // Σ w·|Tu − c| at the weighted median c
  double rhs = 0.0;  // ∫_Ω |Du|
  double c = 0.0;
  double ratio = 0.0;
  bool median_optimal = true;  // lhs(c ± 1e-3) ≥ lhs(c)
};

struct TraceReport {
  std::vector<std::pair<Vec2, double>> boundary_samples;  // (x, Tu(x)) for the last field
  std::vector<TraceFieldReport> fields;
  std::size_t samples = 0;
  std::size_t skipped = 0;
  double skipped_fraction = 0.0;
  double c_emp = 0.0;
  bool ok() const { return skipped_fraction <= kMaxSkippedFraction; }
};

/// Weighted median of (value, weight) pairs.
inline double weighted_median(std::vector<std::pair<double, double>> vw) {
  if (vw.empty()) return 0.0;
  std::sort(vw.begin(), vw.end());
  double total = 0.0;
  for (const auto& p : vw) total += p.second;
  double acc = 0.0;
  for (const auto& p : vw) {
    acc += p.second;
    if (acc >= 0.5 * total) return p.first;
  }
  return vw.back().first;
}

inline double weighted_l1(const std::vector<std::pair<double, double>>& vw, double c) {
  double s = 0.0;
  for (const auto& [v, w] : vw) s += w * std::abs(v - c);
  return s;
}

/// Chains for arclength-spaced boundary samples, shared by every field of a suite.
struct TraceSetup {
  std::vector<Vec2> points;
  std::vector<double> weights;
  std::vector<CubeChain> chains;  // empty chain = skipped
  std::size_t skipped = 0;
};

inline TraceSetup prepare_trace(const PolygonSystem& P, const WhitneyDecomposition2& W, const Vec2& x0, int boundary_samples_count) {
  const PlanarDomain D(P);
  TraceSetup s;
  for (const auto& [x, w] : boundary_samples(P, boundary_samples_count)) {
    s.points.push_back(x);
    s.weights.push_back(w);
  }
  s.chains.resize(s.points.size());
  const unsigned workers = std::max(1u, std::min<unsigned>(thread_count(), static_cast<unsigned>(s.points.size())));
  const std::size_t block = (s.points.size() + workers - 1) / workers;
  parallel_for(workers, [&](std::size_t w) {
    detail::ChainFinder finder(D, W, x0);
    for (std::size_t i = w * block; i < std::min(s.points.size(), (w + 1) * block); ++i) s.chains[i] = finder.chain(s.points[i]);
  });
  for (const auto& c : s.chains) s.skipped += c.cubes.empty();
  return s;
}

inline TraceFieldReport trace_field(const ScalarField& u, const PolygonSystem& P, const WhitneyDecomposition2& W, const TraceSetup& S,
                                    std::vector<std::pair<Vec2, double>>* values = nullptr) {
  FieldOnCubes F(u, W);
  std::vector<std::pair<double, double>> vw;
  for (std::size_t i = 0; i < S.points.size(); ++i) {
    if (S.chains[i].cubes.empty()) continue;
    const double t = trace_eval(F, W, S.chains[i], S.points[i]).value;
    vw.emplace_back(t, S.weights[i]);
    if (values) values->emplace_back(S.points[i], t);
  }
  TraceFieldReport r;
  r.name = u.name;
  r.c = weighted_median(vw);
  r.lhs = weighted_l1(vw, r.c);
  r.median_optimal = weighted_l1(vw, r.c + 1e-3) >= r.lhs - 1e-12 && weighted_l1(vw, r.c - 1e-3) >= r.lhs - 1e-12;
  r.rhs = gradient_l1(u, P, gradient_grid_spacing(P, W));
  r.ratio = r.rhs > 0.0 ? r.lhs / r.rhs : 0.0;
  return r;
}

inline TraceReport trace_constant(const PolygonSystem& P, const std::vector<ScalarField>& suite, const WhitneyDecomposition2& W, const Vec2& x0,
                                  int boundary_samples_count) {
  const TraceSetup S = prepare_trace(P, W, x0, boundary_samples_count);
  TraceReport rep;
  rep.samples = S.points.size();
  rep.skipped = S.skipped;
  rep.skipped_fraction = rep.samples ? static_cast<double>(rep.skipped) / static_cast<double>(rep.samples) : 0.0;
  rep.fields.resize(suite.size());
  for (std::size_t k = 0; k < suite.size(); ++k) {
    rep.boundary_samples.clear();
    rep.fields[k] = trace_field(suite[k], P, W, S, &rep.boundary_samples);
    rep.c_emp = std::max(rep.c_emp, rep.fields[k].ratio);
  }
  return rep;
}

/// Twenty analytic fields scaled to the domain: one constant, eight linear directions,
/// ten seeded Gaussian bumps with widths between 0.3 and 0.8 of the diameter, and the
/// distance to the boundary.
inline std::vector<ScalarField> default_trace_suite(const PolygonSystem& P, std::uint64_t seed = 7) {
  std::vector<ScalarField> s;
  s.push_back(ScalarField::constant(1.0));
  for (int k = 0; k < 8; ++k) s.push_back(ScalarField::linear(polar(kPi * k / 8.0, 1.0), 0.0));
  const Box2 b = P.bbox();
  const double diam = norm(b.hi - b.lo);
  Rng rng(seed);
  for (int k = 0; k < 10; ++k) {
    const Vec2 c{{rng.uniform(b.lo[0], b.hi[0]), rng.uniform(b.lo[1], b.hi[1])}};
    s.push_back(ScalarField::radial_bump(c, diam * rng.uniform(0.3, 0.8)));
  }
  s.push_back(ScalarField::dist_to_boundary(std::make_shared<const PlanarDomain>(P)));
  return s;
}

}  // namespace wulfflab
