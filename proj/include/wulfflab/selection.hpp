#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "anisotropy.hpp"
#include "errors.hpp"
#include "geomset.hpp"
#include "isoperimetry.hpp"
#include "john.hpp"
#include "rng.hpp"
#include "whitney.hpp"

namespace wulfflab {

inline constexpr double kSelectionSandwichDelta = 0.1;
inline constexpr double kJohnCap2D = 10.0;
inline constexpr int kSelectionJohnLevel = 8;

struct SolverOptions {
  int vertices = 128;
  double step = 0.01;        // initial radial step, relative to the mean radius
  double tolerance = 1e-7;   // stop once the step falls below this (relative)
  int max_sweeps = 4000;
  std::uint64_t seed = 1;    // minimality spot check
};

struct SelectionProblem {
  PolygonSystem input;  // E_k
  WulffShape2 K;
  double lambda = 3.0;  // Λ, default n + 1
  double r0 = 10.0;     // R₀
  SolverOptions solver;

  void validate() const {
    if (!(lambda > 2.0)) fail(ErrorCode::InvalidInput, "lambda must exceed n");
    if (!(r0 >= 2.0)) fail(ErrorCode::InvalidInput, "r0 must be at least 2");
    if (input.loops.size() != 1) fail(ErrorCode::InvalidInput, "selection needs a single polygon loop");
    if (solver.vertices < 3) fail(ErrorCode::InvalidInput, "solver needs at least 3 vertices");
  }
};

struct EnergyBreakdown {
  double perimeter = 0.0;       // P_K(U)
  double asymmetry = 0.0;       // A(U)
  double asymmetry_term = 0.0;  // |A(U) − A(E_k)|
  double volume_term = 0.0;     // Λ·||U| − |K||
  double total = 0.0;
  bool clipped = false;         // U was cut down to r0·K first
};

namespace detail {

inline double max_gauge(const PolygonSystem& U, const WulffShape2& K) {
  double g = 0.0;
  for (const auto& l : U.loops)
    for (const auto& p : l) g = std::max(g, K.gauge(p));
  return g;
}

inline PolygonSystem clip_to(const PolygonSystem& U, const WulffShape2& K, double r) {
  const auto clip = ConvexClipper::from_ccw_polygon(K.scaled(r).vertices());
  PolygonSystem out;
  Loop a, b;
  for (const auto& l : U.loops) {
    clip.clipped_area(l, Vec2{}, a, b);
    if (a.size() >= 3) out.loops.push_back(a);
  }
  return out;
}

inline EnergyBreakdown energy_from(double perimeter, double area, double asym, double A_E, const SelectionProblem& P) {
  EnergyBreakdown e;
  e.perimeter = perimeter;
  e.asymmetry = asym;
  e.asymmetry_term = std::abs(asym - A_E);
  e.volume_term = P.lambda * std::abs(area - P.K.volume());
  e.total = e.perimeter + e.asymmetry_term + e.volume_term;
  return e;
}

}  // namespace detail

/// P_K(U) + |A(U) − A(E_k)| + Λ·||U| − |K|| with A(E_k) supplied.
inline EnergyBreakdown penalized_energy(const PolygonSystem& U, const SelectionProblem& P, double A_E) {
  bool clipped = false;
  PolygonSystem V = U;
  if (detail::max_gauge(U, P.K) > P.r0) {
    V = detail::clip_to(U, P.K, P.r0);
    clipped = true;
  }
  auto e = detail::energy_from(anisotropic_perimeter(V, P.K), V.area(), asymmetry(V, P.K).value, A_E, P);
  e.clipped = clipped;
  return e;
}

inline EnergyBreakdown penalized_energy(const PolygonSystem& U, const SelectionProblem& P) {
  return penalized_energy(U, P, asymmetry(P.input, P.K).value);
}

// ---------------------------------------------------------------------------
// Star-shaped parameterization

/// Polygon with vertices rho_i·dir_i on fixed rays from the origin, CCW.
struct StarPolygon {
  std::vector<Vec2> dirs;
  std::vector<double> rho;

  std::size_t size() const { return dirs.size(); }
  Vec2 vertex(std::size_t i) const { return dirs[i] * rho[i]; }
  Loop loop() const {
    Loop l(size());
    for (std::size_t i = 0; i < size(); ++i) l[i] = vertex(i);
    return l;
  }
  PolygonSystem polygon() const { return PolygonSystem(loop()); }
};

/// Rays through the vertices of a loop that is star-shaped about the origin, padded by
/// splitting the widest angular gaps on the existing edges (the shape is unchanged).
inline StarPolygon star_from(const Loop& loop, int min_vertices) {
  Loop l = loop;
  if (signed_area(l) < 0) std::reverse(l.begin(), l.end());
  const std::size_t n = l.size();
  for (std::size_t i = 0; i < n; ++i)
    if (!(cross(l[i], l[(i + 1) % n]) > 0.0)) fail(ErrorCode::InvalidInput, "input is not star-shaped about its barycenter");
  StarPolygon s;
  for (const auto& p : l) {
    s.rho.push_back(norm(p));
    s.dirs.push_back(p * (1.0 / norm(p)));
  }
  while (static_cast<int>(s.size()) < min_vertices) {
    std::size_t best = 0;
    double gap = -1.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const Vec2& a = s.dirs[i];
      const Vec2& b = s.dirs[(i + 1) % s.size()];
      const double g = std::atan2(cross(a, b), dot(a, b));
      if (g > gap) gap = g, best = i;
    }
    const std::size_t j = (best + 1) % s.size();
    const Vec2 a = s.vertex(best), b = s.vertex(j);
    const Vec2 mid = normalized(s.dirs[best] + s.dirs[j]);
    // Ray t·mid meets segment a + u(b − a) where cross(mid, a + u(b − a)) = 0.
    const double u = cross(mid, a) / (cross(mid, a) - cross(mid, b));
    const Vec2 p = a + (b - a) * u;
    s.dirs.insert(s.dirs.begin() + static_cast<long>(best) + 1, mid);
    s.rho.insert(s.rho.begin() + static_cast<long>(best) + 1, norm(p));
  }
  return s;
}

// ---------------------------------------------------------------------------
// Minimality spot check

struct MinimalityReport {
  int trials = 0;
  int passed = 0;
  double pass_fraction = 0.0;
  double worst_violation = -std::numeric_limits<double>::infinity();  // max of lhs − rhs
};

/// P_K(U) + (Λ+1)|UΔF| − P_K(F); nonnegative when the comparison passes.
inline double minimality_margin(const PolygonSystem& F, const PolygonSystem& U, const SelectionProblem& P) {
  const double sd = symm_diff_volume(GeomSet(F), GeomSet(U));
  return anisotropic_perimeter(U, P.K) + (P.lambda + 1.0) * sd - anisotropic_perimeter(F, P.K);
}

/// Seeded smooth bumps moving the vertices of F near a boundary point x along the rays
/// from the barycenter; each perturbation region stays inside x + rK with r < R₀.
inline MinimalityReport minimality_spot_check(const PolygonSystem& F, const SelectionProblem& P, int trials, std::uint64_t seed) {
  MinimalityReport rep;
  rep.trials = trials;
  Rng rng(seed);
  const Loop& f = F.loops.front();
  const std::size_t n = f.size();
  const Vec2 b = F.barycenter();
  const double inr = P.K.m_K();
  const double tol = 1e-9 * anisotropic_perimeter(F, P.K);
  for (int t = 0; t < trials; ++t) {
    double margin = 0.0;
    for (int attempt = 0; attempt < 32; ++attempt) {
      const Vec2 x = f[rng.below(n)];
      const double r = std::min(P.r0 * 0.5, rng.uniform(0.1, 1.0));
      const double support = 0.6 * r * inr;
      const double amp = rng.uniform(-0.2, 0.2) * r * inr;
      Loop u = f;
      bool contained = true;
      for (std::size_t i = 0; i < n; ++i) {
        const double s = norm(f[i] - x) / support;
        if (s >= 1.0) continue;
        const double phi = std::pow(std::cos(0.5 * kPi * s), 2);
        u[i] = f[i] + normalized(f[i] - b) * (amp * phi);
        // Every triangle swept by this vertex must lie in x + rK.
        for (const Vec2& q : {u[i], f[i], f[(i + 1) % n], f[(i + n - 1) % n]})
          if (P.K.gauge(q - x) >= r) contained = false;
      }
      if (!contained) continue;
      margin = minimality_margin(F, PolygonSystem(u), P);
      break;
    }
    if (margin + tol >= 0.0) ++rep.passed;
    rep.worst_violation = std::max(rep.worst_violation, -margin);
  }
  rep.pass_fraction = trials ? static_cast<double>(rep.passed) / trials : 1.0;
  return rep;
}

// ---------------------------------------------------------------------------
// Solver

struct SelectionChecks {
  MinimalityReport minimality;
  double sandwich_delta = 0.0;     // of F_k against K
  double J_estimate = 0.0;         // estimate_john(F_k, 0) at level kSelectionJohnLevel
  std::optional<double> qwi_value; // (P_K(F_k) − P_K(K))/A(F_k)²; empty if A degenerate
  double asymmetry_ratio = 0.0;    // A(F′_k)/A(E_k)
};

struct SelectionResult {
  PolygonSystem minimizer_raw;  // F′_k, barycenter at the origin
  PolygonSystem minimizer;      // F_k = λ_k F′_k
  double lambda_k = 1.0;
  EnergyBreakdown energy_raw;
  EnergyBreakdown energy_input;
  SelectionChecks checks;
  int sweeps = 0;
  bool converged = false;
  bool fallback = false;  // descent result was worse under the global asymmetry; input kept
};

namespace detail {

/// Per-sector contributions for a star polygon with the translate y + K held fixed.
class SectorEnergy {
 public:
  SectorEnergy(const SelectionProblem& P, const StarPolygon& S, const Vec2& y, double A_E)
      : P_(P), S_(S), y_(y), A_E_(A_E), clip_(ConvexClipper::from_ccw_polygon(P.K.vertices())) {
    const std::size_t n = S.size();
    area_.resize(n);
    perim_.resize(n);
    inter_.resize(n);
    for (std::size_t i = 0; i < n; ++i) sector(i, S.vertex(i), S.vertex((i + 1) % n), area_[i], perim_[i], inter_[i]);
    for (std::size_t i = 0; i < n; ++i) sa_ += area_[i], sp_ += perim_[i], si_ += inter_[i];
  }

  double total() const { return value(sp_, sa_, si_); }

  /// Surrogate energy change if rho_i becomes r; fills the new sector values.
  double delta(std::size_t i, double r, std::array<double, 6>& out) const {
    const std::size_t n = S_.size();
    const std::size_t prev = (i + n - 1) % n;
    const Vec2 v = S_.dirs[i] * r;
    sector(prev, S_.vertex(prev), v, out[0], out[1], out[2]);
    sector(i, v, S_.vertex((i + 1) % n), out[3], out[4], out[5]);
    const double a = sa_ - area_[prev] - area_[i] + out[0] + out[3];
    const double p = sp_ - perim_[prev] - perim_[i] + out[1] + out[4];
    const double in = si_ - inter_[prev] - inter_[i] + out[2] + out[5];
    return value(p, a, in) - total();
  }

  void apply(std::size_t i, const std::array<double, 6>& v) {
    const std::size_t prev = (i + S_.size() - 1) % S_.size();
    sa_ += v[0] + v[3] - area_[prev] - area_[i];
    sp_ += v[1] + v[4] - perim_[prev] - perim_[i];
    si_ += v[2] + v[5] - inter_[prev] - inter_[i];
    area_[prev] = v[0], perim_[prev] = v[1], inter_[prev] = v[2];
    area_[i] = v[3], perim_[i] = v[4], inter_[i] = v[5];
  }

 private:
  double value(double p, double a, double in) const {
    const double sym = a + P_.K.volume() - 2.0 * in;
    return p + std::abs(sym - A_E_) + P_.lambda * std::abs(a - P_.K.volume());
  }

  void sector(std::size_t, const Vec2& a, const Vec2& b, double& area, double& perim, double& inter) const {
    area = 0.5 * cross(a, b);
    const Vec2 d = b - a;
    perim = P_.K.support(Vec2{{d[1], -d[0]}});
    const Vec2 tri[3] = {Vec2{}, a, b};
    inter = clip_.clipped_area(tri, y_, la_, lb_);
  }

  const SelectionProblem& P_;
  const StarPolygon& S_;
  Vec2 y_;
  double A_E_;
  ConvexClipper clip_;
  std::vector<double> area_, perim_, inter_;
  double sa_ = 0.0, sp_ = 0.0, si_ = 0.0;
  mutable Loop la_, lb_;
};

}  // namespace detail

/// Deterministic coordinate descent with backtracking over star polygons on fixed rays
/// through E_k's vertices (about its barycenter), projected into r0·K.
inline SelectionResult solve_selection(const SelectionProblem& P) {
  P.validate();
  SelectionResult res;
  const Vec2 bary = P.input.barycenter();
  const PolygonSystem E0 = P.input.translated(bary * -1.0);
  StarPolygon S = star_from(E0.loops.front(), P.solver.vertices);
  // Projection into r0·K: gauge(ρ·dir) = ρ·gauge(dir).
  std::vector<double> rho_max(S.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < S.size(); ++i) {
    rho_max[i] = P.r0 / P.K.gauge(S.dirs[i]);
    S.rho[i] = std::min(S.rho[i], rho_max[i]);
    mean += S.rho[i] / static_cast<double>(S.size());
  }
  const double rho_min = 1e-3 * mean;

  const auto AE = asymmetry(P.input, P.K);
  const double A_E = AE.value;
  res.energy_input = penalized_energy(S.polygon(), P, A_E);
  const double input_total = res.energy_input.total;

  Vec2 y = AE.translation - bary;
  double exact = input_total;
  double step = P.solver.step * mean;
  const double floor = P.solver.tolerance * mean;
  const double window = 0.05 * std::sqrt(P.K.volume());
  std::array<double, 6> cand{};
  int sweep = 0;
  for (; sweep < P.solver.max_sweeps; ++sweep) {
    if (step < floor) {
      res.converged = true;
      break;
    }
    const auto saved = S.rho;
    detail::SectorEnergy sur(P, S, y, A_E);
    bool moved = false;
    for (std::size_t i = 0; i < S.size(); ++i) {
      for (const double sign : {1.0, -1.0}) {
        const double r = std::clamp(S.rho[i] + sign * step, rho_min, rho_max[i]);
        if (r == S.rho[i]) continue;
        if (sur.delta(i, r, cand) < -1e-15) {
          S.rho[i] = r;
          sur.apply(i, cand);
          moved = true;
          break;
        }
      }
    }
    if (!moved) {
      step *= 0.5;
      continue;
    }
    const PolygonSystem U = S.polygon();
    const auto A = asymmetry_local(U, P.K, y, window);
    const auto e = detail::energy_from(anisotropic_perimeter(U, P.K), U.area(), A.value, A_E, P);
    if (e.total < exact) {
      exact = e.total;
      y = A.translation;
    } else {
      S.rho = saved;
      step *= 0.5;
    }
  }
  res.sweeps = sweep;

  PolygonSystem raw = S.polygon();
  raw = raw.translated(raw.barycenter() * -1.0);
  res.energy_raw = penalized_energy(raw, P, A_E);
  if (res.energy_raw.total > input_total) {
    res.fallback = true;
    raw = E0.translated(E0.barycenter() * -1.0);
    res.energy_raw = penalized_energy(raw, P, A_E);
  }
  res.minimizer_raw = raw;
  res.lambda_k = std::sqrt(P.K.volume() / raw.area());
  res.minimizer = raw.scaled(res.lambda_k);

  auto& c = res.checks;
  c.minimality = minimality_spot_check(res.minimizer_raw, P, 100, P.solver.seed);
  c.sandwich_delta = sandwich_report(res.minimizer, P.K).delta();
  const auto W = whitney_decompose(res.minimizer, kSelectionJohnLevel);
  c.J_estimate = estimate_john(PlanarDomain(res.minimizer), Vec2{}, W).J_value;
  const double A_F = asymmetry(res.minimizer, P.K).value;
  if (A_F > kDegenerateAsymmetry * P.K.volume())
    c.qwi_value = (anisotropic_perimeter(res.minimizer, P.K) - anisotropic_perimeter(PolygonSystem(P.K.vertices()), P.K)) / (A_F * A_F);
  c.asymmetry_ratio = A_E > 0.0 ? res.energy_raw.asymmetry / A_E : 1.0;
  return res;
}

// ---------------------------------------------------------------------------
// Family pipeline

struct QwiPipelineEntry {
  SelectionResult selection;
  double input_delta = 0.0;           // sandwich δ of E_k
  std::optional<double> input_ratio;  // qwi ratio of E_k
  bool volume_ok = false, barycenter_ok = false, sandwich_ok = false, john_ok = false, minimality_ok = false, energy_ok = false;
  std::string error;  // set when the member failed outright
  bool pass() const { return error.empty() && volume_ok && barycenter_ok && sandwich_ok && john_ok && minimality_ok && energy_ok; }
};

struct QwiPipelineReport {
  std::vector<QwiPipelineEntry> entries;
  bool pass() const {
    return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.pass(); });
  }
};

/// Runs the selection for each member and checks the conclusions.
inline QwiPipelineReport qwi_pipeline(const std::vector<PolygonSystem>& family, const WulffShape2& K, double delta = kSelectionSandwichDelta,
                                      double J_cap = kJohnCap2D, const SolverOptions& solver = {}) {
  QwiPipelineReport rep;
  for (const auto& E : family) {
    QwiPipelineEntry e;
    try {
      e.input_delta = sandwich_report(E.translated(E.barycenter() * -1.0), K).delta();
      try {
        e.input_ratio = qwi_ratio(E, K);
      } catch (const Error& err) {
        if (err.code() != ErrorCode::DegenerateAsymmetry) throw;
      }
      SelectionProblem P{E, K, 3.0, 10.0, solver};
      e.selection = solve_selection(P);
      const auto& s = e.selection;
      e.volume_ok = std::abs(s.minimizer.area() - K.volume()) <= 1e-9 * K.volume();
      e.barycenter_ok = norm(s.minimizer.barycenter()) <= 1e-6;
      e.sandwich_ok = s.checks.sandwich_delta <= delta;
      e.john_ok = s.checks.J_estimate <= J_cap;
      e.minimality_ok = s.checks.minimality.pass_fraction == 1.0;
      e.energy_ok = s.energy_raw.total <= s.energy_input.total + 1e-6;
    } catch (const Error& err) {
      e.error = err.what();
    }
    rep.entries.push_back(std::move(e));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Dilate scan

struct DilateScan {
  double r_min = 1.0;
  double h_min = 0.0;
  double h_at_one = 0.0;
};

/// Minimizes h(r) = P_K(rK) + Λ·||rK| − |K|| over r ∈ [lo, hi]: grid scan then golden refinement.
inline DilateScan dilate_scan(const WulffShape2& K, double lambda, double lo = 0.01, double hi = 2.0, int samples = 400) {
  const PolygonSystem Kp(K.vertices());
  const double vk = Kp.area();
  auto h = [&](double r) {
    const PolygonSystem U = Kp.scaled(r);
    return anisotropic_perimeter(U, K) + lambda * std::abs(U.area() - vk);
  };
  double best_r = lo, best = h(lo);
  const double dr = (hi - lo) / samples;
  for (int i = 1; i <= samples; ++i) {
    const double r = lo + i * dr;
    const double v = h(r);
    if (v < best) best = v, best_r = r;
  }
  double a = std::max(lo, best_r - dr), b = std::min(hi, best_r + dr);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a), fc = h(c), fd = h(d);
  while (b - a > 1e-10) {
    if (fc <= fd) {
      b = d, d = c, fd = fc;
      c = b - g * (b - a), fc = h(c);
    } else {
      a = c, c = d, fc = fd;
      d = a + g * (b - a), fd = h(d);
    }
  }
  const double r = 0.5 * (a + b);
  DilateScan s;
  s.r_min = h(r) <= best ? r : best_r;
  s.h_min = std::min(h(r), best);
  s.h_at_one = h(1.0);
  return s;
}

}  // namespace wulfflab
