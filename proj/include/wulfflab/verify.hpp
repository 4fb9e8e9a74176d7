#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <queue>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "io.hpp"
#include "isoperimetry.hpp"
#include "john.hpp"
#include "parallel.hpp"
#include "selection.hpp"
#include "trace.hpp"
#include "whitney.hpp"

namespace wulfflab::verify {

using io::json;

/// Frozen overlap multiplicity of the dilated planar cubes.
inline constexpr int kOverlapC2D = 4;

struct Config {
  std::uint64_t seed = 1;
  int max_level = 10;  // Whitney and John criteria
};

struct Criterion {
  int id = 0;
  std::string name;
  bool property = false;  // the mathematical assertion
  bool within_time = true;
  double seconds = 0.0;   // wall clock; kept out of the JSON so reports stay reproducible
  double limit = 0.0;
  std::string detail;
  json metrics = json::object();
  bool pass() const { return property && within_time; }
};

struct Report {
  std::string suite;
  std::vector<Criterion> criteria;
  bool pass() const {
    return std::all_of(criteria.begin(), criteria.end(), [](const Criterion& c) { return c.pass(); });
  }
};

inline json to_json(const Report& r) {
  json cs = json::array();
  for (const auto& c : r.criteria)
    cs.push_back({{"id", c.id}, {"name", c.name}, {"pass", c.pass()}, {"property", c.property}, {"within_time", c.within_time},
                  {"time_limit_s", c.limit}, {"detail", c.detail}, {"metrics", c.metrics}});
  return {{"suite", r.suite}, {"pass", r.pass()}, {"criteria", cs}};
}

/// "PASS [3] whitney exactness (1.2 s): detail"
inline std::string line(const Criterion& c) {
  char t[32];
  std::snprintf(t, sizeof t, "%.2f", c.seconds);
  return std::string(c.pass() ? "PASS" : "FAIL") + " [" + std::to_string(c.id) + "] " + c.name + " (" + t + " s" +
         (c.within_time ? "" : ", over the time limit") + "): " + c.detail;
}

namespace detail {

inline std::string f6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

template <class F>
Criterion timed(int id, std::string name, double limit, F&& body) {
  Criterion c;
  c.id = id;
  c.name = std::move(name);
  c.limit = limit;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const Error& e) {
    c.property = false;
    c.detail = std::string("error ") + e.what();
  }
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.within_time = c.seconds < limit;
  return c;
}

/// Sub-seeds drawn from the run seed so that every member is reproducible on its own.
inline std::vector<std::uint64_t> seeds(std::uint64_t seed, std::size_t n) {
  Rng rng(seed);
  std::vector<std::uint64_t> out(n);
  for (auto& s : out) s = static_cast<std::uint64_t>(rng.uniform() * 9007199254740992.0);
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Exhaustive grid oracle for the asymmetry

struct GridOracle {
  double value = 0.0;
  Vec2 translation{};
  std::size_t evaluations = 0;
  std::size_t grid_points = 0;
};

/// Exact minimum of x ↦ |E Δ (x+K)| over the lattice anchor + step·Z² covering the
/// Minkowski box. Blocks of lattice points are discarded when f(center) − P(K)·radius
/// exceeds the best lattice value, which is sound because f is P(K)-Lipschitz.
inline GridOracle asymmetry_grid_oracle(const PolygonSystem& E, const WulffShape2& K, double step) {
  TranslatedSymmDiff f(E, K);
  const double lip = PolygonSystem(K.vertices()).perimeter();
  const Vec2 lo = f.box_E().lo - f.box_K().hi, hi = f.box_E().hi - f.box_K().lo;
  const long nx = static_cast<long>(std::ceil((hi[0] - lo[0]) / step)) + 1, ny = static_cast<long>(std::ceil((hi[1] - lo[1]) / step)) + 1;
  GridOracle g;
  g.grid_points = static_cast<std::size_t>(nx * ny);
  g.value = std::numeric_limits<double>::infinity();
  auto at = [&](double i, double j) { return lo + Vec2{{i * step, j * step}}; };
  struct Block {
    double bound;
    long i0, i1, j0, j1;  // inclusive
    bool operator>(const Block& o) const {
      return std::tie(bound, i0, j0, i1, j1) > std::tie(o.bound, o.i0, o.j0, o.i1, o.j1);
    }
  };
  std::priority_queue<Block, std::vector<Block>, std::greater<>> open;
  auto push = [&](long i0, long i1, long j0, long j1) {
    if (i0 == i1 && j0 == j1) {
      const Vec2 x = at(i0, j0);
      const double v = f(x);
      ++g.evaluations;
      if (v < g.value) g.value = v, g.translation = x;
      return;
    }
    const double ci = 0.5 * (i0 + i1), cj = 0.5 * (j0 + j1);
    const double radius = 0.5 * step * std::hypot(double(i1 - i0), double(j1 - j0));
    ++g.evaluations;
    open.push({f(at(ci, cj)) - lip * radius, i0, i1, j0, j1});
  };
  push(0, nx - 1, 0, ny - 1);
  while (!open.empty()) {
    const Block b = open.top();
    open.pop();
    if (b.bound >= g.value) break;
    if (b.i1 - b.i0 >= b.j1 - b.j0) {
      const long m = (b.i0 + b.i1) / 2;
      push(b.i0, m, b.j0, b.j1);
      push(m + 1, b.i1, b.j0, b.j1);
    } else {
      const long m = (b.j0 + b.j1) / 2;
      push(b.i0, b.i1, b.j0, m);
      push(b.i0, b.i1, m + 1, b.j1);
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Chain bound soundness

struct SoundnessReport {
  std::size_t checks = 0;
  std::size_t violations = 0;
  double worst_fraction = 0.0;  // max |Tu − u_{Q̂₀}| / bound
};

/// Draws boundary points by arclength and checks |Tu − u_{Q̂₀}| ≤ chain bound + 1e-6·‖u‖_∞ for each field.
inline SoundnessReport chain_soundness(const PolygonSystem& P, const WhitneyDecomposition2& W, const Vec2& x0, const std::vector<ScalarField>& fields,
                                       int points, std::uint64_t seed) {
  const PlanarDomain D(P);
  wulfflab::detail::ChainFinder finder(D, W, x0);
  const auto samples = boundary_samples(P, 4096);
  Rng rng(seed);
  std::vector<FieldOnCubes> F;
  std::vector<double> sup(fields.size(), 0.0);
  for (std::size_t k = 0; k < fields.size(); ++k) {
    F.emplace_back(fields[k], W);
    for (const auto& q : W.cubes) sup[k] = std::max(sup[k], std::abs(fields[k](q.center)));
  }
  SoundnessReport rep;
  for (int i = 0; i < points; ++i) {
    const Vec2 x = samples[rng.below(samples.size())].first;
    const auto ch = finder.chain(x);
    if (ch.cubes.empty()) continue;
    for (std::size_t k = 0; k < fields.size(); ++k) {
      const double tu = trace_eval(F[k], W, ch, x).value;
      const double b = chain_sum_bound(F[k], W, ch);
      const double d = std::abs(tu - F[k][ch.cubes.front()].average);
      ++rep.checks;
      if (d > b + 1e-6 * sup[k]) ++rep.violations;
      if (b > 0.0) rep.worst_fraction = std::max(rep.worst_fraction, d / b);
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Families shared by the suites

inline std::vector<double> ellipse_parameters() { return {0.2, 0.1, 0.05, 0.025}; }
inline std::vector<double> bump_parameters() { return {0.08, 0.04, 0.02, 0.01}; }

/// The disc Wulff shape stretched by (1+t, 1/(1+t)); same area as K.
inline PolygonSystem qwi_ellipse(const WulffShape2& disc, double t) {
  return fixtures::as_polygon(disc).mapped([&](const Vec2& p) { return Vec2{{(1 + t) * p[0], p[1] / (1 + t)}}; });
}

/// [-1,1]² with one side bulged, recentred and rescaled to |K|.
inline PolygonSystem selection_bump(const WulffShape2& K, double t) {
  auto E = fixtures::bumped_square(1.0, t, 64);
  E = E.translated(E.barycenter() * -1.0);
  return E.scaled(std::sqrt(K.volume() / E.area()));
}

// ---------------------------------------------------------------------------
// Criteria

inline Criterion wulff_equality() {
  return detail::timed(1, "Wulff equality case", 3.0, [](Criterion& c) {
    c.property = true;
    const std::vector<std::pair<std::string, WulffShape2>> shapes = {
        {"disc", normalize_shape(fixtures::wulff_polygon(fixtures::disc(1024)))}, {"square", fixtures::square_shape()}, {"hexagon", fixtures::hexagon_shape()}};
    for (const auto& [name, K] : shapes) {
      const double pk = anisotropic_perimeter(fixtures::as_polygon(K), K);
      const double rel = std::abs(pk - 2.0 * K.volume()) / (2.0 * K.volume());
      c.metrics[name] = {{"P_K", pk}, {"n_volume", 2.0 * K.volume()}, {"relative_error", rel}};
      c.property = c.property && rel <= 1e-3;
      c.detail += name + " rel " + detail::f6(rel) + "; ";
    }
  });
}

inline Criterion wulff_inequality(const Config& cfg) {
  return detail::timed(2, "Wulff inequality", 60.0, [&](Criterion& c) {
    constexpr std::size_t kCount = 1000;
    const std::vector<std::pair<std::string, WulffShape2>> shapes = {{"disc", normalize_shape(fixtures::wulff_polygon(fixtures::disc(1024)))},
                                                                     {"square", fixtures::square_shape()}};
    const auto sub = detail::seeds(cfg.seed, kCount);
    c.property = true;
    for (const auto& [name, K] : shapes) {
      const double tol = 1e-6 * anisotropic_perimeter(fixtures::as_polygon(K), K);
      std::vector<double> margin(kCount);
      parallel_for(kCount, [&](std::size_t i) {
        Rng r(sub[i]);
        const int verts = 3 + static_cast<int>(r.below(62));
        const PolygonSystem E = i % 2 ? fixtures::random_smooth_star(sub[i], 4 * verts, 0.4) : fixtures::random_star(sub[i], verts, 0.2, 1.0);
        margin[i] = wulff_margin<2>(GeomSet(E), K);
      });
      const double worst = *std::min_element(margin.begin(), margin.end());
      const bool ok = worst >= -tol;
      c.property = c.property && ok;
      c.metrics[name] = {{"samples", kCount}, {"min_margin", worst}, {"tolerance", tol}};
      c.detail += name + " min margin " + detail::f6(worst) + "; ";
    }
  });
}

inline Criterion whitney_exactness(const Config& cfg) {
  return detail::timed(3, "Whitney exactness", 30.0, [&](Criterion& c) {
    c.property = true;
    for (const std::string name : {"square", "disc", "lshape", "cusp"}) {
      const PolygonSystem P = fixtures::by_name(name);
      const auto W = whitney_decompose(P, cfg.max_level);
      const auto chk = check_whitney<2>(W, [&](const WhitneyCube<2>& q) { return polygon_cube_distance(P, q, W); });
      const int mult = overlap_multiplicity(W);
      const double rel = std::abs(chk.coverage_residual) / std::max(1.0, W.domain_volume);
      const bool ok = chk.pass() && chk.connected && rel <= 1e-9 && mult == kOverlapC2D;
      c.property = c.property && ok;
      c.metrics[name] = {{"cubes", chk.cubes}, {"distance_violations", chk.distance_violations}, {"ratio_violations", chk.ratio_violations},
                         {"overlap_violations", chk.overlap_violations}, {"coverage_residual", chk.coverage_residual}, {"connected", chk.connected},
                         {"overlap_multiplicity", mult}};
      c.detail += name + " " + std::to_string(chk.cubes) + " cubes, C=" + std::to_string(mult) + (ok ? "; " : " FAILED; ");
    }
  });
}

inline Criterion john_discrimination(const Config& cfg) {
  return detail::timed(4, "John discrimination", 60.0, [&](Criterion& c) {
    auto J = [](const PolygonSystem& P, const Vec2& x0, int L) { return estimate_john(GeomSet(P), x0, whitney_decompose(P, L)).J_value; };
    const double disc = J(fixtures::disc(), {}, cfg.max_level);
    const double square = J(fixtures::by_name("square"), {}, cfg.max_level);
    std::vector<double> cusp;
    for (int L : {8, 10, 12}) cusp.push_back(J(fixtures::cusp(), {{0.5, 0.0}}, L));
    const bool increasing = cusp[0] < cusp[1] && cusp[1] < cusp[2];
    const double growth = cusp[2] / cusp[0];
    const bool disc_ok = disc >= 1.0 && disc <= 1.25, square_ok = square <= 3.0;
    c.property = disc_ok && square_ok && increasing && growth >= 2.0;
    c.metrics = {{"disc", disc}, {"square", square}, {"cusp", cusp}, {"cusp_growth", growth}};
    c.detail = "disc " + detail::f6(disc) + ", square " + detail::f6(square) + ", cusp " + detail::f6(cusp[0]) + " " + detail::f6(cusp[1]) + " " +
               detail::f6(cusp[2]) + " (growth " + detail::f6(growth) + ", needs 2)";
  });
}

inline Criterion asymmetry_oracle(const Config& cfg) {
  return detail::timed(5, "Asymmetry oracle equivalence", 120.0, [&](Criterion& c) {
    constexpr std::size_t kCount = 50;
    const std::vector<WulffShape2> shapes = {fixtures::disc_shape(256), fixtures::square_shape(), fixtures::hexagon_shape()};
    const auto sub = detail::seeds(cfg.seed ^ 0x5eedULL, kCount);
    std::vector<double> diff(kCount);
    parallel_for(kCount, [&](std::size_t i) {
      const WulffShape2& K = shapes[i % shapes.size()];
      const PolygonSystem E = i % 2 ? fixtures::random_star(sub[i], 24, 0.5, 1.3) : fixtures::random_smooth_star(sub[i], 64, 0.35);
      const double opt = asymmetry(E, K).value;
      const double grid = asymmetry_grid_oracle(E, K, std::sqrt(K.volume()) / 200.0).value;
      diff[i] = std::abs(opt - grid) / K.volume();
    });
    const double worst = *std::max_element(diff.begin(), diff.end());
    c.property = worst <= 1e-3;
    c.metrics = {{"polygons", kCount}, {"max_relative_difference", worst}};
    c.detail = "max |optimizer − grid| / |K| = " + detail::f6(worst);
  });
}

inline Criterion trace_behaviour(const Config& cfg) {
  return detail::timed(6, "Trace constant behaviour", 120.0, [&](Criterion& c) {
    bool ok = true;
    // Linear field on the disc.
    const PolygonSystem disc = fixtures::disc();
    const auto Wd = whitney_decompose(disc, 10);
    const double r1 = trace_constant(disc, {ScalarField::linear({{1, 0}}, 0.0)}, Wd, {}, 400).fields[0].ratio;
    const double rel = std::abs(r1 / (4.0 / kPi) - 1.0);
    ok = ok && rel <= 0.02;
    c.metrics["disc_linear_ratio"] = r1;
    c.detail = "disc x1 ratio " + detail::f6(r1) + "; ";
    // Suite stability across levels.
    for (const auto& [name, P, x0] : std::vector<std::tuple<std::string, PolygonSystem, Vec2>>{{"disc", disc, {}}, {"square", fixtures::unit_square(), {{0.5, 0.5}}}}) {
      const auto suite = default_trace_suite(P);
      std::vector<double> ce;
      for (int L : {8, 10}) {
        const auto W = name == "disc" && L == 10 ? Wd : whitney_decompose(P, L);
        ce.push_back(trace_constant(P, suite, W, x0, 400).c_emp);
        if (L == 10) {
          const auto s = chain_soundness(P, W, x0, suite, 100, cfg.seed);
          ok = ok && s.violations == 0;
          c.metrics[name + "_soundness"] = {{"checks", s.checks}, {"violations", s.violations}, {"worst_fraction", s.worst_fraction}};
        }
      }
      const double var = std::abs(ce[1] - ce[0]) / std::min(ce[0], ce[1]);
      ok = ok && var <= 0.10;
      c.metrics[name + "_c_emp"] = ce;
      c.detail += name + " c_emp " + detail::f6(ce[0]) + "/" + detail::f6(ce[1]) + "; ";
    }
    // Concentrating family on the cusp.
    const PolygonSystem cusp = fixtures::cusp();
    const auto Wc = whitney_decompose(cusp, 14);
    std::vector<ScalarField> fam;
    for (int j : {2, 3, 4}) fam.push_back(ScalarField::concentrating({{0, 0}}, j));
    const auto rc = trace_constant(cusp, fam, Wc, {{0.5, 0.0}}, 2000);
    std::vector<double> ratios;
    for (const auto& f : rc.fields) ratios.push_back(f.ratio);
    const bool increasing = ratios[0] < ratios[1] && ratios[1] < ratios[2];
    ok = ok && increasing && rc.ok();
    const auto s = chain_soundness(cusp, Wc, {{0.5, 0.0}}, fam, 100, cfg.seed);
    ok = ok && s.violations == 0;
    c.metrics["cusp_ratios"] = ratios;
    c.metrics["cusp_skipped_fraction"] = rc.skipped_fraction;
    c.metrics["cusp_soundness"] = {{"checks", s.checks}, {"violations", s.violations}, {"worst_fraction", s.worst_fraction}};
    c.detail += "cusp " + detail::f6(ratios[0]) + " " + detail::f6(ratios[1]) + " " + detail::f6(ratios[2]);
    c.property = ok;
  });
}

inline Criterion qwi_positivity() {
  return detail::timed(7, "QWI positivity", 60.0, [](Criterion& c) {
    const auto K = fixtures::disc_shape(256);
    std::vector<double> ratios(ellipse_parameters().size());
    parallel_for(ratios.size(), [&](std::size_t i) { ratios[i] = qwi_ratio(qwi_ellipse(K, ellipse_parameters()[i]), K); });
    const double lo = *std::min_element(ratios.begin(), ratios.end()), hi = *std::max_element(ratios.begin(), ratios.end());
    c.property = lo > 0.0 && hi / lo <= 2.0;
    c.metrics = {{"ratios", ratios}, {"infimum", lo}, {"spread", hi / lo}};
    c.detail = "empirical infimum " + detail::f6(lo) + ", max/min " + detail::f6(hi / lo);
  });
}

inline Criterion selection_pipeline() {
  return detail::timed(8, "Selection pipeline", 300.0, [](Criterion& c) {
    bool ok = true;
    auto run = [&](const std::string& name, const std::vector<PolygonSystem>& fam, const WulffShape2& K) {
      const auto rep = qwi_pipeline(fam, K);
      json members = json::array();
      for (std::size_t i = 0; i < rep.entries.size(); ++i) {
        const auto& e = rep.entries[i];
        const auto& s = e.selection;
        members.push_back({{"pass", e.pass()}, {"error", e.error}, {"energy_ok", e.energy_ok}, {"volume_ok", e.volume_ok},
                           {"barycenter_ok", e.barycenter_ok}, {"sandwich_ok", e.sandwich_ok}, {"john_ok", e.john_ok},
                           {"minimality_ok", e.minimality_ok}, {"sandwich_delta", s.checks.sandwich_delta}, {"J_estimate", s.checks.J_estimate},
                           {"energy_input", s.energy_input.total}, {"energy_raw", s.energy_raw.total}});
        c.detail += name + "[" + std::to_string(i) + "] " + (e.pass() ? "ok" : e.error.empty() ? "delta " + detail::f6(s.checks.sandwich_delta) : e.error) + "; ";
      }
      c.metrics[name] = members;
      ok = ok && rep.pass();
    };
    const auto disc = fixtures::disc_shape(256);
    std::vector<PolygonSystem> ellipses, bumps;
    for (double t : ellipse_parameters()) ellipses.push_back(fixtures::ellipse(1 + t, 1 / (1 + t), 128));
    const auto square = fixtures::square_shape();
    for (double t : bump_parameters()) bumps.push_back(selection_bump(square, t));
    run("ellipse", ellipses, disc);
    run("bumped_square", bumps, square);
    const auto at3 = dilate_scan(disc, 3.0), below = dilate_scan(disc, 1.5);
    const bool scan_ok = std::abs(at3.r_min - 1.0) <= 1e-6 && std::abs(below.r_min - 1.0) > 1e-6;
    ok = ok && scan_ok;
    c.metrics["dilate_scan"] = {{"r_min_lambda_3", at3.r_min}, {"r_min_lambda_1_5", below.r_min}};
    c.detail += "dilate r_min " + detail::f6(at3.r_min) + " / " + detail::f6(below.r_min);
    c.property = ok;
  });
}

// ---------------------------------------------------------------------------
// Suites

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"wulff", "whitney", "john", "trace", "qwi", "selection", "all"};
  return names;
}

/// Criterion ids per suite; "qwi" carries the asymmetry oracle since the ratio depends on it.
inline std::vector<int> suite_criteria(const std::string& suite) {
  if (suite == "wulff") return {1, 2, 3};
  if (suite == "whitney") return {3};
  if (suite == "john") return {4};
  if (suite == "trace") return {6};
  if (suite == "qwi") return {5, 7};
  if (suite == "selection") return {8};
  if (suite == "all") return {1, 2, 3, 4, 5, 6, 7, 8};
  fail(ErrorCode::UnknownSuite, "unknown suite '" + suite + "'");
}

inline Criterion run_criterion(int id, const Config& cfg) {
  switch (id) {
    case 1: return wulff_equality();
    case 2: return wulff_inequality(cfg);
    case 3: return whitney_exactness(cfg);
    case 4: return john_discrimination(cfg);
    case 5: return asymmetry_oracle(cfg);
    case 6: return trace_behaviour(cfg);
    case 7: return qwi_positivity();
    case 8: return selection_pipeline();
  }
  fail(ErrorCode::InvalidInput, "no criterion " + std::to_string(id));
}

/// Runs a suite; `on_result` sees each criterion as soon as it finishes.
inline Report run_suite(const std::string& suite, const Config& cfg, const std::function<void(const Criterion&)>& on_result = {}) {
  Report r;
  r.suite = suite;
  for (int id : suite_criteria(suite)) {
    r.criteria.push_back(run_criterion(id, cfg));
    if (on_result) on_result(r.criteria.back());
  }
  return r;
}

}  // namespace wulfflab::verify
