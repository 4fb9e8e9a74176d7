#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "anisotropy.hpp"
#include "errors.hpp"
#include "geomset.hpp"

namespace wulfflab {

struct AsymmetryMethod {
  double grid_step = 0.0;
  int grid_points = 0;
  int refinement_rounds = 0;
  int evaluations = 0;
};

/// A(E) = min_x |E Δ (x + K)| and its minimizer.
struct AsymmetryResult {
  double value = 0.0;
  Vec2 translation{};
  AsymmetryMethod method;
};

inline constexpr int kAsymmetryGridDivisions = 20;
inline constexpr double kAsymmetryStep = 1e-5;
inline constexpr int kAsymmetryMaxRounds = 60;

/// x ↦ |E Δ (x + K)| for a fixed polygonal E and convex K.
class TranslatedSymmDiff {
 public:
  TranslatedSymmDiff(const PolygonSystem& E, const WulffShape2& K)
      : E_(E), clip_(ConvexClipper::from_ccw_polygon(K.vertices())), area_E_(E.area()), area_K_(K.volume()) {
    box_E_ = E.bbox();
  }

  double overlap(const Vec2& x) const {
    Box2 shifted = clip_.box;
    shifted.lo += x;
    shifted.hi += x;
    if (!shifted.overlaps(box_E_)) return 0.0;
    double inter = 0.0;
    for (const auto& l : E_.loops) inter += clip_.clipped_area(l, x, a_, b_);
    return inter;
  }

  double operator()(const Vec2& x) const {
    ++evaluations;
    return std::max(0.0, area_E_ + area_K_ - 2.0 * overlap(x));
  }

  const Box2& box_E() const { return box_E_; }
  const Box2& box_K() const { return clip_.box; }
  double area_K() const { return area_K_; }

  mutable int evaluations = 0;

 private:
  const PolygonSystem& E_;
  ConvexClipper clip_;
  double area_E_, area_K_;
  Box2 box_E_;
  mutable Loop a_, b_;
};

namespace detail {

/// Golden-section search of g on [lo, hi]; returns the best abscissa seen.
template <class G>
double golden_section(G&& g, double lo, double hi, double tol, double& best_value) {
  constexpr double invphi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = g(c), fd = g(d);
  double best_x = fc < fd ? c : d;
  best_value = std::min(fc, fd);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = g(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = g(d);
    }
    if (fc < best_value) best_value = fc, best_x = c;
    if (fd < best_value) best_value = fd, best_x = d;
  }
  return best_x;
}

/// Coordinate-wise golden-section refinement of f around `x` with initial half-width w.
template <class F>
int refine_translation(F&& f, Vec2& x, double& fx, double w, int max_rounds) {
  int rounds = 0;
  for (; rounds < max_rounds; ++rounds) {
    const Vec2 start = x;
    for (int axis = 0; axis < 2; ++axis) {
      double val = 0.0;
      Vec2 y = x;
      const double t = golden_section(
          [&](double s) {
            y[axis] = s;
            return f(y);
          },
          x[axis] - w, x[axis] + w, kAsymmetryStep, val);
      if (val < fx) {
        fx = val;
        x[axis] = t;
      }
    }
    const double moved = norm(x - start);
    if (moved < kAsymmetryStep && w <= 4.0 * kAsymmetryStep) break;
    w = std::max(4.0 * kAsymmetryStep, std::min(w, 2.0 * moved + 2.0 * kAsymmetryStep));
  }
  return rounds + 1;
}

}  // namespace detail

/// Deterministic minimization of x ↦ |E Δ (x+K)|: barycenter start, coarse grid of step
/// |K|^{1/2}/20 over the Minkowski-difference box, then golden-section refinement.
inline AsymmetryResult asymmetry(const PolygonSystem& E, const WulffShape2& K) {
  TranslatedSymmDiff f(E, K);
  AsymmetryResult res;
  const double step = std::sqrt(K.volume()) / kAsymmetryGridDivisions;
  Vec2 best = E.barycenter() - K.barycenter();
  double fbest = f(best);
  const Box2& be = f.box_E();
  const Box2& bk = f.box_K();
  const Vec2 lo = be.lo - bk.hi, hi = be.hi - bk.lo;
  const int i0 = static_cast<int>(std::floor((lo[0] - best[0]) / step)), i1 = static_cast<int>(std::ceil((hi[0] - best[0]) / step));
  const int j0 = static_cast<int>(std::floor((lo[1] - best[1]) / step)), j1 = static_cast<int>(std::ceil((hi[1] - best[1]) / step));
  const Vec2 anchor = best;
  for (int j = j0; j <= j1; ++j)
    for (int i = i0; i <= i1; ++i) {
      const Vec2 x = anchor + Vec2{{i * step, j * step}};
      ++res.method.grid_points;
      const double v = f(x);
      if (v < fbest) fbest = v, best = x;
    }
  res.method.grid_step = step;
  res.method.refinement_rounds = detail::refine_translation(f, best, fbest, step, kAsymmetryMaxRounds);
  res.value = fbest;
  res.translation = best;
  res.method.evaluations = f.evaluations;
  return res;
}

inline AsymmetryResult asymmetry(const GeomSet& E, const WulffShape2& K) {
  if (!E.is_polygon()) fail(ErrorCode::InvalidInput, "asymmetry is implemented for polygonal sets");
  return asymmetry(E.polygon(), K);
}

/// Local re-optimization of the translation starting from `start`, within half-width w.
inline AsymmetryResult asymmetry_local(const PolygonSystem& E, const WulffShape2& K, const Vec2& start, double w) {
  TranslatedSymmDiff f(E, K);
  AsymmetryResult res;
  Vec2 x = start;
  double fx = f(x);
  res.method.refinement_rounds = detail::refine_translation(f, x, fx, w, kAsymmetryMaxRounds);
  res.value = fx;
  res.translation = x;
  res.method.evaluations = f.evaluations;
  return res;
}

struct DeficitReport {
  double p_k = 0.0;
  double bound = 0.0;
  double deficit = 0.0;
};

/// n |K|^{1/n} |E|^{(n-1)/n}.
inline double wulff_bound(int n, double volume_K, double volume_E) {
  return n * std::pow(volume_K, 1.0 / n) * std::pow(volume_E, (n - 1.0) / n);
}

template <std::size_t N>
DeficitReport deficit(const GeomSet& E, const WulffShape<N>& K) {
  const double vol = volume(E);
  if (!(vol > 0.0)) fail(ErrorCode::InvalidInput, "deficit needs |E| > 0");
  DeficitReport r;
  r.p_k = anisotropic_perimeter<N>(E, K);
  r.bound = wulff_bound(static_cast<int>(N), K.volume(), vol);
  r.deficit = r.p_k / r.bound - 1.0;
  return r;
}

/// P_K(E) - n|K|^{1/n}|E|^{(n-1)/n}; nonnegative by the Wulff inequality.
template <std::size_t N>
double wulff_margin(const GeomSet& E, const WulffShape<N>& K) {
  const double vol = volume(E);
  if (!(vol > 0.0)) fail(ErrorCode::InvalidInput, "wulff_margin needs |E| > 0");
  return anisotropic_perimeter<N>(E, K) - wulff_bound(static_cast<int>(N), K.volume(), vol);
}

inline constexpr double kDegenerateAsymmetry = 1e-6;

struct QwiReport {
  double p_k = 0.0;
  double p_k_shape = 0.0;
  double asymmetry = 0.0;
  double deficit = 0.0;
  double ratio = 0.0;
};

/// (P_K(E) - P_K(K)) / A(E)² after rescaling E to |E| = |K|.
inline QwiReport qwi_report(const PolygonSystem& E, const WulffShape2& K) {
  const double s = std::sqrt(K.volume() / E.area());
  const PolygonSystem Es = E.scaled(s);
  QwiReport q;
  q.p_k = anisotropic_perimeter(Es, K);
  q.p_k_shape = anisotropic_perimeter(PolygonSystem(K.vertices()), K);
  q.asymmetry = asymmetry(Es, K).value;
  q.deficit = q.p_k / wulff_bound(2, K.volume(), Es.area()) - 1.0;
  if (q.asymmetry <= kDegenerateAsymmetry * K.volume())
    fail(ErrorCode::DegenerateAsymmetry, "A(E) = " + std::to_string(q.asymmetry) + " below threshold");
  q.ratio = (q.p_k - q.p_k_shape) / (q.asymmetry * q.asymmetry);
  return q;
}

inline double qwi_ratio(const PolygonSystem& E, const WulffShape2& K) { return qwi_report(E, K).ratio; }

inline double qwi_ratio(const GeomSet& E, const WulffShape2& K) { return qwi_ratio(E.polygon(), K); }

}  // namespace wulfflab
