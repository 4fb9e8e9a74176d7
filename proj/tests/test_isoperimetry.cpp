#include <gtest/gtest.h>

#include "wulfflab/fixtures.hpp"
#include "wulfflab/isoperimetry.hpp"
#include "wulfflab/verify.hpp"

using namespace wulfflab;

namespace {

/// Naive search over a square window of the lattice c + step·Z², using polygon booleans.
double naive_grid_asymmetry(const PolygonSystem& E, const WulffShape2& K, const Vec2& c, double step, int half) {
  const PolygonSystem Kp = fixtures::as_polygon(K);
  double best = INFINITY;
  for (int j = -half; j <= half; ++j)
    for (int i = -half; i <= half; ++i)
      best = std::min(best, symm_diff_volume(GeomSet(E), GeomSet(Kp.translated(c + Vec2{{i * step, j * step}}))));
  return best;
}

}  // namespace

TEST(Asymmetry, ShapeAgainstItselfIsZero) {
  const auto K = fixtures::hexagon_shape();
  const auto r = asymmetry(fixtures::as_polygon(K), K);
  EXPECT_NEAR(r.value, 0.0, 1e-9);
  EXPECT_NEAR(norm(r.translation), 0.0, 1e-6);
}

TEST(Asymmetry, TranslateIsRecovered) {
  const auto K = fixtures::disc_shape();
  const auto r = asymmetry(fixtures::as_polygon(K).translated({{0.3, -0.7}}), K);
  EXPECT_LE(r.value, 1e-4);
  EXPECT_NEAR(r.translation[0], 0.3, 1e-4);
  EXPECT_NEAR(r.translation[1], -0.7, 1e-4);
}

TEST(Asymmetry, SquareVersusDiscMatchesGridSearch) {
  const auto K = fixtures::disc_shape();
  const double a = std::sqrt(kPi) / 2;
  const auto E = fixtures::rectangle(-a, -a, a, a).translated({{0.013, -0.021}});
  // By symmetry the optimum sits at the square's center.
  const double ref = naive_grid_asymmetry(E, K, {{0.015, -0.02}}, 1.0 / 200, 6);
  EXPECT_NEAR(asymmetry(E, K).value, ref, 1e-3 * K.volume());
}

TEST(Asymmetry, PrunedGridOracleMatchesNaiveWindow) {
  const auto K = fixtures::square_shape();
  const auto E = fixtures::random_smooth_star(4, 48, 0.3);
  const double step = std::sqrt(K.volume()) / 40;
  const auto g = verify::asymmetry_grid_oracle(E, K, step);
  EXPECT_LT(g.evaluations, g.grid_points);
  // Re-evaluate the lattice around the reported optimum with the boolean path.
  const PolygonSystem Kp = fixtures::as_polygon(K);
  double best = INFINITY;
  for (int j = -3; j <= 3; ++j)
    for (int i = -3; i <= 3; ++i)
      best = std::min(best, symm_diff_volume(GeomSet(E), GeomSet(Kp.translated(g.translation + Vec2{{i * step, j * step}}))));
  EXPECT_NEAR(g.value, best, 1e-9);
}

TEST(Asymmetry, VoxelInputRejected) {
  EXPECT_THROW(asymmetry(GeomSet(rasterize(fixtures::disc(), 0.1)), fixtures::disc_shape()), Error);
}

TEST(Deficit, WulffShapeIsOptimal) {
  const auto K = fixtures::hexagon_shape();
  EXPECT_NEAR(deficit<2>(GeomSet(fixtures::as_polygon(K)), K).deficit, 0.0, 1e-6);
  EXPECT_NEAR(deficit<2>(GeomSet(fixtures::as_polygon(K).scaled(3.7)), K).deficit, 0.0, 1e-6);
}

TEST(Deficit, RectangleAgainstDiscClosedForm) {
  const auto K = fixtures::wulff_polygon(fixtures::disc(1 << 14));
  const auto d = deficit<2>(GeomSet(fixtures::rectangle(0, 0, 2, 0.5)), K);
  EXPECT_NEAR(d.deficit, 5.0 / (2.0 * std::sqrt(kPi)) - 1.0, 1e-4);
}

TEST(WulffMargin, EqualityCase) {
  const auto K = fixtures::square_shape();
  const double pk = anisotropic_perimeter(fixtures::as_polygon(K), K);
  EXPECT_NEAR(wulff_margin<2>(GeomSet(fixtures::as_polygon(K)), K), 0.0, 1e-6 * pk);
}

TEST(WulffMargin, TwoDisjointTranslates) {
  const auto K = normalize_shape(fixtures::wulff_polygon(fixtures::disc(1024)));
  const Loop a = fixtures::as_polygon(K).translated({{-2, 0}}).loops[0];
  const Loop b = fixtures::as_polygon(K).translated({{2, 0}}).loops[0];
  EXPECT_NEAR(wulff_margin<2>(GeomSet(PolygonSystem({a, b})), K), 2 * kPi * (2 - std::sqrt(2.0)), 1e-3);
}

TEST(Qwi, DegenerateForShapeItself) {
  const auto K = fixtures::disc_shape();
  try {
    qwi_ratio(fixtures::as_polygon(K), K);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateAsymmetry);
  }
}

TEST(Qwi, EllipseRatiosStable) {
  const auto K = fixtures::disc_shape();
  std::vector<double> r;
  for (double t : {0.05, 0.1, 0.2}) r.push_back(qwi_ratio(verify::qwi_ellipse(K, t), K));
  const double lo = *std::min_element(r.begin(), r.end()), hi = *std::max_element(r.begin(), r.end());
  EXPECT_GT(lo, 0.0);
  EXPECT_LE(hi, 1.25 * lo);
}

TEST(Qwi, BumpedSquarePositive) {
  const auto K = fixtures::square_shape();
  for (double t : {0.05, 0.1}) {
    const auto E = fixtures::bumped_square(1.0, t);
    EXPECT_GT(qwi_ratio(E, K), 0.0) << "t = " << t;
  }
}

TEST(Qwi, ReportConsistency) {
  const auto K = fixtures::disc_shape();
  const auto q = qwi_report(verify::qwi_ellipse(K, 0.1), K);
  EXPECT_NEAR(q.ratio, (q.p_k - q.p_k_shape) / (q.asymmetry * q.asymmetry), 1e-12);
  EXPECT_GT(q.deficit, 0.0);
}
