#include <gtest/gtest.h>

#include "oracles.hpp"
#include "wulfflab/fixtures.hpp"
#include "wulfflab/selection.hpp"

using namespace wulfflab;

namespace {

SelectionProblem problem(const PolygonSystem& E, const WulffShape2& K) {
  SelectionProblem P;
  P.input = E;
  P.K = K;
  return P;
}

PolygonSystem scaled(const WulffShape2& K, double t) { return fixtures::as_polygon(K).scaled(t); }

}  // namespace

TEST(Energy, WulffShapeItself) {
  const auto K = fixtures::hexagon_shape();
  const auto e = penalized_energy(fixtures::as_polygon(K), problem(fixtures::as_polygon(K), K));
  EXPECT_NEAR(e.perimeter, 2.0 * kPi, 1e-9);  // P_K(K) = n|K|
  EXPECT_NEAR(e.asymmetry, 0.0, 1e-9);
  EXPECT_NEAR(e.volume_term, 0.0, 1e-9);
  EXPECT_NEAR(e.total, 2.0 * kPi, 1e-9);
  EXPECT_FALSE(e.clipped);
}

TEST(Energy, Dilates) {
  const auto K = fixtures::square_shape();
  const auto P = problem(fixtures::as_polygon(K), K);
  for (double t : {0.5, 1.2, 2.0}) {
    const auto e = penalized_energy(scaled(K, t), P);
    EXPECT_NEAR(e.perimeter, 2.0 * kPi * t, 1e-9);
    EXPECT_NEAR(e.volume_term, 3.0 * kPi * std::abs(t * t - 1.0), 1e-9);
    // A(tK) = |tK Δ K| for symmetric K, and A(K) = 0.
    EXPECT_NEAR(e.asymmetry, kPi * std::abs(t * t - 1.0), 1e-9);
    EXPECT_NEAR(e.total, 2.0 * kPi * t + 4.0 * kPi * std::abs(t * t - 1.0), 1e-9);
  }
}

TEST(Energy, ClipsToBall) {
  const auto K = fixtures::disc_shape();
  auto P = problem(fixtures::as_polygon(K), K);
  P.r0 = 2.0;
  const auto e = penalized_energy(scaled(K, 3.0), P);
  EXPECT_TRUE(e.clipped);
  EXPECT_NEAR(e.total, penalized_energy(scaled(K, 2.0), P).total, 1e-6 * e.total);
}

TEST(Energy, AsymmetryTermUsesInput) {
  const auto K = fixtures::disc_shape();
  const auto E = fixtures::ellipse(1.2, 1.0 / 1.2, 256);
  const auto e = penalized_energy(fixtures::as_polygon(K), problem(E, K));
  EXPECT_NEAR(e.asymmetry_term, asymmetry(E, K).value, 1e-9);
}

TEST(Problem, Validation) {
  const auto K = fixtures::disc_shape();
  auto P = problem(fixtures::as_polygon(K), K);
  EXPECT_NO_THROW(P.validate());
  P.lambda = 2.0;
  EXPECT_THROW(P.validate(), Error);
  P.lambda = 3.0;
  P.r0 = 1.0;
  EXPECT_THROW(P.validate(), Error);
  P.r0 = 10.0;
  P.input.loops.push_back(P.input.loops[0]);
  EXPECT_THROW(P.validate(), Error);
}

TEST(StarPolygon, PaddingKeepsShape) {
  const auto sq = fixtures::rectangle(-1, -1, 1, 1);
  const auto S = star_from(sq.loops[0], 64);
  EXPECT_GE(S.size(), 64u);
  EXPECT_NEAR(S.polygon().area(), 4.0, 1e-12);
  EXPECT_NEAR(oracle::hausdorff(oracle::from(S.loop()), oracle::from(sq.loops[0])), 0.0, 1e-12);
  EXPECT_THROW(star_from(fixtures::rectangle(1, 1, 2, 2).loops[0], 8), Error);
}

TEST(Minimality, MarginOfSelfIsZero) {
  const auto K = fixtures::disc_shape();
  const auto F = fixtures::as_polygon(K);
  EXPECT_NEAR(minimality_margin(F, F, problem(F, K)), 0.0, 1e-12);
}

TEST(Minimality, HoleCostsPerimeterAndVolume) {
  const auto K = fixtures::square_shape();
  const double a = std::sqrt(kPi) / 2.0;  // K = [-a, a]²
  const double s = 0.2;
  PolygonSystem F = fixtures::as_polygon(K);
  PolygonSystem U = F;
  Loop hole{{{-s / 2, -s / 2}}, {{-s / 2, s / 2}}, {{s / 2, s / 2}}, {{s / 2, -s / 2}}};
  U.loops.push_back(hole);
  // The hole boundary has four sides of length s, each with support value a.
  const double expected = 4.0 * s * a + 4.0 * s * s;
  EXPECT_NEAR(minimality_margin(F, U, problem(F, K)), expected, 1e-9);
}

TEST(Minimality, SpotCheckOnWulffShape) {
  const auto K = fixtures::disc_shape(128);
  const auto F = fixtures::as_polygon(K);
  const auto r = minimality_spot_check(F, problem(F, K), 50, 3);
  EXPECT_EQ(r.trials, 50);
  EXPECT_DOUBLE_EQ(r.pass_fraction, 1.0);
}

TEST(Solver, WulffShapeIsFixedPoint) {
  const auto K = fixtures::hexagon_shape();
  const auto E = fixtures::as_polygon(K);
  const auto r = solve_selection(problem(E, K));
  EXPECT_NEAR(r.minimizer.area(), K.volume(), 1e-9);
  EXPECT_LE(r.checks.sandwich_delta, 1e-3);
  EXPECT_FALSE(r.checks.qwi_value.has_value());
  EXPECT_LE(r.energy_raw.total, r.energy_input.total + 1e-9);
}

TEST(Solver, MildEllipse) {
  const auto K = fixtures::disc_shape(256);
  const auto E = fixtures::ellipse(1.05, 1.0 / 1.05, 128);
  const auto r = solve_selection(problem(E, K));
  EXPECT_NEAR(r.minimizer.area(), K.volume(), 1e-9 * K.volume());
  EXPECT_LE(norm(r.minimizer.barycenter()), 1e-6);
  EXPECT_LE(r.energy_raw.total, r.energy_input.total + 1e-9);
  EXPECT_GE(r.checks.asymmetry_ratio, 0.8);
  EXPECT_LE(r.checks.asymmetry_ratio, 1.2);
  EXPECT_LE(r.checks.J_estimate, kJohnCap2D);
  EXPECT_DOUBLE_EQ(r.checks.minimality.pass_fraction, 1.0);
}

TEST(Solver, RemovesSpike) {
  const auto K = fixtures::disc_shape(256);
  Loop l = fixtures::disc(256).loops[0];
  l[0] = l[0] * 1.6;
  const PolygonSystem E(l);
  const auto r = solve_selection(problem(E, K));
  EXPECT_LT(r.energy_raw.total, r.energy_input.total);
  double reach = 0.0;
  for (const auto& p : r.minimizer_raw.loops[0]) reach = std::max(reach, norm(p));
  EXPECT_LT(reach, 1.3);
}

TEST(Pipeline, WulffShapeMemberPasses) {
  const auto K = fixtures::disc_shape(128);
  const auto rep = qwi_pipeline({fixtures::as_polygon(K)}, K);
  ASSERT_EQ(rep.entries.size(), 1u);
  EXPECT_TRUE(rep.entries[0].error.empty());
  EXPECT_FALSE(rep.entries[0].input_ratio.has_value());
  EXPECT_TRUE(rep.pass());
}

TEST(DilateScan, MinimizerDependsOnLambda) {
  const auto K = fixtures::disc_shape();
  EXPECT_NEAR(dilate_scan(K, 3.0).r_min, 1.0, 1e-6);
  // Below Λ = n the energy 2πr + Λπ(1 − r²) is concave on [0, 1]; the left end wins.
  const auto s = dilate_scan(K, 1.5);
  EXPECT_NEAR(s.r_min, 0.01, 1e-9);
}
