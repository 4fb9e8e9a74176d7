#include <gtest/gtest.h>

#include "wulfflab/fixtures.hpp"
#include "wulfflab/john.hpp"

using namespace wulfflab;

namespace {

double john_of(const PolygonSystem& P, const Vec2& x0, int L) {
  return estimate_john(GeomSet(P), x0, whitney_decompose(P, L)).J_value;
}

PolygonSystem scaled(const WulffShape2& K, double t) {
  Loop l = K.vertices();
  for (auto& p : l) p = p * t;
  return PolygonSystem(std::move(l));
}

}  // namespace

TEST(John, DiscNearOne) {
  const double J = john_of(fixtures::disc(), {}, 10);
  EXPECT_GE(J, 1.0);
  EXPECT_LE(J, 1.25);
}

TEST(John, SquareBounded) {
  const double J = john_of(fixtures::rectangle(-1, -1, 1, 1), {}, 10);
  EXPECT_GE(J, 1.0);
  EXPECT_LE(J, 3.0);
}

TEST(John, CuspGrowsWithResolution) {
  std::vector<double> J;
  for (int L : {8, 10, 12}) J.push_back(john_of(fixtures::cusp(), {{0.5, 0.0}}, L));
  EXPECT_LT(J[0], J[1]);
  EXPECT_LT(J[1], J[2]);
  // The cusp has no finite constant: its estimate dwarfs that of a convex set.
  EXPECT_GT(J[2], 4.0 * john_of(fixtures::disc(), {}, 10));
}

TEST(John, WitnessCurvesRespectTheConstant) {
  const auto P = fixtures::l_shape();
  const auto W = whitney_decompose(P, 8);
  const auto E = estimate_john(GeomSet(P), {{0.25, 0.25}}, W);
  ASSERT_FALSE(E.curves.empty());
  EXPECT_EQ(E.curves.size(), E.worst_targets.size());
  EXPECT_GT(E.targets, 0u);
  for (const auto& c : E.curves) {
    EXPECT_TRUE(c.satisfies(E.J_value));
    EXPECT_LE(c.max_ratio(), E.J_value * (1 + 1e-9));
    for (std::size_t i = 1; i < c.witness.size(); ++i) EXPECT_GE(c.witness[i].length, c.witness[i - 1].length);
  }
  EXPECT_NEAR(E.curves.front().max_ratio(), E.J_value, 1e-9 * E.J_value);
}

TEST(John, CenterMustBeCovered) {
  const auto P = fixtures::l_shape();
  const auto W = whitney_decompose(P, 6);
  EXPECT_THROW(estimate_john(GeomSet(P), {{0.75, 0.75}}, W), Error);
  EXPECT_THROW(estimate_john(GeomSet(P), {{0.5, 0.5}}, W), Error);
}

TEST(John, VoxelDomain) {
  const auto g = rasterize(fixtures::disc(), 1.0 / 64);
  const GeomSet S(g);
  const double J = estimate_john(S, {}, whitney_decompose(S, 8)).J_value;
  EXPECT_GE(J, 1.0);
  EXPECT_LE(J, 1.5);
}

TEST(LocalJohn, DiscAlwaysPasses) {
  const auto P = fixtures::disc();
  const auto W = whitney_decompose(P, 9);
  const auto r = local_john_check(GeomSet(P), 2.0, 0.25, W, 200);
  EXPECT_EQ(r.samples, 200u);
  EXPECT_GT(r.evaluated, 100u);
  EXPECT_DOUBLE_EQ(r.pass_fraction, 1.0);
}

TEST(LocalJohn, CuspTipFails) {
  const auto P = fixtures::cusp();
  const auto W = whitney_decompose(P, 12);
  LocalJohnOptions o;
  o.focus = Vec2{};
  o.focus_radius = 0.05;
  const auto r = local_john_check(GeomSet(P), 2.0, 0.05, W, 200, o);
  EXPECT_GT(r.evaluated, 0u);
  EXPECT_LT(r.pass_fraction, 1.0);
}

TEST(LocalJohn, RejectsBadParameters) {
  const auto P = fixtures::unit_square();
  const auto W = whitney_decompose(P, 5);
  EXPECT_THROW(local_john_check(GeomSet(P), 0.5, 0.1, W, 10), Error);
  EXPECT_THROW(local_john_check(GeomSet(P), 2.0, 0.0, W, 10), Error);
}

TEST(Sandwich, ScaledShape) {
  const auto K = fixtures::hexagon_shape();
  const auto r = sandwich_report(scaled(K, 1.05), K);
  EXPECT_TRUE(r.origin_inside);
  EXPECT_NEAR(r.outer, 1.05, 1e-12);
  EXPECT_NEAR(r.inner, 1.05, 1e-12);
  EXPECT_NEAR(r.delta(), 0.05, 1e-12);
  EXPECT_TRUE(r.holds(0.05 + 1e-12));
  EXPECT_FALSE(r.holds(0.04));
}

TEST(Sandwich, PushedVertex) {
  const auto K = fixtures::square_shape();
  Loop l = K.vertices();
  l[0] = l[0] * 1.08;
  const auto r = sandwich_report(PolygonSystem(l), K);
  EXPECT_NEAR(r.outer, 1.08, 1e-12);
  EXPECT_NEAR(r.inner, 1.0, 1e-12);
  EXPECT_NEAR(r.delta(), 0.08, 1e-12);
}

TEST(Sandwich, OriginOutside) {
  const auto K = fixtures::square_shape();
  const auto r = sandwich_report(fixtures::rectangle(5, 5, 6, 6), K);
  EXPECT_FALSE(r.origin_inside);
  EXPECT_TRUE(std::isinf(r.delta()));
}

TEST(NearWulff, RadialCurveOnDisc) {
  const auto K = fixtures::disc_shape();
  const auto E = scaled(K, 1.005);
  const auto W = whitney_decompose(E, 9);
  const double J0 = estimate_john(GeomSet(E), {}, W).J_value;
  const auto c = john_curve_near_wulff(E, K, {{0.5, 0.0}}, 0.01, W, J0);
  EXPECT_TRUE(c.certified());
  EXPECT_LE(c.max_ratio, 2.0);
  EXPECT_EQ(c.which_case, 1);
}

TEST(NearWulff, BoundaryPointIsCertified) {
  const auto K = fixtures::square_shape();
  const auto E = scaled(K, 1.01);
  const auto W = whitney_decompose(E, 9);
  const double J0 = estimate_john(GeomSet(E), {}, W).J_value;
  const Vec2 z = E.loops[0][0];
  const auto c = john_curve_near_wulff(E, K, z, 0.02, W, J0);
  EXPECT_TRUE(c.certified());
  EXPECT_LE(c.max_ratio, c.bound + 1e-9);
}

TEST(NearWulff, Preconditions) {
  const auto K = fixtures::disc_shape();
  const auto E = scaled(K, 1.05);
  const auto W = whitney_decompose(E, 6);
  EXPECT_THROW(john_curve_near_wulff(E, K, {{0.5, 0.0}}, 0.01, W, 1.0), Error);  // sandwich fails
  EXPECT_THROW(john_curve_near_wulff(E, K, {{0.5, 0.0}}, 0.2, W, 1.0), Error);   // delta too large
  EXPECT_THROW(john_curve_near_wulff(E, K, {{3.0, 0.0}}, 0.06, W, 1.0), Error);  // z outside
}
