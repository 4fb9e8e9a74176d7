#include <gtest/gtest.h>

#include <queue>

#include "oracles.hpp"
#include "wulfflab/fixtures.hpp"
#include "wulfflab/whitney.hpp"

using namespace wulfflab;

namespace {

bool segments_cross(oracle::P2 a, oracle::P2 b, oracle::P2 c, oracle::P2 d) {
  auto o = [](oracle::P2 p, oracle::P2 q, oracle::P2 r) {
    const double v = (q.first - p.first) * (r.second - p.second) - (q.second - p.second) * (r.first - p.first);
    return (v > 0) - (v < 0);
  };
  const int o1 = o(a, b, c), o2 = o(a, b, d), o3 = o(c, d, a), o4 = o(c, d, b);
  if (o1 == 0 && o2 == 0) {
    auto overlap = [](double p, double q, double r, double s) {
      return std::max(std::min(p, q), std::min(r, s)) <= std::min(std::max(p, q), std::max(r, s));
    };
    return overlap(a.first, b.first, c.first, d.first) && overlap(a.second, b.second, c.second, d.second);
  }
  return o1 * o2 <= 0 && o3 * o4 <= 0;
}

double point_box(oracle::P2 p, oracle::P2 lo, oracle::P2 hi) {
  const double dx = std::max({lo.first - p.first, 0.0, p.first - hi.first});
  const double dy = std::max({lo.second - p.second, 0.0, p.second - hi.second});
  return std::hypot(dx, dy);
}

/// dist(box, polygon boundary) from first principles.
double box_boundary_distance(const PolygonSystem& P, oracle::P2 lo, oracle::P2 hi) {
  const oracle::P2 corners[4] = {lo, {hi.first, lo.second}, hi, {lo.first, hi.second}};
  double best = INFINITY;
  for (const auto& l : P.loops)
    for (std::size_t i = 0; i < l.size(); ++i) {
      const oracle::P2 a{l[i][0], l[i][1]}, b{l[(i + 1) % l.size()][0], l[(i + 1) % l.size()][1]};
      if (point_box(a, lo, hi) == 0.0) return 0.0;
      for (int k = 0; k < 4; ++k)
        if (segments_cross(a, b, corners[k], corners[(k + 1) % 4])) return 0.0;
      best = std::min({best, point_box(a, lo, hi), point_box(b, lo, hi)});
      for (const auto& c : corners) best = std::min(best, oracle::seg_dist(c, a, b));
    }
  return best;
}

int hops(const WhitneyDecomposition2& W, int from, int to) {
  std::vector<int> d(W.cubes.size(), -1);
  std::queue<int> q;
  q.push(from);
  d[from] = 0;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (int v : W.adjacency[u])
      if (d[v] < 0) d[v] = d[u] + 1, q.push(v);
  }
  return d[to];
}

}  // namespace

TEST(Whitney, UnitSquareLevelTen) {
  const auto P = fixtures::unit_square();
  const auto W = whitney_decompose(P, 10);
  const auto c = check_whitney<2>(W, [&](const WhitneyCube<2>& q) { return polygon_cube_distance(P, q, W); });
  EXPECT_TRUE(c.pass());
  EXPECT_TRUE(c.connected);
  EXPECT_LE(W.uncovered_volume, 8.0 * std::ldexp(1.0, -10));
  EXPECT_NEAR(c.coverage_residual, 0.0, 1e-9);
}

TEST(Whitney, CertifiedBoundsContainFirstPrinciplesDistance) {
  const auto P = fixtures::l_shape();
  const auto W = whitney_decompose(P, 8);
  for (std::size_t i = 0; i < W.cubes.size(); i += 7) {
    const auto& q = W.cubes[i];
    const oracle::P2 lo{W.base_origin[0] + q.index[0] * q.side, W.base_origin[1] + q.index[1] * q.side};
    const double d = box_boundary_distance(P, lo, {lo.first + q.side, lo.second + q.side});
    EXPECT_LE(q.dist_lo, d * (1 + 1e-12));
    EXPECT_GE(q.dist_hi, d * (1 - 1e-12));
    EXPECT_NEAR(polygon_cube_distance(P, q, W), d, 1e-12);
  }
}

TEST(Whitney, DiscCubesStayOffBoundary) {
  const auto P = fixtures::disc();
  const auto W = whitney_decompose(P, 9);
  for (const auto& q : W.cubes) {
    ASSERT_GT(q.dist_lo, 0.0);
    EXPECT_GE(q.dist_lo, std::sqrt(2.0) * q.side * (1 - 1e-12));
  }
  EXPECT_TRUE(check_whitney<2>(W).pass());
}

TEST(Whitney, CuspSidesShrinkQuadratically) {
  const auto P = fixtures::cusp();
  const auto W = whitney_decompose(P, 14);
  std::vector<double> side;
  for (int j = 2; j <= 5; ++j) {
    const int q = W.locate(Vec2{{std::ldexp(1.0, -j), 0.0}});
    ASSERT_GE(q, 0);
    side.push_back(W.cubes[q].side);
  }
  for (std::size_t k = 1; k < side.size(); ++k) {
    EXPECT_GE(side[k - 1] / side[k], 2.0);
    EXPECT_LE(side[k - 1] / side[k], 8.0);
  }
  EXPECT_NEAR(std::log2(side.front() / side.back()) / 3.0, 2.0, 0.5);
}

TEST(Whitney, NeighbourRatiosAndOverlap) {
  for (const std::string name : {"square", "lshape", "cusp"}) {
    const auto W = whitney_decompose(fixtures::by_name(name), 8);
    for (std::size_t i = 0; i < W.cubes.size(); ++i)
      for (int j : W.adjacency[i]) {
        const double r = W.cubes[i].side / W.cubes[j].side;
        EXPECT_TRUE(r >= 0.25 && r <= 4.0) << name;
      }
    EXPECT_EQ(overlap_multiplicity(W, 600), 4) << name;
  }
}

TEST(Whitney, AdjacencyIsSymmetricAndTouching) {
  const auto W = whitney_decompose(fixtures::l_shape(), 7);
  for (std::size_t i = 0; i < W.cubes.size(); ++i)
    for (int j : W.adjacency[i]) {
      const auto& nb = W.adjacency[j];
      EXPECT_NE(std::find(nb.begin(), nb.end(), static_cast<int>(i)), nb.end());
      const auto& a = W.cubes[i];
      const auto& b = W.cubes[j];
      const double gap = std::max(std::abs(a.center[0] - b.center[0]), std::abs(a.center[1] - b.center[1])) - 0.5 * (a.side + b.side);
      EXPECT_LE(gap, 1e-12);
    }
}

TEST(Whitney, LocateAndFind) {
  const auto W = whitney_decompose(fixtures::unit_square(), 6);
  const int q = W.locate(Vec2{{0.5, 0.5}});
  ASSERT_GE(q, 0);
  EXPECT_EQ(W.find(W.cubes[q].level, W.cubes[q].index), q);
  EXPECT_EQ(W.locate(Vec2{{2.0, 2.0}}), -1);
}

TEST(CubeGraph, SingleCubeHasNoEdges) {
  WhitneyDecomposition2 W;
  W.base_scale = 1.0;
  W.cubes.push_back({0, {0, 0}, 1.0, 2.0, 3.0, {{0.5, 0.5}}, 2.0});
  W.build_index();
  detail::build_adjacency(W);
  ASSERT_EQ(cube_graph(W).size(), 1u);
  EXPECT_TRUE(cube_graph(W)[0].empty());
  EXPECT_EQ(W.edge_count(), 0u);
}

TEST(CubeGraph, SquareConnected) {
  EXPECT_TRUE(check_whitney<2>(whitney_decompose(fixtures::unit_square(), 8)).connected);
}

TEST(CubeGraph, CuspPathLengthGrowsWithLevel) {
  const auto P = fixtures::cusp();
  std::vector<int> h;
  for (int L : {8, 10, 12}) {
    const auto W = whitney_decompose(P, L);
    EXPECT_TRUE(check_whitney<2>(W).connected);
    int tip = 0;
    for (std::size_t i = 0; i < W.cubes.size(); ++i)
      if (W.cubes[i].center[0] < W.cubes[tip].center[0]) tip = static_cast<int>(i);
    h.push_back(hops(W, W.locate(Vec2{{0.5, 0.0}}), tip));
  }
  EXPECT_LT(h[0], h[1]);
  EXPECT_LT(h[1], h[2]);
}

TEST(Whitney, VoxelDomain2D) {
  const auto g = rasterize(fixtures::disc(), 1.0 / 64);
  const auto W = whitney_decompose(GeomSet(g), 8);
  const auto c = check_whitney<2>(W);
  EXPECT_TRUE(c.pass());
  EXPECT_TRUE(c.connected);
  EXPECT_NEAR(c.coverage_residual, 0.0, 1e-9);
}

TEST(Whitney, VoxelBall3D) {
  const int n = 24;
  const double h = 2.4 / n;
  VoxelGrid3 g(h, {{-1.2, -1.2, -1.2}}, {n, n, n});
  for (std::size_t c = 0; c < g.size(); ++c)
    if (norm(g.center(g.coords(c))) < 1.0) g.cells[c] = 1;
  const auto W = whitney_decompose(g, 5);
  const auto c = check_whitney<3>(W);
  EXPECT_GT(c.cubes, 0u);
  EXPECT_TRUE(c.pass());
  EXPECT_TRUE(c.connected);
  EXPECT_NEAR(c.coverage_residual, 0.0, 1e-9);
}

TEST(Whitney, RejectsBadLevel) {
  EXPECT_THROW(whitney_decompose(fixtures::unit_square(), -1), Error);
  EXPECT_THROW(whitney_decompose(fixtures::unit_square(), kWhitneyMaxLevel + 1), Error);
}
