#include <gtest/gtest.h>

#include "oracles.hpp"
#include "wulfflab/fixtures.hpp"
#include "wulfflab/geomset.hpp"

using namespace wulfflab;

namespace {

VoxelGrid3 voxel_ball(double r, double h) {
  const int n = static_cast<int>(std::ceil(2 * r / h)) + 4;
  const Vec3 origin{{-n * h / 2, -n * h / 2, -n * h / 2}};
  VoxelGrid3 g(h, origin, {n, n, n});
  for (std::size_t c = 0; c < g.size(); ++c)
    if (norm(g.center(g.coords(c))) < r) g.cells[c] = 1;
  return g;
}

}  // namespace

TEST(Volume, UnitSquare) { EXPECT_DOUBLE_EQ(volume(GeomSet(fixtures::unit_square())), 1.0); }

TEST(Volume, SquareWithHole) {
  Loop hole{{{0.25, 0.25}}, {{0.25, 0.75}}, {{0.75, 0.75}}, {{0.75, 0.25}}};
  PolygonSystem P({fixtures::unit_square().loops.front(), hole});
  EXPECT_NEAR(volume(GeomSet(P)), 0.75, 1e-15);
}

TEST(Volume, VoxelDiscWithinBoundaryLayer) {
  const double h = 1.0 / 256;
  EXPECT_NEAR(volume(GeomSet(rasterize(fixtures::disc(), h))), kPi, 4 * h);
}

TEST(Volume, VoxelBall3D) {
  const double h = 1.0 / 40;
  EXPECT_NEAR(volume(GeomSet(voxel_ball(1.0, h))), 4.0 * kPi / 3.0, 4 * kPi * h);
}

TEST(SymmDiff, IdenticalIsZero) {
  const GeomSet E(fixtures::unit_square());
  EXPECT_NEAR(symm_diff_volume(E, E), 0.0, 1e-15);
}

TEST(SymmDiff, OffsetSquaresGiveTwoSlabs) {
  const GeomSet E(fixtures::unit_square()), F(fixtures::rectangle(0.5, 0, 1.5, 1));
  EXPECT_NEAR(symm_diff_volume(E, F), 1.0, 1e-12);
}

TEST(SymmDiff, SquareVersusDiscMatchesRasterOracle) {
  const double a = std::sqrt(kPi) / 2;
  const auto sq = fixtures::rectangle(-a, -a, a, a);
  const auto disc = fixtures::disc(1024);
  const double ref = oracle::raster_xor({oracle::from(sq.loops[0])}, {oracle::from(disc.loops[0])}, -1.1, 1.1, 1.0 / 512);
  EXPECT_NEAR(symm_diff_volume(GeomSet(sq), GeomSet(disc)), ref, 1e-2);
}

TEST(SymmDiff, MixedRepresentationRejected) {
  const GeomSet P(fixtures::unit_square()), V(rasterize(fixtures::unit_square(), 0.1));
  try {
    symm_diff_volume(P, V);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MixedRepresentation);
  }
}

TEST(SymmDiff, MisalignedGridsRejected) {
  VoxelGrid2 a(0.1, {{0, 0}}, {4, 4}), b(0.1, {{0.05, 0}}, {4, 4});
  EXPECT_THROW(symm_diff_volume(GeomSet(a), GeomSet(b)), Error);
  VoxelGrid2 c(0.2, {{0, 0}}, {4, 4});
  EXPECT_THROW(symm_diff_volume(GeomSet(a), GeomSet(c)), Error);
}

TEST(SymmDiff, VoxelCountsDifferingCells) {
  VoxelGrid2 a(0.5, {{0, 0}}, {4, 4}), b(0.5, {{1, 0}}, {4, 4});
  a.cells.assign(16, 1);
  b.cells.assign(16, 1);
  EXPECT_NEAR(symm_diff_volume(GeomSet(a), GeomSet(b)), 2 * 8 * 0.25, 1e-12);
}

TEST(BoundaryMesh, UnitSquareFacets) {
  const auto m = boundary_mesh<2>(GeomSet(fixtures::unit_square()));
  ASSERT_EQ(m.facets.size(), 4u);
  EXPECT_NEAR(m.total_measure(), 4.0, 1e-15);
  for (const auto& f : m.facets) EXPECT_NEAR(std::abs(f.normal[0]) + std::abs(f.normal[1]), 1.0, 1e-15);
  EXPECT_NEAR(norm(m.flux()), 0.0, 1e-15);
}

TEST(BoundaryMesh, InscribedPolygonPerimeter) {
  EXPECT_NEAR(boundary_mesh<2>(GeomSet(fixtures::disc(1024))).total_measure(), 2 * kPi, 1e-4);
}

TEST(BoundaryMesh, MarchingSquaresDisc) {
  const auto m = boundary_mesh<2>(GeomSet(rasterize(fixtures::disc(), 1.0 / 128)));
  EXPECT_NEAR(m.total_measure(), 2 * kPi, 0.05);
  EXPECT_NEAR(norm(m.flux()), 0.0, 1e-9);
}

TEST(BoundaryMesh, MarchingTetrahedraSphere) {
  const auto m = boundary_mesh<3>(GeomSet(voxel_ball(1.0, 1.0 / 32)));
  EXPECT_NEAR(m.total_measure(), 4 * kPi, 0.05 * 4 * kPi);
  EXPECT_NEAR(norm(m.flux()), 0.0, 1e-9);
}

TEST(AnisotropicPerimeter, SquareOnItselfIsTwiceArea) {
  const auto K = WulffShape2::from_vertices({{{-1, -1}}, {{1, -1}}, {{1, 1}}, {{-1, 1}}});
  EXPECT_NEAR(anisotropic_perimeter(fixtures::rectangle(-1, -1, 1, 1), K), 8.0, 1e-12);
}

TEST(AnisotropicPerimeter, DiscTensionIsEuclidean) {
  const auto K = fixtures::wulff_polygon(fixtures::disc(1 << 14));
  EXPECT_NEAR(anisotropic_perimeter(fixtures::disc(1024), K), 2 * kPi, 1e-3);
}

TEST(AnisotropicPerimeter, DilateScalesLinearly) {
  const auto K = fixtures::hexagon_shape();
  const auto P = fixtures::as_polygon(K);
  EXPECT_NEAR(anisotropic_perimeter(P.scaled(2.0), K), 2.0 * anisotropic_perimeter(P, K), 1e-12);
}

TEST(AnisotropicPerimeter, ClosedFormRectangleUnderSquareTension) {
  // h(ν) = |ν₁| + |ν₂| for [-1,1]²; each side contributes its length.
  const auto K = WulffShape2::from_vertices({{{-1, -1}}, {{1, -1}}, {{1, 1}}, {{-1, 1}}});
  const auto tri = PolygonSystem(Loop{{{0, 0}}, {{3, 0}}, {{0, 4}}});
  // Hypotenuse normal (4,3)/5 has |ν₁|+|ν₂| = 7/5, length 5.
  EXPECT_NEAR(anisotropic_perimeter(tri, K), 3 + 4 + 7, 1e-12);
}

TEST(Density, InteriorPointIsOne) {
  const std::vector<double> x{0.5, 0.5}, r{0.2, 0.1, 0.05};
  const auto d = density_classify(GeomSet(fixtures::unit_square()), x, r);
  EXPECT_EQ(d.classification, DensityClass::One);
  for (double v : d.density_values) EXPECT_NEAR(v, 1.0, 1e-12);
}

TEST(Density, EdgePointIsHalf) {
  const std::vector<double> x{0.5, 0.0}, r{0.2, 0.1, 0.05};
  const auto d = density_classify(GeomSet(fixtures::unit_square()), x, r);
  EXPECT_EQ(d.classification, DensityClass::Essential);
  EXPECT_NEAR(d.limit, 0.5, 1e-6);
}

TEST(Density, CuspTipIsZero) {
  const std::vector<double> x{0.0, 0.0}, r{0.1, 0.05, 0.025, 0.0125};
  const auto d = density_classify(GeomSet(fixtures::cusp()), x, r);
  EXPECT_EQ(d.classification, DensityClass::Zero);
  // ∫₀^r 2t² dt / (πr²) = 2r/(3π)
  EXPECT_NEAR(d.density_values.back(), 2 * 0.0125 / (3 * kPi), 1e-3);
}

TEST(Density, RejectsBadLadders) {
  const GeomSet E(fixtures::unit_square());
  const std::vector<double> x{0.5, 0.5}, up{0.1, 0.2};
  EXPECT_THROW(density_classify(E, x, up), Error);
  const GeomSet V(rasterize(fixtures::unit_square(), 0.05));
  const std::vector<double> tiny{0.2, 0.01};
  try {
    density_classify(V, x, tiny);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ResolutionTooCoarse);
  }
}

TEST(UpperDensity, StraightBoundaryPasses) {
  const auto rep = upper_density_check(GeomSet(fixtures::rectangle(-5, -5, 5, 5)), 2.5, 1.0, 200);
  EXPECT_TRUE(rep.pass);
  // Near a right-angle corner the length reaches (1 + √2)r.
  EXPECT_LE(rep.worst_ratio, 1.0 + std::sqrt(2.0) + 1e-9);
}

TEST(UpperDensity, DiscPassesWithFour) {
  const auto rep = upper_density_check(GeomSet(fixtures::disc()), 4.0, 1.0, 200);
  EXPECT_TRUE(rep.pass);
}

TEST(UpperDensity, CombFailsAtToothScale) {
  const int k = 5;
  const auto rep = upper_density_check(GeomSet(fixtures::comb(k)), 4.0, 0.5, 400);
  EXPECT_FALSE(rep.pass);
  EXPECT_GT(rep.worst_radius, 1.0 / (1 << k) / 4);
}
