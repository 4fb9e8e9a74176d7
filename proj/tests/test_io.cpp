#include <gtest/gtest.h>

#include "wulfflab/fixtures.hpp"
#include "wulfflab/io.hpp"
#include "wulfflab/rng.hpp"
#include "wulfflab/svg.hpp"

using namespace wulfflab;
using io::json;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::InvalidInput;
}

json tension(int count, double value) {
  json s = json::array();
  for (int i = 0; i < count; ++i) {
    const double t = 2.0 * kPi * i / count;
    s.push_back({{"dir", {std::cos(t), std::sin(t)}}, {"value", value}});
  }
  return {{"kind", "tension"}, {"samples", s}};
}

}  // namespace

TEST(Rle, HandEncodedBytes) {
  std::vector<std::uint8_t> cells(16, 0);
  cells[0] = cells[8] = 1;
  EXPECT_EQ(io::encode_cells(cells), "0280");  // two copies of 0x80
  EXPECT_EQ(io::encode_cells(std::vector<std::uint8_t>(10, 1)), "01ff01c0");
  EXPECT_EQ(io::decode_cells("01ff01c0", 10), std::vector<std::uint8_t>(10, 1));
}

TEST(Rle, RoundTripRandomGrids) {
  Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 1 + rng.below(3000);
    const double p = rng.uniform();
    std::vector<std::uint8_t> cells(n);
    for (auto& c : cells) c = rng.uniform() < p;
    EXPECT_EQ(io::decode_cells(io::encode_cells(cells), n), cells);
  }
}

TEST(Rle, MalformedData) {
  EXPECT_EQ(code_of([] { io::decode_cells("01f", 4); }), ErrorCode::InvalidInput);
  EXPECT_EQ(code_of([] { io::decode_cells("01zz", 4); }), ErrorCode::InvalidInput);
  EXPECT_EQ(code_of([] { io::decode_cells("00ff", 4); }), ErrorCode::InvalidInput);
  EXPECT_EQ(code_of([] { io::decode_cells("02ff", 8); }), ErrorCode::GridMismatch);
}

TEST(Json, PolygonRoundTrip) {
  const auto P = fixtures::l_shape();
  const json j = io::geomset_to_json(P);
  const GeomSet back = io::geomset_from_json(io::parse_json(io::dump(j)));
  ASSERT_TRUE(back.is_polygon());
  EXPECT_EQ(back.polygon().loops, P.loops);
  EXPECT_EQ(io::dump(io::geomset_to_json(back)), io::dump(j));
}

TEST(Json, VoxelRoundTrip) {
  const auto g = rasterize(fixtures::disc(), 1.0 / 16);
  const GeomSet back = io::geomset_from_json(io::parse_json(io::dump(io::geomset_to_json(GeomSet(g)))));
  ASSERT_FALSE(back.is_polygon());
  EXPECT_EQ(back.voxels<2>().cells, g.cells);
  EXPECT_EQ(back.voxels<2>().dims, g.dims);
  EXPECT_DOUBLE_EQ(back.voxels<2>().h, g.h);
}

TEST(Json, ShapeRoundTrip) {
  const auto K = fixtures::hexagon_shape();
  const auto back = io::planar(io::shape_from_json(io::shape_to_json(K)));
  EXPECT_EQ(back.vertices(), K.vertices());
  const WulffShape3 C = WulffShape3::from_vertices({{{-1, -1, -1}}, {{1, -1, -1}}, {{-1, 1, -1}}, {{1, 1, -1}},
                                                    {{-1, -1, 1}}, {{1, -1, 1}}, {{-1, 1, 1}}, {{1, 1, 1}}});
  const auto C2 = io::shape_from_json(io::shape_to_json(C));
  ASSERT_EQ(io::dim_of(C2), 3);
  EXPECT_NEAR(std::get<WulffShape3>(C2).volume(), 8.0, 1e-12);
}

TEST(Json, MalformedInputs) {
  EXPECT_EQ(code_of([] { io::parse_json("{not json"); }), ErrorCode::InvalidInput);
  EXPECT_EQ(code_of([] { io::geomset_from_json(json{{"kind", "blob"}}); }), ErrorCode::InvalidInput);
  EXPECT_EQ(code_of([] { io::geomset_from_json(json{{"kind", "polygon"}, {"loops", json::array()}}); }), ErrorCode::InvalidInput);
  EXPECT_EQ(code_of([] { io::geomset_from_json(json{{"kind", "polygon"}, {"loops", {{{0, 0}, {1, "x"}, {0, 1}}}}}); }), ErrorCode::InvalidInput);
  EXPECT_EQ(code_of([] { io::shape_from_json(json{{"kind", "polygon"}, {"dim", 4}}); }), ErrorCode::InvalidInput);
  EXPECT_EQ(code_of([] {
              io::geomset_from_json(json{{"kind", "voxels"}, {"h", 0.1}, {"origin", {0, 0}}, {"dims", {4, 4}}, {"data", "01ff"}});
            }),
            ErrorCode::GridMismatch);
  EXPECT_EQ(code_of([] { io::read_text("/nonexistent/wulfflab.json"); }), ErrorCode::InvalidInput);
}

TEST(BuildWulff, ConstantTensionIsDisc) {
  const auto K = io::planar(io::shape_from_json(tension(720, 1.0)));
  EXPECT_NEAR(K.volume(), kPi, 1e-4);
}

TEST(BuildWulff, FourDirectionsGiveSquare) {
  const auto K = io::planar(io::shape_from_json(tension(4, 1.0)));
  EXPECT_NEAR(K.volume(), 4.0, 1e-12);
  EXPECT_EQ(K.vertices().size(), 4u);
}

TEST(BuildWulff, TwoDirectionsAreUnbounded) {
  EXPECT_EQ(code_of([] { io::shape_from_json(tension(2, 1.0)); }), ErrorCode::UnboundedShape);
}

TEST(Suite, ParsesAllForms) {
  const json j = json::parse(R"({"fields": ["constant", {"constant": 2.5}, {"linear": {"a": [1, 2], "b": 3}},
      {"radial_bump": {"center": [0, 0], "scale": 0.5}}, {"concentrating": {"tip": [1, 0], "j": 2}}, "dist_to_boundary"]})");
  const auto P = fixtures::unit_square();
  const auto s = io::suite_from_json(j, P);
  ASSERT_EQ(s.size(), 6u);
  EXPECT_DOUBLE_EQ(s[0]({{0.3, 0.3}}), 1.0);
  EXPECT_DOUBLE_EQ(s[1]({{0.3, 0.3}}), 2.5);
  EXPECT_DOUBLE_EQ(s[2]({{1.0, 1.0}}), 6.0);
  EXPECT_DOUBLE_EQ(s[3]({{0.5, 0.0}}), std::exp(-1.0));
  EXPECT_DOUBLE_EQ(s[4]({{0.875, 0.0}}), 0.5);
  EXPECT_DOUBLE_EQ(s[5]({{0.5, 0.25}}), 0.25);
  EXPECT_EQ(code_of([&] { io::suite_from_json(json::parse(R"(["wavelet"])"), P); }), ErrorCode::InvalidInput);
  EXPECT_EQ(code_of([&] { io::suite_from_json(json::array(), P); }), ErrorCode::InvalidInput);
}

TEST(Problem, ReadsSolverOptions) {
  json j;
  j["input_set"] = io::geomset_to_json(fixtures::disc(64));
  j["shape"] = io::shape_to_json(fixtures::square_shape());
  j["lambda"] = 4.0;
  j["solver"] = {{"vertices", 32}, {"seed", 9}};
  const auto P = io::problem_from_json(j);
  EXPECT_DOUBLE_EQ(P.lambda, 4.0);
  EXPECT_EQ(P.solver.vertices, 32);
  EXPECT_EQ(P.solver.seed, 9u);
  EXPECT_NEAR(P.K.volume(), kPi, 1e-9);
  j["lambda"] = 1.0;
  EXPECT_EQ(code_of([&] { io::problem_from_json(j); }), ErrorCode::InvalidInput);
}

TEST(Csv, WhitneyAndSweep) {
  const auto W = whitney_decompose(fixtures::unit_square(), 4);
  const auto t = io::parse_csv(io::whitney_csv(W));
  EXPECT_EQ(t.header, (std::vector<std::string>{"level", "ix", "iy", "side", "dist_lo", "dist_hi"}));
  ASSERT_EQ(t.rows.size(), W.cubes.size());
  EXPECT_DOUBLE_EQ(t.rows[0][3], W.cubes[0].side);
  const auto s = io::parse_csv(io::sweep_csv({{0.1, 2.0, 0.3, 0.05, 0.5}}));
  EXPECT_EQ(s.column("ratio"), 4);
  EXPECT_DOUBLE_EQ(s.rows[0][s.column("deficit")], 0.05);
  EXPECT_EQ(code_of([] { io::parse_csv("a,b\n1\n"); }), ErrorCode::InvalidInput);
  EXPECT_EQ(code_of([] { io::parse_csv("a,b\n1,x\n"); }), ErrorCode::InvalidInput);
}

TEST(Num, RoundTripsDoubles) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 12345.678})
    EXPECT_EQ(std::stod(io::num(v)), v);
}

TEST(Svg, DeterministicAndWellFormed) {
  const auto W = whitney_decompose(fixtures::l_shape(), 5);
  const std::string csv = io::whitney_csv(W);
  const std::string a = svg::plot(csv), b = svg::plot(csv);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.rfind("<svg", 0), 0u);
  EXPECT_NE(a.find("</svg>"), std::string::npos);
  const std::string s = svg::plot(io::dump(io::geomset_to_json(fixtures::l_shape())));
  EXPECT_NE(s.find("<path"), std::string::npos);
  EXPECT_EQ(code_of([] { svg::plot("x,y\n1,2\n"); }), ErrorCode::InvalidInput);
  EXPECT_EQ(code_of([] { svg::plot("{\"report\": \"unknown\"}"); }), ErrorCode::InvalidInput);
}

TEST(Svg, JohnAndTraceReports) {
  const auto P = fixtures::unit_square();
  const auto W = whitney_decompose(P, 6);
  const auto E = estimate_john(GeomSet(P), {{0.5, 0.5}}, W);
  EXPECT_NE(svg::plot(io::dump(io::john_to_json(E, GeomSet(P)))).find("<svg"), std::string::npos);
  const auto T = trace_constant(P, {ScalarField::linear({{1, 0}}, 0)}, W, {{0.5, 0.5}}, 40);
  const std::string t = svg::plot(io::dump(io::trace_to_json(T)));
  EXPECT_NE(t.find("<circle"), std::string::npos);
}
