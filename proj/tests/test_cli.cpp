#include <gtest/gtest.h>
#include <sys/wait.h>

#include <filesystem>
#include <fstream>

#include "wulfflab/fixtures.hpp"
#include "wulfflab/io.hpp"

using namespace wulfflab;
using io::json;
namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("wulfflab_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write(const std::string& name, const json& j) const {
    io::write_text(path(name), io::dump(j));
    return path(name);
  }

  /// Exit status of the CLI; stdout and stderr go to files in the temp directory.
  int run(const std::string& args, const std::string& env = "") const {
    const std::string cmd = env + " " + std::string(WULFFLAB_CLI) + " " + args + " >" + path("stdout") + " 2>" + path("stderr");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  std::string out() const { return io::read_text(path("stdout")); }

  static json tension(int count) {
    json s = json::array();
    for (int i = 0; i < count; ++i) {
      const double t = 2.0 * kPi * i / count;
      s.push_back({{"dir", {std::cos(t), std::sin(t)}}, {"value", 1.0}});
    }
    return {{"kind", "tension"}, {"samples", s}};
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, BuildWulffConstantTension) {
  ASSERT_EQ(run("build-wulff --input " + write("t.json", tension(360))), 0);
  const auto K = io::planar(io::shape_from_json(json::parse(out())));
  EXPECT_NEAR(K.volume(), kPi, 1e-9);
  EXPECT_GE(K.vertices().size(), 300u);
}

TEST_F(Cli, BuildWulffFourDirectionsIsSquare) {
  ASSERT_EQ(run("build-wulff --input " + write("t.json", tension(4))), 0);
  const auto K = io::planar(io::shape_from_json(json::parse(out())));
  EXPECT_EQ(K.vertices().size(), 4u);
  EXPECT_NEAR(K.volume(), kPi, 1e-9);
}

TEST_F(Cli, BuildWulffTwoDirectionsIsInputError) {
  EXPECT_EQ(run("build-wulff --input " + write("t.json", tension(2))), 2);
  EXPECT_NE(io::read_text(path("stderr")).find("UnboundedShape"), std::string::npos);
}

TEST_F(Cli, InputErrors) {
  EXPECT_EQ(run("verify nosuch"), 2);
  EXPECT_EQ(run("perimeter --input " + path("missing.json")), 2);
  io::write_text(path("bad.json"), "{\"kind\": \"polygon\", \"loops\": [[[0,0],[1,");
  EXPECT_EQ(run("perimeter --input " + path("bad.json")), 2);
  EXPECT_EQ(run("whitney --input fixture:square --max-level 99"), 2);
  EXPECT_EQ(run("whitney --input fixture:square --format xml"), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run(""), 2);
}

TEST_F(Cli, PerimeterOfSquare) {
  ASSERT_EQ(run("perimeter --input fixture:square --shape fixture:square"), 0);
  const json r = json::parse(out());
  // The fixture is [-1, 1]²; each side has length 2 and support value √π/2.
  EXPECT_NEAR(r["perimeter"].get<double>(), 8.0, 1e-12);
  EXPECT_NEAR(r["volume"].get<double>(), 4.0, 1e-12);
  EXPECT_NEAR(r["anisotropic_perimeter"].get<double>(), 4.0 * std::sqrt(kPi), 1e-9);
}

TEST_F(Cli, WhitneyCsvAndPlot) {
  ASSERT_EQ(run("whitney --input fixture:lshape --max-level 6 --out " + path("w.csv")), 0);
  const auto t = io::parse_csv(io::read_text(path("w.csv")));
  EXPECT_GT(t.rows.size(), 10u);
  ASSERT_EQ(run("plot --input " + path("w.csv")), 0);
  EXPECT_EQ(out().rfind("<svg", 0), 0u);
}

TEST_F(Cli, JohnJsonAndPlot) {
  ASSERT_EQ(run("john --input fixture:square --max-level 7 --out " + path("j.json")), 0);
  const json r = io::read_json(path("j.json"));
  EXPECT_EQ(r["report"], "john");
  EXPECT_GE(r["J_value"].get<double>(), 1.0);
  ASSERT_EQ(run("plot --input " + path("j.json")), 0);
  EXPECT_NE(out().find("</svg>"), std::string::npos);
}

TEST_F(Cli, TraceWithSuiteFile) {
  const std::string suite = write("s.json", json::parse(R"(["constant", {"linear": {"a": [1, 0], "b": 0}}])"));
  ASSERT_EQ(run("trace --input fixture:disc --center 0,0 --max-level 8 --samples 100 --suite " + suite), 0);
  const json r = json::parse(out());
  EXPECT_EQ(r["fields"].size(), 2u);
  EXPECT_TRUE(r["ok"].get<bool>());
}

TEST_F(Cli, SelectOnWulffShape) {
  json p;
  p["input_set"] = io::geomset_to_json(fixtures::as_polygon(fixtures::hexagon_shape()));
  p["shape"] = io::shape_to_json(fixtures::hexagon_shape());
  ASSERT_EQ(run("select --input " + write("p.json", p) + " --out " + path("s.json")), 0);
  const json r = io::read_json(path("s.json"));
  EXPECT_LE(r["checks"]["sandwich_delta"].get<double>(), 1e-3);
  ASSERT_EQ(run("plot --input " + path("s.json")), 0);
}

TEST_F(Cli, QwiSweepDefaultFamily) {
  ASSERT_EQ(run("qwi-sweep"), 0);
  const auto t = io::parse_csv(out());
  EXPECT_EQ(t.rows.size(), 4u);
  for (const auto& row : t.rows) EXPECT_GT(row[t.column("ratio")], 0.0);
}

TEST_F(Cli, VerifyWhitneySuite) {
  EXPECT_EQ(run("verify whitney --out " + path("v.json")), 0);
  const json r = io::read_json(path("v.json"));
  EXPECT_TRUE(r["pass"].get<bool>());
  EXPECT_NE(out().find("PASS"), std::string::npos);
}

TEST_F(Cli, OutputsAreByteIdentical) {
  for (const std::string cmd : {"whitney --input fixture:cusp --max-level 8", "john --input fixture:lshape --center 0.25,0.25 --max-level 7",
                                "asymmetry --input fixture:lshape --shape fixture:hexagon"}) {
    ASSERT_EQ(run(cmd + " --out " + path("a")), 0) << cmd;
    ASSERT_EQ(run(cmd + " --out " + path("b")), 0) << cmd;
    EXPECT_EQ(io::read_text(path("a")), io::read_text(path("b"))) << cmd;
  }
}

TEST_F(Cli, ThreadCountDoesNotChangeResults) {
  const std::string cmd = "john --input fixture:disc --center 0,0 --max-level 8 --out ";
  ASSERT_EQ(run(cmd + path("a"), "WULFFLAB_THREADS=1"), 0);
  ASSERT_EQ(run(cmd + path("b"), "WULFFLAB_THREADS=4"), 0);
  EXPECT_EQ(io::read_text(path("a")), io::read_text(path("b")));
}
