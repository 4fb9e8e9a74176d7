#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "wulfflab/fixtures.hpp"
#include "wulfflab/io.hpp"
#include "wulfflab/svg.hpp"
#include "wulfflab/verify.hpp"

using namespace wulfflab;
using io::json;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitAssertion = 1;
constexpr int kExitInput = 2;

struct Options {
  std::string input;
  std::string shape;
  std::string out;
  std::string format;
  std::string center;
  std::string suite_file;
  std::string suite = "all";
  int max_level = 10;
  int samples = 400;
  std::uint64_t seed = 1;
  std::optional<double> tol;
};

void emit(const Options& o, const std::string& text) {
  if (o.out.empty())
    std::cout << text;
  else
    io::write_text(o.out, text);
}

std::string format_or(const Options& o, const std::string& fallback, std::initializer_list<const char*> allowed) {
  const std::string f = o.format.empty() ? fallback : o.format;
  for (const char* a : allowed)
    if (f == a) return f;
  fail(ErrorCode::InvalidInput, "format '" + f + "' is not available for this command");
}

/// "fixture:<name>" or a JSON file.
GeomSet load_set(const std::string& spec) {
  if (spec.empty()) fail(ErrorCode::InvalidInput, "--input is required");
  if (spec.rfind("fixture:", 0) == 0) return GeomSet(fixtures::by_name(spec.substr(8)));
  return io::geomset_from_json(io::read_json(spec));
}

/// "fixture:disc|square|hexagon" or a JSON file; tension files are normalized.
io::AnyShape load_shape(const std::string& spec) {
  if (spec.empty()) fail(ErrorCode::InvalidInput, "--shape is required");
  if (spec == "fixture:disc") return fixtures::disc_shape();
  if (spec == "fixture:square") return fixtures::square_shape();
  if (spec == "fixture:hexagon") return fixtures::hexagon_shape();
  const json j = io::read_json(spec);
  const io::AnyShape K = io::shape_from_json(j);
  return j.value("kind", std::string()) == "tension" ? io::normalized(K) : K;
}

PolygonSystem polygon_of(const GeomSet& E) {
  if (!E.is_polygon()) fail(ErrorCode::InvalidInput, "this command needs a polygonal set");
  return E.polygon();
}

Vec2 parse_center(const Options& o, const GeomSet& E) {
  if (o.center.empty()) {
    if (E.is_polygon()) return E.polygon().barycenter();
    fail(ErrorCode::InvalidInput, "--center is required for voxel domains");
  }
  const auto comma = o.center.find(',');
  if (comma == std::string::npos) fail(ErrorCode::InvalidInput, "--center must be x,y");
  try {
    return {{std::stod(o.center.substr(0, comma)), std::stod(o.center.substr(comma + 1))}};
  } catch (const std::exception&) {
    fail(ErrorCode::InvalidInput, "--center must be x,y");
  }
}

json vec_json(const Vec2& v) { return json::array({v[0], v[1]}); }

int cmd_build_wulff(const Options& o) {
  format_or(o, "json", {"json", "svg"});
  if (o.input.empty()) fail(ErrorCode::InvalidInput, "--input is required");
  const io::AnyShape K = io::normalized(io::shape_from_json(io::read_json(o.input)));
  if (o.format == "svg") {
    emit(o, svg::set(GeomSet(PolygonSystem(io::planar(K).vertices()))));
  } else {
    emit(o, io::dump(io::shape_to_json(K)));
  }
  return kExitPass;
}

int cmd_perimeter(const Options& o) {
  format_or(o, "json", {"json"});
  const GeomSet E = load_set(o.input);
  json r = {{"perimeter", perimeter(E)}, {"volume", volume(E)}};
  if (!o.shape.empty()) {
    const io::AnyShape K = load_shape(o.shape);
    if (io::dim_of(K) != E.dim()) fail(ErrorCode::InvalidInput, "set and shape dimensions differ");
    r["anisotropic_perimeter"] = K.index() == 0 ? anisotropic_perimeter<2>(E, std::get<0>(K)) : anisotropic_perimeter<3>(E, std::get<1>(K));
  }
  emit(o, io::dump(r));
  return kExitPass;
}

int cmd_asymmetry(const Options& o) {
  format_or(o, "json", {"json"});
  const PolygonSystem E = polygon_of(load_set(o.input));
  const WulffShape2 K = io::planar(load_shape(o.shape));
  const auto a = asymmetry(E, K);
  emit(o, io::dump({{"asymmetry", a.value},
                    {"translation", vec_json(a.translation)},
                    {"method", {{"grid_step", a.method.grid_step}, {"grid_points", a.method.grid_points},
                                {"refinement_rounds", a.method.refinement_rounds}, {"evaluations", a.method.evaluations}}}}));
  return kExitPass;
}

int cmd_deficit(const Options& o) {
  format_or(o, "json", {"json"});
  const GeomSet E = load_set(o.input);
  const io::AnyShape K = load_shape(o.shape);
  if (io::dim_of(K) != E.dim()) fail(ErrorCode::InvalidInput, "set and shape dimensions differ");
  const auto d = K.index() == 0 ? deficit<2>(E, std::get<0>(K)) : deficit<3>(E, std::get<1>(K));
  json r = {{"P_K", d.p_k}, {"bound", d.bound}, {"deficit", d.deficit}, {"margin", d.p_k - d.bound}};
  if (E.is_polygon() && K.index() == 0) {
    try {
      const auto q = qwi_report(E.polygon(), std::get<0>(K));
      r["asymmetry"] = q.asymmetry;
      r["qwi_ratio"] = q.ratio;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateAsymmetry) throw;
      r["asymmetry"] = nullptr;
      r["qwi_ratio"] = nullptr;
    }
  }
  emit(o, io::dump(r));
  return kExitPass;
}

/// Family file: {"members": [{"param": t, "set": <set>}, ...]}; default is the ellipse family.
int cmd_qwi_sweep(const Options& o) {
  const std::string f = format_or(o, "csv", {"csv", "json", "svg"});
  const WulffShape2 K = o.shape.empty() ? fixtures::disc_shape() : io::planar(load_shape(o.shape));
  std::vector<std::pair<double, PolygonSystem>> family;
  if (o.input.empty()) {
    for (double t : verify::ellipse_parameters()) family.emplace_back(t, verify::qwi_ellipse(K, t));
  } else {
    const json j = io::read_json(o.input);
    for (const auto& m : io::detail::field(j, "members"))
      family.emplace_back(io::detail::number(io::detail::field(m, "param"), "param"), polygon_of(io::geomset_from_json(io::detail::field(m, "set"))));
  }
  std::vector<io::SweepRow> rows(family.size());
  parallel_for(family.size(), [&](std::size_t i) {
    const auto q = qwi_report(family[i].second, K);
    rows[i] = {family[i].first, q.p_k, q.asymmetry, q.deficit, q.ratio};
  });
  const std::string csv = io::sweep_csv(rows);
  if (f == "csv") {
    emit(o, csv);
  } else if (f == "svg") {
    emit(o, svg::sweep(io::parse_csv(csv)));
  } else {
    json a = json::array();
    for (const auto& r : rows) a.push_back({{"param", r.param}, {"P_K", r.p_k}, {"A", r.asymmetry}, {"deficit", r.deficit}, {"ratio", r.ratio}});
    emit(o, io::dump({{"rows", a}}));
  }
  return kExitPass;
}

int cmd_whitney(const Options& o) {
  const std::string f = format_or(o, "csv", {"csv", "json", "svg"});
  const GeomSet E = load_set(o.input);
  if (o.max_level < 0 || o.max_level > kWhitneyMaxLevel) fail(ErrorCode::InvalidInput, "--max-level out of range");
  auto report = [&](const auto& W, const WhitneyCheck& c) {
    return json{{"cubes", c.cubes},
                {"edges", W.edge_count()},
                {"max_level", W.max_level},
                {"distance_violations", c.distance_violations},
                {"ratio_violations", c.ratio_violations},
                {"overlap_violations", c.overlap_violations},
                {"coverage_residual", c.coverage_residual},
                {"uncovered_volume", W.uncovered_volume},
                {"connected", c.connected},
                {"pass", c.pass()}};
  };
  if (E.dim() == 3) {
    if (f == "svg") fail(ErrorCode::InvalidInput, "SVG output is planar only");
    const auto W = whitney_decompose(E.voxels<3>(), o.max_level);
    const auto c = check_whitney<3>(W);
    emit(o, f == "csv" ? io::whitney_csv(W) : io::dump(report(W, c)));
    return c.pass() ? kExitPass : kExitAssertion;
  }
  const auto W = whitney_decompose(E, o.max_level);
  std::function<double(const WhitneyCube<2>&)> exact;
  if (E.is_polygon()) exact = [&](const WhitneyCube<2>& q) { return polygon_cube_distance(E.polygon(), q, W); };
  const auto c = check_whitney<2>(W, exact);
  if (f == "csv") {
    emit(o, io::whitney_csv(W));
  } else if (f == "svg") {
    emit(o, svg::whitney(io::parse_csv(io::whitney_csv(W))));
  } else {
    json r = report(W, c);
    r["overlap_multiplicity"] = overlap_multiplicity(W);
    emit(o, io::dump(r));
  }
  return c.pass() ? kExitPass : kExitAssertion;
}

int cmd_john(const Options& o) {
  const std::string f = format_or(o, "json", {"json", "svg"});
  const GeomSet E = load_set(o.input);
  const Vec2 x0 = parse_center(o, E);
  const auto W = whitney_decompose(E, o.max_level);
  const json r = io::john_to_json(estimate_john(E, x0, W), E);
  emit(o, f == "svg" ? svg::john(r) : io::dump(r));
  return kExitPass;
}

int cmd_trace(const Options& o) {
  const std::string f = format_or(o, "json", {"json", "svg"});
  const GeomSet E = load_set(o.input);
  const PolygonSystem P = polygon_of(E);
  const Vec2 x0 = parse_center(o, E);
  const auto suite = o.suite_file.empty() ? default_trace_suite(P, o.seed) : io::suite_from_json(io::read_json(o.suite_file), P);
  const auto W = whitney_decompose(P, o.max_level);
  const auto rep = trace_constant(P, suite, W, x0, o.samples);
  const json r = io::trace_to_json(rep);
  emit(o, f == "svg" ? svg::trace(r) : io::dump(r));
  return rep.ok() ? kExitPass : kExitAssertion;
}

int cmd_select(const Options& o) {
  const std::string f = format_or(o, "json", {"json", "svg"});
  if (o.input.empty()) fail(ErrorCode::InvalidInput, "--input is required");
  SelectionProblem P = io::problem_from_json(io::read_json(o.input));
  if (o.tol) P.solver.tolerance = *o.tol;
  const auto res = solve_selection(P);
  json r = io::selection_to_json(res);
  r["input"] = io::geomset_to_json(P.input);
  r["shape"] = io::shape_to_json(P.K);
  r["lambda"] = P.lambda;
  r["r0"] = P.r0;
  emit(o, f == "svg" ? svg::selection(r) : io::dump(r));
  return kExitPass;
}

int cmd_verify(const Options& o) {
  format_or(o, "json", {"json"});
  verify::Config cfg;
  cfg.seed = o.seed;
  cfg.max_level = o.max_level;
  verify::suite_criteria(o.suite);  // rejects unknown names before any work
  const auto rep = verify::run_suite(o.suite, cfg, [&](const verify::Criterion& c) {
    (o.out.empty() ? std::cerr : std::cout) << verify::line(c) << std::endl;
  });
  emit(o, io::dump(verify::to_json(rep)));
  return rep.pass() ? kExitPass : kExitAssertion;
}

int cmd_plot(const Options& o) {
  format_or(o, "svg", {"svg"});
  if (o.input.empty()) fail(ErrorCode::InvalidInput, "--input is required");
  emit(o, svg::plot(io::read_text(o.input)));
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wulfflab: anisotropic isoperimetry toolkit"};
  app.require_subcommand(1);
  Options o;
  const std::vector<std::string> formats = {"json", "csv", "svg"};

  auto add_common = [&](CLI::App* s) {
    s->add_option("--out", o.out, "Output path (default stdout)");
    s->add_option("--format", o.format, "Output format")->check(CLI::IsMember(formats));
  };
  auto add_input = [&](CLI::App* s, const std::string& what) { s->add_option("--input", o.input, what); };
  auto add_shape = [&](CLI::App* s) { s->add_option("--shape", o.shape, "Wulff shape JSON or fixture:disc|square|hexagon"); };
  auto add_level = [&](CLI::App* s) { s->add_option("--max-level", o.max_level, "Whitney truncation level (default 10)"); };
  auto add_seed = [&](CLI::App* s) { s->add_option("--seed", o.seed, "Seed for every random choice (default 1)"); };
  auto add_tol = [&](CLI::App* s) { s->add_option("--tol", o.tol, "Solver tolerance"); };
  auto add_center = [&](CLI::App* s) { s->add_option("--center", o.center, "Center x0 as x,y (default barycenter)"); };

  std::vector<std::pair<CLI::App*, int (*)(const Options&)>> commands;
  auto sub = [&](const char* name, const char* help, int (*fn)(const Options&)) {
    CLI::App* s = app.add_subcommand(name, help);
    add_common(s);
    commands.emplace_back(s, fn);
    return s;
  };

  auto* s = sub("build-wulff", "Normalized Wulff shape from a tension file", cmd_build_wulff);
  add_input(s, "Tension JSON");
  s = sub("perimeter", "Euclidean and anisotropic perimeter", cmd_perimeter);
  add_input(s, "Set JSON or fixture:<name>");
  add_shape(s);
  s = sub("asymmetry", "Asymmetry index and optimal translation", cmd_asymmetry);
  add_input(s, "Set JSON or fixture:<name>");
  add_shape(s);
  s = sub("deficit", "Isoperimetric deficit", cmd_deficit);
  add_input(s, "Set JSON or fixture:<name>");
  add_shape(s);
  s = sub("qwi-sweep", "Quantitative inequality ratios over a family", cmd_qwi_sweep);
  add_input(s, "Family JSON (default: ellipse family)");
  add_shape(s);
  s = sub("whitney", "Whitney decomposition dump and checks", cmd_whitney);
  add_input(s, "Set JSON or fixture:<name>");
  add_level(s);
  s = sub("john", "John constant estimate", cmd_john);
  add_input(s, "Set JSON or fixture:<name>");
  add_level(s);
  add_center(s);
  s = sub("trace", "Empirical trace constant", cmd_trace);
  add_input(s, "Set JSON or fixture:<name>");
  add_level(s);
  add_center(s);
  add_seed(s);
  s->add_option("--suite", o.suite_file, "Field suite JSON (default: seeded 20-field suite)");
  s->add_option("--samples", o.samples, "Boundary samples (default 400)");
  s = sub("select", "Penalized selection problem", cmd_select);
  add_input(s, "Problem JSON");
  add_tol(s);
  s = sub("verify", "Run an acceptance suite", cmd_verify);
  s->add_option("suite", o.suite, "wulff, whitney, john, trace, qwi, selection or all");
  add_level(s);
  add_seed(s);
  s = sub("plot", "Render a report or dump as SVG", cmd_plot);
  add_input(s, "Report JSON or CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    for (const auto& [cmd, fn] : commands)
      if (cmd->parsed()) return fn(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
