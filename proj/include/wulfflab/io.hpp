#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "anisotropy.hpp"
#include "geomset.hpp"
#include "isoperimetry.hpp"
#include "john.hpp"
#include "selection.hpp"
#include "trace.hpp"
#include "whitney.hpp"

namespace wulfflab::io {

using json = nlohmann::json;

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::InvalidInput, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::InvalidInput, "cannot write " + path);
  out << text;
}

inline json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidInput, std::string("malformed JSON: ") + e.what());
  }
}

inline json read_json(const std::string& path) { return parse_json(read_text(path)); }

/// Two-space indented, sorted keys, trailing newline.
inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

/// Round-trip decimal for CSV cells.
inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail(ErrorCode::InvalidInput, std::string("missing field '") + key + "'");
  return j.at(key);
}

inline double number(const json& j, const char* what) {
  if (!j.is_number()) fail(ErrorCode::InvalidInput, std::string(what) + " must be a number");
  return j.get<double>();
}

inline std::string text(const json& j, const char* what) {
  if (!j.is_string()) fail(ErrorCode::InvalidInput, std::string(what) + " must be a string");
  return j.get<std::string>();
}

template <std::size_t N>
Vec<N> vec(const json& j) {
  if (!j.is_array() || j.size() != N) fail(ErrorCode::InvalidInput, "expected a " + std::to_string(N) + "-vector");
  Vec<N> v{};
  for (std::size_t i = 0; i < N; ++i) v[i] = number(j[i], "coordinate");
  return v;
}

inline std::vector<double> numbers(const json& j) {
  if (!j.is_array()) fail(ErrorCode::InvalidInput, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : j) out.push_back(number(x, "coordinate"));
  return out;
}

template <std::size_t N>
json to_json(const Vec<N>& v) {
  json a = json::array();
  for (double x : v.c) a.push_back(x);
  return a;
}

template <std::size_t N>
TensionSpec<N> tension_samples(const json& samples) {
  if (!samples.is_array()) fail(ErrorCode::InvalidInput, "samples must be an array");
  TensionSpec<N> T;
  for (const auto& s : samples) T.samples.push_back({vec<N>(field(s, "dir")), number(field(s, "value"), "value")});
  return T;
}

template <std::size_t N>
std::vector<Vec<N>> points(const json& j) {
  if (!j.is_array()) fail(ErrorCode::InvalidInput, "vertices must be an array");
  std::vector<Vec<N>> out;
  for (const auto& p : j) out.push_back(vec<N>(p));
  return out;
}

inline int shape_dim(const json& j) {
  if (j.contains("dim")) {
    const double d = number(j.at("dim"), "dim");
    if (d != 2.0 && d != 3.0) fail(ErrorCode::InvalidInput, "dim must be 2 or 3");
    return static_cast<int>(d);
  }
  return 2;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Shapes

using AnyShape = std::variant<WulffShape2, WulffShape3>;

inline int dim_of(const AnyShape& K) { return K.index() == 0 ? 2 : 3; }

/// A tension file must be normalized separately; polygon and polytope files are taken as given.
inline AnyShape shape_from_json(const json& j) {
  const std::string kind = detail::text(detail::field(j, "kind"), "kind");
  const int n = detail::shape_dim(j);
  if (kind == "polygon") {
    if (n != 2) fail(ErrorCode::InvalidInput, "polygon shapes are planar");
    return WulffShape2::from_vertices(detail::points<2>(detail::field(j, "vertices")));
  }
  if (kind == "polytope") {
    if (n == 2) return WulffShape2::from_vertices(detail::points<2>(detail::field(j, "vertices")));
    return WulffShape3::from_vertices(detail::points<3>(detail::field(j, "vertices")));
  }
  if (kind == "tension") {
    if (n == 2) return wulff_from_tension(detail::tension_samples<2>(detail::field(j, "samples")));
    return wulff_from_tension(detail::tension_samples<3>(detail::field(j, "samples")));
  }
  fail(ErrorCode::InvalidInput, "unknown shape kind '" + kind + "'");
}

inline AnyShape normalized(const AnyShape& K) {
  return std::visit([](const auto& k) -> AnyShape { return normalize_shape(k); }, K);
}

inline WulffShape2 planar(const AnyShape& K) {
  if (K.index() != 0) fail(ErrorCode::InvalidInput, "a planar shape is required");
  return std::get<0>(K);
}

inline json shape_to_json(const WulffShape2& K) {
  json v = json::array();
  for (const auto& p : K.vertices()) v.push_back(detail::to_json(p));
  return {{"kind", "polygon"}, {"vertices", v}};
}

inline json shape_to_json(const WulffShape3& K) {
  json v = json::array(), f = json::array();
  for (const auto& p : K.vertices()) v.push_back(detail::to_json(p));
  for (const auto& t : K.facets()) f.push_back({{"normal", detail::to_json(t.normal)}, {"offset", t.offset}});
  return {{"kind", "polytope"}, {"dim", 3}, {"vertices", v}, {"facets", f}};
}

inline json shape_to_json(const AnyShape& K) {
  return std::visit([](const auto& k) { return shape_to_json(k); }, K);
}

template <std::size_t N>
json tension_to_json(const TensionSpec<N>& T) {
  json s = json::array();
  for (const auto& x : T.samples) s.push_back({{"dir", detail::to_json(x.dir)}, {"value", x.value}});
  return {{"kind", "tension"}, {"dim", N}, {"samples", s}};
}

// ---------------------------------------------------------------------------
// Sets

/// Packs cells eight to a byte, first cell in the high bit, then run-length pairs
/// (count 1..255, byte) as lowercase hex.
inline std::string encode_cells(const std::vector<std::uint8_t>& cells) {
  std::vector<std::uint8_t> bytes((cells.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < cells.size(); ++i)
    if (cells[i]) bytes[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (std::size_t i = 0; i < bytes.size();) {
    std::size_t run = 1;
    while (i + run < bytes.size() && run < 255 && bytes[i + run] == bytes[i]) ++run;
    for (std::uint8_t b : {static_cast<std::uint8_t>(run), bytes[i]}) {
      out.push_back(hex[b >> 4]);
      out.push_back(hex[b & 15]);
    }
    i += run;
  }
  return out;
}

inline std::vector<std::uint8_t> decode_cells(const std::string& data, std::size_t count) {
  if (data.size() % 4 != 0) fail(ErrorCode::InvalidInput, "voxel data length must be a multiple of 4 hex digits");
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    fail(ErrorCode::InvalidInput, "voxel data is not hex");
  };
  std::vector<std::uint8_t> bytes;
  for (std::size_t i = 0; i < data.size(); i += 4) {
    const int run = nibble(data[i]) * 16 + nibble(data[i + 1]);
    const int b = nibble(data[i + 2]) * 16 + nibble(data[i + 3]);
    if (run == 0) fail(ErrorCode::InvalidInput, "zero-length run in voxel data");
    bytes.insert(bytes.end(), run, static_cast<std::uint8_t>(b));
  }
  if (bytes.size() != (count + 7) / 8) fail(ErrorCode::GridMismatch, "voxel data does not match dims");
  std::vector<std::uint8_t> cells(count);
  for (std::size_t i = 0; i < count; ++i) cells[i] = (bytes[i / 8] >> (7 - i % 8)) & 1u;
  return cells;
}

namespace detail {

template <std::size_t N>
VoxelGrid<N> voxels_from_json(const json& j) {
  const double h = number(field(j, "h"), "h");
  if (!(h > 0.0)) fail(ErrorCode::InvalidInput, "voxel spacing must be positive");
  const auto d = numbers(field(j, "dims"));
  if (d.size() != N) fail(ErrorCode::InvalidInput, "dims has the wrong length");
  std::array<int, N> dims{};
  for (std::size_t i = 0; i < N; ++i) {
    if (!(d[i] >= 1.0) || d[i] != std::floor(d[i]) || d[i] > 1e6) fail(ErrorCode::InvalidInput, "dims must be positive integers");
    dims[i] = static_cast<int>(d[i]);
  }
  VoxelGrid<N> g(h, vec<N>(field(j, "origin")), dims);
  g.cells = decode_cells(text(field(j, "data"), "data"), g.size());
  return g;
}

template <std::size_t N>
json voxels_to_json(const VoxelGrid<N>& g) {
  json dims = json::array();
  for (int v : g.dims) dims.push_back(v);
  return {{"kind", "voxels"}, {"dim", N}, {"h", g.h}, {"origin", to_json(g.origin)}, {"dims", dims}, {"data", encode_cells(g.cells)}};
}

}  // namespace detail

inline GeomSet geomset_from_json(const json& j) {
  const std::string kind = detail::text(detail::field(j, "kind"), "kind");
  if (kind == "polygon") {
    const json& loops = detail::field(j, "loops");
    if (!loops.is_array() || loops.empty()) fail(ErrorCode::InvalidInput, "loops must be a non-empty array");
    std::vector<Loop> ls;
    for (const auto& l : loops) ls.push_back(detail::points<2>(l));
    PolygonSystem P(std::move(ls));
    P.validate();
    return GeomSet(std::move(P));
  }
  if (kind == "voxels") {
    if (detail::shape_dim(j) == 2) return GeomSet(detail::voxels_from_json<2>(j));
    return GeomSet(detail::voxels_from_json<3>(j));
  }
  fail(ErrorCode::InvalidInput, "unknown set kind '" + kind + "'");
}

inline json geomset_to_json(const PolygonSystem& P) {
  json loops = json::array();
  for (const auto& l : P.loops) {
    json a = json::array();
    for (const auto& p : l) a.push_back(detail::to_json(p));
    loops.push_back(a);
  }
  return {{"kind", "polygon"}, {"loops", loops}};
}

inline json geomset_to_json(const GeomSet& E) {
  if (E.is_polygon()) return geomset_to_json(E.polygon());
  if (E.dim() == 2) return detail::voxels_to_json(E.voxels<2>());
  return detail::voxels_to_json(E.voxels<3>());
}

// ---------------------------------------------------------------------------
// Trace suites

/// Entries are either a bare name ("constant", "dist_to_boundary") or a single-key
/// object {"constant": c}, {"linear": {a, b}}, {"radial_bump": {center, scale}},
/// {"concentrating": {tip, j}}. The suite is an array or {"fields": [...]}.
inline std::vector<ScalarField> suite_from_json(const json& j, const PolygonSystem& domain) {
  const json& arr = j.is_object() ? detail::field(j, "fields") : j;
  if (!arr.is_array() || arr.empty()) fail(ErrorCode::InvalidInput, "trace suite must be a non-empty array");
  std::shared_ptr<const PlanarDomain> D;
  std::vector<ScalarField> out;
  for (const auto& e : arr) {
    std::string kind;
    json arg;
    if (e.is_string()) {
      kind = e.get<std::string>();
    } else if (e.is_object() && e.size() == 1) {
      kind = e.begin().key();
      arg = e.begin().value();
    } else {
      fail(ErrorCode::InvalidInput, "trace field must be a name or a single-key object");
    }
    if (kind == "constant") {
      out.push_back(ScalarField::constant(arg.is_null() ? 1.0 : detail::number(arg, "constant")));
    } else if (kind == "linear") {
      out.push_back(ScalarField::linear(detail::vec<2>(detail::field(arg, "a")), detail::number(detail::field(arg, "b"), "b")));
    } else if (kind == "radial_bump") {
      const double s = detail::number(detail::field(arg, "scale"), "scale");
      if (!(s > 0.0)) fail(ErrorCode::InvalidInput, "radial_bump scale must be positive");
      out.push_back(ScalarField::radial_bump(detail::vec<2>(detail::field(arg, "center")), s));
    } else if (kind == "concentrating") {
      const double jj = detail::number(detail::field(arg, "j"), "j");
      out.push_back(ScalarField::concentrating(detail::vec<2>(detail::field(arg, "tip")), static_cast<int>(jj)));
    } else if (kind == "dist_to_boundary") {
      if (!D) D = std::make_shared<const PlanarDomain>(domain);
      out.push_back(ScalarField::dist_to_boundary(D));
    } else {
      fail(ErrorCode::InvalidInput, "unknown trace field '" + kind + "'");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Selection problems

inline SelectionProblem problem_from_json(const json& j) {
  const GeomSet E = geomset_from_json(detail::field(j, "input_set"));
  if (!E.is_polygon()) fail(ErrorCode::InvalidInput, "selection input must be a polygon");
  SelectionProblem P{E.polygon(), planar(normalized(shape_from_json(detail::field(j, "shape")))), 3.0, 10.0, {}};
  if (j.contains("lambda")) P.lambda = detail::number(j.at("lambda"), "lambda");
  if (j.contains("r0")) P.r0 = detail::number(j.at("r0"), "r0");
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    if (!s.is_object()) fail(ErrorCode::InvalidInput, "solver must be an object");
    if (s.contains("vertices")) P.solver.vertices = static_cast<int>(detail::number(s.at("vertices"), "vertices"));
    if (s.contains("step")) P.solver.step = detail::number(s.at("step"), "step");
    if (s.contains("tolerance")) P.solver.tolerance = detail::number(s.at("tolerance"), "tolerance");
    if (s.contains("max_sweeps")) P.solver.max_sweeps = static_cast<int>(detail::number(s.at("max_sweeps"), "max_sweeps"));
    if (s.contains("seed")) P.solver.seed = static_cast<std::uint64_t>(detail::number(s.at("seed"), "seed"));
  }
  P.validate();
  return P;
}

// ---------------------------------------------------------------------------
// Reports

inline json energy_to_json(const EnergyBreakdown& e) {
  return {{"perimeter", e.perimeter}, {"asymmetry", e.asymmetry}, {"asymmetry_term", e.asymmetry_term},
          {"volume_term", e.volume_term}, {"total", e.total}, {"clipped", e.clipped}};
}

inline json selection_to_json(const SelectionResult& r) {
  const auto& c = r.checks;
  json checks = {{"minimality", {{"trials", c.minimality.trials},
                                 {"passed", c.minimality.passed},
                                 {"pass_fraction", c.minimality.pass_fraction},
                                 {"worst_violation", c.minimality.worst_violation}}},
                 {"sandwich_delta", c.sandwich_delta},
                 {"J_estimate", c.J_estimate},
                 {"qwi_value", c.qwi_value ? json(*c.qwi_value) : json(nullptr)},
                 {"asymmetry_ratio", c.asymmetry_ratio}};
  return {{"minimizer_raw", geomset_to_json(r.minimizer_raw)},
          {"minimizer", geomset_to_json(r.minimizer)},
          {"lambda_k", r.lambda_k},
          {"energy_raw", energy_to_json(r.energy_raw)},
          {"energy_input", energy_to_json(r.energy_input)},
          {"checks", checks},
          {"sweeps", r.sweeps},
          {"converged", r.converged},
          {"fallback", r.fallback}};
}

inline json curve_to_json(const JohnCurve& c) {
  json pts = json::array(), wit = json::array();
  for (const auto& p : c.points) pts.push_back(detail::to_json(p));
  for (const auto& w : c.witness) wit.push_back({{"length", w.length}, {"dist", w.dist}, {"ratio", w.ratio()}});
  return {{"points", pts}, {"witnesses", wit}, {"max_ratio", c.max_ratio()}, {"length", c.length()}};
}

inline json john_to_json(const JohnEstimate& e, const GeomSet& domain) {
  json curves = json::array(), targets = json::array();
  for (std::size_t i = 0; i < e.curves.size(); ++i) {
    json c = curve_to_json(e.curves[i]);
    c["target"] = e.worst_targets[i];
    c["ratio"] = e.worst_ratios[i];
    curves.push_back(c);
    targets.push_back(e.worst_targets[i]);
  }
  return {{"report", "john"},
          {"J_value", e.J_value},
          {"center", detail::to_json(e.center)},
          {"worst_start", detail::to_json(e.worst_start)},
          {"max_level", e.resolution},
          {"targets", e.targets},
          {"worst_targets", targets},
          {"curves", curves},
          {"domain", geomset_to_json(domain)}};
}

inline json trace_to_json(const TraceReport& r) {
  json fields = json::array(), samples = json::array();
  for (const auto& f : r.fields)
    fields.push_back({{"name", f.name}, {"lhs", f.lhs}, {"rhs", f.rhs}, {"c", f.c}, {"ratio", f.ratio}, {"median_optimal", f.median_optimal}});
  for (const auto& [x, v] : r.boundary_samples) samples.push_back({{"x", detail::to_json(x)}, {"Tu", v}});
  return {{"report", "trace"},      {"fields", fields},          {"c_emp", r.c_emp},
          {"samples", r.samples},   {"skipped", r.skipped},      {"skipped_fraction", r.skipped_fraction},
          {"ok", r.ok()},           {"boundary_values", samples}};
}

// ---------------------------------------------------------------------------
// CSV

template <std::size_t N>
std::string whitney_csv(const WhitneyDecomposition<N>& W) {
  std::string out = N == 2 ? "level,ix,iy,side,dist_lo,dist_hi\n" : "level,ix,iy,iz,side,dist_lo,dist_hi\n";
  for (const auto& q : W.cubes) {
    out += std::to_string(q.level);
    for (auto i : q.index) out += "," + std::to_string(i);
    out += "," + num(q.side) + "," + num(q.dist_lo) + "," + num(q.dist_hi) + "\n";
  }
  return out;
}

struct SweepRow {
  double param = 0.0;
  double p_k = 0.0;
  double asymmetry = 0.0;
  double deficit = 0.0;
  double ratio = 0.0;
};

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "param,P_K,A,deficit,ratio\n";
  for (const auto& r : rows)
    out += num(r.param) + "," + num(r.p_k) + "," + num(r.asymmetry) + "," + num(r.deficit) + "," + num(r.ratio) + "\n";
  return out;
}

/// Header row and numeric rows; rejects ragged or non-numeric input.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    return -1;
  }
};

inline Table parse_csv(const std::string& text) {
  Table t;
  std::istringstream in(text);
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::stringstream ss(s);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    return cells;
  };
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split(line);
    if (t.header.empty()) {
      t.header = cells;
      continue;
    }
    if (cells.size() != t.header.size()) fail(ErrorCode::InvalidInput, "ragged CSV row");
    std::vector<double> row;
    for (const auto& c : cells) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(c, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != c.size() || c.empty()) fail(ErrorCode::InvalidInput, "non-numeric CSV cell '" + c + "'");
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) fail(ErrorCode::InvalidInput, "empty CSV");
  return t;
}

}  // namespace wulfflab::io
