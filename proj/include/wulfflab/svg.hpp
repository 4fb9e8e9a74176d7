#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "io.hpp"

namespace wulfflab::svg {

/// Fixed six significant digits so that output is stable across runs.
inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

/// World-to-pixel canvas with y pointing up.
class Canvas {
 public:
  Canvas(Box2 world, double width = 640.0, double margin = 20.0) : margin_(margin), width_(width) {
    if (world.empty()) world = {{{0, 0}}, {{1, 1}}};
    const double dx = std::max(world.hi[0] - world.lo[0], 1e-12);
    const double dy = std::max(world.hi[1] - world.lo[1], 1e-12);
    scale_ = (width - 2 * margin) / std::max(dx, dy);
    lo_ = world.lo;
    height_ = dy * scale_ + 2 * margin;
    width_ = dx * scale_ + 2 * margin;
  }

  double px(double x) const { return margin_ + (x - lo_[0]) * scale_; }
  double py(double y) const { return height_ - margin_ - (y - lo_[1]) * scale_; }
  double scale() const { return scale_; }

  void polygon(const std::vector<Loop>& loops, const std::string& style) {
    std::string d;
    for (const auto& l : loops) {
      for (std::size_t i = 0; i < l.size(); ++i) d += (i ? " L" : "M") + fmt(px(l[i][0])) + " " + fmt(py(l[i][1]));
      if (!l.empty()) d += " Z ";
    }
    body_ += "<path d=\"" + d + "\" fill-rule=\"evenodd\" " + style + "/>\n";
  }

  void polyline(const std::vector<Vec2>& pts, const std::string& style) {
    std::string s;
    for (const auto& p : pts) s += fmt(px(p[0])) + "," + fmt(py(p[1])) + " ";
    body_ += "<polyline points=\"" + s + "\" fill=\"none\" " + style + "/>\n";
  }

  void rect(const Vec2& lo, double w, double h, const std::string& style) {
    body_ += "<rect x=\"" + fmt(px(lo[0])) + "\" y=\"" + fmt(py(lo[1] + h)) + "\" width=\"" + fmt(w * scale_) + "\" height=\"" +
             fmt(h * scale_) + "\" " + style + "/>\n";
  }

  void circle(const Vec2& c, double r_px, const std::string& style) {
    body_ += "<circle cx=\"" + fmt(px(c[0])) + "\" cy=\"" + fmt(py(c[1])) + "\" r=\"" + fmt(r_px) + "\" " + style + "/>\n";
  }

  void text_px(double x, double y, const std::string& s, const std::string& style = "font-size=\"12\"") {
    body_ += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" " + style + ">" + s + "</text>\n";
  }

  std::string str() const {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width_) + "\" height=\"" + fmt(height_) + "\" viewBox=\"0 0 " +
           fmt(width_) + " " + fmt(height_) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" + body_ + "</svg>\n";
  }

 private:
  double margin_, width_, height_ = 0.0, scale_ = 1.0;
  Vec2 lo_{};
  std::string body_;
};

/// Blue to red through white, t clamped to [0, 1].
inline std::string heat(double t) {
  t = std::clamp(std::isfinite(t) ? t : 0.0, 0.0, 1.0);
  auto ch = [](double v) { return static_cast<int>(std::lround(255.0 * std::clamp(v, 0.0, 1.0))); };
  const int r = ch(t < 0.5 ? 2 * t : 1.0), g = ch(t < 0.5 ? 2 * t : 2 - 2 * t), b = ch(t < 0.5 ? 1.0 : 2 - 2 * t);
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

inline Box2 loops_box(const std::vector<Loop>& loops) {
  Box2 b;
  for (const auto& l : loops)
    for (const auto& p : l) b.add(p);
  return b;
}

inline void draw_set(Canvas& c, const GeomSet& E, const std::string& style) {
  if (E.is_polygon()) {
    c.polygon(E.polygon().loops, style);
    return;
  }
  if (E.dim() != 2) fail(ErrorCode::InvalidInput, "only planar sets can be drawn");
  const auto& g = E.voxels<2>();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.cells[i]) continue;
    const auto ij = g.coords(i);
    c.rect({{g.origin[0] + ij[0] * g.h, g.origin[1] + ij[1] * g.h}}, g.h, g.h, style);
  }
}

inline Box2 set_box(const GeomSet& E) {
  if (E.is_polygon()) return E.polygon().bbox();
  if (E.dim() != 2) fail(ErrorCode::InvalidInput, "only planar sets can be drawn");
  const auto& g = E.voxels<2>();
  Box2 b;
  b.add(g.origin);
  b.add({{g.origin[0] + g.dims[0] * g.h, g.origin[1] + g.dims[1] * g.h}});
  return b;
}

/// Whitney dump: cube positions are index·side, i.e. relative to the base cube corner.
inline std::string whitney(const io::Table& t) {
  const int L = t.column("level"), X = t.column("ix"), Y = t.column("iy"), S = t.column("side");
  if (L < 0 || X < 0 || Y < 0 || S < 0 || t.column("iz") >= 0) fail(ErrorCode::InvalidInput, "not a planar Whitney dump");
  Box2 b;
  int lmin = 1 << 30, lmax = 0;
  for (const auto& r : t.rows) {
    b.add({{r[X] * r[S], r[Y] * r[S]}});
    b.add({{(r[X] + 1) * r[S], (r[Y] + 1) * r[S]}});
    lmin = std::min(lmin, static_cast<int>(r[L]));
    lmax = std::max(lmax, static_cast<int>(r[L]));
  }
  Canvas c(b);
  const double span = std::max(1, lmax - lmin);
  for (const auto& r : t.rows)
    c.rect({{r[X] * r[S], r[Y] * r[S]}}, r[S], r[S],
           "fill=\"" + heat((r[L] - lmin) / span) + "\" stroke=\"black\" stroke-width=\"0.3\"");
  return c.str();
}

/// Scatter of ratio against param.
inline std::string sweep(const io::Table& t) {
  const int P = t.column("param"), R = t.column("ratio");
  if (P < 0 || R < 0) fail(ErrorCode::InvalidInput, "not a sweep table");
  if (t.rows.empty()) fail(ErrorCode::InvalidInput, "empty sweep table");
  double xlo = t.rows[0][P], xhi = xlo, yhi = 0.0;
  for (const auto& r : t.rows) {
    xlo = std::min(xlo, r[P]);
    xhi = std::max(xhi, r[P]);
    yhi = std::max(yhi, r[R]);
  }
  if (xhi == xlo) xhi = xlo + 1.0;
  if (yhi <= 0.0) yhi = 1.0;
  // Plot in unit coordinates with both axes starting at the data minimum and zero.
  Canvas c({{{0, 0}}, {{1, 1}}}, 480.0, 40.0);
  c.polyline({{{0, 0}}, {{1, 0}}}, "stroke=\"black\"");
  c.polyline({{{0, 0}}, {{0, 1}}}, "stroke=\"black\"");
  for (const auto& r : t.rows) c.circle({{(r[P] - xlo) / (xhi - xlo), r[R] / yhi}}, 4.0, "fill=\"#c03030\"");
  c.text_px(c.px(0.45), c.py(0) + 30, "param [" + fmt(xlo) + ", " + fmt(xhi) + "]");
  c.text_px(4, c.py(1) - 8, "ratio, max " + fmt(yhi));
  return c.str();
}

inline std::string john(const io::json& r) {
  const GeomSet D = io::geomset_from_json(io::detail::field(r, "domain"));
  Canvas c(set_box(D));
  draw_set(c, D, "fill=\"#e8eef8\" stroke=\"#30408f\" stroke-width=\"1\"");
  const auto& curves = io::detail::field(r, "curves");
  for (std::size_t i = 0; i < curves.size(); ++i) {
    std::vector<Vec2> pts;
    for (const auto& p : io::detail::field(curves[i], "points")) pts.push_back(io::detail::vec<2>(p));
    c.polyline(pts, std::string("stroke=\"") + (i == 0 ? "#d02020" : "#e09030") + "\" stroke-width=\"" + (i == 0 ? "2" : "1") + "\"");
  }
  c.circle(io::detail::vec<2>(io::detail::field(r, "center")), 4.0, "fill=\"black\"");
  c.text_px(4, 14, "J = " + fmt(io::detail::number(io::detail::field(r, "J_value"), "J_value")));
  return c.str();
}

/// Heatmap of Tu along the boundary.
inline std::string trace(const io::json& r) {
  const auto& s = io::detail::field(r, "boundary_values");
  if (!s.is_array() || s.empty()) fail(ErrorCode::InvalidInput, "trace report has no boundary values");
  Box2 b;
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& e : s) {
    b.add(io::detail::vec<2>(io::detail::field(e, "x")));
    const double v = io::detail::number(io::detail::field(e, "Tu"), "Tu");
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  Canvas c(b);
  const double span = hi > lo ? hi - lo : 1.0;
  for (const auto& e : s)
    c.circle(io::detail::vec<2>(e.at("x")), 3.0, "fill=\"" + heat((e.at("Tu").get<double>() - lo) / span) + "\"");
  c.text_px(4, 14, "Tu in [" + fmt(lo) + ", " + fmt(hi) + "]");
  return c.str();
}

/// Input set and minimizers; K is drawn when the report carries it.
inline std::string selection(const io::json& r) {
  std::vector<std::pair<GeomSet, std::string>> layers;
  if (r.contains("input")) layers.emplace_back(io::geomset_from_json(r.at("input")), "fill=\"none\" stroke=\"#808080\" stroke-dasharray=\"4 2\"");
  if (r.contains("shape")) {
    const auto K = io::planar(io::shape_from_json(r.at("shape")));
    layers.emplace_back(GeomSet(PolygonSystem(K.vertices())), "fill=\"none\" stroke=\"#208020\"");
  }
  layers.emplace_back(io::geomset_from_json(io::detail::field(r, "minimizer_raw")), "fill=\"none\" stroke=\"#d07020\"");
  layers.emplace_back(io::geomset_from_json(io::detail::field(r, "minimizer")), "fill=\"none\" stroke=\"#2040c0\" stroke-width=\"2\"");
  Box2 b;
  for (const auto& [E, st] : layers) {
    const Box2 e = set_box(E);
    b.add(e.lo);
    b.add(e.hi);
  }
  Canvas c(b);
  for (const auto& [E, st] : layers) draw_set(c, E, st);
  return c.str();
}

inline std::string set(const GeomSet& E) {
  Canvas c(set_box(E));
  draw_set(c, E, "fill=\"#e8eef8\" stroke=\"#30408f\" stroke-width=\"1\"");
  return c.str();
}

/// Picks the renderer from the report's content.
inline std::string plot(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) fail(ErrorCode::InvalidInput, "empty report");
  if (text[first] != '{') {
    const io::Table t = io::parse_csv(text);
    if (t.column("level") >= 0) return whitney(t);
    if (t.column("param") >= 0) return sweep(t);
    fail(ErrorCode::InvalidInput, "unrecognised CSV report");
  }
  const io::json r = io::parse_json(text);
  const std::string kind = r.value("report", std::string());
  if (kind == "john") return john(r);
  if (kind == "trace") return trace(r);
  if (r.contains("minimizer")) return selection(r);
  if (r.contains("loops") || r.value("kind", std::string()) == "voxels") return set(io::geomset_from_json(r));
  if (r.value("kind", std::string()) == "polygon" && r.contains("vertices"))
    return set(GeomSet(PolygonSystem(io::planar(io::shape_from_json(r)).vertices())));
  fail(ErrorCode::InvalidInput, "unrecognised report");
}

}  // namespace wulfflab::svg
