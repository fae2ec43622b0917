#include "barrierkit/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace barrierkit {

namespace {

using nlohmann::json;

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string px(double v) { return fmt("%.3f", v); }

std::string origin_name(const BoundaryArc& arc) {
  switch (arc.kind) {
    case ArcKind::kBarrierCurve: return "z" + std::to_string(arc.origin);
    case ArcKind::kConstraintSegment: return "g" + std::to_string(arc.origin);
    case ArcKind::kWindowSegment: return "window";
  }
  return "";
}

const char* curve_color(int id) {
  static const char* colors[] = {"#000000", "#1f4e99", "#b03a2e", "#1e7b45", "#7d3c98"};
  return colors[id >= 0 && id <= 4 ? id : 0];
}

// Data to pixel mapping for a fixed canvas.
class Canvas {
 public:
  Canvas(double x_lo, double x_hi, double y_lo, double y_hi)
      : x_lo_(x_lo), x_hi_(x_hi), y_lo_(y_lo), y_hi_(y_hi) {}

  double X(double x) const { return kLeft + (x - x_lo_) / (x_hi_ - x_lo_) * kW; }
  double Y(double y) const { return kTop + (y_hi_ - y) / (y_hi_ - y_lo_) * kH; }
  double x_lo() const { return x_lo_; }
  double x_hi() const { return x_hi_; }
  double y_lo() const { return y_lo_; }
  double y_hi() const { return y_hi_; }

  static constexpr double kLeft = 60.0;
  static constexpr double kTop = 20.0;
  static constexpr double kW = 480.0;
  static constexpr double kH = 480.0;
  static constexpr double kWidth = 800.0;
  static constexpr double kHeight = 560.0;

 private:
  double x_lo_, x_hi_, y_lo_, y_hi_;
};

Canvas make_canvas(const Scenario& sc) {
  if (sc.numerics.window) {
    const Window& w = *sc.numerics.window;
    return {w.x1_lo, w.x1_hi, w.x2_lo, w.x2_hi};
  }
  const double w = *sc.box.x1_hi - sc.box.x1_lo;
  const double h = *sc.box.x2_hi - sc.box.x2_lo;
  return {sc.box.x1_lo - 0.05 * w, *sc.box.x1_hi + 0.05 * w, sc.box.x2_lo - 0.05 * h, *sc.box.x2_hi + 0.05 * h};
}

// Drops points closer than a quarter pixel to the last kept one.
std::string polyline_points(const Canvas& c, const std::vector<Point2>& pts) {
  std::ostringstream os;
  double last_x = 0.0;
  double last_y = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double x = c.X(pts[i].x1);
    const double y = c.Y(pts[i].x2);
    const bool ends = i == 0 || i + 1 == pts.size();
    if (!ends && std::hypot(x - last_x, y - last_y) < 0.25) continue;
    if (i > 0) os << ' ';
    os << px(x) << ',' << px(y);
    last_x = x;
    last_y = y;
  }
  return os.str();
}

double nice_step(double span) {
  const double raw = span / 8.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= m * mag) return m * mag;
  }
  return 10.0 * mag;
}

void axes(std::ostringstream& os, const Canvas& c) {
  os << "<rect x=\"" << px(Canvas::kLeft) << "\" y=\"" << px(Canvas::kTop) << "\" width=\"" << px(Canvas::kW)
     << "\" height=\"" << px(Canvas::kH) << "\" fill=\"none\" stroke=\"#000\" stroke-width=\"1\"/>\n";
  const double sx = nice_step(c.x_hi() - c.x_lo());
  for (double v = std::ceil(c.x_lo() / sx) * sx; v <= c.x_hi() + 1e-9; v += sx) {
    const double x = c.X(v);
    const double y = Canvas::kTop + Canvas::kH;
    os << "<line x1=\"" << px(x) << "\" y1=\"" << px(y) << "\" x2=\"" << px(x) << "\" y2=\"" << px(y + 5)
       << "\" stroke=\"#000\"/>\n";
    os << "<text x=\"" << px(x) << "\" y=\"" << px(y + 18) << "\" font-size=\"11\" text-anchor=\"middle\">"
       << format_number(std::round(v / sx) * sx) << "</text>\n";
  }
  const double sy = nice_step(c.y_hi() - c.y_lo());
  for (double v = std::ceil(c.y_lo() / sy) * sy; v <= c.y_hi() + 1e-9; v += sy) {
    const double y = c.Y(v);
    os << "<line x1=\"" << px(Canvas::kLeft - 5) << "\" y1=\"" << px(y) << "\" x2=\"" << px(Canvas::kLeft)
       << "\" y2=\"" << px(y) << "\" stroke=\"#000\"/>\n";
    os << "<text x=\"" << px(Canvas::kLeft - 8) << "\" y=\"" << px(y + 4)
       << "\" font-size=\"11\" text-anchor=\"end\">" << format_number(std::round(v / sy) * sy) << "</text>\n";
  }
  os << "<text x=\"" << px(Canvas::kLeft + Canvas::kW / 2) << "\" y=\"" << px(Canvas::kHeight - 12)
     << "\" font-size=\"13\" text-anchor=\"middle\">x1 (prey) [kg]</text>\n";
  os << "<text x=\"16\" y=\"" << px(Canvas::kTop + Canvas::kH / 2) << "\" font-size=\"13\" "
     << "text-anchor=\"middle\" transform=\"rotate(-90 16 " << px(Canvas::kTop + Canvas::kH / 2)
     << ")\">x2 (predator) [kg]</text>\n";
}

void hline(std::ostringstream& os, const Canvas& c, double y, const char* extra) {
  if (y < c.y_lo() || y > c.y_hi()) return;
  os << "<line x1=\"" << px(c.X(c.x_lo())) << "\" y1=\"" << px(c.Y(y)) << "\" x2=\"" << px(c.X(c.x_hi()))
     << "\" y2=\"" << px(c.Y(y)) << "\" " << extra << "/>\n";
}

void vline(std::ostringstream& os, const Canvas& c, double x, const char* extra) {
  if (x < c.x_lo() || x > c.x_hi()) return;
  os << "<line x1=\"" << px(c.X(x)) << "\" y1=\"" << px(c.Y(c.y_lo())) << "\" x2=\"" << px(c.X(x))
     << "\" y2=\"" << px(c.Y(c.y_hi())) << "\" " << extra << "/>\n";
}

void box_edges(std::ostringstream& os, const Canvas& c, const StateBox& box) {
  const char* style = "stroke=\"#000\" stroke-width=\"1.5\"";
  vline(os, c, box.x1_lo, style);
  hline(os, c, box.x2_lo, style);
  if (box.x1_hi) vline(os, c, *box.x1_hi, style);
  if (box.x2_hi) hline(os, c, *box.x2_hi, style);
}

void legend_entry(std::ostringstream& os, double y, const std::string& swatch, const std::string& label) {
  const double x = Canvas::kLeft + Canvas::kW + 20;
  os << swatch;
  os << "<text x=\"" << px(x + 34) << "\" y=\"" << px(y + 4) << "\" font-size=\"12\">" << label << "</text>\n";
}

std::string legend_line(double y, const char* style) {
  const double x = Canvas::kLeft + Canvas::kW + 20;
  std::ostringstream os;
  os << "<line x1=\"" << px(x) << "\" y1=\"" << px(y) << "\" x2=\"" << px(x + 26) << "\" y2=\"" << px(y) << "\" "
     << style << "/>\n";
  return os.str();
}

std::string legend_dot(double y, const char* style) {
  const double x = Canvas::kLeft + Canvas::kW + 20;
  std::ostringstream os;
  os << "<circle cx=\"" << px(x + 13) << "\" cy=\"" << px(y) << "\" r=\"4\" " << style << "/>\n";
  return os.str();
}

std::vector<Point2> curve_points(const BarrierCurve& curve) {
  std::vector<Point2> pts;
  pts.reserve(curve.path.size());
  for (const auto& s : curve.path) pts.push_back({s.x.x1, s.x.x2});
  return pts;
}

json tangency_json(const TangencySummary& t) {
  return {{"id", t.id},         {"z", {t.z1, t.z2}},          {"lambda_final", {t.lambda1, t.lambda2}},
          {"exists", t.exists}, {"expression", t.expression}, {"in_g", t.in_g}};
}

}  // namespace

std::string format_number(double v) {
  if (v == 0.0) v = 0.0;  // no negative zero
  return fmt("%.12g", v);
}

std::string curve_file_name(const BarrierCurve& curve) {
  return "curve_z" + std::to_string(curve.origin.constraint_id) + ".csv";
}

RunSummary summarize(const Scenario& sc, const PipelineResult& r, const std::vector<std::string>& notices) {
  RunSummary s;
  s.label = sc.label;
  s.notices = notices;
  for (const TangencyPoint& tp : r.tangency) {
    s.tangency.push_back({tp.constraint_id, tp.z.x1, tp.z.x2, tp.lambda_final.lambda1, tp.lambda_final.lambda2,
                          tp.existence.exists, tp.existence.expression, tp.in_g});
  }
  for (const SwitchingLine& l : switching_lines(sc)) {
    s.switching_lines.push_back({l.id, l.axis, l.value, l.input, l.from_level, l.to_level});
  }
  for (const BarrierCurve& c : r.curves) {
    CurveSummary cs;
    cs.origin = c.origin.constraint_id;
    cs.switch_count = static_cast<int>(c.switches.size());
    cs.termination = to_string(c.termination);
    cs.termination_constraint = c.termination_constraint;
    cs.kept = c.verdict.kept;
    cs.reason = c.verdict.reason;
    cs.unusual = c.verdict.unusual;
    cs.samples = static_cast<int>(c.path.size());
    cs.max_hamiltonian = max_hamiltonian_residual(c, sc.params);
    cs.csv = curve_file_name(c);
    s.curves.push_back(std::move(cs));
  }
  if (r.region) {
    s.assembly.status = "ok";
    s.assembly.open = r.region->open;
    for (const BoundaryArc& arc : r.region->arcs) s.assembly.arcs.push_back(to_string(arc.kind) + ":" + origin_name(arc));
  } else {
    s.assembly.status = "failed";
    s.assembly.message = r.assembly_error;
  }
  const MrpiResult m = mrpi_is_nontrivial(sc.bounds) && sc.box.bounded() ? mrpi_region_singleton(sc) : MrpiResult{};
  s.mrpi.nontrivial = mrpi_is_nontrivial(sc.bounds);
  s.mrpi.reason = mrpi_is_nontrivial(sc.bounds)
                      ? (m.reason.empty() ? "U is a singleton" : m.reason)
                      : "U is not a singleton: the MRPI reduces to the trivial invariant axes";
  s.diagnostics = r.diagnostics;
  return s;
}

std::string to_json(const RunSummary& s) {
  json j;
  j["label"] = s.label;
  j["notices"] = s.notices;
  j["tangency"] = json::array();
  for (const auto& t : s.tangency) j["tangency"].push_back(tangency_json(t));
  j["switching_lines"] = json::array();
  for (const auto& l : s.switching_lines) {
    j["switching_lines"].push_back({{"id", l.id},
                                    {"axis", l.axis},
                                    {"value", l.value},
                                    {"input", l.input},
                                    {"from_level", l.from_level},
                                    {"to_level", l.to_level}});
  }
  j["curves"] = json::array();
  for (const auto& c : s.curves) {
    j["curves"].push_back({{"origin", c.origin},
                           {"switch_count", c.switch_count},
                           {"termination", c.termination},
                           {"termination_constraint", c.termination_constraint},
                           {"kept", c.kept},
                           {"reason", c.reason},
                           {"unusual", c.unusual},
                           {"samples", c.samples},
                           {"max_hamiltonian", c.max_hamiltonian},
                           {"csv", c.csv}});
  }
  j["assembly"] = {{"status", s.assembly.status},
                   {"message", s.assembly.message},
                   {"open", s.assembly.open},
                   {"arcs", s.assembly.arcs}};
  j["mrpi"] = {{"nontrivial", s.mrpi.nontrivial}, {"reason", s.mrpi.reason}};
  j["diagnostics"] = s.diagnostics;
  j["artifacts"] = s.artifacts;
  return j.dump(2) + "\n";
}

RunSummary run_summary_from_json(const std::string& text) {
  const json j = json::parse(text);
  RunSummary s;
  s.label = j.at("label").get<std::string>();
  s.notices = j.at("notices").get<std::vector<std::string>>();
  for (const auto& t : j.at("tangency")) {
    s.tangency.push_back({t.at("id").get<int>(), t.at("z")[0].get<double>(), t.at("z")[1].get<double>(),
                          t.at("lambda_final")[0].get<double>(), t.at("lambda_final")[1].get<double>(),
                          t.at("exists").get<bool>(), t.at("expression").get<double>(), t.at("in_g").get<bool>()});
  }
  for (const auto& l : j.at("switching_lines")) {
    s.switching_lines.push_back({l.at("id").get<int>(), l.at("axis").get<int>(), l.at("value").get<double>(),
                                 l.at("input").get<int>(), l.at("from_level").get<double>(),
                                 l.at("to_level").get<double>()});
  }
  for (const auto& c : j.at("curves")) {
    CurveSummary cs;
    cs.origin = c.at("origin").get<int>();
    cs.switch_count = c.at("switch_count").get<int>();
    cs.termination = c.at("termination").get<std::string>();
    cs.termination_constraint = c.at("termination_constraint").get<int>();
    cs.kept = c.at("kept").get<bool>();
    cs.reason = c.at("reason").get<std::string>();
    cs.unusual = c.at("unusual").get<bool>();
    cs.samples = c.at("samples").get<int>();
    cs.max_hamiltonian = c.at("max_hamiltonian").get<double>();
    cs.csv = c.at("csv").get<std::string>();
    s.curves.push_back(std::move(cs));
  }
  const json& a = j.at("assembly");
  s.assembly.status = a.at("status").get<std::string>();
  s.assembly.message = a.at("message").get<std::string>();
  s.assembly.open = a.at("open").get<bool>();
  s.assembly.arcs = a.at("arcs").get<std::vector<std::string>>();
  s.mrpi.nontrivial = j.at("mrpi").at("nontrivial").get<bool>();
  s.mrpi.reason = j.at("mrpi").at("reason").get<std::string>();
  s.diagnostics = j.at("diagnostics").get<std::vector<std::string>>();
  s.artifacts = j.at("artifacts").get<std::vector<std::string>>();
  return s;
}

std::string curve_csv(const BarrierCurve& curve) {
  std::ostringstream os;
  os << "t,x1,x2,lambda1,lambda2,u1,u2,event\n";
  for (const CurveSample& s : curve.path) {
    os << format_number(s.t) << ',' << format_number(s.x.x1) << ',' << format_number(s.x.x2) << ','
       << format_number(s.lambda.lambda1) << ',' << format_number(s.lambda.lambda2) << ','
       << format_number(s.u.u1) << ',' << format_number(s.u.u2) << ',' << s.event << '\n';
  }
  return os.str();
}

std::string boundary_csv(const AdmissibleRegion& region) {
  std::ostringstream os;
  os << "arc_index,arc_kind,origin,x1,x2\n";
  for (std::size_t i = 0; i < region.arcs.size(); ++i) {
    const BoundaryArc& arc = region.arcs[i];
    for (const Point2& p : arc.points) {
      os << i << ',' << to_string(arc.kind) << ',' << origin_name(arc) << ',' << format_number(p.x1) << ','
         << format_number(p.x2) << '\n';
    }
  }
  return os.str();
}

std::string trajectory_csv(const SimulationResult& r) {
  std::ostringstream os;
  os << "t,x1,x2,u1,u2\n";
  for (const TrajectorySample& s : r.path) {
    os << format_number(s.t) << ',' << format_number(s.x.x1) << ',' << format_number(s.x.x2) << ','
       << format_number(s.u.u1) << ',' << format_number(s.u.u2) << '\n';
  }
  return os.str();
}

std::string mrpi_csv(const MrpiRegion& region) {
  std::ostringstream os;
  os << "x1,x2\n";
  for (const State& s : region.boundary) os << format_number(s.x1) << ',' << format_number(s.x2) << '\n';
  return os.str();
}

std::string svg_figure(const Scenario& sc, const PipelineResult& r) {
  const Canvas c = make_canvas(sc);
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px(Canvas::kWidth) << "\" height=\""
     << px(Canvas::kHeight) << "\" viewBox=\"0 0 " << px(Canvas::kWidth) << ' ' << px(Canvas::kHeight)
     << "\" font-family=\"sans-serif\">\n";
  os << "<title>" << (sc.label.empty() ? "admissible set" : sc.label) << "</title>\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
  os << "<defs><clipPath id=\"plot\"><rect x=\"" << px(Canvas::kLeft) << "\" y=\"" << px(Canvas::kTop)
     << "\" width=\"" << px(Canvas::kW) << "\" height=\"" << px(Canvas::kH) << "\"/></clipPath></defs>\n";
  os << "<g clip-path=\"url(#plot)\">\n";

  if (r.region) {
    os << "<polygon points=\"" << polyline_points(c, r.region->loop()) << "\" fill=\"#7fb3d5\" "
       << "fill-opacity=\"0.25\" stroke=\"none\"/>\n";
  }
  box_edges(os, c, sc.box);

  const char* dashed = "stroke=\"#777\" stroke-width=\"1\" stroke-dasharray=\"6,4\"";
  for (const SwitchingLine& l : switching_lines(sc)) {
    if (l.axis == 1) {
      vline(os, c, l.value, dashed);
    } else {
      hline(os, c, l.value, dashed);
    }
  }

  for (const BarrierCurve& curve : r.curves) {
    const int id = curve.origin.constraint_id;
    os << "<polyline points=\"" << polyline_points(c, curve_points(curve)) << "\" fill=\"none\" stroke=\""
       << curve_color(id) << "\" stroke-width=\"2\""
       << (curve.verdict.kept ? "" : " stroke-dasharray=\"8,3,2,3\"") << "/>\n";
  }
  for (const BarrierCurve& curve : r.curves) {
    for (const SwitchEvent& sw : curve.switches) {
      os << "<circle cx=\"" << px(c.X(sw.x.x1)) << "\" cy=\"" << px(c.Y(sw.x.x2))
         << "\" r=\"4\" fill=\"#999\" stroke=\"#555\"/>\n";
    }
  }
  os << "</g>\n";

  for (const SwitchingLine& l : switching_lines(sc)) {
    const bool vertical = l.axis == 1;
    if ((vertical && (l.value < c.x_lo() || l.value > c.x_hi())) ||
        (!vertical && (l.value < c.y_lo() || l.value > c.y_hi()))) {
      continue;
    }
    const double x = vertical ? c.X(l.value) + 3 : Canvas::kLeft + 4;
    const double y = vertical ? Canvas::kTop + Canvas::kH - 6 : c.Y(l.value) - 3;
    os << "<text x=\"" << px(x) << "\" y=\"" << px(y) << "\" font-size=\"10\" fill=\"#555\">L" << l.id
       << "</text>\n";
  }
  for (const TangencyPoint& tp : r.tangency) {
    if (!tp.in_g || tp.z.x1 < c.x_lo() || tp.z.x1 > c.x_hi() || tp.z.x2 < c.y_lo() || tp.z.x2 > c.y_hi()) {
      continue;
    }
    const double x = c.X(tp.z.x1);
    const double y = c.Y(tp.z.x2);
    os << "<circle cx=\"" << px(x) << "\" cy=\"" << px(y) << "\" r=\"4\" fill=\""
       << (tp.existence.exists ? "#000" : "#fff") << "\" stroke=\"#000\"/>\n";
    os << "<text x=\"" << px(x + 6) << "\" y=\"" << px(y - 6) << "\" font-size=\"12\">z" << tp.constraint_id
       << "</text>\n";
  }

  axes(os, c);

  double ly = Canvas::kTop + 10;
  legend_entry(os, ly, legend_line(ly, "stroke=\"#000\" stroke-width=\"1.5\""), "constraints");
  ly += 20;
  legend_entry(os, ly, legend_line(ly, dashed), "switching lines");
  ly += 20;
  legend_entry(os, ly, legend_dot(ly, "fill=\"#000\" stroke=\"#000\""), "tangency points");
  ly += 20;
  legend_entry(os, ly, legend_dot(ly, "fill=\"#999\" stroke=\"#555\""), "input switches");
  ly += 20;
  for (const BarrierCurve& curve : r.curves) {
    const int id = curve.origin.constraint_id;
    const std::string style = std::string("stroke=\"") + curve_color(id) + "\" stroke-width=\"2\"" +
                              (curve.verdict.kept ? "" : " stroke-dasharray=\"8,3,2,3\"");
    legend_entry(os, ly, legend_line(ly, style.c_str()),
                 "z" + std::to_string(id) + (curve.verdict.kept ? " curve" : " curve (discarded)"));
    ly += 20;
  }
  if (r.region) {
    const double x = Canvas::kLeft + Canvas::kW + 20;
    legend_entry(os, ly,
                 "<rect x=\"" + px(x) + "\" y=\"" + px(ly - 6) +
                     "\" width=\"26\" height=\"12\" fill=\"#7fb3d5\" fill-opacity=\"0.25\"/>\n",
                 r.region->open ? "admissible set (truncated)" : "admissible set");
  }
  os << "</svg>\n";
  return os.str();
}

std::string svg_mrpi(const Scenario& sc, const MrpiResult& m) {
  const Canvas c = make_canvas(sc);
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px(Canvas::kWidth) << "\" height=\""
     << px(Canvas::kHeight) << "\" viewBox=\"0 0 " << px(Canvas::kWidth) << ' ' << px(Canvas::kHeight)
     << "\" font-family=\"sans-serif\">\n";
  os << "<title>MRPI " << sc.label << "</title>\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
  if (m.region) {
    std::vector<Point2> pts;
    for (const State& s : m.region->boundary) pts.push_back({s.x1, s.x2});
    os << "<polygon points=\"" << polyline_points(c, pts)
       << "\" fill=\"#a9dfbf\" fill-opacity=\"0.5\" stroke=\"#1e7b45\" stroke-width=\"2\"/>\n";
    os << "<circle cx=\"" << px(c.X(m.region->equilibrium.x1)) << "\" cy=\"" << px(c.Y(m.region->equilibrium.x2))
       << "\" r=\"4\" fill=\"#000\"/>\n";
    os << "<text x=\"" << px(c.X(m.region->equilibrium.x1) + 6) << "\" y=\""
       << px(c.Y(m.region->equilibrium.x2) - 6) << "\" font-size=\"12\">e</text>\n";
  }
  box_edges(os, c, sc.box);
  axes(os, c);
  const double ly = Canvas::kTop + 10;
  legend_entry(os, ly, legend_line(ly, "stroke=\"#1e7b45\" stroke-width=\"2\""), "V = V* (MRPI boundary)");
  os << "</svg>\n";
  return os.str();
}

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

}  // namespace barrierkit
