#include "barrierkit/scenario_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace barrierkit {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ValidationError(path + ": " + what);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path.empty() ? key : path + "." + key, "missing field");
  return *it;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

double number_field(const json& obj, const std::string& key, const std::string& path) {
  return number(require(obj, key, path), path.empty() ? key : path + "." + key);
}

std::pair<double, double> pair_field(const json& obj, const std::string& key, const std::string& path,
                                     bool allow_null_hi, bool* hi_null) {
  const std::string p = path + "." + key;
  const json& v = require(obj, key, path);
  if (!v.is_array() || v.size() != 2) fail(p, "expected a two-element array");
  const double lo = number(v[0], p + "[0]");
  if (v[1].is_null()) {
    if (!allow_null_hi) fail(p + "[1]", "null is not allowed here");
    *hi_null = true;
    return {lo, 0.0};
  }
  if (hi_null) *hi_null = false;
  return {lo, number(v[1], p + "[1]")};
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& path) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) fail(path.empty() ? it.key() : path + "." + it.key(), "unknown field");
  }
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

LoadedScenario parse_scenario(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("scenario: malformed JSON (") + e.what() + ")");
  }
  if (!root.is_object()) fail("scenario", "top level must be an object");
  check_keys(root, {"label", "params", "raw_bio", "overrides", "input_bounds", "state_box", "window", "numerics"},
             "");

  LoadedScenario out;
  Scenario& sc = out.scenario;

  if (root.contains("label")) {
    if (!root["label"].is_string()) fail("label", "expected a string");
    sc.label = root["label"].get<std::string>();
  }

  const bool has_params = root.contains("params");
  const bool has_raw = root.contains("raw_bio");
  if (has_params == has_raw) fail("params", "exactly one of params and raw_bio must be given");
  if (has_params) {
    const json& p = root["params"];
    check_keys(p, {"alpha", "beta", "gamma", "delta"}, "params");
    sc.params = {number_field(p, "alpha", "params"), number_field(p, "beta", "params"),
                 number_field(p, "gamma", "params"), number_field(p, "delta", "params")};
  } else {
    const json& r = root["raw_bio"];
    check_keys(r, {"k1", "k2", "k3", "k4", "k5", "eta1"}, "raw_bio");
    RawBioParams raw{number_field(r, "k1", "raw_bio"), number_field(r, "k2", "raw_bio"),
                     number_field(r, "k3", "raw_bio"), number_field(r, "k4", "raw_bio"),
                     number_field(r, "k5", "raw_bio"), number_field(r, "eta1", "raw_bio")};
    sc.params = derive_params(raw);
  }

  if (root.contains("overrides")) {
    const json& o = root["overrides"];
    check_keys(o, {"zero_alpha_gamma"}, "overrides");
    if (o.contains("zero_alpha_gamma")) {
      if (!o["zero_alpha_gamma"].is_boolean()) fail("overrides.zero_alpha_gamma", "expected a boolean");
      if (o["zero_alpha_gamma"].get<bool>()) {
        sc.params.alpha = 0.0;
        sc.params.gamma = 0.0;
      }
    }
  }

  const json& ib = require(root, "input_bounds", "");
  check_keys(ib, {"u1", "u2"}, "input_bounds");
  auto bounds_pair = [&](const char* key, double& lo, double& hi) {
    auto [a, b] = pair_field(ib, key, "input_bounds", false, nullptr);
    if (a > b) {
      std::ostringstream os;
      os << "input_bounds." << key << " given as [" << a << ", " << b << "], normalized to [" << b << ", " << a
         << "]";
      out.notices.push_back(os.str());
      std::swap(a, b);
    }
    lo = a;
    hi = b;
  };
  bounds_pair("u1", sc.bounds.u1_min, sc.bounds.u1_max);
  bounds_pair("u2", sc.bounds.u2_min, sc.bounds.u2_max);

  const json& bx = require(root, "state_box", "");
  check_keys(bx, {"x1", "x2"}, "state_box");
  bool open1 = false;
  bool open2 = false;
  auto [x1_lo, x1_hi] = pair_field(bx, "x1", "state_box", true, &open1);
  auto [x2_lo, x2_hi] = pair_field(bx, "x2", "state_box", true, &open2);
  sc.box.x1_lo = x1_lo;
  sc.box.x2_lo = x2_lo;
  if (!open1) sc.box.x1_hi = x1_hi;
  if (!open2) sc.box.x2_hi = x2_hi;

  if (root.contains("window")) {
    const json& w = root["window"];
    check_keys(w, {"x1", "x2"}, "window");
    auto [w1_lo, w1_hi] = pair_field(w, "x1", "window", false, nullptr);
    auto [w2_lo, w2_hi] = pair_field(w, "x2", "window", false, nullptr);
    sc.numerics.window = Window{w1_lo, w1_hi, w2_lo, w2_hi};
  }

  if (root.contains("numerics")) {
    const json& n = root["numerics"];
    check_keys(n,
               {"step_h", "event_time_tol", "max_arc_time", "hamiltonian_drift_tol", "filter_resolution",
                "junction_tol", "boundary_tol", "close_tol"},
               "numerics");
    auto opt = [&](const char* key, double& target) {
      if (n.contains(key)) target = number(n[key], std::string("numerics.") + key);
    };
    opt("step_h", sc.numerics.step_h);
    opt("event_time_tol", sc.numerics.event_time_tol);
    opt("max_arc_time", sc.numerics.max_arc_time);
    opt("hamiltonian_drift_tol", sc.numerics.hamiltonian_drift_tol);
    opt("filter_resolution", sc.numerics.filter_resolution);
    opt("junction_tol", sc.numerics.junction_tol);
    opt("boundary_tol", sc.numerics.boundary_tol);
    opt("close_tol", sc.numerics.close_tol);
  }

  sc.validate();
  return out;
}

LoadedScenario load_scenario(const std::string& path) { return parse_scenario(read_file(path)); }

InputSchedule parse_schedule(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("schedule: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,u1,u2") throw ValidationError("schedule: header must be t,u1,u2");
  InputSchedule schedule;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string a, b, c;
    if (!std::getline(fields, a, ',') || !std::getline(fields, b, ',') || !std::getline(fields, c)) {
      throw ValidationError("schedule: row " + std::to_string(row) + " needs three fields");
    }
    try {
      std::size_t pa = 0, pb = 0, pc = 0;
      ScheduleSegment seg{std::stod(a, &pa), {std::stod(b, &pb), std::stod(c, &pc)}};
      if (pa != a.size() || pb != b.size() || pc != c.size()) throw std::invalid_argument("trailing");
      schedule.segments.push_back(seg);
    } catch (const std::logic_error&) {
      throw ValidationError("schedule: row " + std::to_string(row) + " is not numeric");
    }
  }
  if (schedule.segments.empty()) throw ValidationError("schedule: no segments");
  return schedule;
}

InputSchedule load_schedule(const std::string& path) { return parse_schedule(read_file(path)); }

}  // namespace barrierkit
