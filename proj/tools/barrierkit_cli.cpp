// barrierkit: admissible-set construction for the constrained Lotka-Volterra
// model from the command line.
//
// Exit codes: 0 success, 1 pipeline incomplete, 2 invalid input.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "barrierkit/mrpi.hpp"
#include "barrierkit/pipeline.hpp"
#include "barrierkit/report.hpp"
#include "barrierkit/scenario_io.hpp"
#include "barrierkit/viability.hpp"

namespace bk = barrierkit;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kIncomplete = 1;
constexpr int kInvalid = 2;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("BARRIERKIT_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw bk::ValidationError("BARRIERKIT_SEED: not an unsigned integer");
    }
  }
  return 42;
}

bk::LoadedScenario load(const std::string& path) {
  bk::LoadedScenario ls = bk::load_scenario(path);
  for (const auto& n : ls.notices) std::cerr << "notice: " << n << "\n";
  return ls;
}

std::string num(double v) { return bk::format_number(v); }

void print_tangency(const std::vector<bk::TangencyPoint>& tps) {
  for (const auto& tp : tps) {
    std::cout << "z" << tp.constraint_id << " = (" << num(tp.z.x1) << ", " << num(tp.z.x2) << ")  lambda = ("
              << num(tp.lambda_final.lambda1) << ", " << num(tp.lambda_final.lambda2) << ")  existence "
              << (tp.existence.exists ? "true" : "false") << " (expression " << num(tp.existence.expression)
              << ")" << (tp.in_g ? "" : "  [outside G]") << "\n";
  }
}

int cmd_tangency(const std::string& scenario_path, const std::string& out_dir) {
  const auto ls = load(scenario_path);
  const auto tps = bk::ultimate_tangency_points(ls.scenario);
  print_tangency(tps);
  if (!out_dir.empty()) {
    bk::PipelineResult partial;
    partial.tangency = tps;
    bk::RunSummary s = bk::summarize(ls.scenario, partial, ls.notices);
    s.assembly = {};
    bk::atomic_write((fs::path(out_dir) / "tangency.json").string(), bk::to_json(s));
  }
  return kOk;
}

int cmd_boundary(const std::string& scenario_path, const std::string& out_dir) {
  const auto ls = load(scenario_path);
  const bk::Scenario& sc = ls.scenario;
  const bk::PipelineResult r = bk::run_pipeline(sc);
  bk::RunSummary s = bk::summarize(sc, r, ls.notices);

  const fs::path out(out_dir);
  for (const auto& c : r.curves) {
    bk::atomic_write((out / bk::curve_file_name(c)).string(), bk::curve_csv(c));
    s.artifacts.push_back(bk::curve_file_name(c));
  }
  if (r.region) {
    bk::atomic_write((out / "boundary.csv").string(), bk::boundary_csv(*r.region));
    s.artifacts.push_back("boundary.csv");
  }
  bk::atomic_write((out / "figure.svg").string(), bk::svg_figure(sc, r));
  s.artifacts.push_back("figure.svg");
  s.artifacts.push_back("summary.json");
  bk::atomic_write((out / "summary.json").string(), bk::to_json(s));

  print_tangency(r.tangency);
  for (const auto& c : s.curves) {
    std::cout << "curve z" << c.origin << ": " << c.switch_count << " switch(es), termination " << c.termination
              << (c.termination == "constraint_hit" ? " g" + std::to_string(c.termination_constraint)
                  : c.termination == "window_exit" ? " x" + std::to_string(c.termination_constraint)
                                                   : std::string())
              << ", " << (c.kept ? "kept" : "discarded: " + c.reason) << "\n";
  }
  for (const auto& d : r.diagnostics) std::cerr << "diagnostic: " << d << "\n";
  if (!r.complete()) {
    std::cerr << "error: assembly failed: " << r.assembly_error << "\n";
    return kIncomplete;
  }
  std::cout << "assembly: ok (" << r.region->arcs.size() << " arcs" << (r.region->open ? ", open" : "")
            << ")\n";
  return kOk;
}

int cmd_check_point(const std::string& scenario_path, double x1, double x2, bool verify, double horizon,
                    int samples, std::optional<std::uint64_t> seed_flag) {
  const auto ls = load(scenario_path);
  const bk::Scenario& sc = ls.scenario;
  const bk::State x{x1, x2, 0.0};
  if (bk::classify_region(x, sc.box) == bk::RegionClass::kOutsideG) {
    std::cout << "classification: outside_G\n";
    if (verify) {
      std::cerr << "error: verification refused: point is not in G\n";
      return kInvalid;
    }
    return kOk;
  }
  const bk::PipelineResult r = bk::run_pipeline(sc);
  if (!r.complete()) {
    std::cerr << "error: assembly failed: " << r.assembly_error << "\n";
    return kIncomplete;
  }
  std::cout << "classification: " << bk::to_string(bk::contains(*r.region, x, sc)) << "\n";
  if (verify) {
    const std::uint64_t seed = seed_flag ? *seed_flag : default_seed();
    const bk::ViabilityReport rep = bk::verify_point_viability(x, sc, horizon, samples, seed);
    std::cout << "viability: " << bk::to_string(rep.verdict) << " (" << rep.n_viable << " of " << rep.n_samples
              << " sampled schedules stay in G over " << num(rep.horizon) << " h, seed " << rep.seed << ")\n";
  }
  return kOk;
}

int cmd_mrpi(const std::string& scenario_path, const std::string& out_dir) {
  const auto ls = load(scenario_path);
  const bk::Scenario& sc = ls.scenario;
  const bool nontrivial = bk::mrpi_is_nontrivial(sc.bounds);
  if (!nontrivial) {
    const bk::MrpiResult m = sc.box.bounded() ? bk::mrpi_region_singleton(sc) : bk::MrpiResult{};
    std::cout << "nontrivial: false\nreason: "
              << (m.reason.empty() ? "U is not a singleton; only the axes remain robustly invariant" : m.reason)
              << "\n";
    return kOk;
  }
  const bk::MrpiResult m = bk::mrpi_region_singleton(sc);
  std::cout << "nontrivial: " << (m.nontrivial ? "true" : "false") << "\nreason: " << m.reason << "\n";
  if (m.region) {
    std::cout << "V* = " << num(m.region->v_star) << ", period " << num(m.region->period) << " h\n";
    if (!out_dir.empty()) {
      const fs::path out(out_dir);
      bk::atomic_write((out / "mrpi_boundary.csv").string(), bk::mrpi_csv(*m.region));
      bk::atomic_write((out / "mrpi.svg").string(), bk::svg_mrpi(sc, m));
    }
  }
  return kOk;
}

int cmd_simulate(const std::string& scenario_path, double x1, double x2, const std::string& schedule_path,
                 double horizon, const std::string& out_path) {
  const auto ls = load(scenario_path);
  const bk::InputSchedule schedule = bk::load_schedule(schedule_path);
  const bk::SimulationResult r = bk::forward_simulate({x1, x2, 0.0}, schedule, horizon, ls.scenario);
  if (!out_path.empty()) bk::atomic_write(out_path, bk::trajectory_csv(r));
  if (r.violation_time) {
    std::cout << "violation: g" << r.violated_constraint << " at t = " << num(*r.violation_time) << " h\n";
  } else {
    std::cout << "violation: none over " << num(horizon) << " h\n";
  }
  return kOk;
}

int cmd_validate(const std::string& scenario_path) {
  const auto ls = load(scenario_path);
  std::cout << "valid: " << (ls.scenario.label.empty() ? scenario_path : ls.scenario.label) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Admissible set of the constrained Lotka-Volterra model via barriers"};
  app.require_subcommand(1);

  std::string scenario;
  std::string out_dir;

  auto* tangency = app.add_subcommand("tangency", "tangency points and existence verdicts");
  tangency->add_option("scenario", scenario, "scenario JSON")->required();
  tangency->add_option("--out", out_dir, "directory for tangency.json");

  auto* boundary = app.add_subcommand("boundary", "full pipeline: curves, filter, assembly, figure");
  boundary->add_option("scenario", scenario, "scenario JSON")->required();
  boundary->add_option("--out", out_dir, "output directory")->required();

  double x1 = 0.0;
  double x2 = 0.0;
  bool verify = false;
  double horizon = 10.0;
  int samples = 200;
  std::optional<std::uint64_t> seed;
  auto* check = app.add_subcommand("check-point", "classify a point against the admissible set");
  check->add_option("scenario", scenario, "scenario JSON")->required();
  check->add_option("x1", x1, "prey biomass")->required();
  check->add_option("x2", x2, "predator biomass")->required();
  check->add_flag("--verify", verify, "run the sampled-control viability check");
  check->add_option("--horizon", horizon, "simulation horizon [h]")->check(CLI::PositiveNumber);
  check->add_option("--samples", samples, "number of sampled schedules")->check(CLI::PositiveNumber);
  check->add_option("--seed", seed, "RNG seed (default: BARRIERKIT_SEED or 42)");

  auto* mrpi = app.add_subcommand("mrpi", "MRPI verdict and singleton-case region");
  mrpi->add_option("scenario", scenario, "scenario JSON")->required();
  mrpi->add_option("--out", out_dir, "directory for the region CSV and SVG");

  std::vector<double> x0;
  std::string schedule_path;
  double sim_horizon = 10.0;
  std::string traj_out;
  auto* simulate = app.add_subcommand("simulate", "forward simulation under an input schedule");
  simulate->add_option("scenario", scenario, "scenario JSON")->required();
  simulate->add_option("--x0", x0, "initial state x1 x2")->expected(2)->required();
  simulate->add_option("--schedule", schedule_path, "schedule CSV (t,u1,u2)")->required();
  simulate->add_option("--horizon", sim_horizon, "horizon [h]")->required();
  simulate->add_option("--out", traj_out, "trajectory CSV");

  auto* validate = app.add_subcommand("validate", "parse and validate a scenario file");
  validate->add_option("scenario", scenario, "scenario JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalid;
  }

  try {
    if (*tangency) return cmd_tangency(scenario, out_dir);
    if (*boundary) return cmd_boundary(scenario, out_dir);
    if (*check) return cmd_check_point(scenario, x1, x2, verify, horizon, samples, seed);
    if (*mrpi) return cmd_mrpi(scenario, out_dir);
    if (*simulate) return cmd_simulate(scenario, x0[0], x0[1], schedule_path, sim_horizon, traj_out);
    if (*validate) return cmd_validate(scenario);
  } catch (const bk::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const bk::PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const bk::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIncomplete;
  }
  return kInvalid;
}
