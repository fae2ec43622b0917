#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "barrierkit/report.hpp"
#include "barrierkit/scenario_io.hpp"
#include "support.hpp"

namespace bk = barrierkit;
using test_support::bundled;

namespace {

const char* kMinimal = R"({
  "params": {"alpha": 0.0, "beta": 10.8, "gamma": 0.0, "delta": 5.94},
  "input_bounds": {"u1": [10, 20], "u2": [-10, -20]},
  "state_box": {"x1": [0.5, 10], "x2": [0.5, null]},
  "window": {"x1": [0, 11], "x2": [0, 12]}
})";

std::string error_of(const std::string& text) {
  try {
    bk::parse_scenario(text);
  } catch (const bk::ValidationError& e) {
    return e.what();
  }
  return "";
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST_SUITE("io") {

TEST_CASE("parse a scenario with a reversed u2 interval and an open x2") {
  const auto loaded = bk::parse_scenario(kMinimal);
  const auto& sc = loaded.scenario;
  CHECK(sc.params.beta == 10.8);
  CHECK(sc.bounds.u2_min == -20.0);
  CHECK(sc.bounds.u2_max == -10.0);
  REQUIRE(loaded.notices.size() == 1);
  CHECK(loaded.notices[0].find("input_bounds.u2") != std::string::npos);
  CHECK(sc.box.x1_hi == 10.0);
  CHECK_FALSE(sc.box.x2_hi.has_value());
  REQUIRE(sc.numerics.window.has_value());
  CHECK(sc.numerics.window->x2_hi == 12.0);
}

TEST_CASE("bundled scenarios load") {
  for (const char* name : {"fig3", "fig2", "singleton"}) {
    CAPTURE(name);
    CHECK_NOTHROW(bundled(name));
  }
}

TEST_CASE("errors name the offending field") {
  std::string s = kMinimal;
  CHECK(error_of(R"({"params": {"alpha": 0, "beta": 1, "gamma": 0}, "input_bounds": {"u1": [0, 1], "u2": [0, 1]},
                    "state_box": {"x1": [1, 2], "x2": [1, 2]}})")
            .find("params.delta") != std::string::npos);
  CHECK(error_of(R"({"params": {"alpha": 0, "beta": "x", "gamma": 0, "delta": 1},
                    "input_bounds": {"u1": [0, 1], "u2": [0, 1]}, "state_box": {"x1": [1, 2], "x2": [1, 2]}})")
            .find("params.beta") != std::string::npos);
  CHECK(error_of(R"({"params": {"alpha": 0, "beta": 1, "gamma": 0, "delta": 1}, "bogus": 1,
                    "input_bounds": {"u1": [0, 1], "u2": [0, 1]}, "state_box": {"x1": [1, 2], "x2": [1, 2]}})")
            .find("bogus") != std::string::npos);
  CHECK(error_of(R"({"params": {"alpha": 0, "beta": 1, "gamma": 0, "delta": 1},
                    "input_bounds": {"u1": [0, null], "u2": [0, 1]}, "state_box": {"x1": [1, 2], "x2": [1, 2]}})")
            .find("input_bounds.u1[1]") != std::string::npos);
  CHECK(error_of("{not json").find("malformed JSON") != std::string::npos);
  CHECK(error_of("[1, 2]").find("top level") != std::string::npos);
}

TEST_CASE("open box without a window is rejected") {
  CHECK_THROWS_AS(bk::parse_scenario(R"({"params": {"alpha": 0, "beta": 1, "gamma": 0, "delta": 1},
      "input_bounds": {"u1": [0, 1], "u2": [0, 1]}, "state_box": {"x1": [1, null], "x2": [1, 2]}})"),
                  bk::ValidationError);
}

TEST_CASE("raw biological parameters and the zero override") {
  const auto sc = bk::parse_scenario(R"({
    "raw_bio": {"k1": 30, "k2": 225, "k3": 22, "k4": 0.120, "k5": 700, "eta1": 0.55},
    "overrides": {"zero_alpha_gamma": true},
    "input_bounds": {"u1": [10, 20], "u2": [-20, -10]},
    "state_box": {"x1": [0.5, 10], "x2": [0.5, 10]}})")
                      .scenario;
  CHECK(sc.params.alpha == 0.0);
  CHECK(sc.params.gamma == 0.0);
  CHECK(sc.params.beta == doctest::Approx(22000.0 / 2016.0));
  CHECK(error_of(R"({"raw_bio": {"k1": 1}, "params": {}, "input_bounds": {}, "state_box": {}})").find("params") !=
        std::string::npos);
}

TEST_CASE("schedule files") {
  const auto s = bk::parse_schedule("t,u1,u2\r\n0,15,-15\n0.5,20,-10\n");
  REQUIRE(s.segments.size() == 2);
  CHECK(s.segments[1].t_start == 0.5);
  CHECK(s.segments[1].u.u2 == -10.0);
  CHECK_THROWS_AS(bk::parse_schedule("time,a,b\n0,1,1\n"), bk::ValidationError);
  CHECK_THROWS_AS(bk::parse_schedule("t,u1,u2\n0,1\n"), bk::ValidationError);
  CHECK_THROWS_AS(bk::parse_schedule("t,u1,u2\n0,1,x\n"), bk::ValidationError);
  CHECK_THROWS_AS(bk::parse_schedule("t,u1,u2\n"), bk::ValidationError);
  CHECK_THROWS_AS(bk::load_schedule("/nonexistent/file.csv"), bk::ValidationError);
  const auto fixture = bk::load_schedule(test_support::source_path("tests/data/constant.csv"));
  CHECK(fixture.segments.front().u.u1 == 15.0);
}

TEST_CASE("number formatting") {
  CHECK(bk::format_number(0.1) == "0.1");
  CHECK(bk::format_number(-0.0) == "0");
  CHECK(bk::format_number(1.0 / 3.0) == "0.333333333333");
}

TEST_CASE("summary JSON round trip") {
  const bk::Scenario sc = bundled("fig3");
  const auto result = bk::run_pipeline(sc);
  const bk::RunSummary s = bk::summarize(sc, result, {"note"});
  CHECK(s.tangency.size() == 4);
  CHECK(s.curves.size() == 4);
  CHECK(s.assembly.status == "ok");
  const bk::RunSummary back = bk::run_summary_from_json(bk::to_json(s));
  CHECK(back == s);
  CHECK(bk::to_json(back) == bk::to_json(s));
}

TEST_CASE("CSV and SVG emitters") {
  const bk::Scenario sc = bundled("fig3");
  const auto result = bk::run_pipeline(sc);
  REQUIRE(result.complete());
  CHECK(first_line(bk::curve_csv(result.curves[0])) == "t,x1,x2,lambda1,lambda2,u1,u2,event");
  CHECK(first_line(bk::boundary_csv(*result.region)) == "arc_index,arc_kind,origin,x1,x2");
  CHECK(bk::curve_file_name(result.curves[1]) == "curve_z2.csv");
  const std::string svg = bk::svg_figure(sc, result);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(bk::svg_figure(sc, result) == svg);

  const auto mrpi = bk::mrpi_region_singleton(bundled("singleton"));
  REQUIRE(mrpi.region.has_value());
  CHECK(first_line(bk::mrpi_csv(*mrpi.region)) == "x1,x2");

  const bk::InputSchedule hold{{{0.0, {15.0, -15.0}}}};
  const auto sim = bk::forward_simulate({3.0, 1.0, 0.0}, hold, 0.1, sc);
  CHECK(first_line(bk::trajectory_csv(sim)) == "t,x1,x2,u1,u2");
}

TEST_CASE("atomic write replaces the target") {
  const auto dir = std::filesystem::temp_directory_path() / "barrierkit_io_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "out.txt").string();
  bk::atomic_write(path, "first");
  bk::atomic_write(path, "second");
  CHECK(bk::read_file(path) == "second");
  CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
  std::filesystem::remove_all(dir);
}

}  // TEST_SUITE
