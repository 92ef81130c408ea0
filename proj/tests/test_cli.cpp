#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "arnold/cli/runner.hpp"
#include "arnold/cli/scenario.hpp"
#include "arnold/error.hpp"
#include "doctest.h"

using namespace arnold;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"(scenario: minimal
systems:
  ho: {omega2: harmonic(1)}
grid: {min: -12, max: 12, nodes: 1024}
initial: {sigma: 1, center: 0.5, momentum: 0.4}
times: [0.2, 0.7]
actions:
  - type: qat
    system: ho
)";

ConfigError config_error(const std::string& text) {
  try {
    cli::parse_scenario(text);
  } catch (const ConfigError& e) {
    return e;
  }
  FAIL("scenario was accepted");
  return ConfigError("", 0, "");
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("arnold_test_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string read_body(const fs::path& p) {
  std::ifstream in(p);
  std::string line, header, body;
  std::getline(in, header);
  while (std::getline(in, line)) body += line + "\n";
  return body;
}

}  // namespace

TEST_CASE("minimal harmonic scenario loads") {
  const auto sc = cli::parse_scenario(kMinimal);
  CHECK(sc.name == "minimal");
  REQUIRE(sc.systems.count("ho") == 1);
  const auto& ho = sc.system("ho");
  CHECK(ho.kind == cli::SystemKind::lsode);
  CHECK(ho.lsode.omega2(3.0) == 1.0);
  CHECK(ho.lsode.f_dot.is_zero());
  CHECK(ho.span == Interval{-2.0, 2.0});
  REQUIRE(sc.grid);
  CHECK(sc.grid->size() == 1024);
  REQUIRE(sc.gaussian);
  CHECK(sc.gaussian->momentum == 0.4);
  CHECK(sc.times == std::vector<double>{0.2, 0.7});
  REQUIRE(sc.actions.size() == 1);
  const auto& a = sc.actions[0];
  CHECK(a.label() == "a0.qat");
  CHECK(a.integer("kappa_nodes") == 0);
  CHECK(a.tolerance("unitarity_defect") == 1e-6);
  CHECK(a.line == 8);
}

TEST_CASE("undefined system is reported by name, path and line") {
  std::string text = kMinimal;
  text.replace(text.find("system: ho"), 10, "system: sys9");
  const auto e = config_error(text);
  CHECK(std::string(e.what()).find("sys9") != std::string::npos);
  CHECK(e.key_path() == "actions[0].system");
  CHECK(e.line() == 9);
}

TEST_CASE("gqat on an lsode system is a kind mismatch") {
  std::string text = kMinimal;
  text.replace(text.find("type: qat"), 9, "type: gqat");
  const auto e = config_error(text);
  CHECK(std::string(e.what()).find("kind mismatch") != std::string::npos);
  CHECK(e.key_path() == "actions[0].system");
}

TEST_CASE("validation errors") {
  // Unknown keys, bad expressions, bad numbers, unknown metrics.
  CHECK(config_error(std::string(kMinimal) + "    kappa_node: 5\n").key_path() == "actions[0].kappa_node");
  {
    std::string t = kMinimal;
    t.replace(t.find("harmonic(1)"), 11, "sin(t");
    const auto e = config_error(t);
    CHECK(e.key_path() == "systems.ho.omega2");
    CHECK(e.line() == 3);
  }
  CHECK(config_error(std::string(kMinimal) + "    tol: {unitarity: 1e-3}\n").key_path() == "actions[0].tol.unitarity");
  CHECK(config_error(std::string(kMinimal) + "    kappa_nodes: 2.5\n").key_path() == "actions[0].kappa_nodes");
  {
    std::string t = kMinimal;
    t.replace(t.find("nodes: 1024"), 11, "nodes: 8");
    CHECK(config_error(t).key_path() == "grid");
  }
  CHECK(config_error("scenario: x\nactions: [\n").line() > 0);
  CHECK(config_error("scenario: x\n").key_path() == "actions");
  CHECK(config_error("scenario: x\nactions:\n  - type: warp\n").key_path() == "actions[0].type");
  CHECK(config_error("actions:\n  - type: qat\n    system: ho\n").key_path() == "actions[0].system");
  {
    const auto e = config_error("systems:\n  s: {omega2: 1}\nactions:\n  - type: qat\n    system: s\n");
    CHECK(std::string(e.what()).find("times") != std::string::npos);
  }
  CHECK(config_error("systems:\n  s: {kind: tdqh, mu: -1}\nactions:\n  - type: verify-ep\n").key_path() ==
        "systems.s.mu");
  CHECK(config_error("systems:\n  s: {omega2: 1, mu: 1}\nactions:\n  - type: verify-ep\n").key_path() == "systems.s.mu");
  CHECK(config_error("systems:\n  s: {t0: 3, span: [-1, 1]}\nactions:\n  - type: verify-ep\n").key_path() == "systems.s.span");
}

TEST_CASE("numbers accept constant expressions and times accept ranges") {
  const auto sc = cli::parse_scenario(
      "systems:\n  f: {f: caldirola(0.3), omega2: 1, t0: 0, span: [-1, 1]}\n"
      "times: {start: 0, stop: 1, dt: 0.25}\n"
      "actions:\n  - type: ep-solve\n    system: f\n    b0: sqrt(2)\n    check_t: pi/4\n    check_value: 1\n");
  CHECK(sc.times.size() == 5);
  CHECK(sc.times.back() == 1.0);
  CHECK(sc.actions[0].number("b0") == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(sc.actions[0].number("check_t") == doctest::Approx(std::atan(1.0)).epsilon(1e-15));
  CHECK(sc.system("f").lsode.f_dot(0.7) == doctest::Approx(0.3));
  CHECK(config_error("systems:\n  f: {omega2: 1}\ntimes: [0]\nactions:\n  - type: ep-solve\n    system: f\n"
                     "    b0: t\n")
            .key_path() == "actions[0].b0");
}

TEST_CASE("metric lines") {
  CHECK(cli::format_metric({"a0.qat.unitarity_defect", 2.5e-10, 1e-6}) ==
        "a0.qat.unitarity_defect=2.500000e-10 unit=1 tol=1e-06 status=PASS");
  CHECK(cli::format_metric({"x", 3.0, 2.0, "length"}) == "x=3.000000e+00 unit=length tol=2 status=FAIL");
  CHECK(cli::format_metric({"r", 50.0, 10.0, "1", true}) == "r=5.000000e+01 unit=1 tol=>=10 status=PASS");
}

TEST_CASE("qat scenario reports, frames and deterministic output") {
  const auto sc = cli::parse_scenario(kMinimal);
  const fs::path a = scratch("qat_a"), b = scratch("qat_b");
  cli::RunOptions opt;
  opt.output_dir = a;
  opt.header_note = "generated=first";
  const auto res = cli::run(sc, opt);
  CHECK(res.pass());
  REQUIRE(res.metrics.size() == 2);
  CHECK(res.metrics[0].key == "a0.qat.unitarity_defect");
  CHECK(res.metrics[0].value < 1e-6);
  CHECK(fs::exists(a / "a0_qat_t0.csv"));
  CHECK(fs::exists(a / "a0_qat_t1.csv"));
  const auto k = read_frame_csv((a / "a0_qat_t1.csv").string());
  CHECK(k.picture == Picture::kappa);
  CHECK(k.time == doctest::Approx(std::tan(0.7)).epsilon(1e-9));

  const std::string body = read_body(res.report_path);
  CHECK(body.find("a0.qat.unitarity_defect=") != std::string::npos);
  CHECK(body.find("status=FAIL") == std::string::npos);

  opt.output_dir = b;
  opt.header_note = "generated=second";
  cli::run(sc, opt);
  CHECK(read_body(b / "report.txt") == body);
  std::ifstream ha(a / "report.txt"), hb(b / "report.txt");
  std::string la, lb;
  std::getline(ha, la);
  std::getline(hb, lb);
  CHECK(la != lb);
}

TEST_CASE("tolerances decide PASS and FAIL") {
  std::string text = std::string(kMinimal) + "    tol: {roundtrip_error: 1e-14}\n";
  const auto res = cli::run(cli::parse_scenario(text), {cli::Mode::run, scratch("tight"), "", nullptr});
  CHECK_FALSE(res.pass());
  CHECK(res.failures() == 1);
}

TEST_CASE("ep-solve writes b(t) on its own") {
  const auto sc = cli::parse_scenario(
      "systems:\n  free: {omega2: 0, span: [0, 3]}\ntimes: {start: 0, stop: 2, dt: 0.5}\n"
      "actions:\n  - type: qat\n    system: free\n    input: none.csv\n"
      "  - type: ep-solve\n    system: free\n    check_t: 2\n    check_value: sqrt(5)\n");
  const fs::path out = scratch("ep");
  const auto res = cli::run(sc, {cli::Mode::ep_solve, out, "", nullptr});
  CHECK(res.actions_run == 1);
  CHECK(res.pass());
  std::ifstream in(out / "a1_ep-solve.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("#", 0) == 0);
  std::getline(in, line);
  CHECK(line == "t,b,b_dot");
  double t = 0, bv = 0, bd = 0;
  char c = 0;
  while (in >> t >> c >> bv >> c >> bd) {
    CHECK(std::abs(bv - std::sqrt(1 + t * t)) < 1e-8);
  }
  CHECK(t == 2.0);
  CHECK_THROWS_AS(cli::run(sc, {cli::Mode::verify, out, "", nullptr}), InvalidArgument);
}

TEST_CASE("later actions consume earlier frames; failures carry the action index") {
  const auto sc = cli::parse_scenario(
      "systems:\n  ho: {omega2: 1}\ngrid: {min: -10, max: 10, nodes: 401}\n"
      "initial: {sigma: 1, center: 0, momentum: 0.5}\ntimes: [0.5]\n"
      "actions:\n  - type: propagate\n    system: ho\n    dt: 0.01\n"
      "  - type: qat\n    system: ho\n    input: a0_propagate_t0.csv\n"
      "  - type: qat\n    system: ho\n    input: missing.csv\n");
  const fs::path out = scratch("chain");
  try {
    cli::run(sc, {cli::Mode::run, out, "", nullptr});
    FAIL("missing input accepted");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).rfind("action 2 (qat)", 0) == 0);
  }
  const std::string body = read_body(out / "report.txt");
  CHECK(body.find("a0.propagate.norm_drift=") != std::string::npos);
  CHECK(body.find("a1.qat.unitarity_defect=") != std::string::npos);
  CHECK(fs::exists(out / "a1_qat_t0.csv"));
}

TEST_CASE("schema text lists every action") {
  const std::string s = cli::schema_text();
  for (const auto& spec : cli::action_specs()) CHECK(s.find("\n  " + spec.type + "\n") != std::string::npos);
}
