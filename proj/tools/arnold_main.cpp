#include <chrono>
#include <cstdlib>
#include <ctime>
#include <iostream>

#include "CLI11.hpp"
#include "arnold/cli/runner.hpp"
#include "arnold/cli/scenario.hpp"
#include "arnold/error.hpp"
#include "arnold/timefn.hpp"

namespace {

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

// 0 all PASS, 1 a metric failed, 2 bad scenario, 3 runtime failure.
int execute(const std::string& path, arnold::cli::Mode mode, bool quiet) {
  using namespace arnold;
  cli::Scenario sc;
  try {
    sc = cli::load_scenario(path);
  } catch (const ConfigError& e) {
    std::cerr << path << ": " << e.what() << "\n";
    return 2;
  }
  cli::RunOptions opt;
  opt.mode = mode;
  opt.header_note = "generated=" + utc_now();
  if (const char* env = std::getenv("ARNOLD_OUTPUT_DIR"); env && *env) opt.output_dir = env;
  if (!quiet) opt.echo = &std::cout;
  try {
    const auto res = cli::run(sc, opt);
    std::cout << "report: " << res.report_path.string() << " (" << res.metrics.size() << " metrics, "
              << res.failures() << " failed)\n";
    return res.pass() ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << path << ": " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << path << ": " << e.what() << "\n";
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Arnold transformation toolkit: scenario runner"};
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Do not echo metric lines");

  std::string path;
  auto* run = app.add_subcommand("run", "Run every action of a scenario");
  run->add_option("scenario", path, "Scenario file")->required()->check(CLI::ExistingFile);
  auto* verify = app.add_subcommand("verify", "Run only the verify-* actions of a scenario");
  verify->add_option("scenario", path, "Scenario file")->required()->check(CLI::ExistingFile);
  auto* ep = app.add_subcommand("ep-solve", "Run only the ep-solve actions of a scenario");
  ep->add_option("scenario", path, "Scenario file")->required()->check(CLI::ExistingFile);
  auto* grammar = app.add_subcommand("print-grammar", "Print the expression grammar and the scenario schema");

  CLI11_PARSE(app, argc, argv);

  if (grammar->parsed()) {
    std::cout << "Expression grammar:\n\n" << arnold::grammar_text() << "\n\n" << arnold::cli::schema_text();
    return 0;
  }
  const auto mode = run->parsed() ? arnold::cli::Mode::run
                                  : verify->parsed() ? arnold::cli::Mode::verify : arnold::cli::Mode::ep_solve;
  return execute(path, mode, quiet);
}
