#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "arnold/checks.hpp"
#include "arnold/cli/scenario.hpp"

namespace arnold::cli {

enum class Mode {
  /// Every action.
  run,
  /// Only verify-* actions.
  verify,
  /// Only ep-solve actions.
  ep_solve,
};

struct RunOptions {
  Mode mode = Mode::run;
  /// Replaces the scenario's output_dir when set.
  std::optional<std::filesystem::path> output_dir;
  /// Text placed in the report header (e.g. a timestamp). The header is the
  /// only line allowed to differ between runs of the same scenario.
  std::string header_note;
  /// Receives a copy of each report line as it is produced (may be null).
  std::ostream* echo = nullptr;
};

struct RunResult {
  std::vector<checks::Metric> metrics;
  std::filesystem::path report_path;
  std::vector<std::filesystem::path> artifacts;
  std::size_t actions_run = 0;

  std::size_t failures() const;
  bool pass() const { return failures() == 0; }
};

/// `key=value unit=... tol=... status=PASS|FAIL`. Lower-bound metrics print
/// their tolerance as `tol=>=value`.
std::string format_metric(const checks::Metric& m);

/// Executes the selected actions in order, writes frame CSVs and report.txt
/// into the output directory. Numerical failures are rethrown as Error with
/// the action index and type prefixed. Throws InvalidArgument when the mode
/// selects no action.
RunResult run(const Scenario& scenario, const RunOptions& options = {});

}  // namespace arnold::cli
