#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "arnold/lsode.hpp"
#include "arnold/propagate.hpp"
#include "arnold/transform.hpp"
#include "arnold/wavefield.hpp"

namespace arnold::cli {

enum class SystemKind { lsode, tdqh };
std::string_view to_string(SystemKind k);

struct SystemDef {
  std::string name;
  SystemKind kind = SystemKind::lsode;
  LsodeSystem lsode;
  TdqhSystem tdqh;
  double t0 = 0.0;
  Interval span{-2.0, 2.0};
  std::size_t line = 0;

  double m() const { return kind == SystemKind::lsode ? lsode.m : tdqh.m; }
  double hbar() const { return kind == SystemKind::lsode ? lsode.hbar : tdqh.hbar; }
};

enum class ParamType {
  number,
  integer,
  text,
  numbers,
  /// Reference to a scenario system of the kind required by the spec.
  lsode_system,
  tdqh_system,
  any_system,
  /// List of lsode system names.
  lsode_systems,
};

struct ParamSpec {
  std::string key;
  ParamType type;
  bool required = false;
  /// Default in scenario syntax; empty means "absent unless given".
  std::string fallback;
  std::string doc;
  /// Allowed values for text parameters (empty: any).
  std::vector<std::string> choices;
};

struct ActionSpec {
  std::string type;
  std::string doc;
  /// Uses the scenario `initial` state unless an `input` frame is given.
  bool needs_initial = false;
  bool needs_times = false;
  std::vector<ParamSpec> params;
  /// Metric tolerances settable through `tol`, with defaults.
  std::vector<std::pair<std::string, double>> tolerances;
};

/// Every action type in declaration order.
const std::vector<ActionSpec>& action_specs();
const ActionSpec* find_action_spec(std::string_view type);

struct Param {
  ParamType type = ParamType::number;
  double number = 0.0;
  std::string text;
  std::vector<double> numbers;
  std::vector<std::string> names;
  std::size_t line = 0;
};

struct Action {
  std::string type;
  std::size_t index = 0;
  std::size_t line = 0;
  /// Given values plus defaults; optional keys without a default are absent.
  std::map<std::string, Param> params;
  /// Every tolerance of the action spec, overridden where the file sets one.
  std::map<std::string, double> tol;

  bool has(const std::string& key) const { return params.count(key) != 0; }
  double number(const std::string& key) const;
  int integer(const std::string& key) const;
  const std::string& text(const std::string& key) const;
  const std::vector<double>& numbers(const std::string& key) const;
  const std::vector<std::string>& names(const std::string& key) const;
  double tolerance(const std::string& key) const;
  /// "a<index>.<type>", the prefix of report keys and frame files.
  std::string label() const;
};

struct Scenario {
  std::string name;
  /// Directory of the scenario file; relative paths inside it resolve here.
  std::filesystem::path base_dir;
  std::string output_dir = "out";
  std::map<std::string, SystemDef> systems;
  std::optional<Grid> grid;
  std::optional<GaussianParams> gaussian;
  /// Initial frame file, already resolved against base_dir.
  std::optional<std::filesystem::path> initial_frame;
  std::vector<double> times;
  std::vector<Action> actions;

  const SystemDef& system(const std::string& name) const;
};

/// Parses and validates a scenario. Throws ConfigError with the key path and
/// 1-based line of the offending entry.
Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir = ".");

/// Human-readable key schema, including every action and its defaults.
std::string schema_text();

}  // namespace arnold::cli
