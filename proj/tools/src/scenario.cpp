#include "arnold/cli/scenario.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "arnold/error.hpp"
#include "arnold/timefn.hpp"

namespace arnold::cli {

std::string_view to_string(SystemKind k) { return k == SystemKind::lsode ? "lsode" : "tdqh"; }

namespace {

using PT = ParamType;

ParamSpec sys_param(const std::string& key, PT type, bool required, std::string doc) {
  return {key, type, required, "", std::move(doc), {}};
}

std::vector<ActionSpec> build_specs() {
  const ParamSpec input{"input", PT::text, false, "",
                        "frame CSV used instead of `initial`; looked up in the output directory, then next to "
                        "the scenario",
                        {}};
  const ParamSpec systems{"systems", PT::lsode_systems, false, "", "lsode systems to check (default: reference set)",
                          {}};
  const auto num = [](std::string key, std::string def, std::string doc) {
    return ParamSpec{std::move(key), PT::number, false, std::move(def), std::move(doc), {}};
  };
  const auto integer = [](std::string key, std::string def, std::string doc) {
    return ParamSpec{std::move(key), PT::integer, false, std::move(def), std::move(doc), {}};
  };
  const auto list = [](std::string key, std::string def, std::string doc) {
    return ParamSpec{std::move(key), PT::numbers, false, std::move(def), std::move(doc), {}};
  };

  std::vector<ActionSpec> s;
  s.push_back({"cat",
               "classical Arnold map; CSV of the basis and tau at each time, straightening of one trajectory",
               false,
               true,
               {sys_param("system", PT::lsode_system, true, "lsode system"), num("x0", "1", "trajectory x(t0)"),
                num("v0", "0", "trajectory x'(t0)"), integer("samples", "200", "checked points along the trajectory")},
               {{"max_line_deviation", 1e-9}, {"wronskian_defect", 1e-8}}});
  s.push_back({"qat",
               "quantum Arnold map of the initial state at each time, with round trip back to x",
               true,
               true,
               {sys_param("system", PT::lsode_system, true, "lsode system"), input,
                integer("kappa_nodes", "0", "kappa grid nodes (0: 3n/2+1, not node aligned)")},
               {{"unitarity_defect", 1e-6}, {"roundtrip_error", 1e-5}}});
  s.push_back({"gqat",
               "inverse gauged map of the free Gaussian `initial` into the TDQH system at each time",
               true,
               true,
               {sys_param("system", PT::tdqh_system, true, "tdqh system"), num("dt", "1e-3", "residual time step"),
                num("kappa_min", "-16", "kappa grid start"), num("kappa_max", "16", "kappa grid end"),
                integer("kappa_nodes", "1024", "kappa grid nodes")},
               {{"tdqh_residual", 5e-4}}});
  s.push_back({"aep",
               "quantum AEP from `source` into `system` of the initial state at each source time",
               true,
               true,
               {sys_param("system", PT::lsode_system, true, "target lsode system"),
                sys_param("source", PT::lsode_system, true, "source lsode system"), input,
                ParamSpec{"form", PT::text, false, "bracket", "EP right-hand side used for the residual",
                          {"bracket", "reduced"}}},
               {{"ep_residual", 1e-6}, {"two_path_relative_l2", 1e-6}, {"unitarity_defect", 1e-6}}});
  s.push_back({"ep-solve",
               "integrate b'' + f'b' + w^2 b = W^2 w0^2/b^3 from the system's t0; CSV of t, b, b_dot at each time",
               false,
               true,
               {sys_param("system", PT::lsode_system, true, "lsode system supplying w^2 and f'"),
                num("omega0", "1", "EP constant"), num("b0", "1", "b(t0)"), num("bdot0", "0", "b'(t0)"),
                num("check_t", "", "time of an optional exact-value check"),
                num("check_value", "", "expected b(check_t)")},
               {{"ep_residual", 1e-6}, {"check_error", 1e-8}}});
  s.push_back({"propagate",
               "Crank-Nicolson propagation of the initial state from the system's t0; frame at each time",
               true,
               true,
               {sys_param("system", PT::any_system, true, "lsode or tdqh system"), input,
                num("dt", "1e-3", "nominal step")},
               {{"norm_drift", 1e-8}}});
  s.push_back({"verify-canonicity",
               "canonical initial data and W e^f = 1",
               false,
               false,
               {systems, num("t0", "0", "anchor"), list("span", "[-1, 3]", "integration span"),
                integer("samples", "400", "Wronskian samples")},
               {{"canonicity_residual", 1e-10}, {"wronskian_defect", 1e-8}}});
  s.push_back({"verify-straightening",
               "classical trajectories map to straight lines",
               false,
               false,
               {systems, num("t0", "0", "anchor"), list("span", "[-1, 3]", "integration span"),
                integer("samples", "200", "points per trajectory")},
               {{"max_line_deviation", 1e-9}}});
  s.push_back({"verify-unitarity",
               "QAT preserves inner products of random Gaussian pairs",
               false,
               false,
               {systems, list("span", "[-1.5, 2.5]", "integration span"),
                integer("kappa_nodes", "1537", "kappa grid nodes"), integer("pairs", "5", "random pairs"),
                integer("seed", "7", "RNG seed"),
                list("fractions", "[0.2, 0.5, 0.9]", "times as fractions of the right edge of T")},
               {{"unitarity_defect", 1e-6}}});
  s.push_back({"verify-transport",
               "Crank-Nicolson propagation against the inverse QAT of the free Gaussian",
               false,
               false,
               {systems, list("span", "[-0.5, 2.5]", "integration span"), num("t_max", "1", "end time"),
                num("dt", "1e-3", "step"), integer("samples", "5", "compared frames")},
               {{"cn_vs_inverse_qat_relative_l2", 1e-3}}});
  s.push_back({"verify-gqat",
               "inverse GQAT frames solve the TDQH equation; Gamma = 0 reproduces the QAT exactly",
               false,
               false,
               {sys_param("system", PT::tdqh_system, false, "tdqh system (default mu=1, Gamma=0.3, nu=1)"),
                list("span", "[-0.5, 1.5]", "integration span"), num("dt", "1e-3", "residual time step"),
                num("kappa_min", "-16", "kappa grid start"), num("kappa_max", "16", "kappa grid end"),
                integer("kappa_nodes", "1024", "kappa grid nodes")},
               {{"tdqh_residual", 5e-4}}});
  s.push_back({"verify-maslov",
               "branch-k QAT against the phase-shifted, reflected continued QAT of the harmonic oscillator",
               false,
               false,
               {sys_param("system", PT::lsode_system, false, "harmonic lsode system (overrides omega)"),
                num("omega", "1", "oscillator frequency"), list("branches", "[1, 2]", "branch indices k"),
                num("offset", "0.2", "sample time k pi/w - offset")},
               {{"maslov_phase_error", 1e-6}}});
  s.push_back({"verify-ep",
               "Ermakov-Pinney solutions from ratios of bases, superposition, linear reconstruction, fixed point",
               false,
               false,
               {},
               {{"ratio_residual", 1e-6},
                {"superpose_residual", 1e-8},
                {"linear_residual", 1e-6},
                {"fixed_point_deviation", 1e-9}}});
  s.push_back({"verify-qaep",
               "quantum AEP agrees with the QAT composition and is unitary",
               false,
               false,
               {sys_param("system", PT::lsode_system, false, "target (default HO(1))"),
                sys_param("source", PT::lsode_system, false, "source (default HO(2))")},
               {{"two_path_relative_l2", 1e-6}, {"unitarity_defect", 1e-6}}});
  s.push_back({"verify-symmetry",
               "commutator, conserved expectations, Hamiltonian decomposition, damped drift ratio",
               false,
               false,
               {num("dt", "1e-3", "propagation step")},
               {{"commutator_defect", 1e-6},
                {"expectation_drift", 1e-4},
                {"decomposition_discrepancy", 1e-5},
                {"hamiltonian_drift_ratio", 10.0}}});
  s.push_back({"verify-oracle",
               "Crank-Nicolson norm conservation and the free Gaussian closed form",
               false,
               false,
               {integer("steps", "100", "steps"), num("dt", "1e-2", "step")},
               {{"cn_norm_change_per_step", 1e-10}, {"free_gaussian_norm_defect", 1e-8}, {"free_equation_residual", 1e-6}}});
  return s;
}

std::size_t line_of(const YAML::Node& n) {
  const auto m = n.Mark();
  return m.is_null() ? 0 : static_cast<std::size_t>(m.line) + 1;
}

[[noreturn]] void fail(const std::string& path, const YAML::Node& n, const std::string& what) {
  throw ConfigError(path, line_of(n), what);
}

std::string join(const std::string& a, const std::string& b) { return a.empty() ? b : a + "." + b; }

// Number or constant expression ("pi/2", "sqrt(5)").
double parse_number_text(const std::string& s, const std::string& path, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (!s.empty() && end == s.c_str() + s.size() && std::isfinite(v)) return v;
  try {
    const TimeFn f = parse_expr(s);
    if (!f.is_constant()) throw ConfigError(path, line, "expected a constant, got '" + s + "'");
    return f(0.0);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(path, line, "not a number: '" + s + "' (" + e.what() + ")");
  }
}

double to_number(const YAML::Node& n, const std::string& path) {
  if (!n.IsScalar()) fail(path, n, "expected a number");
  return parse_number_text(n.Scalar(), path, line_of(n));
}

int to_integer(const YAML::Node& n, const std::string& path) {
  const double v = to_number(n, path);
  if (v != std::floor(v) || std::abs(v) > 1e9) fail(path, n, "expected an integer");
  return static_cast<int>(v);
}

std::string to_text(const YAML::Node& n, const std::string& path) {
  if (!n.IsScalar()) fail(path, n, "expected a string");
  return n.Scalar();
}

std::vector<double> to_numbers(const YAML::Node& n, const std::string& path) {
  if (!n.IsSequence()) fail(path, n, "expected a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < n.size(); ++i) out.push_back(to_number(n[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

TimeFn to_timefn(const YAML::Node& n, const std::string& path) {
  const std::string s = to_text(n, path);
  try {
    return TimeFn::parse(s);
  } catch (const Error& e) {
    fail(path, n, std::string("bad expression '") + s + "': " + e.what());
  }
}

Interval to_span(const YAML::Node& n, const std::string& path) {
  const auto v = to_numbers(n, path);
  if (v.size() != 2 || !(v[0] < v[1])) fail(path, n, "expected [lo, hi] with lo < hi");
  return {v[0], v[1]};
}

void require_map(const YAML::Node& n, const std::string& path) {
  if (!n.IsMap()) fail(path, n, "expected a mapping");
}

void check_keys(const YAML::Node& n, const std::string& path, const std::set<std::string>& allowed) {
  for (auto it = n.begin(); it != n.end(); ++it) {
    const std::string k = it->first.Scalar();
    if (!allowed.count(k)) fail(join(path, k), it->first, "unknown key '" + k + "'");
  }
}

SystemDef parse_system(const std::string& name, const YAML::Node& n, const std::string& path) {
  require_map(n, path);
  SystemDef d;
  d.name = name;
  d.line = line_of(n);
  if (n["kind"]) {
    const std::string k = to_text(n["kind"], path + ".kind");
    if (k == "lsode") {
      d.kind = SystemKind::lsode;
    } else if (k == "tdqh") {
      d.kind = SystemKind::tdqh;
    } else {
      fail(path + ".kind", n["kind"], "kind must be lsode or tdqh, got '" + k + "'");
    }
  }
  double m = 1.0, hbar = 1.0;
  if (n["m"]) m = to_number(n["m"], path + ".m");
  if (n["hbar"]) hbar = to_number(n["hbar"], path + ".hbar");
  if (!(m > 0.0)) fail(path + ".m", n["m"], "m must be positive");
  if (!(hbar > 0.0)) fail(path + ".hbar", n["hbar"], "hbar must be positive");
  if (n["t0"]) d.t0 = to_number(n["t0"], path + ".t0");
  d.span = {d.t0 - 2.0, d.t0 + 2.0};
  if (n["span"]) d.span = to_span(n["span"], path + ".span");
  if (!(d.span.lo <= d.t0 && d.t0 <= d.span.hi)) fail(path + ".span", n["span"] ? n["span"] : n, "span must contain t0");

  if (d.kind == SystemKind::lsode) {
    check_keys(n, path, {"kind", "f_dot", "f", "omega2", "lambda", "m", "hbar", "t0", "span"});
    if (n["f_dot"] && n["f"]) fail(path + ".f", n["f"], "give either f or f_dot, not both");
    auto& s = d.lsode;
    s.f_dot = TimeFn::constant(0.0);
    s.omega2 = TimeFn::constant(0.0);
    s.lambda = TimeFn::constant(0.0);
    if (n["f_dot"]) s.f_dot = to_timefn(n["f_dot"], path + ".f_dot");
    if (n["f"]) s.f_dot = to_timefn(n["f"], path + ".f").derivative();
    if (n["omega2"]) s.omega2 = to_timefn(n["omega2"], path + ".omega2");
    if (n["lambda"]) s.lambda = to_timefn(n["lambda"], path + ".lambda");
    s.m = m;
    s.hbar = hbar;
  } else {
    check_keys(n, path, {"kind", "mu", "gamma", "nu", "m", "hbar", "t0", "span"});
    auto& s = d.tdqh;
    s.mu = TimeFn::constant(1.0);
    s.gamma = TimeFn::constant(0.0);
    s.nu = TimeFn::constant(0.0);
    if (n["mu"]) s.mu = to_timefn(n["mu"], path + ".mu");
    if (n["gamma"]) s.gamma = to_timefn(n["gamma"], path + ".gamma");
    if (n["nu"]) s.nu = to_timefn(n["nu"], path + ".nu");
    s.m = m;
    s.hbar = hbar;
    try {
      s.require_positive_mu(d.span);
    } catch (const Error& e) {
      fail(path + ".mu", n["mu"] ? n["mu"] : n, e.what());
    }
  }
  return d;
}

Param parse_param(const ParamSpec& spec, const YAML::Node& n, const std::string& path) {
  Param p;
  p.type = spec.type;
  p.line = line_of(n);
  switch (spec.type) {
    case PT::number:
      p.number = to_number(n, path);
      break;
    case PT::integer:
      p.number = to_integer(n, path);
      break;
    case PT::numbers:
      p.numbers = to_numbers(n, path);
      break;
    case PT::text:
    case PT::lsode_system:
    case PT::tdqh_system:
    case PT::any_system:
      p.text = to_text(n, path);
      break;
    case PT::lsode_systems:
      if (!n.IsSequence()) fail(path, n, "expected a list of system names");
      for (std::size_t i = 0; i < n.size(); ++i) p.names.push_back(to_text(n[i], path + "[" + std::to_string(i) + "]"));
      break;
  }
  if (!spec.choices.empty()) {
    bool ok = false;
    std::string all;
    for (const auto& c : spec.choices) {
      ok = ok || c == p.text;
      all += (all.empty() ? "" : "|") + c;
    }
    if (!ok) fail(path, n, "expected one of " + all + ", got '" + p.text + "'");
  }
  return p;
}

void check_system_ref(const Scenario& sc, PT type, const std::string& name, const std::string& path,
                      const YAML::Node& n, const std::string& action) {
  const auto it = sc.systems.find(name);
  if (it == sc.systems.end()) fail(path, n, "undefined system '" + name + "'");
  const SystemKind k = it->second.kind;
  const bool ok = type == PT::any_system || (type == PT::tdqh_system && k == SystemKind::tdqh) ||
                  ((type == PT::lsode_system || type == PT::lsode_systems) && k == SystemKind::lsode);
  if (!ok) {
    const std::string want = type == PT::tdqh_system ? "tdqh" : "lsode";
    fail(path, n,
         "kind mismatch: action '" + action + "' needs a " + want + " system, '" + name + "' is " +
             std::string(to_string(k)));
  }
}

Action parse_action(const Scenario& sc, const YAML::Node& n, std::size_t index) {
  const std::string path = "actions[" + std::to_string(index) + "]";
  require_map(n, path);
  if (!n["type"]) fail(path, n, "missing 'type'");
  const std::string type = to_text(n["type"], path + ".type");
  const ActionSpec* spec = find_action_spec(type);
  if (!spec) fail(path + ".type", n["type"], "unknown action type '" + type + "'");

  Action a;
  a.type = type;
  a.index = index;
  a.line = line_of(n);
  for (const auto& [k, v] : spec->tolerances) a.tol[k] = v;

  std::set<std::string> allowed{"type", "tol"};
  for (const auto& p : spec->params) allowed.insert(p.key);
  check_keys(n, path, allowed);

  for (const auto& ps : spec->params) {
    const std::string kp = path + "." + ps.key;
    const YAML::Node v = n[ps.key];
    if (v) {
      a.params[ps.key] = parse_param(ps, v, kp);
    } else if (!ps.fallback.empty()) {
      a.params[ps.key] = parse_param(ps, YAML::Load(ps.fallback), kp);
    } else if (ps.required) {
      fail(kp, n, "missing required key '" + ps.key + "'");
    }
    if (!v) continue;
    const Param& p = a.params[ps.key];
    if (ps.type == PT::lsode_system || ps.type == PT::tdqh_system || ps.type == PT::any_system) {
      check_system_ref(sc, ps.type, p.text, kp, v, type);
    } else if (ps.type == PT::lsode_systems) {
      for (std::size_t i = 0; i < p.names.size(); ++i) {
        check_system_ref(sc, ps.type, p.names[i], kp + "[" + std::to_string(i) + "]", v[i], type);
      }
    }
  }

  if (const YAML::Node t = n["tol"]) {
    require_map(t, path + ".tol");
    for (auto it = t.begin(); it != t.end(); ++it) {
      const std::string k = it->first.Scalar();
      const std::string kp = path + ".tol." + k;
      if (!a.tol.count(k)) fail(kp, it->first, "action '" + type + "' has no metric '" + k + "'");
      const double v = to_number(it->second, kp);
      if (!(v >= 0.0)) fail(kp, it->second, "tolerance must be non-negative");
      a.tol[k] = v;
    }
  }

  if (spec->needs_times && sc.times.empty()) fail(path, n, "action '" + type + "' needs a non-empty 'times' section");
  if (spec->needs_initial && !a.has("input") && !sc.gaussian && !sc.initial_frame) {
    fail(path, n, "action '" + type + "' needs an 'initial' section or an 'input' frame");
  }
  if (type == "gqat" && !sc.gaussian) fail(path, n, "gqat maps the free Gaussian of 'initial'; give sigma/center/momentum");
  if (spec->needs_initial && !sc.grid && !a.has("input") && !sc.initial_frame) {
    fail(path, n, "action '" + type + "' needs a 'grid' section");
  }
  if (type == "aep") {
    const auto& t1 = sc.systems.at(a.text("system"));
    const auto& t2 = sc.systems.at(a.text("source"));
    if (t1.t0 != t2.t0) fail(path + ".source", n["source"], "source and target must share t0");
  }
  if (type == "ep-solve" && a.has("check_t") != a.has("check_value")) {
    fail(path, n, "check_t and check_value go together");
  }
  return a;
}

}  // namespace

const std::vector<ActionSpec>& action_specs() {
  static const std::vector<ActionSpec> specs = build_specs();
  return specs;
}

const ActionSpec* find_action_spec(std::string_view type) {
  for (const auto& s : action_specs()) {
    if (s.type == type) return &s;
  }
  return nullptr;
}

double Action::number(const std::string& key) const { return params.at(key).number; }
int Action::integer(const std::string& key) const { return static_cast<int>(params.at(key).number); }
const std::string& Action::text(const std::string& key) const { return params.at(key).text; }
const std::vector<double>& Action::numbers(const std::string& key) const { return params.at(key).numbers; }
const std::vector<std::string>& Action::names(const std::string& key) const { return params.at(key).names; }
double Action::tolerance(const std::string& key) const { return tol.at(key); }
std::string Action::label() const { return "a" + std::to_string(index) + "." + type; }

const SystemDef& Scenario::system(const std::string& name) const {
  const auto it = systems.find(name);
  if (it == systems.end()) throw InvalidArgument("undefined system '" + name + "'");
  return it->second;
}

Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("<document>", e.mark.is_null() ? 0 : static_cast<std::size_t>(e.mark.line) + 1, e.msg);
  }
  if (!root.IsMap()) fail("<document>", root, "a scenario is a mapping of sections");
  check_keys(root, "", {"scenario", "output_dir", "systems", "grid", "initial", "times", "actions"});

  Scenario sc;
  sc.base_dir = base_dir;
  sc.name = root["scenario"] ? to_text(root["scenario"], "scenario") : "unnamed";
  if (root["output_dir"]) sc.output_dir = to_text(root["output_dir"], "output_dir");

  if (const YAML::Node s = root["systems"]) {
    require_map(s, "systems");
    for (auto it = s.begin(); it != s.end(); ++it) {
      const std::string name = it->first.Scalar();
      sc.systems[name] = parse_system(name, it->second, "systems." + name);
    }
  }

  if (const YAML::Node g = root["grid"]) {
    require_map(g, "grid");
    check_keys(g, "grid", {"min", "max", "nodes"});
    for (const char* k : {"min", "max", "nodes"}) {
      if (!g[k]) fail(std::string("grid.") + k, g, std::string("missing '") + k + "'");
    }
    const double lo = to_number(g["min"], "grid.min"), hi = to_number(g["max"], "grid.max");
    const int n = to_integer(g["nodes"], "grid.nodes");
    if (n < 16 || !(lo < hi)) fail("grid", g, "need min < max and nodes >= 16");
    sc.grid = Grid(lo, hi, static_cast<std::size_t>(n));
  }

  if (const YAML::Node in = root["initial"]) {
    require_map(in, "initial");
    if (in["frame"]) {
      check_keys(in, "initial", {"frame"});
      const auto p = std::filesystem::path(to_text(in["frame"], "initial.frame"));
      sc.initial_frame = p.is_absolute() ? p : base_dir / p;
    } else {
      check_keys(in, "initial", {"sigma", "center", "momentum"});
      GaussianParams gp;
      if (in["sigma"]) gp.sigma = to_number(in["sigma"], "initial.sigma");
      if (in["center"]) gp.center = to_number(in["center"], "initial.center");
      if (in["momentum"]) gp.momentum = to_number(in["momentum"], "initial.momentum");
      if (!(gp.sigma > 0.0)) fail("initial.sigma", in["sigma"], "sigma must be positive");
      sc.gaussian = gp;
    }
  }

  if (const YAML::Node t = root["times"]) {
    if (t.IsSequence()) {
      sc.times = to_numbers(t, "times");
    } else {
      require_map(t, "times");
      check_keys(t, "times", {"start", "stop", "dt"});
      for (const char* k : {"start", "stop", "dt"}) {
        if (!t[k]) fail(std::string("times.") + k, t, std::string("missing '") + k + "'");
      }
      const double a = to_number(t["start"], "times.start"), b = to_number(t["stop"], "times.stop");
      const double dt = to_number(t["dt"], "times.dt");
      if (!(dt > 0.0) || !(a <= b)) fail("times", t, "need dt > 0 and start <= stop");
      const auto n = static_cast<long>(std::floor((b - a) / dt + 1e-9));
      if (n > 1000000) fail("times", t, "more than 10^6 sample times");
      for (long i = 0; i <= n; ++i) sc.times.push_back(a + static_cast<double>(i) * dt);
    }
  }

  const YAML::Node acts = root["actions"];
  if (!acts) fail("actions", root, "missing 'actions'");
  if (!acts.IsSequence() || acts.size() == 0) fail("actions", acts, "expected a non-empty list of actions");
  for (std::size_t i = 0; i < acts.size(); ++i) sc.actions.push_back(parse_action(sc, acts[i], i));
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, "cannot open scenario file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

std::string schema_text() {
  std::ostringstream o;
  o << "Scenario files are YAML mappings with these sections:\n\n"
       "  scenario: <name>\n"
       "  output_dir: <path>                  relative to the working directory; ARNOLD_OUTPUT_DIR overrides\n"
       "  systems:\n"
       "    <name>:\n"
       "      kind: lsode | tdqh              default lsode\n"
       "      f_dot | f, omega2, lambda       lsode coefficients (expressions or presets; default 0)\n"
       "      mu, gamma, nu                   tdqh coefficients (default mu=1, gamma=0, nu=0)\n"
       "      m, hbar                         default 1\n"
       "      t0                              anchor, default 0\n"
       "      span: [lo, hi]                  default [t0-2, t0+2]\n"
       "  grid: {min, max, nodes}\n"
       "  initial: {sigma, center, momentum} | {frame: <csv>}\n"
       "  times: [t, ...] | {start, stop, dt}\n"
       "  actions:\n"
       "    - type: <action>\n"
       "      <key>: <value>\n"
       "      tol: {<metric>: <tolerance>}\n\n"
       "Numbers may be constant expressions (pi/2, sqrt(5)).\n\nActions:\n";
  for (const auto& s : action_specs()) {
    o << "\n  " << s.type << "\n    " << s.doc << "\n";
    if (s.needs_initial) o << "    uses: initial (or input), grid\n";
    if (s.needs_times) o << "    uses: times\n";
    for (const auto& p : s.params) {
      o << "    " << p.key << (p.required ? " (required)" : "");
      if (!p.fallback.empty()) o << " = " << p.fallback;
      o << "  " << p.doc << "\n";
    }
    for (const auto& [k, v] : s.tolerances) o << "    tol." << k << " = " << v << "\n";
  }
  return o.str();
}

}  // namespace arnold::cli
