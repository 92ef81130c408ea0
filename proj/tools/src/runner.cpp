#include "arnold/cli/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "arnold/error.hpp"
#include "arnold/ermakov.hpp"

namespace arnold::cli {

namespace fs = std::filesystem;
using checks::Metric;

std::size_t RunResult::failures() const {
  return static_cast<std::size_t>(std::count_if(metrics.begin(), metrics.end(), [](const Metric& m) { return !m.pass(); }));
}

std::string format_metric(const Metric& m) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%s=%.6e unit=%s tol=%s%.3g status=%s", m.key.c_str(), m.value, m.unit.c_str(),
                m.at_least ? ">=" : "", m.tol, m.pass() ? "PASS" : "FAIL");
  return buf;
}

namespace {

class Context {
 public:
  Context(const Scenario& sc, fs::path out, RunResult& res, std::ostream* echo)
      : sc_(sc), out_(std::move(out)), res_(res), echo_(echo) {}

  const Scenario& scenario() const { return sc_; }
  const fs::path& out() const { return out_; }

  void metric(const Action& a, const std::string& key, double value, const std::string& tol_key,
              const std::string& unit = "1", bool at_least = false) {
    add({a.label() + "." + key, value, a.tolerance(tol_key), unit, at_least});
  }

  void add(Metric m) {
    lines_.push_back(format_metric(m));
    if (echo_) *echo_ << lines_.back() << "\n";
    res_.metrics.push_back(std::move(m));
  }

  void comment(const std::string& s) { lines_.push_back("# " + s); }

  void write_frame(const fs::path& name, const WaveFrame& f) {
    const fs::path p = out_ / name;
    write_frame_csv(p.string(), f);
    res_.artifacts.push_back(p);
  }

  std::ofstream open(const fs::path& name) {
    const fs::path p = out_ / name;
    std::ofstream o(p);
    if (!o) throw Error("cannot write " + p.string());
    res_.artifacts.push_back(p);
    return o;
  }

  const std::vector<std::string>& lines() const { return lines_; }

 private:
  const Scenario& sc_;
  fs::path out_;
  RunResult& res_;
  std::ostream* echo_;
  std::vector<std::string> lines_;
};

std::string stem(const Action& a) { return "a" + std::to_string(a.index) + "_" + a.type; }

std::string frame_name(const Action& a, std::size_t k) { return stem(a) + "_t" + std::to_string(k) + ".csv"; }

// Frames an action works on: the input frame at its own time, or the
// scenario's Gaussian placed at each listed time.
std::vector<WaveFrame> starting_frames(const Context& ctx, const Action& a, const SystemDef& sys,
                                       const std::vector<double>& times) {
  const Scenario& sc = ctx.scenario();
  std::optional<fs::path> file = sc.initial_frame;
  if (a.has("input")) {
    const fs::path in = a.text("input");
    file = fs::exists(ctx.out() / in) ? ctx.out() / in : sc.base_dir / in;
  }
  if (file) {
    if (!fs::exists(*file)) throw Error("frame file not found: " + file->string());
    return {read_frame_csv(file->string())};
  }
  GaussianParams g = *sc.gaussian;
  g.m = sys.m();
  g.hbar = sys.hbar();
  std::vector<WaveFrame> out;
  for (double t : times) {
    auto f = free_gaussian_frame(g, *sc.grid, 0.0, Picture::position);
    f.time = t;
    out.push_back(std::move(f));
  }
  return out;
}

double rel_diff(const WaveFrame& a, const WaveFrame& ref) {
  std::vector<cplx> d(a.values.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = a.values[i] - ref.values[i];
  return norm(ref.grid, d) / norm(ref.grid, ref.values);
}

double self_defect(const WaveFrame& a, const WaveFrame& b) {
  return std::abs(std::real(inner_product(a.grid, a.values, a.values)) - std::real(inner_product(b.grid, b.values, b.values)));
}

std::string strip_prefix(const std::string& key, const std::string& name) {
  const std::string p = name + ".";
  return key.rfind(p, 0) == 0 ? key.substr(p.size()) : key;
}

void run_cat(Context& ctx, const Action& a) {
  const auto& def = ctx.scenario().system(a.text("system"));
  const auto basis = canonical_basis(def.lsode, def.t0, def.span);
  auto o = ctx.open(stem(a) + ".csv");
  o << "t,tau,u1,du1,u2,du2,up,dup,W\n";
  o.precision(17);
  for (double t : ctx.scenario().times) {
    const auto s = basis.at(t);
    o << t << ',' << tau_of_t(basis, t) << ',' << s.u1 << ',' << s.du1 << ',' << s.u2 << ',' << s.du2 << ',' << s.up
      << ',' << s.dup << ',' << basis.wronskian(t) << '\n';
  }

  checks::StraighteningParams sp;
  sp.systems = {{def.name, def.lsode}};
  sp.t0 = def.t0;
  sp.span = def.span;
  sp.initial = {{a.number("x0"), a.number("v0")}};
  sp.samples = a.integer("samples");
  for (const auto& m : checks::straightening(sp).metrics) {
    ctx.metric(a, strip_prefix(m.key, def.name), m.value, "max_line_deviation", m.unit);
  }
  checks::CanonicityParams cp;
  cp.systems = sp.systems;
  cp.t0 = def.t0;
  cp.span = def.span;
  for (const auto& m : checks::canonicity(cp).metrics) {
    if (m.key.ends_with(".wronskian_defect")) ctx.metric(a, "wronskian_defect", m.value, "wronskian_defect");
  }
}

void run_qat(Context& ctx, const Action& a) {
  const auto& def = ctx.scenario().system(a.text("system"));
  const auto basis = canonical_basis(def.lsode, def.t0, def.span);
  double uni = 0.0, rt = 0.0;
  const auto frames = starting_frames(ctx, a, def, ctx.scenario().times);
  for (std::size_t k = 0; k < frames.size(); ++k) {
    const auto& f = frames[k];
    const Grid fit = suggest_kappa_grid(basis, f.grid, f.time);
    const std::size_t nodes = a.integer("kappa_nodes") > 0 ? static_cast<std::size_t>(a.integer("kappa_nodes"))
                                                           : 3 * f.grid.size() / 2 + 1;
    const auto out = qat_apply(basis, f, Grid(fit.x_min(), fit.x_max(), nodes));
    ctx.write_frame(frame_name(a, k), out);
    uni = std::max(uni, self_defect(out, f));
    rt = std::max(rt, rel_diff(qat_inverse(basis, out, f.grid), f));
  }
  ctx.metric(a, "unitarity_defect", uni, "unitarity_defect");
  ctx.metric(a, "roundtrip_error", rt, "roundtrip_error");
}

void run_gqat(Context& ctx, const Action& a) {
  const Scenario& sc = ctx.scenario();
  const auto& def = sc.system(a.text("system"));
  const GaugedQat g(def.tdqh, def.t0, def.span);
  const auto H = make_hamiltonian(tdqh_coeffs(def.tdqh), def.tdqh.hbar);
  const Grid kg(a.number("kappa_min"), a.number("kappa_max"), static_cast<std::size_t>(a.integer("kappa_nodes")));
  GaussianParams gp = *sc.gaussian;
  gp.m = def.tdqh.m;
  gp.hbar = def.tdqh.hbar;
  const double dt = a.number("dt");
  double res = 0.0;
  for (std::size_t k = 0; k < sc.times.size(); ++k) {
    std::array<WaveFrame, 3> tri;
    for (int j = 0; j < 3; ++j) {
      const double tj = sc.times[k] + (j - 1) * dt;
      tri[j] = g.inverse(free_gaussian_frame(gp, kg, g.tau_of_t(tj)), *sc.grid);
      tri[j].time = tj;
    }
    ctx.write_frame(frame_name(a, k), tri[1]);
    res = std::max(res, schrodinger_residual(tri, H, def.tdqh.hbar));
  }
  ctx.metric(a, "tdqh_residual", res, "tdqh_residual");
}

void run_aep(Context& ctx, const Action& a) {
  const auto& target = ctx.scenario().system(a.text("system"));
  const auto& source = ctx.scenario().system(a.text("source"));
  const auto b1 = canonical_basis(target.lsode, target.t0, target.span);
  const auto b2 = canonical_basis(source.lsode, source.t0, source.span);
  const AepMap map(b1, b2);
  const EpForm form = a.text("form") == "reduced" ? EpForm::reduced : EpForm::bracket;
  double ep = 0.0, two = 0.0, uni = 0.0;
  const auto frames = starting_frames(ctx, a, source, ctx.scenario().times);
  for (std::size_t k = 0; k < frames.size(); ++k) {
    const auto& phi = frames[k];
    const double t2 = phi.time;
    const auto out = qaep_apply(map, phi, phi.grid);
    ctx.write_frame(frame_name(a, k), out);
    const auto path = qat_inverse(b1, qat_apply(b2, phi, suggest_kappa_grid(b2, phi.grid, t2)), phi.grid);
    two = std::max(two, rel_diff(out, path));
    uni = std::max(uni, self_defect(out, phi));
    ep = std::max(ep, generalized_ep_residual(map, t2, form));
  }
  ctx.metric(a, "ep_residual", ep, "ep_residual");
  ctx.metric(a, "two_path_relative_l2", two, "two_path_relative_l2");
  ctx.metric(a, "unitarity_defect", uni, "unitarity_defect");
}

void run_ep_solve(Context& ctx, const Action& a) {
  const auto& def = ctx.scenario().system(a.text("system"));
  const auto& times = ctx.scenario().times;
  double lo = def.t0, hi = def.t0;
  for (double t : times) {
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  if (a.has("check_t")) {
    lo = std::min(lo, a.number("check_t"));
    hi = std::max(hi, a.number("check_t"));
  }
  if (lo == hi) hi = lo + 1.0;
  const auto& s = def.lsode;
  const auto sol = ep_integrate(s.omega2, s.f_dot, a.number("omega0"), a.number("b0"), a.number("bdot0"), {lo, hi}, def.t0);
  auto o = ctx.open(stem(a) + ".csv");
  o << "# omega0=" << a.number("omega0") << "\n" << "t,b,b_dot\n";
  o.precision(17);
  double res = 0.0;
  for (double t : times) {
    const auto j = sol.at(t);
    o << t << ',' << j.value << ',' << j.first << '\n';
    res = std::max(res, ep_residual(sol, s.omega2, s.f_dot, t));
  }
  ctx.metric(a, "ep_residual", res, "ep_residual");
  if (a.has("check_t")) {
    ctx.metric(a, "check_error", std::abs(sol.b(a.number("check_t")) - a.number("check_value")), "check_error");
  }
}

void run_propagate(Context& ctx, const Action& a) {
  const auto& def = ctx.scenario().system(a.text("system"));
  const auto& times = ctx.scenario().times;
  const bool from_file = a.has("input") || ctx.scenario().initial_frame;
  WaveFrame f = starting_frames(ctx, a, def, {def.t0}).front();
  if (!from_file) f.time = def.t0;
  const CoeffFn coeffs = def.kind == SystemKind::lsode ? gck_coeffs(def.lsode, def.t0) : tdqh_coeffs(def.tdqh);
  CrankNicolson cn(coeffs, def.hbar());
  const double n0 = norm(f), dt = a.number("dt");
  if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
  double drift = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double span = times[k] - f.time;
    if (span < -1e-12) throw InvalidArgument("times must be ascending and not before the start time");
    const long n = std::lround(span / dt);
    for (long i = 0; i < n; ++i) {
      f = cn.step(f, span / static_cast<double>(n));
      drift = std::max(drift, std::abs(norm(f) - n0));
    }
    f.time = times[k];
    ctx.write_frame(frame_name(a, k), f);
  }
  ctx.metric(a, "norm_drift", drift, "norm_drift");
}

std::vector<checks::NamedSystem> named(const Context& ctx, const Action& a, std::vector<checks::NamedSystem> fallback) {
  if (!a.has("systems")) return fallback;
  std::vector<checks::NamedSystem> out;
  for (const auto& n : a.names("systems")) out.push_back({n, ctx.scenario().system(n).lsode});
  return out;
}

Interval span_of(const Action& a) {
  const auto& v = a.numbers("span");
  if (v.size() != 2 || !(v[0] < v[1])) throw InvalidArgument("span must be [lo, hi] with lo < hi");
  return {v[0], v[1]};
}

void report_all(Context& ctx, const Action& a, const checks::Report& r) {
  for (const auto& m : r.metrics) ctx.add({a.label() + "." + m.key, m.value, m.tol, m.unit, m.at_least});
}

void run_verify(Context& ctx, const Action& a) {
  const Scenario& sc = ctx.scenario();
  const std::string& t = a.type;
  if (t == "verify-canonicity") {
    checks::CanonicityParams p;
    p.systems = named(ctx, a, p.systems);
    p.t0 = a.number("t0");
    p.span = span_of(a);
    p.samples = a.integer("samples");
    p.tol_canonicity = a.tolerance("canonicity_residual");
    p.tol_wronskian = a.tolerance("wronskian_defect");
    report_all(ctx, a, checks::canonicity(p));
  } else if (t == "verify-straightening") {
    checks::StraighteningParams p;
    p.systems = named(ctx, a, p.systems);
    p.t0 = a.number("t0");
    p.span = span_of(a);
    p.samples = a.integer("samples");
    p.tol = a.tolerance("max_line_deviation");
    report_all(ctx, a, checks::straightening(p));
  } else if (t == "verify-unitarity") {
    checks::UnitarityParams p;
    p.systems = named(ctx, a, p.systems);
    p.span = span_of(a);
    if (sc.grid) p.grid = *sc.grid;
    p.kappa_nodes = static_cast<std::size_t>(a.integer("kappa_nodes"));
    p.pairs = a.integer("pairs");
    p.seed = static_cast<unsigned>(a.integer("seed"));
    p.fractions = a.numbers("fractions");
    p.tol = a.tolerance("unitarity_defect");
    report_all(ctx, a, checks::qat_unitarity(p));
  } else if (t == "verify-transport") {
    checks::TransportParams p;
    p.systems = named(ctx, a, p.systems);
    p.span = span_of(a);
    if (sc.grid) p.grid = *sc.grid;
    if (sc.gaussian) p.initial = *sc.gaussian;
    p.t_max = a.number("t_max");
    p.dt = a.number("dt");
    p.samples = a.integer("samples");
    p.tol = a.tolerance("cn_vs_inverse_qat_relative_l2");
    report_all(ctx, a, checks::transport(p));
  } else if (t == "verify-gqat") {
    checks::GaugedParams p;
    if (a.has("system")) p.system = sc.system(a.text("system")).tdqh;
    p.span = span_of(a);
    if (sc.grid) p.x_grid = *sc.grid;
    if (sc.gaussian) p.initial = *sc.gaussian;
    if (!sc.times.empty()) p.times = sc.times;
    p.kappa_grid = Grid(a.number("kappa_min"), a.number("kappa_max"), static_cast<std::size_t>(a.integer("kappa_nodes")));
    p.dt = a.number("dt");
    p.tol = a.tolerance("tdqh_residual");
    report_all(ctx, a, checks::gauged(p));
  } else if (t == "verify-maslov") {
    checks::MaslovParams p;
    p.omega = a.number("omega");
    if (a.has("system")) {
      const auto& s = sc.system(a.text("system")).lsode;
      if (!s.f_dot.is_zero() || !s.lambda.is_zero() || !s.omega2.is_constant() || !(s.omega2(0.0) > 0.0)) {
        throw InvalidArgument("verify-maslov needs a harmonic oscillator (f' = 0, Lambda = 0, constant w^2 > 0)");
      }
      p.omega = std::sqrt(s.omega2(0.0));
    }
    p.branches.clear();
    for (double k : a.numbers("branches")) {
      if (k != std::floor(k)) throw InvalidArgument("branches must be integers");
      p.branches.push_back(static_cast<int>(k));
    }
    p.offset = a.number("offset");
    if (sc.grid) p.grid = *sc.grid;
    if (sc.gaussian) p.initial = *sc.gaussian;
    p.tol = a.tolerance("maslov_phase_error");
    report_all(ctx, a, checks::maslov(p));
  } else if (t == "verify-ep") {
    checks::ErmakovParams p;
    p.tol_ratio = a.tolerance("ratio_residual");
    p.tol_superpose = a.tolerance("superpose_residual");
    p.tol_linear = a.tolerance("linear_residual");
    p.tol_fixed = a.tolerance("fixed_point_deviation");
    report_all(ctx, a, checks::ermakov(p));
  } else if (t == "verify-qaep") {
    checks::QaepParams p;
    if (a.has("system")) {
      const auto& d = sc.system(a.text("system"));
      p.target = d.lsode;
      p.target_span = d.span;
    }
    if (a.has("source")) {
      const auto& d = sc.system(a.text("source"));
      p.source = d.lsode;
      p.source_span = d.span;
    }
    if (!sc.times.empty()) p.times = sc.times;
    if (sc.grid) p.grid = *sc.grid;
    p.tol = a.tolerance("two_path_relative_l2");
    auto r = checks::qaep(p);
    for (auto& m : r.metrics) {
      if (m.key == "unitarity_defect") m.tol = a.tolerance("unitarity_defect");
    }
    report_all(ctx, a, r);
  } else if (t == "verify-symmetry") {
    checks::SymmetryParams p;
    if (sc.grid) p.grid = *sc.grid;
    p.dt = a.number("dt");
    p.tol_commutator = a.tolerance("commutator_defect");
    p.tol_drift = a.tolerance("expectation_drift");
    p.tol_decomposition = a.tolerance("decomposition_discrepancy");
    p.min_ratio = a.tolerance("hamiltonian_drift_ratio");
    report_all(ctx, a, checks::symmetry(p));
  } else if (t == "verify-oracle") {
    checks::OracleParams p;
    if (sc.grid) p.grid = *sc.grid;
    p.steps = a.integer("steps");
    p.dt = a.number("dt");
    p.tol_norm_step = a.tolerance("cn_norm_change_per_step");
    p.tol_unit_norm = a.tolerance("free_gaussian_norm_defect");
    p.tol_residual = a.tolerance("free_equation_residual");
    report_all(ctx, a, checks::oracle_health(p));
  } else {
    throw InvalidArgument("unknown verification '" + t + "'");
  }
}

void dispatch(Context& ctx, const Action& a) {
  if (a.type == "cat") return run_cat(ctx, a);
  if (a.type == "qat") return run_qat(ctx, a);
  if (a.type == "gqat") return run_gqat(ctx, a);
  if (a.type == "aep") return run_aep(ctx, a);
  if (a.type == "ep-solve") return run_ep_solve(ctx, a);
  if (a.type == "propagate") return run_propagate(ctx, a);
  run_verify(ctx, a);
}

bool selected(Mode mode, const Action& a) {
  switch (mode) {
    case Mode::run:
      return true;
    case Mode::verify:
      return a.type.rfind("verify-", 0) == 0;
    case Mode::ep_solve:
      return a.type == "ep-solve";
  }
  return false;
}

void write_report(const fs::path& path, const Scenario& sc, const RunOptions& opt, const Context& ctx,
                  const RunResult& res) {
  std::ofstream o(path);
  if (!o) throw Error("cannot write " + path.string());
  o << "# arnold report scenario=" << sc.name;
  if (!opt.header_note.empty()) o << " " << opt.header_note;
  o << "\n";
  for (const auto& l : ctx.lines()) o << l << "\n";
  o << "# summary metrics=" << res.metrics.size() << " failures=" << res.failures() << "\n";
}

}  // namespace

RunResult run(const Scenario& scenario, const RunOptions& options) {
  RunResult res;
  const fs::path out = options.output_dir ? *options.output_dir : fs::path(scenario.output_dir);
  fs::create_directories(out);
  res.report_path = out / "report.txt";
  Context ctx(scenario, out, res, options.echo);

  for (const auto& a : scenario.actions) {
    if (!selected(options.mode, a)) continue;
    ctx.comment("action " + a.label() + " line=" + std::to_string(a.line));
    try {
      dispatch(ctx, a);
    } catch (const Error& e) {
      write_report(res.report_path, scenario, options, ctx, res);
      throw Error("action " + std::to_string(a.index) + " (" + a.type + "): " + e.what());
    }
    ++res.actions_run;
  }
  if (res.actions_run == 0) throw InvalidArgument("no action of the requested kind in scenario '" + scenario.name + "'");
  write_report(res.report_path, scenario, options, ctx, res);
  return res;
}

}  // namespace arnold::cli
