#include "arnold/checks.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <map>
#include <cmath>
#include <numbers>
#include <random>

#include <boost/numeric/odeint.hpp>

#include "arnold/error.hpp"
#include "arnold/quadrature.hpp"

namespace arnold::checks {

using std::numbers::pi;

bool Metric::pass() const {
  if (std::isnan(value)) return false;
  if (at_least) return value >= tol;
  return value < tol || (tol == 0.0 && value == 0.0);
}

bool Report::pass() const {
  return !metrics.empty() && std::all_of(metrics.begin(), metrics.end(), [](const Metric& m) { return m.pass(); });
}

const Metric& Report::worst() const {
  if (metrics.empty()) throw InvalidArgument("Report::worst: no metrics");
  auto score = [](const Metric& m) {
    if (!m.pass()) return std::numeric_limits<double>::infinity();
    if (m.at_least) return m.value > 0.0 ? m.tol / m.value : 0.0;
    return m.tol > 0.0 ? m.value / m.tol : 0.0;
  };
  return *std::max_element(metrics.begin(), metrics.end(),
                           [&](const Metric& a, const Metric& b) { return score(a) < score(b); });
}

std::vector<NamedSystem> reference_systems() {
  return {{"ho_0.5", LsodeSystem::harmonic(0.5)},   {"ho_1", LsodeSystem::harmonic(1.0)},
          {"ho_2", LsodeSystem::harmonic(2.0)},     {"damped_0.5", LsodeSystem::damped(0.5)},
          {"damped_1", LsodeSystem::damped(1.0)},   {"ck_0.3_1", LsodeSystem::damped(0.3, 1.0)}};
}

std::vector<NamedSystem> quantum_systems() {
  return {{"ho_1", LsodeSystem::harmonic(1.0)}, {"ck_0.3_1", LsodeSystem::damped(0.3, 1.0)}};
}

namespace {

WaveFrame gaussian_at(const Grid& g, double t, const GaussianParams& p) {
  auto f = free_gaussian_frame(p, g, 0.0, Picture::position);
  f.time = t;
  return f;
}

double max_abs_diff(const WaveFrame& a, const WaveFrame& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
  return m;
}

double right_edge(const CanonicalBasis& b) {
  const double hi = b.validity().hi;
  return std::isfinite(hi) ? std::min(hi, b.span().hi) : b.span().hi;
}

// Independent trajectory oracle: Runge-Kutta-Fehlberg 7(8) from Boost.Odeint.
using State = std::array<double, 2>;

std::vector<double> trajectory(const LsodeSystem& sys, double t0, State y0, const std::vector<double>& times) {
  namespace odeint = boost::numeric::odeint;
  auto accel = [&](double t, const State& y) { return sys.lambda(t) - sys.f_dot(t) * y[1] - sys.omega2(t) * y[0]; };
  std::vector<double> out;
  auto stepper = odeint::make_controlled(1e-14, 1e-14, odeint::runge_kutta_fehlberg78<State>());
  std::vector<double> fwd, bwd;
  for (double t : times) (t >= t0 ? fwd : bwd).push_back(t);
  std::sort(fwd.begin(), fwd.end());
  std::sort(bwd.begin(), bwd.end(), std::greater<>());
  std::map<double, double> x;
  if (!fwd.empty()) {
    State y = y0;
    std::vector<double> ts{t0};
    ts.insert(ts.end(), fwd.begin(), fwd.end());
    odeint::integrate_times(
        stepper, [&](const State& s, State& d, double t) { d = {s[1], accel(t, s)}; }, y, ts.begin(), ts.end(), 1e-3,
        [&](const State& s, double t) { x[t] = s[0]; });
  }
  if (!bwd.empty()) {
    // Reversed time s = -t.
    State y = y0;
    std::vector<double> ss{-t0};
    for (double t : bwd) ss.push_back(-t);
    odeint::integrate_times(
        stepper, [&](const State& s, State& d, double r) { d = {-s[1], -accel(-r, s)}; }, y, ss.begin(), ss.end(),
        1e-3, [&](const State& s, double r) { x[-r] = s[0]; });
  }
  for (double t : times) out.push_back(x.at(t));
  return out;
}

}  // namespace

Report canonicity(const CanonicityParams& p) {
  Report r{1, "canonicity_wronskian", {}};
  for (const auto& [name, sys] : p.systems) {
    const auto b = canonical_basis(sys, p.t0, p.span);
    const auto s = b.at(p.t0);
    const double c = std::max({std::abs(s.u1), std::abs(s.du1 - 1.0), std::abs(s.u2 - 1.0), std::abs(s.du2),
                               std::abs(s.up), std::abs(s.dup)});
    double w = 0.0;
    for (int i = 0; i <= p.samples; ++i) {
      const double t = p.span.lo + p.span.length() * i / p.samples;
      const double f = sys.f_dot.is_constant() ? sys.f_dot(p.t0) * (t - p.t0)
                                               : adaptive_simpson([&](double u) { return sys.f_dot(u); }, p.t0, t, 1e-13);
      w = std::max(w, std::abs(b.wronskian(t) * std::exp(f) - 1.0));
    }
    r.metrics.push_back({name + ".canonicity_residual", c, p.tol_canonicity});
    r.metrics.push_back({name + ".wronskian_defect", w, p.tol_wronskian});
  }
  return r;
}

Report straightening(const StraighteningParams& p) {
  Report r{2, "cat_straightening", {}};
  for (const auto& [name, sys] : p.systems) {
    const auto b = canonical_basis(sys, p.t0, p.span);
    const Interval d = b.domain();
    const double lo = p.t0 + 0.95 * (d.lo - p.t0), hi = p.t0 + 0.95 * (d.hi - p.t0);
    std::vector<double> times;
    for (int i = 0; i <= p.samples; ++i) times.push_back(lo + (hi - lo) * i / p.samples);
    double dev = 0.0;
    for (const auto& [x0, v0] : p.initial) {
      const auto xs = trajectory(sys, p.t0, {x0, v0}, times);
      for (std::size_t i = 0; i < times.size(); ++i) {
        const auto c = cat_forward(b, xs[i], times[i]);
        dev = std::max(dev, std::abs(c.kappa - (x0 + v0 * c.tau)));
      }
    }
    r.metrics.push_back({name + ".max_line_deviation", dev, p.tol, "length"});
  }
  return r;
}

Report qat_unitarity(const UnitarityParams& p) {
  Report r{3, "qat_unitarity", {}};
  for (const auto& [name, sys] : p.systems) {
    const auto b = canonical_basis(sys, 0.0, p.span);
    std::mt19937_64 rng(p.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double defect = 0.0;
    for (int i = 0; i < p.pairs; ++i) {
      const GaussianParams ga{1.0 + 0.2 * u(rng), u(rng), u(rng), sys.m, sys.hbar};
      const GaussianParams gc{1.0 + 0.2 * u(rng), u(rng), u(rng), sys.m, sys.hbar};
      for (double frac : p.fractions) {
        const double t = frac * right_edge(b);
        const auto a = gaussian_at(p.grid, t, ga), c = gaussian_at(p.grid, t, gc);
        const Grid fit = suggest_kappa_grid(b, p.grid, t);
        const Grid kg(fit.x_min(), fit.x_max(), p.kappa_nodes);
        defect = std::max(defect, std::abs(inner_product(qat_apply(b, a, kg), qat_apply(b, c, kg)) - inner_product(a, c)));
      }
    }
    r.metrics.push_back({name + ".unitarity_defect", defect, p.tol});
  }
  return r;
}

Report transport(const TransportParams& p) {
  Report r{4, "solution_transport", {}};
  for (const auto& [name, sys] : p.systems) {
    const auto b = canonical_basis(sys, 0.0, p.span);
    const double t_end = std::min(p.t_max, 0.95 * right_edge(b));
    const int steps = std::max(1, static_cast<int>(std::lround(t_end / p.dt)));
    const int keep = std::max(1, steps / std::max(1, p.samples));
    GaussianParams g = p.initial;
    g.m = sys.m;
    g.hbar = sys.hbar;
    const auto f0 = free_gaussian_frame(g, p.grid, 0.0, Picture::position);
    const auto run = propagate(sys, 0.0, f0, t_end / steps, steps, keep);
    double err = 0.0;
    for (const auto& f : run.frames) {
      const Grid kg = suggest_kappa_grid(b, p.grid, f.time);
      const auto exact = qat_inverse(b, free_gaussian_frame(g, kg, tau_of_t(b, f.time)), p.grid);
      err = std::max(err, relative_l2(f, exact));
    }
    r.metrics.push_back({name + ".cn_vs_inverse_qat_relative_l2", err, p.tol});
  }
  return r;
}

Report gauged(const GaugedParams& p) {
  Report r{5, "gauged_qat", {}};
  const GaugedQat g(p.system, 0.0, p.span);
  const auto H = make_hamiltonian(tdqh_coeffs(p.system), p.system.hbar);
  GaussianParams gp = p.initial;
  gp.m = p.system.m;
  gp.hbar = p.system.hbar;
  double res = 0.0;
  for (double t : p.times) {
    std::array<WaveFrame, 3> tri;
    for (int k = 0; k < 3; ++k) {
      const double tk = t + (k - 1) * p.dt;
      tri[k] = g.inverse(free_gaussian_frame(gp, p.kappa_grid, g.tau_of_t(tk)), p.x_grid);
      tri[k].time = tk;
    }
    res = std::max(res, schrodinger_residual(tri, H, p.system.hbar));
  }
  r.metrics.push_back({"tdqh_residual", res, p.tol});

  TdqhSystem plain = p.system;
  plain.gamma = TimeFn::constant(0.0);
  const GaugedQat g0(plain, 0.0, p.span);
  const auto b0 = canonical_basis(tdqh_to_lsode(plain), 0.0, p.span);
  double diff = 0.0;
  for (double t : p.times) {
    const auto f = gaussian_at(p.x_grid, t, gp);
    const Grid kg = suggest_kappa_grid(b0, p.x_grid, t);
    const auto a = g0.apply(f, kg), q = qat_apply(b0, f, kg);
    diff = std::max(diff, max_abs_diff(a, q) + std::abs(a.time - q.time));
    const auto ai = g0.inverse(q, p.x_grid), qi = qat_inverse(b0, q, p.x_grid);
    diff = std::max(diff, max_abs_diff(ai, qi) + std::abs(ai.time - qi.time));
  }
  r.metrics.push_back({"gamma0_difference_from_qat", diff, 0.0});
  return r;
}

Report maslov(const MaslovParams& p) {
  Report r{6, "maslov_phase", {}};
  const LsodeSystem sys = LsodeSystem::harmonic(p.omega);
  int kmax = 0;
  for (int k : p.branches) kmax = std::max(kmax, std::abs(k));
  const double reach = (kmax + 0.5) * pi / p.omega + 0.6;
  const auto b = canonical_basis(sys, 0.0, {-reach, reach});
  GaussianParams gp = p.initial;
  gp.m = sys.m;
  gp.hbar = sys.hbar;
  for (int k : p.branches) {
    const double t = k * pi / p.omega - (k >= 0 ? p.offset : -p.offset);
    const auto f = gaussian_at(p.grid, t, gp);
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    const auto flipped = sample_frame(p.grid, [&](double x) { return free_gaussian(gp, sign * x, 0.0); }, t,
                                      Picture::position);
    const auto lhs = unfolded_qat(b, k, f, p.grid);
    auto rhs = qat_apply_continued(b, flipped, p.grid);
    const cplx phase = std::polar(1.0, k * pi / 2.0);
    for (auto& v : rhs.values) v *= phase;
    r.metrics.push_back({"k" + std::to_string(k) + ".maslov_phase_error", max_abs_diff(lhs, rhs), p.tol});
  }
  return r;
}

Report ermakov(const ErmakovParams& p) {
  Report r{7, "ermakov_pinney", {}};
  const TimeFn zero = TimeFn::constant(0.0);

  // (a) ratio of bases
  const auto ho1 = canonical_basis(LsodeSystem::harmonic(1.0), 0.0, {-1.5, 1.5});
  const AepMap hh(ho1, canonical_basis(LsodeSystem::harmonic(2.0), 0.0, {-0.7, 0.7}));
  const AepMap dh(ho1, canonical_basis(LsodeSystem::damped(0.5, 1.0), 0.0, {-1.0, 1.0}));
  double ra = 0.0, rd = 0.0;
  for (int i = -9; i <= 9; ++i) {
    ra = std::max(ra, generalized_ep_residual(hh, 0.05 * i));
    rd = std::max(rd, generalized_ep_residual(dh, 0.05 * i));
  }
  r.metrics.push_back({"ratio.ho1_from_ho2.residual", ra, p.tol_ratio});
  r.metrics.push_back({"ratio.ho1_from_damped.residual", rd, p.tol_ratio});

  // (b) superposition
  const JetFn lin = [](double t) { return Jet2{t, 1.0, 0.0}; };
  const JetFn one = [](double) { return Jet2{1.0, 0.0, 0.0}; };
  const JetFn sn = [](double t) { return Jet2{std::sin(t), std::cos(t), -std::sin(t)}; };
  const JetFn cs = [](double t) { return Jet2{std::cos(t), -std::sin(t), -std::cos(t)}; };
  const auto sf = ep_superpose(lin, one, 3.0, 3.0, 0.0, {-2.0, 2.0});
  const auto sd = ep_superpose(lin, one, 1.0, 4.0, 2.0, {0.0, 3.0});
  const auto sh = ep_superpose(sn, cs, 2.0, 2.0, 0.0, {0.0, 6.0});
  const auto sb = ep_superpose(canonical_basis(LsodeSystem::damped(0.5, 1.0), 0.0, {-1.0, 1.0}), 1.5, 2.0, 0.4);
  double rs = 0.0;
  for (int i = 0; i <= 20; ++i) {
    const double u = i / 20.0;
    rs = std::max(rs, ep_residual(sf, zero, zero, -1.9 + 3.8 * u));
    rs = std::max(rs, ep_residual(sd, zero, zero, 2.9 * u));
    rs = std::max(rs, ep_residual(sh, TimeFn::constant(1.0), zero, 5.9 * u));
    rs = std::max(rs, ep_residual(sb, TimeFn::constant(1.0), TimeFn::constant(0.5), -0.9 + 1.8 * u));
  }
  r.metrics.push_back({"superpose.ep_residual", rs, p.tol_superpose});

  // (c) linear solutions from EP solutions
  const auto rho_free = ep_superpose(lin, one, 1.0, 1.0, 0.0, {0.0, 3.0});
  const auto rho_ho = ep_integrate(TimeFn::constant(2.25), zero, 1.0, 0.7, 0.3, {0.0, 4.0});
  const TimeFn w2 = TimeFn::constant(1.69), fd = TimeFn::constant(0.4);
  const auto rho_d = ep_integrate(w2, fd, 0.8, 1.1, -0.2, {0.0, 3.0});
  double rl = 0.0;
  for (double c2 : {0.0, -pi / 2, 1.0}) {
    const auto yf = linear_from_ep(rho_free, 1.0, 1.0, c2);
    const auto yh = linear_from_ep(rho_ho, 1.0, 1.3, c2);
    const auto yd = linear_from_ep(rho_d, 0.8, 1.3, c2);
    for (double u : {0.1, 0.45, 0.8, 0.95}) {
      rl = std::max(rl, linear_residual(yf, zero, zero, 3.0 * u));
      rl = std::max(rl, linear_residual(yh, TimeFn::constant(2.25), zero, 4.0 * u));
      rl = std::max(rl, linear_residual(yd, w2, fd, 3.0 * u));
    }
  }
  r.metrics.push_back({"linear.residual", rl, p.tol_linear});

  // (d) fixed point b^4 = w0^2 / w^2 with w0 = 2, w = 0.5
  const auto fixed = ep_integrate(TimeFn::constant(0.25), zero, 2.0, 2.0, 0.0, {0.0, 5.0});
  double fx = 0.0;
  for (int i = 0; i <= 100; ++i) fx = std::max(fx, std::abs(fixed.b(0.05 * i) - 2.0));
  r.metrics.push_back({"fixed_point.max_deviation", fx, p.tol_fixed});
  return r;
}

Report qaep(const QaepParams& p) {
  Report r{8, "quantum_aep", {}};
  const auto b1 = canonical_basis(p.target, 0.0, p.target_span);
  const auto b2 = canonical_basis(p.source, 0.0, p.source_span);
  const AepMap map(b1, b2);
  double two = 0.0, uni = 0.0;
  for (double t2 : p.times) {
    const auto phi = gaussian_at(p.grid, t2, {0.9, 0.4, 0.8, p.source.m, p.source.hbar});
    const auto chi = gaussian_at(p.grid, t2, {1.2, -0.5, -0.3, p.source.m, p.source.hbar});
    const auto out = qaep_apply(map, phi, p.grid);
    const auto path = qat_inverse(b1, qat_apply(b2, phi, suggest_kappa_grid(b2, p.grid, t2)), p.grid);
    two = std::max(two, relative_l2(out, path));
    uni = std::max(uni, std::abs(inner_product(out, qaep_apply(map, chi, p.grid)) - inner_product(phi, chi)));
  }
  r.metrics.push_back({"two_path_relative_l2", two, p.tol});
  r.metrics.push_back({"unitarity_defect", uni, p.tol});
  return r;
}

Report symmetry(const SymmetryParams& p) {
  Report r{9, "symmetries", {}};
  const cplx I(0.0, 1.0);
  const GaussianParams gp{1.0, 1.0, 0.5};
  const auto psi = free_gaussian_frame(gp, p.grid, 0.0, Picture::position);
  const double nn = std::real(inner_product(psi, psi));

  double comm = 0.0;
  for (const auto& sys : {LsodeSystem::harmonic(1.0), LsodeSystem::damped(0.3, 1.0), LsodeSystem::damped(1.0)}) {
    const auto b = canonical_basis(sys, 0.0, {-1.0, 2.0});
    const auto c = commutator(GridOperator::X(b), GridOperator::P(b));
    for (double t : {-0.7, 0.0, 0.6, 1.5}) {
      WaveFrame at = psi;
      at.time = t;
      comm = std::max(comm, std::abs(expectation(c, at) - I * sys.hbar * nn) / nn);
    }
  }
  r.metrics.push_back({"commutator_defect", comm, p.tol_commutator});

  const int half = static_cast<int>(std::lround(pi / p.dt));
  const auto ho = LsodeSystem::harmonic(1.0), dm = LsodeSystem::damped(0.5, 1.0);
  const auto hb = canonical_basis(ho, 0.0, {-0.5, 4.0}), db = canonical_basis(dm, 0.0, {-0.5, 4.0});
  const auto ho_run = propagate(ho, 0.0, psi, pi / half, half, 100);
  const auto dm_run = propagate(dm, 0.0, psi, pi / half, half, 100);
  const double dx = std::max(conserved_drift(GridOperator::X(hb), ho_run), conserved_drift(GridOperator::X(db), dm_run));
  const double dp = std::max(conserved_drift(GridOperator::P(hb), ho_run), conserved_drift(GridOperator::P(db), dm_run));
  r.metrics.push_back({"x_expectation_drift", dx, p.tol_drift, "length"});
  r.metrics.push_back({"p_expectation_drift", dp, p.tol_drift, "momentum"});

  double dec = 0.0;
  dec = std::max(dec, decomposition_check(hb, 0.0, psi));
  dec = std::max(dec, decomposition_check(canonical_basis(LsodeSystem::free_particle(), 0.0, {-1.0, 4.0}), 3.0, psi));
  dec = std::max(dec, decomposition_check(canonical_basis(LsodeSystem::damped(0.3, 1.0), 0.0, {-1.0, 2.0}), 0.7, psi));
  r.metrics.push_back({"decomposition_discrepancy", dec, p.tol_decomposition});

  const double h_cons = conserved_drift(GridOperator::hamiltonian(hb), ho_run);
  const double h_damp = conserved_drift(GridOperator::hamiltonian(db), dm_run);
  r.metrics.push_back({"hamiltonian_drift_conserved", h_cons, p.tol_drift, "energy"});
  r.metrics.push_back({"hamiltonian_drift_ratio", h_cons > 0.0 ? h_damp / h_cons : std::numeric_limits<double>::infinity(),
                       p.min_ratio, "1", true});
  return r;
}

Report oracle_health(const OracleParams& p) {
  Report r{10, "oracle_health", {}};
  const auto f0 = free_gaussian_frame({1.0, -2.0, 1.0}, p.grid, 0.0, Picture::position);
  std::vector<CoeffFn> hams{gck_coeffs(LsodeSystem::free_particle(), 0.0), gck_coeffs(LsodeSystem::harmonic(1.0), 0.0),
                            gck_coeffs(LsodeSystem::damped(0.3, 1.0), 0.0),
                            tdqh_coeffs({TimeFn::constant(1.0), TimeFn::constant(0.3), TimeFn::constant(1.0)})};
  double step = 0.0;
  for (auto& h : hams) {
    CrankNicolson cn(h, 1.0);
    WaveFrame f = f0;
    for (int k = 0; k < p.steps; ++k) {
      const double before = norm(f);
      f = cn.step(f, p.dt);
      step = std::max(step, std::abs(norm(f) - before));
    }
  }
  r.metrics.push_back({"cn_norm_change_per_step", step, p.tol_norm_step});

  double nd = 0.0;
  for (const GaussianParams& g : {GaussianParams{1.0, 0.0, 0.0}, GaussianParams{0.8, 1.0, 0.7, 1.3, 0.9}}) {
    for (double tau : {0.0, 1.0, 2.5}) nd = std::max(nd, std::abs(norm(free_gaussian_frame(g, p.grid, tau)) - 1.0));
  }
  r.metrics.push_back({"free_gaussian_norm_defect", nd, p.tol_unit_norm});

  const GaussianParams g{1.0, -0.5, 1.2};
  const Grid rg(-16.0, 18.0, 1701);
  std::array<WaveFrame, 3> tri;
  for (int k = 0; k < 3; ++k) tri[k] = free_gaussian_frame(g, rg, 0.7 + (k - 1) * 1e-4);
  r.metrics.push_back(
      {"free_equation_residual", schrodinger_residual(tri, make_hamiltonian(free_coeffs(1.0, 1.0), 1.0)), p.tol_residual});
  return r;
}

std::vector<Report> run_all() {
  return {canonicity(), straightening(), qat_unitarity(), transport(), gauged(),
          maslov(),     ermakov(),       qaep(),          symmetry(),  oracle_health()};
}

}  // namespace arnold::checks
