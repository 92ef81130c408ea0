#include "arnold/ermakov.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <memory>
#include <string>

#include "arnold/error.hpp"
#include "arnold/quadrature.hpp"

namespace arnold {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

constexpr double kFdStep = 1e-4;
constexpr int kPositivitySamples = 2000;

// Richardson-extrapolated central second difference.
double second_difference(const std::function<double(double)>& f, double t, double h = kFdStep) {
  auto d = [&](double s) { return (f(t + s) - 2.0 * f(t) + f(t - s)) / (s * s); };
  return (4.0 * d(0.5 * h) - d(h)) / 3.0;
}

// t2 limit at which tau2 reaches the end `tau` of the target's tau range.
double tau_limit(const CanonicalBasis& b2, double tau, double fallback) {
  if (!std::isfinite(tau) || !b2.tau_range().contains(tau)) return fallback;
  return t_of_tau(b2, tau);
}

}  // namespace

AepMap::AepMap(CanonicalBasis target, CanonicalBasis source) : b1_(std::move(target)), b2_(std::move(source)) {
  if (b1_.t0() != b2_.t0()) {
    throw InvalidArgument("AepMap: both bases must share the anchor (t0=" + num(b1_.t0()) + " vs " + num(b2_.t0()) +
                          ")");
  }
  const Interval d2 = b2_.domain();
  const Interval r1 = b1_.tau_range();
  domain_ = {tau_limit(b2_, r1.lo, d2.lo), tau_limit(b2_, r1.hi, d2.hi)};
}

double AepMap::t1_of_t2(double t2) const {
  const double tau = tau_of_t(b2_, t2);
  if (!b1_.tau_range().contains_closed(tau)) {
    throw RangeError("AepMap: tau2(" + num(t2) + ")=" + num(tau) + " is outside the tau range of system 1");
  }
  return t_of_tau(b1_, tau);
}

double AepMap::t2_of_t1(double t1) const {
  const double tau = tau_of_t(b1_, t1);
  if (!b2_.tau_range().contains_closed(tau)) {
    throw RangeError("AepMap: tau1(" + num(t1) + ")=" + num(tau) + " is outside the tau range of system 2");
  }
  return t_of_tau(b2_, tau);
}

double AepMap::b(double t2) const { return b2_.u2(t2) / b1_.u2(t1_of_t2(t2)); }

double AepMap::dt1_dt2(double t2) const {
  const double t1 = t1_of_t2(t2);
  const double bb = b2_.u2(t2) / b1_.u2(t1);
  return b2_.wronskian_exact(t2) / (bb * bb * b1_.wronskian_exact(t1));
}

double AepMap::b_dot(double t2) const {
  const double t1 = t1_of_t2(t2);
  const auto s2 = b2_.at(t2);
  const auto s1 = b1_.at(t1);
  const double bb = s2.u2 / s1.u2;
  const double s = b2_.wronskian_exact(t2) / (bb * bb * b1_.wronskian_exact(t1));
  return s2.du2 / s1.u2 - s2.u2 * s1.du2 * s / (s1.u2 * s1.u2);
}

SpaceTimePoint aep_classical(const AepMap& map, double x2, double t2) {
  const double t1 = map.t1_of_t2(t2);
  const auto s2 = map.basis2().at(t2);
  const auto s1 = map.basis1().at(t1);
  return {(x2 - s2.up) * s1.u2 / s2.u2 + s1.up, t1};
}

double generalized_ep_residual(const AepMap& map, double t2, EpForm form) {
  const auto& sys1 = map.basis1().system();
  const auto& sys2 = map.basis2().system();
  const double t1 = map.t1_of_t2(t2);
  const double b = map.b(t2);
  const double bd = map.b_dot(t2);
  const double bdd = second_difference([&](double s) { return map.b(s); }, t2);
  const double w1 = map.basis1().wronskian_exact(t1);
  const double w2 = map.basis2().wronskian_exact(t2);
  double bracket = sys1.omega2(t1);
  if (form == EpForm::bracket) {
    const auto s1 = map.basis1().at(t1);
    bracket += sys1.f_dot(t1) * (s1.du2 / s1.u2) * (1.0 - b * b * w1 / w2);
  }
  const double rhs = (w2 * w2) / (w1 * w1) * bracket / (b * b * b);
  return std::abs(bdd + sys2.f_dot(t2) * bd + sys2.omega2(t2) * b - rhs);
}

WaveFrame qaep_apply(const AepMap& map, const WaveFrame& frame2, const Grid& target) {
  const auto& sys1 = map.basis1().system();
  const auto& sys2 = map.basis2().system();
  if (!sys1.lambda.is_zero() || !sys2.lambda.is_zero()) {
    throw InvalidArgument("qaep_apply: the quantum map is only defined for Lambda = 0");
  }
  if (sys1.m != sys2.m || sys1.hbar != sys2.hbar) {
    throw InvalidArgument("qaep_apply: both systems must carry the same m and hbar");
  }
  frame2.validate();
  if (frame2.picture != Picture::position) throw InvalidArgument("qaep_apply: expected a frame in the x picture");
  check_boundary_decay(frame2);

  const double t2 = frame2.time;
  const double t1 = map.t1_of_t2(t2);
  const double b = map.b(t2);
  const double c = -0.5 * (sys2.m / sys2.hbar) * map.b_dot(t2) / (b * map.basis2().wronskian_exact(t2));
  const double s = std::sqrt(b);
  const ComplexSpline in(frame2);
  WaveFrame out{target, std::vector<cplx>(target.size()), t1, Picture::position};
  for (std::size_t i = 0; i < target.size(); ++i) {
    const double x2 = b * target.x(i);
    out.values[i] = s * std::exp(cplx(0.0, c * x2 * x2)) * in(x2);
  }
  return out;
}

EpSolution::EpSolution(Source source, double omega0, Interval span, JetFn b, JetFn wronskian)
    : source_(source), omega0_(omega0), span_(span), b_(std::move(b)), w_(std::move(wronskian)) {}

EpSolution ep_integrate(const TimeFn& omega2, const TimeFn& f2_dot, double omega0, double b0, double bdot0,
                        Interval span, double t_start) {
  if (!(b0 > 0.0)) throw InvalidArgument("ep_integrate: b0 must be positive");
  if (!(omega0 >= 0.0)) throw InvalidArgument("ep_integrate: omega0 must be non-negative");
  if (!std::isfinite(span.lo) || !std::isfinite(span.hi) || !(span.lo < span.hi)) {
    throw InvalidArgument("ep_integrate: span must be finite and non-empty");
  }
  if (std::isnan(t_start)) t_start = span.lo;
  if (!span.contains_closed(t_start)) throw InvalidArgument("ep_integrate: t_start outside the span");

  // State (b, b', F) with F = int_{t_start}^t f2' and W = exp(-F).
  const double w02 = omega0 * omega0;
  auto rhs = [&](double t, std::span<const double> y, std::span<double> dy) {
    const double b = y[0];
    dy[0] = y[1];
    dy[1] = -f2_dot(t) * y[1] - omega2(t) * b + std::exp(-2.0 * y[2]) * w02 / (b * b * b);
    dy[2] = f2_dot(t);
  };
  double collapse = std::numeric_limits<double>::quiet_NaN();
  auto stop = [&](double t, std::span<const double> y) {
    if (y[0] < 1e-8) {
      collapse = t;
      return true;
    }
    return false;
  };
  ode::Tolerances tol;
  tol.rtol = 1e-12;
  tol.atol = 1e-14;
  tol.max_step = std::min(0.05, span.length() / 64.0);
  const std::array<double, 3> y0{b0, bdot0, 0.0};
  auto sol = std::make_shared<const ode::Solution>(ode::integrate(rhs, t_start, y0, span.lo, span.hi, tol, stop));
  if (!std::isnan(collapse)) throw DomainError("ep_integrate: b dropped below 1e-8 near t=" + num(collapse));

  auto bjet = [sol](double t) {
    const auto p = sol->pair(t, 0, 1);
    return Jet2{p.value, p.derivative, sol->pair_second(t, 0, 1)};
  };
  auto wjet = [sol, f2_dot, f2_ddot = f2_dot.derivative()](double t) {
    const double w = std::exp(-sol->component(t, 2).value);
    const double fd = f2_dot(t);
    return Jet2{w, -fd * w, (fd * fd - f2_ddot(t)) * w};
  };
  return EpSolution(EpSolution::Source::integrated, omega0, span, bjet, wjet);
}

EpSolution ep_from_map(const AepMap& map) {
  const TimeFn& w1sq = map.basis1().system().omega2;
  if (!w1sq.is_constant()) throw InvalidArgument("ep_from_map: the target squared frequency must be constant");
  const double w02 = w1sq(map.basis1().t0());
  if (w02 < 0.0) throw InvalidArgument("ep_from_map: the target squared frequency must be non-negative");

  auto m = std::make_shared<const AepMap>(map);
  auto bjet = [m](double t) {
    return Jet2{m->b(t), m->b_dot(t), second_difference([&](double s) { return m->b(s); }, t)};
  };
  // W = W2/W1 so that W^2 w0^2 / b^3 is the coupling seen in t2.
  auto ratio = [m](double t) {
    return m->basis2().wronskian_exact(t) / m->basis1().wronskian_exact(m->t1_of_t2(t));
  };
  auto wjet = [m, ratio](double t) {
    const double t1 = m->t1_of_t2(t);
    const double w = ratio(t);
    const double rate = -m->basis2().system().f_dot(t) + m->basis1().system().f_dot(t1) * m->dt1_dt2(t);
    return Jet2{w, rate * w, second_difference(ratio, t)};
  };
  return EpSolution(EpSolution::Source::ratio_of_bases, std::sqrt(w02), map.domain(), bjet, wjet);
}

EpSolution ep_superpose(const JetFn& y1, const JetFn& y2, double c1, double c2, double c3, Interval span) {
  const double w02 = c1 * c2 - c3 * c3;
  if (w02 < 0.0) throw InvalidArgument("ep_superpose: c1 c2 - c3^2 must be non-negative (got " + num(w02) + ")");
  auto q = [=](double t) { return c1 * y1(t).value * y1(t).value + c2 * y2(t).value * y2(t).value +
                                  2.0 * c3 * y1(t).value * y2(t).value; };
  for (int i = 0; i <= kPositivitySamples; ++i) {
    const double t = span.lo + span.length() * i / kPositivitySamples;
    if (!(q(t) > 0.0)) throw DomainError("ep_superpose: b^2 <= 0 at t=" + num(t));
  }
  auto bjet = [=](double t) {
    const Jet2 a = y1(t), c = y2(t);
    const double Q = c1 * a.value * a.value + c2 * c.value * c.value + 2.0 * c3 * a.value * c.value;
    const double Qd = 2.0 * (c1 * a.value * a.first + c2 * c.value * c.first + c3 * (a.first * c.value + a.value * c.first));
    const double Qdd = 2.0 * (c1 * (a.first * a.first + a.value * a.second) + c2 * (c.first * c.first + c.value * c.second) +
                              c3 * (a.second * c.value + 2.0 * a.first * c.first + a.value * c.second));
    const double b = std::sqrt(Q);
    const double bd = Qd / (2.0 * b);
    return Jet2{b, bd, (0.5 * Qdd - bd * bd) / b};
  };
  auto wjet = [=](double t) {
    const Jet2 a = y1(t), c = y2(t);
    return Jet2{a.first * c.value - a.value * c.first, a.second * c.value - a.value * c.second,
                std::numeric_limits<double>::quiet_NaN()};
  };
  return EpSolution(EpSolution::Source::superposition, std::sqrt(w02), span, bjet, wjet);
}

EpSolution ep_superpose(const CanonicalBasis& basis, double c1, double c2, double c3) {
  auto sp = std::make_shared<const CanonicalBasis>(basis);
  auto y1 = [sp](double t) {
    const auto s = sp->at(t);
    return Jet2{s.u1, s.du1, sp->u1_second(t)};
  };
  auto y2 = [sp](double t) {
    const auto s = sp->at(t);
    return Jet2{s.u2, s.du2, sp->u2_second(t)};
  };
  return ep_superpose(y1, y2, c1, c2, c3, basis.span());
}

JetFn linear_from_ep(const EpSolution& rho, double omega0, double c1, double c2, double theta_origin) {
  if (std::isnan(theta_origin)) theta_origin = rho.span().lo;
  auto r = std::make_shared<const EpSolution>(rho);
  return [r, omega0, c1, c2, theta_origin](double t) {
    const auto theta_dot = [&](double s) {
      const double b = r->b(s);
      return r->wronskian(s) / (b * b);
    };
    const double theta = adaptive_simpson(theta_dot, theta_origin, t, 1e-10);
    const Jet2 p = r->at(t);
    const Jet2 w = r->wronskian_jet(t);
    const double td = w.value / (p.value * p.value);
    const double tdd = (w.first * p.value - 2.0 * w.value * p.first) / (p.value * p.value * p.value);
    const double phi = omega0 * theta + c2;
    const double cs = std::cos(phi), sn = std::sin(phi);
    const double y = c1 * p.value * cs;
    const double yd = c1 * (p.first * cs - p.value * sn * omega0 * td);
    const double ydd = c1 * (p.second * cs - 2.0 * p.first * sn * omega0 * td - p.value * cs * omega0 * omega0 * td * td -
                             p.value * sn * omega0 * tdd);
    return Jet2{y, yd, ydd};
  };
}

double ep_residual(const EpSolution& b, const TimeFn& omega2, const TimeFn& f_dot, double t) {
  const Jet2 j = b.at(t);
  const double w = b.wronskian(t);
  const double w0 = b.omega0();
  return std::abs(j.second + f_dot(t) * j.first + omega2(t) * j.value - w * w * w0 * w0 / (j.value * j.value * j.value));
}

double linear_residual(const JetFn& y, const TimeFn& omega2, const TimeFn& f_dot, double t) {
  const Jet2 j = y(t);
  return std::abs(j.second + f_dot(t) * j.first + omega2(t) * j.value);
}

}  // namespace arnold
