#include "arnold/lsode.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "arnold/error.hpp"
#include "arnold/quadrature.hpp"

namespace arnold {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) { return std::to_string(v); }

}  // namespace

void LsodeSystem::validate() const {
  if (!(m > 0.0) || !std::isfinite(m)) throw InvalidArgument("LsodeSystem: mass must be positive");
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw InvalidArgument("LsodeSystem: hbar must be positive");
}

LsodeSystem LsodeSystem::free_particle() { return {TimeFn::constant(0), TimeFn::constant(0), TimeFn::constant(0)}; }

LsodeSystem LsodeSystem::harmonic(double omega) {
  return {TimeFn::constant(0), TimeFn::preset("harmonic", {omega}), TimeFn::constant(0)};
}

LsodeSystem LsodeSystem::damped(double gamma, double omega) {
  return {TimeFn::constant(gamma), TimeFn::constant(omega * omega), TimeFn::constant(0)};
}

CanonicalBasis canonical_basis(const LsodeSystem& system, double t0, Interval span, const ode::Tolerances& tol) {
  system.validate();
  if (!(span.lo <= t0 && t0 <= span.hi) || !std::isfinite(span.lo) || !std::isfinite(span.hi)) {
    throw InvalidArgument("canonical_basis: t0 must lie inside a finite span");
  }
  auto sys = std::make_shared<const LsodeSystem>(system);
  const TimeFn f_ddot = system.f_dot.derivative();

  ode::Rhs rhs = [sys, f_ddot](double t, std::span<const double> y, std::span<double> dy) {
    const double fd = sys->f_dot(t);
    const double w2 = sys->omega2(t);
    const double lam = sys->lambda(t);
    dy[0] = y[1];
    dy[1] = -fd * y[1] - w2 * y[0];
    dy[2] = y[3];
    dy[3] = -fd * y[3] - w2 * y[2];
    dy[4] = y[5];
    dy[5] = -fd * y[5] - w2 * y[4] + lam;
    dy[6] = fd;
    dy[7] = f_ddot(t);
  };
  const std::vector<double> y0 = {0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, system.f_dot(t0)};
  ode::Tolerances local = tol;
  // Bounded steps keep the Hermite dense output accurate between nodes.
  if (span.length() > 0.0) local.max_step = std::min({tol.max_step, 0.05, span.length() / 64.0});

  auto traj = std::make_shared<CanonicalBasis::Trajectory>();
  traj->solution = ode::integrate(rhs, t0, y0, span.lo, span.hi, local);

  CanonicalBasis b;
  b.system_ = std::move(sys);
  b.trajectory_ = std::move(traj);
  b.t0_ = t0;
  b.span_ = span;
  b.finish();
  return b;
}

CanonicalBasis rebase(const CanonicalBasis& basis, double t_anchor) {
  if (!basis.span_.contains_closed(t_anchor)) {
    throw RangeError("rebase: anchor " + fmt(t_anchor) + " outside the integrated span");
  }
  const auto& sol = basis.trajectory_->solution;
  using B = CanonicalBasis;
  const auto U1 = sol.pair(t_anchor, B::kU1, B::kV1);
  const auto U2 = sol.pair(t_anchor, B::kU2, B::kV2);
  const auto Up = sol.pair(t_anchor, B::kUp, B::kVp);
  // Solve [U1 U2; U1' U2'] c = rhs for the new pair.
  const double a = U1.value, bb = U2.value, c = U1.derivative, d = U2.derivative;
  const double det = a * d - bb * c;  // = -W_raw(t_anchor) != 0
  auto solve = [&](double r0, double r1) { return std::pair{(d * r0 - bb * r1) / det, (a * r1 - c * r0) / det}; };
  const auto [p1, q1] = solve(0.0, 1.0);  // u1: value 0, slope 1
  const auto [p2, q2] = solve(1.0, 0.0);  // u2: value 1, slope 0
  // up_new = Up - Up(ta) u2_new - Up'(ta) u1_new
  const double r1 = -Up.value * p2 - Up.derivative * p1;
  const double r2 = -Up.value * q2 - Up.derivative * q1;

  CanonicalBasis out;
  out.system_ = basis.system_;
  out.trajectory_ = basis.trajectory_;
  out.t0_ = t_anchor;
  out.span_ = basis.span_;
  out.coef_[0] = p1;
  out.coef_[1] = q1;
  out.coef_[2] = p2;
  out.coef_[3] = q2;
  out.coef_[4] = r1;
  out.coef_[5] = r2;
  out.f_shift_ = sol.pair(t_anchor, B::kF, B::kFd).value;
  out.finish();
  return out;
}

void CanonicalBasis::finish() {
  const auto& sol = trajectory_->solution;
  auto raw_u2 = [&](double t) {
    return coef_[2] * sol.pair(t, kU1, kV1).value + coef_[3] * sol.pair(t, kU2, kV2).value;
  };
  auto node_u2 = [&](std::size_t k) { return coef_[2] * sol.node_value(k, kU1) + coef_[3] * sol.node_value(k, kU2); };

  zeros_.clear();
  const auto times = sol.times();
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    const double ya = node_u2(k);
    const double yb = node_u2(k + 1);
    if (ya == 0.0) {
      if (zeros_.empty() || zeros_.back() != times[k]) zeros_.push_back(times[k]);
      continue;
    }
    if (ya * yb < 0.0) {
      double lo = times[k], hi = times[k + 1];
      double flo = ya;
      while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        const double fm = raw_u2(mid);
        if (fm == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      zeros_.push_back(0.5 * (lo + hi));
    }
  }
  if (!times.empty() && node_u2(times.size() - 1) == 0.0) zeros_.push_back(times.back());

  validity_ = Interval{-kInf, kInf};
  for (double z : zeros_) {
    if (z == t0_) throw InvalidArgument("canonical basis cannot be anchored at a zero of u2");
    if (z < t0_) validity_.lo = z;
    if (z > t0_ && validity_.hi == kInf) validity_.hi = z;
  }

  const Interval dom = domain();
  auto tau_at = [&](double t) {
    const Sample s = at(t);
    return s.u1 / s.u2;
  };
  tau_range_.lo = std::isfinite(validity_.lo) && dom.lo == validity_.lo ? -kInf : tau_at(dom.lo);
  tau_range_.hi = std::isfinite(validity_.hi) && dom.hi == validity_.hi ? kInf : tau_at(dom.hi);
}

Interval CanonicalBasis::domain() const noexcept {
  return {std::max(validity_.lo, span_.lo), std::min(validity_.hi, span_.hi)};
}

CanonicalBasis::Sample CanonicalBasis::at(double t) const {
  const auto& sol = trajectory_->solution;
  const auto U1 = sol.pair(t, kU1, kV1);
  const auto U2 = sol.pair(t, kU2, kV2);
  const auto Up = sol.pair(t, kUp, kVp);
  Sample s;
  s.u1 = coef_[0] * U1.value + coef_[1] * U2.value;
  s.du1 = coef_[0] * U1.derivative + coef_[1] * U2.derivative;
  s.u2 = coef_[2] * U1.value + coef_[3] * U2.value;
  s.du2 = coef_[2] * U1.derivative + coef_[3] * U2.derivative;
  s.up = Up.value + coef_[4] * U1.value + coef_[5] * U2.value;
  s.dup = Up.derivative + coef_[4] * U1.derivative + coef_[5] * U2.derivative;
  return s;
}

double CanonicalBasis::u2(double t) const { return at(t).u2; }

double CanonicalBasis::u1_second(double t) const {
  const auto& sol = trajectory_->solution;
  return coef_[0] * sol.pair_second(t, kU1, kV1) + coef_[1] * sol.pair_second(t, kU2, kV2);
}

double CanonicalBasis::u2_second(double t) const {
  const auto& sol = trajectory_->solution;
  return coef_[2] * sol.pair_second(t, kU1, kV1) + coef_[3] * sol.pair_second(t, kU2, kV2);
}

double CanonicalBasis::wronskian(double t) const {
  const Sample s = at(t);
  return s.du1 * s.u2 - s.u1 * s.du2;
}

double CanonicalBasis::damping_integral(double t) const {
  return trajectory_->solution.pair(t, kF, kFd).value - f_shift_;
}

double CanonicalBasis::wronskian_exact(double t) const { return std::exp(-damping_integral(t)); }

int CanonicalBasis::branch_index(double t) const {
  if (!span_.contains_closed(t)) throw RangeError("branch_index: t=" + fmt(t) + " outside the integrated span");
  int k = 0;
  if (t > t0_) {
    for (double z : zeros_) {
      if (z > t0_ && z < t) ++k;
    }
  } else {
    for (double z : zeros_) {
      if (z < t0_ && z > t) --k;
    }
  }
  return k;
}

double tau_of_t(const CanonicalBasis& basis, double t) {
  if (!basis.in_validity(t)) {
    throw RangeError("tau_of_t: t=" + fmt(t) + " outside the validity interval (" + fmt(basis.validity().lo) + ", " +
                     fmt(basis.validity().hi) + ")");
  }
  const auto s = basis.at(t);
  return s.u1 / s.u2;
}

double tau_by_quadrature(const CanonicalBasis& basis, double t, double tol) {
  if (!basis.in_validity(t)) throw RangeError("tau_by_quadrature: t=" + fmt(t) + " outside the validity interval");
  return adaptive_simpson(
      [&](double s) {
        const double u = basis.u2(s);
        return basis.wronskian_exact(s) / (u * u);
      },
      basis.t0(), t, tol);
}

double t_of_tau(const CanonicalBasis& basis, double tau) {
  const Interval range = basis.tau_range();
  if (!std::isfinite(tau) || !range.contains_closed(tau)) {
    throw RangeError("t_of_tau: tau=" + fmt(tau) + " outside the reachable range [" + fmt(range.lo) + ", " +
                     fmt(range.hi) + "]");
  }
  if (tau == 0.0) return basis.t0();
  const Interval dom = basis.domain();
  // g(t) = tau(t) - tau is increasing on the domain; bracket then polish.
  double lo, hi;
  if (tau > 0.0) {
    lo = basis.t0();
    hi = dom.hi;
  } else {
    lo = dom.lo;
    hi = basis.t0();
  }
  auto g = [&](double t) {
    if (t <= dom.lo) return std::isfinite(range.lo) ? range.lo - tau : -kInf;
    if (t >= dom.hi) return std::isfinite(range.hi) ? range.hi - tau : kInf;
    const auto s = basis.at(t);
    return s.u1 / s.u2 - tau;
  };
  if (g(hi) == 0.0) return hi;
  if (g(lo) == 0.0) return lo;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double t = 0.5 * (lo + hi);
  // Newton polish using dtau/dt = W / u2^2.
  for (int it = 0; it < 3; ++it) {
    const auto s = basis.at(t);
    const double w = s.du1 * s.u2 - s.u1 * s.du2;
    const double step = (s.u1 / s.u2 - tau) / (w / (s.u2 * s.u2));
    const double next = t - step;
    if (!(next > dom.lo && next < dom.hi) || !std::isfinite(next)) break;
    t = next;
  }
  return t;
}

double branch_anchor(const CanonicalBasis& basis, int k) {
  if (k == 0) return basis.t0();
  const double t0 = basis.t0();
  std::vector<double> right, left;
  for (double z : basis.zeros()) {
    if (z > t0) right.push_back(z);
    if (z < t0) left.push_back(z);
  }
  std::reverse(left.begin(), left.end());
  const auto n = static_cast<std::size_t>(std::abs(k));
  if (k > 0) {
    if (right.size() < n + 1) {
      throw RangeError("branch " + std::to_string(k) + " is not bracketed by zeros of u2 inside the integrated span");
    }
    return t0 + (right[n] - right[0]);
  }
  if (left.size() < n + 1) {
    throw RangeError("branch " + std::to_string(k) + " is not bracketed by zeros of u2 inside the integrated span");
  }
  return t0 - (left[0] - left[n]);
}

CanonicalBasis branch_basis(const CanonicalBasis& basis, int k) {
  if (k == 0) return basis;
  const double tk = branch_anchor(basis, k);
  CanonicalBasis out = rebase(basis, tk);
  // The anchor must sit in the k-th interval of the original basis.
  if (basis.branch_index(tk) != k) {
    throw RangeError("branch " + std::to_string(k) + ": anchor " + fmt(tk) + " falls outside its interval");
  }
  return out;
}

}  // namespace arnold
