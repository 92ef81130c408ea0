#pragma once

#include <functional>

#include "arnold/lsode.hpp"
#include "arnold/transform.hpp"
#include "arnold/wavefield.hpp"

namespace arnold {

/// Composition of the CAT of system 2 (source) with the inverse CAT of
/// system 1 (target). Both bases must share the anchor t0.
///
///     t1 = tau1^{-1}(tau2(t2)),   b(t2) = u2^(2)(t2) / u2^(1)(t1),   W1 dt1 = (W2/b^2) dt2.
class AepMap {
 public:
  /// Throws InvalidArgument when the anchors differ.
  AepMap(CanonicalBasis target, CanonicalBasis source);

  const CanonicalBasis& basis1() const noexcept { return b1_; }
  const CanonicalBasis& basis2() const noexcept { return b2_; }

  /// Throws RangeError when t2 is outside T2 or tau2(t2) is unreachable by tau1.
  double t1_of_t2(double t2) const;
  double t2_of_t1(double t1) const;
  double b(double t2) const;
  double b_dot(double t2) const;
  /// dt1/dt2 = W2 / (b^2 W1).
  double dt1_dt2(double t2) const;
  /// Values of t2 for which the map is defined.
  Interval domain() const noexcept { return domain_; }

 private:
  CanonicalBasis b1_, b2_;
  Interval domain_;
};

/// x1 = (x2 - up2(t2))/b + up1(t1) at t1 = t1(t2).
SpaceTimePoint aep_classical(const AepMap& map, double x2, double t2);

/// Right-hand side used by generalized_ep_residual.
enum class EpForm {
  /// (W2^2/W1^2)(1/b^3)[w1^2 + f1' (u2^(1)'/u2^(1))(1 - b^2 W1/W2)]
  bracket,
  /// (W2^2/W1^2)(1/b^3) w1^2, which the ratio-of-bases b satisfies for any f1'.
  reduced,
};

/// |b'' + f2' b' + w2^2 b - rhs| for the ratio-of-bases b. b'' is a
/// Richardson-extrapolated central difference with h = 1e-4; bracket terms use
/// dense-output values at t1(t2).
double generalized_ep_residual(const AepMap& map, double t2, EpForm form = EpForm::bracket);

/// Quantum AEP map of a system-2 x-picture frame at t2 to system 1 at t1:
///
///     phi1(x1) = sqrt(b) exp(-(i/2)(m/hbar)(b'/(W2 b)) x2^2) phi2(x2),   x2 = b x1.
///
/// Throws InvalidArgument when the systems carry different m or hbar, or a
/// nonzero Lambda.
WaveFrame qaep_apply(const AepMap& map, const WaveFrame& frame2, const Grid& target);

/// Value, first and second derivative of a sampled function of time.
struct Jet2 {
  double value;
  double first;
  double second;
};
using JetFn = std::function<Jet2(double t)>;

/// Positive solution b(t) of the Ermakov-Pinney equation
///
///     b'' + f' b' + w^2 b = W^2 w0^2 / b^3,
///
/// with W the Wronskian weight of its linear system (exp(-f) for an
/// integrated solution).
class EpSolution {
 public:
  enum class Source { integrated, ratio_of_bases, superposition };

  EpSolution(Source source, double omega0, Interval span, JetFn b, JetFn wronskian);

  Source source() const noexcept { return source_; }
  double omega0() const noexcept { return omega0_; }
  Interval span() const noexcept { return span_; }
  Jet2 at(double t) const { return b_(t); }
  double b(double t) const { return b_(t).value; }
  double b_dot(double t) const { return b_(t).first; }
  double wronskian(double t) const { return w_(t).value; }
  Jet2 wronskian_jet(double t) const { return w_(t); }

 private:
  Source source_;
  double omega0_;
  Interval span_;
  JetFn b_, w_;
};

/// Integrates the equation with the w2^2 coefficient from (b0, b0') at
/// t_start (default span.lo) over the span; W2 = exp(-int f2'). Throws
/// DomainError when b drops below 1e-8 and IntegratorError on failure.
EpSolution ep_integrate(const TimeFn& omega2, const TimeFn& f2_dot, double omega0, double b0, double bdot0,
                        Interval span, double t_start = std::numeric_limits<double>::quiet_NaN());

/// b from the AEP map as a ratio of bases (b'' by finite differences).
/// Throws InvalidArgument unless the target w1^2 is constant.
EpSolution ep_from_map(const AepMap& map);

/// b = sqrt(c1 y1^2 + c2 y2^2 + 2 c3 y1 y2) with w0^2 = c1 c2 - c3^2 and
/// W = y1' y2 - y1 y2'. Throws InvalidArgument when c1 c2 < c3^2 and
/// DomainError when b^2 <= 0 on the span.
EpSolution ep_superpose(const JetFn& y1, const JetFn& y2, double c1, double c2, double c3, Interval span);
/// Same with y1 = u1, y2 = u2 of a canonical basis over its span.
EpSolution ep_superpose(const CanonicalBasis& basis, double c1, double c2, double c3);

/// y = c1 rho cos(w0 theta + c2), theta(t) = int_{origin}^t W/rho^2 by
/// adaptive Simpson (1e-10 absolute). The origin defaults to the span start.
JetFn linear_from_ep(const EpSolution& rho, double omega0, double c1, double c2,
                     double theta_origin = std::numeric_limits<double>::quiet_NaN());

/// |b'' + f' b' + w^2 b - W^2 w0^2 / b^3| at t.
double ep_residual(const EpSolution& b, const TimeFn& omega2, const TimeFn& f_dot, double t);
/// |y'' + f' y' + w^2 y| at t.
double linear_residual(const JetFn& y, const TimeFn& omega2, const TimeFn& f_dot, double t);

}  // namespace arnold
