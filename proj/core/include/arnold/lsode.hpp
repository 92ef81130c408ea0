#pragma once

#include <limits>
#include <memory>
#include <vector>

#include "arnold/ode.hpp"
#include "arnold/timefn.hpp"

namespace arnold {

/// Open interval (lo, hi); either end may be infinite.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double t) const { return lo < t && t < hi; }
  bool contains_closed(double t) const { return lo <= t && t <= hi; }
  double length() const { return hi - lo; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Coefficients of  x'' + f'(t) x' + w^2(t) x = Lambda(t),  plus the mass and
/// action used when the system is quantized.
struct LsodeSystem {
  TimeFn f_dot;
  TimeFn omega2;
  TimeFn lambda;
  double m = 1.0;
  double hbar = 1.0;

  /// Throws InvalidArgument unless m > 0 and hbar > 0.
  void validate() const;

  static LsodeSystem free_particle();
  static LsodeSystem harmonic(double omega);
  /// Damped oscillator x'' + g x' + w^2 x = 0 (Caldirola-Kanai when w > 0).
  static LsodeSystem damped(double gamma, double omega = 0.0);
};

/// Canonical solution pair (u1, u2), particular solution up and their
/// derivatives, anchored at t0:
///
///     u1(t0) = 0, u1'(t0) = 1, u2(t0) = 1, u2'(t0) = 0, up(t0) = up'(t0) = 0.
///
/// The Wronskian u1' u2 - u1 u2' equals exp(-f(t)) with f(t) = int_{t0}^t f'.
/// `validity()` is the interval between the zeros of u2 nearest t0 (infinite
/// ends when u2 has no zero on that side inside the integrated span).
class CanonicalBasis {
 public:
  struct Sample {
    double u1, du1;
    double u2, du2;
    double up, dup;
  };

  const LsodeSystem& system() const noexcept { return *system_; }
  double t0() const noexcept { return t0_; }
  /// Closed span covered by the dense output.
  Interval span() const noexcept { return span_; }
  /// Validity interval T (open).
  Interval validity() const noexcept { return validity_; }
  /// T intersected with the integrated span; the effective domain of the CAT.
  Interval domain() const noexcept;
  /// All zeros of u2 inside the span, ascending.
  const std::vector<double>& zeros() const noexcept { return zeros_; }

  Sample at(double t) const;
  double u2(double t) const;
  /// Second derivatives of u1 and u2 from the interpolant (C2 quintic Hermite).
  double u1_second(double t) const;
  double u2_second(double t) const;

  /// u1' u2 - u1 u2' from the interpolants.
  double wronskian(double t) const;
  /// exp(-f(t)) with f(t0) = 0, from the integrated damping.
  double wronskian_exact(double t) const;
  /// f(t) = int_{t0}^t f'(s) ds.
  double damping_integral(double t) const;

  /// Range of tau = u1/u2 over `domain()`; infinite where an end of T is a
  /// zero of u2.
  Interval tau_range() const noexcept { return tau_range_; }

  bool in_validity(double t) const { return validity_.contains(t) && span_.contains_closed(t); }

  /// Dense-output node times inside the span.
  std::span<const double> nodes() const { return trajectory_->solution.times(); }

  /// Signed index of the validity interval containing t: 0 for T, +1 for the
  /// interval after the first zero to the right, -1 to the left, and so on.
  int branch_index(double t) const;

 private:
  struct Trajectory {
    ode::Solution solution;
  };
  // Component layout of the integrated state.
  enum : std::size_t { kU1 = 0, kV1, kU2, kV2, kUp, kVp, kF, kFd, kDim };

  CanonicalBasis() = default;
  void finish();

  std::shared_ptr<const LsodeSystem> system_;
  std::shared_ptr<const Trajectory> trajectory_;
  double t0_ = 0.0;
  Interval span_;
  Interval validity_;
  Interval tau_range_;
  std::vector<double> zeros_;
  // Branch bases are linear combinations of the integrated pair:
  //   u1 = c[0] U1 + c[1] U2,  u2 = c[2] U1 + c[3] U2,  up = Up + c[4] U1 + c[5] U2.
  double coef_[6] = {1.0, 0.0, 0.0, 1.0, 0.0, 0.0};
  double f_shift_ = 0.0;

  friend CanonicalBasis canonical_basis(const LsodeSystem&, double, Interval, const ode::Tolerances&);
  friend CanonicalBasis branch_basis(const CanonicalBasis&, int);
  friend CanonicalBasis rebase(const CanonicalBasis&, double);
};

/// Integrates the homogeneous and inhomogeneous LSODE on the closed span
/// [span.lo, span.hi] from the anchor t0 and locates the zeros of u2 by a
/// sign scan over the dense-output nodes followed by bisection.
/// Throws InvalidArgument for an invalid system or span, IntegratorError on
/// integrator failure.
CanonicalBasis canonical_basis(const LsodeSystem& system, double t0, Interval span,
                               const ode::Tolerances& tol = {});

/// Canonical basis of the same system anchored at `t_anchor` inside the span,
/// formed as a linear combination of the integrated pair (no re-integration).
CanonicalBasis rebase(const CanonicalBasis& basis, double t_anchor);

/// tau = u1(t)/u2(t). Throws RangeError outside the validity interval.
double tau_of_t(const CanonicalBasis& basis, double t);
/// tau by adaptive quadrature of W/u2^2 from t0; cross-check of tau_of_t.
double tau_by_quadrature(const CanonicalBasis& basis, double t, double tol = 1e-12);
/// Inverse of tau_of_t on the validity interval (monotone, dtau/dt = W/u2^2).
double t_of_tau(const CanonicalBasis& basis, double tau);

/// Anchor time t_k of the k-th validity interval: t0 shifted by the distance
/// between the outer zeros of T_k and T_0 (t_k = k pi/w for the oscillator).
double branch_anchor(const CanonicalBasis& basis, int k);
/// Basis satisfying the canonicity conditions at the anchor of T_k.
/// Throws RangeError when T_k is not bracketed inside the integrated span.
CanonicalBasis branch_basis(const CanonicalBasis& basis, int k);

}  // namespace arnold
