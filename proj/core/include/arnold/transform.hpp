#pragma once

#include "arnold/lsode.hpp"
#include "arnold/timefn.hpp"
#include "arnold/wavefield.hpp"

namespace arnold {

/// Point (kappa, tau) of the straightened, free-particle frame.
struct CatPoint {
  double kappa;
  double tau;
};

/// Point (x, t) of the original system.
struct SpaceTimePoint {
  double x;
  double t;
};

/// kappa = (x - up)/u2, tau = u1/u2. Throws RangeError for t outside T.
CatPoint cat_forward(const CanonicalBasis& basis, double x, double t);
/// Inverse of cat_forward. Throws RangeError when tau is unreachable.
SpaceTimePoint cat_inverse(const CanonicalBasis& basis, CatPoint p);

/// Kappa grid covering the image of `x_grid` at time t (hull scaled by 1/u2).
Grid suggest_kappa_grid(const CanonicalBasis& basis, const Grid& x_grid, double t);
/// X grid covering the preimage of `kappa_grid` at the time mapped to tau.
Grid suggest_x_grid(const CanonicalBasis& basis, const Grid& kappa_grid, double tau);

/// Quantum Arnold Transformation of a position-picture frame at t in T:
///
///     phi~(kappa, tau) = sqrt(u2) exp(-(i/2)(m/hbar) u2'/(W u2) x^2) phi(x, t),  x = u2 kappa,
///
/// sampled on `target` (a kappa grid). Throws InvalidArgument for a nonzero
/// Lambda or the wrong picture, RangeError for t outside T.
WaveFrame qat_apply(const CanonicalBasis& basis, const WaveFrame& frame, const Grid& target);
/// Inverse map of a kappa-picture frame at tau back to the x picture at t(tau).
WaveFrame qat_inverse(const CanonicalBasis& basis, const WaveFrame& frame, const Grid& target);

/// The QAT formula continued past the zeros of u2: for t in the k-th interval
/// the square root is taken as exp(-i k pi/2) sqrt(|u2|). Agrees with
/// qat_apply on T.
WaveFrame qat_apply_continued(const CanonicalBasis& basis, const WaveFrame& frame, const Grid& target);

/// QAT built on the k-th branch basis, for a frame at t in T_k.
/// Throws RangeError when the branch or t is unavailable.
WaveFrame unfolded_qat(const CanonicalBasis& basis, int k, const WaveFrame& frame, const Grid& target);

/// Time-dependent quadratic Hamiltonian
///
///     H = -(hbar^2/2m) mu d^2/dx^2 - i Gamma hbar (x d/dx + 1/2) + (m/2) nu x^2.
struct TdqhSystem {
  TimeFn mu;
  TimeFn gamma;
  TimeFn nu;
  double m = 1.0;
  double hbar = 1.0;

  /// Throws InvalidArgument unless m, hbar > 0.
  void validate() const;
  /// Throws DomainError when mu <= 0 somewhere on the closed span (sampled).
  void require_positive_mu(Interval span) const;
  /// Time-dependent mass m/mu.
  double mass(double t) const { return m / mu(t); }
  /// mu nu, the squared frequency of the time-dependent-mass form.
  double big_omega2(double t) const { return mu(t) * nu(t); }
};

/// LSODE of the gauged system: f' = -mu'/mu, w^2 = mu nu + Gamma(mu'/mu - Gamma) - Gamma'.
/// Coefficients are built symbolically from the inputs.
LsodeSystem tdqh_to_lsode(const TdqhSystem& sys);

/// Gauged QAT for a TDQH system. f is anchored at f(t0) = -ln mu(t0), so the
/// Wronskian used by the map is mu(t) exactly; u1 and tau carry the factor
/// mu(t0) relative to the canonical basis.
class GaugedQat {
 public:
  /// Throws DomainError when mu <= 0 on the span.
  GaugedQat(const TdqhSystem& sys, double t0, Interval span, const ode::Tolerances& tol = {});

  const TdqhSystem& system() const noexcept { return sys_; }
  const CanonicalBasis& basis() const noexcept { return basis_; }
  /// mu(t0).
  double scale() const noexcept { return scale_; }
  /// Wronskian of the scaled pair, mu(t).
  double wronskian(double t) const { return scale_ * basis_.wronskian_exact(t); }
  double tau_of_t(double t) const;
  double t_of_tau(double tau) const;

  WaveFrame apply(const WaveFrame& frame, const Grid& target) const;
  WaveFrame inverse(const WaveFrame& frame, const Grid& target) const;

 private:
  TdqhSystem sys_;
  CanonicalBasis basis_;
  double scale_ = 1.0;
};

WaveFrame gqat_apply(const GaugedQat& g, const WaveFrame& frame, const Grid& target);
WaveFrame gqat_inverse(const GaugedQat& g, const WaveFrame& frame, const Grid& target);

}  // namespace arnold
