#pragma once

#include <functional>
#include <variant>
#include <vector>

#include "arnold/lsode.hpp"
#include "arnold/transform.hpp"
#include "arnold/wavefield.hpp"

namespace arnold {

/// Gaussian wave packet of the free particle, width sigma at tau = 0.
struct GaussianParams {
  double sigma = 1.0;
  double center = 0.0;
  double momentum = 0.0;
  double m = 1.0;
  double hbar = 1.0;

  /// Throws InvalidArgument unless sigma, m, hbar > 0.
  void validate() const;
};

/// Normalized solution of i hbar phi_tau = -(hbar^2/2m) phi_kk:
///
///     phi = (pi sigma^2)^(-1/4) a^(-1/2) exp(-(k - c - p tau/m)^2/(2 sigma^2 a) + i(p k - p^2 tau/2m)/hbar),
///     a = 1 + i hbar tau/(m sigma^2).
cplx free_gaussian(const GaussianParams& p, double kappa, double tau);
WaveFrame free_gaussian_frame(const GaussianParams& p, const Grid& grid, double tau, Picture picture = Picture::kappa);

/// Coefficients of a quadratic Hamiltonian at one instant:
///
///     H = -kinetic d^2/dx^2 + potential x^2 - i hbar gamma (x d/dx + 1/2).
struct QuadraticCoeffs {
  double kinetic = 0.5;
  double potential = 0.0;
  double gamma = 0.0;
};
using CoeffFn = std::function<QuadraticCoeffs(double t)>;

/// H = -(hbar^2/2m) d^2 (free particle).
CoeffFn free_coeffs(double m, double hbar);
/// H = -(hbar^2/2m) e^{-f} d^2 + (m/2) w^2 e^{f} x^2 with f(t_anchor) = 0;
/// f is integrated from f' by adaptive quadrature, independently of lsode.
CoeffFn gck_coeffs(const LsodeSystem& sys, double t_anchor);
/// H = -(hbar^2/2m) mu d^2 - i Gamma hbar (x d + 1/2) + (m/2) nu x^2.
CoeffFn tdqh_coeffs(const TdqhSystem& sys);

/// Applies the Hamiltonian with the five-point stencils of wavefield.
std::vector<cplx> apply_quadratic(const QuadraticCoeffs& c, const WaveFrame& frame, double hbar);
HamiltonianApply make_hamiltonian(CoeffFn coeffs, double hbar);

/// Crank-Nicolson stepper on a fixed grid with Dirichlet truncation at the
/// ends. The spatial operator is the truncated five-point Laplacian plus the
/// symmetrized (X D + D X)/2 form of the gamma term, so the discrete H is
/// Hermitian and each step is unitary in the discrete l2 norm. Coefficients
/// are evaluated at the step midpoint. Each stepper owns its workspace.
class CrankNicolson {
 public:
  CrankNicolson(CoeffFn coeffs, double hbar);

  /// One step of length dt from frame.time. Throws Error if the banded
  /// solve fails.
  WaveFrame step(const WaveFrame& frame, double dt);

 private:
  CoeffFn coeffs_;
  double hbar_;
  std::vector<cplx> band_;
  std::vector<cplx> rhs_;
  std::vector<int> pivots_;
};

/// One Crank-Nicolson step of the GCK equation (f anchored at t_anchor).
WaveFrame step_crank_nicolson(const LsodeSystem& sys, double t_anchor, const WaveFrame& frame, double dt);
/// One Crank-Nicolson step of the TDQH equation.
WaveFrame step_crank_nicolson(const TdqhSystem& sys, const WaveFrame& frame, double dt);

/// Frames of a propagation and the system that produced them.
struct Propagation {
  std::variant<LsodeSystem, TdqhSystem> system;
  /// Anchor of f for GCK systems.
  double t_anchor = 0.0;
  std::vector<WaveFrame> frames;
};

/// Takes `steps` steps of length dt from `initial`, keeping every
/// `keep_every`-th frame (and always the first and last).
Propagation propagate(const LsodeSystem& sys, double t_anchor, const WaveFrame& initial, double dt, int steps,
                      int keep_every = 1);
Propagation propagate(const TdqhSystem& sys, const WaveFrame& initial, double dt, int steps, int keep_every = 1);

}  // namespace arnold
