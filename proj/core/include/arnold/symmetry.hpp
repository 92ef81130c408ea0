#pragma once

#include <functional>
#include <memory>
#include <string>

#include "arnold/lsode.hpp"
#include "arnold/propagate.hpp"
#include "arnold/wavefield.hpp"

namespace arnold {

/// Conserved generators of the GCK system built from a canonical basis:
///
///     X = (u1'/W) x + (i hbar/m) u1 d/dx,     P = -i hbar u2 d/dx - m (u2'/W) x.
///
/// Derivatives use the 5-point stencils of wavefield. Time is passed
/// explicitly; the frame's own time is not consulted. The basis must have
/// Lambda = 0 (InvalidArgument otherwise).
WaveFrame apply_X(const CanonicalBasis& basis, double t, const WaveFrame& frame);
WaveFrame apply_P(const CanonicalBasis& basis, double t, const WaveFrame& frame);

/// H = alpha P^2/2m + (m/2) beta X^2 + (delta/2)(XP + PX) with
///
///     alpha = (u1^2 w^2 + u1'^2)/W,  beta = (u2^2 w^2 + u2'^2)/W,  delta = (u1 u2 w^2 + u1' u2')/W,
///
/// so that alpha beta - delta^2 = w^2.
struct HamiltonianCoeffs {
  double alpha;
  double beta;
  double delta;
};
HamiltonianCoeffs hamiltonian_coeffs(const CanonicalBasis& basis, double t);

/// Time-dependent linear operator on grid frames tied to a basis.
class GridOperator {
 public:
  enum class Kind { X, P, X2, P2, XP_PX, free_kappa, free_pi, hamiltonian, combination };
  using ApplyFn = std::function<std::vector<cplx>(double t, const WaveFrame&)>;

  static GridOperator X(const CanonicalBasis& basis);
  static GridOperator P(const CanonicalBasis& basis);
  static GridOperator X2(const CanonicalBasis& basis);
  static GridOperator P2(const CanonicalBasis& basis);
  /// XP + PX.
  static GridOperator XP_PX(const CanonicalBasis& basis);
  /// Free-particle generators in the kappa picture at time tau:
  /// kappa + (i hbar/m) tau d/dkappa and -i hbar d/dkappa.
  static GridOperator free_kappa(const CanonicalBasis& basis);
  static GridOperator free_pi(const CanonicalBasis& basis);
  /// Direct GCK Hamiltonian -(hbar^2/2m) e^{-f} d^2 + (m/2) w^2 e^{f} x^2, f from t0.
  static GridOperator hamiltonian(const CanonicalBasis& basis);
  /// The same Hamiltonian assembled from X, P and (alpha, beta, delta).
  static GridOperator decomposed_hamiltonian(const CanonicalBasis& basis);
  static GridOperator custom(const CanonicalBasis& basis, std::string description, ApplyFn fn);

  Kind kind() const noexcept { return kind_; }
  const std::string& description() const noexcept { return description_; }
  const CanonicalBasis& basis() const noexcept { return *basis_; }

  /// Output keeps the grid, time and picture of the input.
  WaveFrame apply(double t, const WaveFrame& frame) const;
  std::vector<cplx> apply_values(double t, const WaveFrame& frame) const;

  friend GridOperator operator+(const GridOperator& a, const GridOperator& b);
  friend GridOperator operator-(const GridOperator& a, const GridOperator& b);
  friend GridOperator operator*(cplx c, const GridOperator& a);

 private:
  GridOperator(Kind kind, std::string description, std::shared_ptr<const CanonicalBasis> basis, ApplyFn fn);

  Kind kind_;
  std::string description_;
  std::shared_ptr<const CanonicalBasis> basis_;
  ApplyFn fn_;
};

/// AB - BA.
GridOperator commutator(const GridOperator& a, const GridOperator& b);

/// <psi|O(t) psi> by Simpson quadrature at the frame's time.
cplx expectation(const GridOperator& op, const WaveFrame& frame);

/// ||H psi - H_decomposed psi|| / ||H psi|| over the innermost 90% of nodes.
double decomposition_check(const CanonicalBasis& basis, double t, const WaveFrame& frame);

/// max_k |<psi_k|O psi_k> - <psi_0|O psi_0>| over a propagated sequence.
/// Throws InvalidArgument unless the run integrated the operator's system
/// anchored at its t0.
double conserved_drift(const GridOperator& op, const Propagation& run);

}  // namespace arnold
