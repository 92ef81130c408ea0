#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace arnold::ode {

/// Right-hand side dy/dt = f(t, y).
using Rhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

/// Optional early-termination test, evaluated after every accepted step.
/// Returning true stops the integration in that direction.
using StopPredicate = std::function<bool(double t, std::span<const double> y)>;

struct Tolerances {
  double rtol = 1e-10;
  double atol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 2'000'000;
};

/// Value and first derivative of a dense-output component.
struct Jet {
  double value;
  double derivative;
};

/// Accepted step nodes (t, y, dy/dt) of an integration, with Hermite
/// interpolation between them.
///
/// Second-order systems store position/velocity pairs; `pair()` uses the
/// quintic Hermite interpolant built from position, velocity and
/// acceleration at both ends, so the interpolant is C2 across nodes.
class Solution {
 public:
  Solution() = default;
  Solution(std::size_t dim, std::vector<double> t, std::vector<double> y, std::vector<double> dy);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return t_.size(); }
  double t_min() const { return t_.front(); }
  double t_max() const { return t_.back(); }
  std::span<const double> times() const noexcept { return t_; }
  double node_value(std::size_t node, std::size_t component) const { return y_[node * dim_ + component]; }
  double node_slope(std::size_t node, std::size_t component) const { return dy_[node * dim_ + component]; }

  /// Cubic Hermite interpolation of one component.
  Jet component(double t, std::size_t i) const;

  /// Quintic Hermite of a position whose time derivative is component `vel`.
  /// Returns the position and its derivative (from the same polynomial).
  Jet pair(double t, std::size_t pos, std::size_t vel) const;

  /// Second derivative of the quintic pair interpolant.
  double pair_second(double t, std::size_t pos, std::size_t vel) const;

 private:
  std::size_t locate(double t) const;

  std::size_t dim_ = 0;
  std::vector<double> t_;
  std::vector<double> y_;
  std::vector<double> dy_;
};

/// Integrates with the Dormand-Prince 5(4) embedded pair from `t0` forward to
/// `t_hi` and backward to `t_lo`, merging both sweeps into one solution.
/// Throws IntegratorError on step-size underflow or budget exhaustion.
Solution integrate(const Rhs& rhs, double t0, std::span<const double> y0, double t_lo, double t_hi,
                   const Tolerances& tol = {}, const StopPredicate& stop = {});

}  // namespace arnold::ode
