#pragma once

#include <functional>

namespace arnold {

/// Adaptive Simpson quadrature of `f` over [a, b] to absolute tolerance
/// `tol`. Works for a > b (returns the signed integral).
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol = 1e-10,
                        int max_depth = 50);

}  // namespace arnold
