#include "arnold/ode.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "arnold/error.hpp"

namespace arnold::ode {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0, a75 = -2187.0 / 6784.0,
                 a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                 e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

struct Sweep {
  std::vector<double> t;
  std::vector<double> y;
  std::vector<double> dy;
};

double error_norm(std::span<const double> err, std::span<const double> y0, std::span<const double> y1,
                  const Tolerances& tol) {
  double acc = 0.0;
  for (std::size_t i = 0; i < err.size(); ++i) {
    const double sc = tol.atol + tol.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double r = err[i] / sc;
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(err.size()));
}

double initial_step(const Rhs& rhs, double t0, std::span<const double> y0, std::span<const double> f0, double dir,
                    const Tolerances& tol) {
  const std::size_t n = y0.size();
  double d0 = 0.0, d1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sc = tol.atol + tol.rtol * std::abs(y0[i]);
    d0 += (y0[i] / sc) * (y0[i] / sc);
    d1 += (f0[i] / sc) * (f0[i] / sc);
  }
  d0 = std::sqrt(d0 / n);
  d1 = std::sqrt(d1 / n);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  std::vector<double> y1(n), f1(n);
  for (std::size_t i = 0; i < n; ++i) y1[i] = y0[i] + dir * h0 * f0[i];
  rhs(t0 + dir * h0, y1, f1);
  double d2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sc = tol.atol + tol.rtol * std::abs(y0[i]);
    d2 += ((f1[i] - f0[i]) / sc) * ((f1[i] - f0[i]) / sc);
  }
  d2 = std::sqrt(d2 / n) / h0;
  const double dm = std::max(d1, d2);
  const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 1.0 / 5.0);
  return std::min({100.0 * h0, h1, tol.max_step});
}

Sweep sweep(const Rhs& rhs, double t0, std::span<const double> y0, double t_end, const Tolerances& tol,
            const StopPredicate& stop) {
  const std::size_t n = y0.size();
  Sweep out;
  std::vector<double> y(y0.begin(), y0.end());
  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), err(n);
  rhs(t0, y, k1);
  out.t.push_back(t0);
  out.y.insert(out.y.end(), y.begin(), y.end());
  out.dy.insert(out.dy.end(), k1.begin(), k1.end());
  if (t_end == t0) return out;

  const double dir = t_end > t0 ? 1.0 : -1.0;
  double t = t0;
  double h = initial_step(rhs, t0, y, k1, dir, tol);
  std::size_t steps = 0;

  while (dir * (t_end - t) > 0.0) {
    if (++steps > tol.max_steps) throw IntegratorError("step budget exhausted", t);
    h = std::min({h, tol.max_step, std::abs(t_end - t)});
    const double min_h = 1e-14 * std::max(1.0, std::abs(t));
    if (h < min_h) throw IntegratorError("step size underflow", t);
    // Absorb a leftover that would be shorter than the minimum step.
    if (std::abs(t_end - t) - h < min_h) h = std::abs(t_end - t);
    const double hs = dir * h;

    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + hs * a21 * k1[i];
    rhs(t + c2 * hs, ytmp, k2);
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
    rhs(t + c3 * hs, ytmp, k3);
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(t + c4 * hs, ytmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    rhs(t + c5 * hs, ytmp, k5);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    rhs(t + hs, ytmp, k6);
    for (std::size_t i = 0; i < n; ++i)
      ynew[i] = y[i] + hs * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    rhs(t + hs, ynew, k7);
    for (std::size_t i = 0; i < n; ++i)
      err[i] = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);

    const double en = error_norm(err, y, ynew, tol);
    if (!std::isfinite(en)) {
      h *= 0.2;
      continue;
    }
    if (en <= 1.0) {
      const bool last = std::abs(t_end - (t + hs)) <= 1e-15 * std::max(1.0, std::abs(t_end)) || h >= std::abs(t_end - t);
      t = last ? t_end : t + hs;
      y.swap(ynew);
      k1.swap(k7);
      out.t.push_back(t);
      out.y.insert(out.y.end(), y.begin(), y.end());
      out.dy.insert(out.dy.end(), k1.begin(), k1.end());
      if (stop && stop(t, y)) break;
      const double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
      h *= fac;
    } else {
      h *= std::clamp(0.9 * std::pow(en, -0.2), 0.1, 0.9);
    }
  }
  return out;
}

}  // namespace

Solution::Solution(std::size_t dim, std::vector<double> t, std::vector<double> y, std::vector<double> dy)
    : dim_(dim), t_(std::move(t)), y_(std::move(y)), dy_(std::move(dy)) {}

std::size_t Solution::locate(double t) const {
  if (t_.size() < 2) return 0;
  if (t < t_.front() || t > t_.back()) {
    throw RangeError("dense output queried at t=" + std::to_string(t) + " outside [" + std::to_string(t_.front()) +
                     ", " + std::to_string(t_.back()) + "]");
  }
  auto it = std::upper_bound(t_.begin(), t_.end(), t);
  std::size_t k = static_cast<std::size_t>(it - t_.begin());
  if (k == 0) k = 1;
  if (k >= t_.size()) k = t_.size() - 1;
  return k - 1;
}

Jet Solution::component(double t, std::size_t i) const {
  if (t_.size() == 1) return {y_[i], dy_[i]};
  const std::size_t k = locate(t);
  const double h = t_[k + 1] - t_[k];
  const double s = (t - t_[k]) / h;
  const double y0 = node_value(k, i), y1 = node_value(k + 1, i);
  const double d0 = node_slope(k, i), d1 = node_slope(k + 1, i);
  const double s2 = s * s, s3 = s2 * s;
  const double v = (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * d0 + (-2 * s3 + 3 * s2) * y1 +
                   (s3 - s2) * h * d1;
  const double dv = ((6 * s2 - 6 * s) * y0 + (3 * s2 - 4 * s + 1) * h * d0 + (-6 * s2 + 6 * s) * y1 +
                     (3 * s2 - 2 * s) * h * d1) /
                    h;
  return {v, dv};
}

Jet Solution::pair(double t, std::size_t pos, std::size_t vel) const {
  if (t_.size() == 1) return {y_[pos], y_[vel]};
  const std::size_t k = locate(t);
  const double h = t_[k + 1] - t_[k];
  const double s = (t - t_[k]) / h;
  const double p0 = node_value(k, pos), p1 = node_value(k + 1, pos);
  const double v0 = node_value(k, vel), v1 = node_value(k + 1, vel);
  const double a0 = node_slope(k, vel), a1 = node_slope(k + 1, vel);
  const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
  const double H0 = 1 - 10 * s3 + 15 * s4 - 6 * s5;
  const double H1 = s - 6 * s3 + 8 * s4 - 3 * s5;
  const double H2 = 0.5 * (s2 - 3 * s3 + 3 * s4 - s5);
  const double H3 = 10 * s3 - 15 * s4 + 6 * s5;
  const double H4 = -4 * s3 + 7 * s4 - 3 * s5;
  const double H5 = 0.5 * (s3 - 2 * s4 + s5);
  const double D0 = -30 * s2 + 60 * s3 - 30 * s4;
  const double D1 = 1 - 18 * s2 + 32 * s3 - 15 * s4;
  const double D2 = 0.5 * (2 * s - 9 * s2 + 12 * s3 - 5 * s4);
  const double D4 = -12 * s2 + 28 * s3 - 15 * s4;
  const double D5 = 0.5 * (3 * s2 - 8 * s3 + 5 * s4);
  const double value = H0 * p0 + H1 * h * v0 + H2 * h * h * a0 + H3 * p1 + H4 * h * v1 + H5 * h * h * a1;
  const double deriv = (D0 * p0 + D1 * h * v0 + D2 * h * h * a0 - D0 * p1 + D4 * h * v1 + D5 * h * h * a1) / h;
  return {value, deriv};
}

double Solution::pair_second(double t, std::size_t pos, std::size_t vel) const {
  if (t_.size() == 1) return dy_[vel];
  const std::size_t k = locate(t);
  const double h = t_[k + 1] - t_[k];
  const double s = (t - t_[k]) / h;
  const double p0 = node_value(k, pos), p1 = node_value(k + 1, pos);
  const double v0 = node_value(k, vel), v1 = node_value(k + 1, vel);
  const double a0 = node_slope(k, vel), a1 = node_slope(k + 1, vel);
  const double s2 = s * s, s3 = s2 * s;
  const double E0 = -60 * s + 180 * s2 - 120 * s3;
  const double E1 = -36 * s + 96 * s2 - 60 * s3;
  const double E2 = 0.5 * (2 - 18 * s + 36 * s2 - 20 * s3);
  const double E4 = -24 * s + 84 * s2 - 60 * s3;
  const double E5 = 0.5 * (6 * s - 24 * s2 + 20 * s3);
  return (E0 * p0 + E1 * h * v0 + E2 * h * h * a0 - E0 * p1 + E4 * h * v1 + E5 * h * h * a1) / (h * h);
}

Solution integrate(const Rhs& rhs, double t0, std::span<const double> y0, double t_lo, double t_hi,
                   const Tolerances& tol, const StopPredicate& stop) {
  if (!(t_lo <= t0 && t0 <= t_hi)) throw InvalidArgument("integrate: t0 must lie inside [t_lo, t_hi]");
  const std::size_t n = y0.size();
  Sweep fwd = sweep(rhs, t0, y0, t_hi, tol, stop);
  Sweep bwd = sweep(rhs, t0, y0, t_lo, tol, stop);

  std::vector<double> t, y, dy;
  const std::size_t nb = bwd.t.size();
  t.reserve(nb + fwd.t.size());
  y.reserve((nb + fwd.t.size()) * n);
  dy.reserve((nb + fwd.t.size()) * n);
  for (std::size_t k = nb; k-- > 1;) {
    t.push_back(bwd.t[k]);
    y.insert(y.end(), bwd.y.begin() + k * n, bwd.y.begin() + (k + 1) * n);
    dy.insert(dy.end(), bwd.dy.begin() + k * n, bwd.dy.begin() + (k + 1) * n);
  }
  t.insert(t.end(), fwd.t.begin(), fwd.t.end());
  y.insert(y.end(), fwd.y.begin(), fwd.y.end());
  dy.insert(dy.end(), fwd.dy.begin(), fwd.dy.end());
  return Solution(n, std::move(t), std::move(y), std::move(dy));
}

}  // namespace arnold::ode
