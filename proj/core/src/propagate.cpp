#include "arnold/propagate.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "arnold/error.hpp"
#include "arnold/quadrature.hpp"

extern "C" void zgbsv_(const int* n, const int* kl, const int* ku, const int* nrhs, std::complex<double>* ab,
                       const int* ldab, int* ipiv, std::complex<double>* b, const int* ldb, int* info);

namespace arnold {

void GaussianParams::validate() const {
  if (!(sigma > 0.0) || !(m > 0.0) || !(hbar > 0.0)) {
    throw InvalidArgument("GaussianParams: sigma, m and hbar must be positive");
  }
}

cplx free_gaussian(const GaussianParams& p, double kappa, double tau) {
  const cplx a(1.0, p.hbar * tau / (p.m * p.sigma * p.sigma));
  const double xi = kappa - p.center - p.momentum * tau / p.m;
  const double pre = std::pow(std::numbers::pi * p.sigma * p.sigma, -0.25);
  const double phase = (p.momentum * kappa - p.momentum * p.momentum * tau / (2.0 * p.m)) / p.hbar;
  return pre / std::sqrt(a) * std::exp(-xi * xi / (2.0 * p.sigma * p.sigma * a) + cplx(0.0, phase));
}

WaveFrame free_gaussian_frame(const GaussianParams& p, const Grid& grid, double tau, Picture picture) {
  p.validate();
  return sample_frame(grid, [&](double k) { return free_gaussian(p, k, tau); }, tau, picture);
}

CoeffFn free_coeffs(double m, double hbar) {
  return [m, hbar](double) { return QuadraticCoeffs{hbar * hbar / (2.0 * m), 0.0, 0.0}; };
}

CoeffFn gck_coeffs(const LsodeSystem& sys, double t_anchor) {
  sys.validate();
  return [sys, t_anchor](double t) {
    const double f = sys.f_dot.is_constant() ? sys.f_dot(t_anchor) * (t - t_anchor)
                                             : adaptive_simpson([&](double s) { return sys.f_dot(s); }, t_anchor, t, 1e-13);
    return QuadraticCoeffs{sys.hbar * sys.hbar * std::exp(-f) / (2.0 * sys.m), 0.5 * sys.m * sys.omega2(t) * std::exp(f),
                           0.0};
  };
}

CoeffFn tdqh_coeffs(const TdqhSystem& sys) {
  sys.validate();
  return [sys](double t) {
    return QuadraticCoeffs{sys.hbar * sys.hbar * sys.mu(t) / (2.0 * sys.m), 0.5 * sys.m * sys.nu(t), sys.gamma(t)};
  };
}

std::vector<cplx> apply_quadratic(const QuadraticCoeffs& c, const WaveFrame& frame, double hbar) {
  frame.validate();
  const double h = frame.grid.spacing();
  auto out = second_derivative(frame.values, h);
  std::vector<cplx> d1;
  if (c.gamma != 0.0) d1 = first_derivative(frame.values, h);
  const cplx ig(0.0, -hbar * c.gamma);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double x = frame.grid.x(i);
    out[i] = -c.kinetic * out[i] + c.potential * x * x * frame.values[i];
    if (c.gamma != 0.0) out[i] += ig * (x * d1[i] + 0.5 * frame.values[i]);
  }
  return out;
}

HamiltonianApply make_hamiltonian(CoeffFn coeffs, double hbar) {
  return [coeffs = std::move(coeffs), hbar](double t, const WaveFrame& f) { return apply_quadratic(coeffs(t), f, hbar); };
}

CrankNicolson::CrankNicolson(CoeffFn coeffs, double hbar) : coeffs_(std::move(coeffs)), hbar_(hbar) {}

WaveFrame CrankNicolson::step(const WaveFrame& frame, double dt) {
  frame.validate();
  const int n = static_cast<int>(frame.grid.size());
  const double h = frame.grid.spacing();
  const QuadraticCoeffs c = coeffs_(frame.time + 0.5 * dt);

  // Row i of H: sum_j H(i, j) psi_j for |i - j| <= 2.
  //   kinetic: -K/(12h^2) (-1, 16, -30, 16, -1)
  //   gamma:   -i hbar G (x_i D + D x_i)/2 with D = (1, -8, 0, 8, -1)/(12h)
  const double kin = -c.kinetic / (12.0 * h * h);
  const double lap[5] = {-1.0, 16.0, -30.0, 16.0, -1.0};
  const double der[5] = {1.0, -8.0, 0.0, 8.0, -1.0};
  const cplx ig(0.0, -hbar_ * c.gamma / (24.0 * h));
  auto H = [&](int i, int j) -> cplx {
    const int o = j - i + 2;
    const double xi = frame.grid.x(static_cast<std::size_t>(i));
    const double xj = frame.grid.x(static_cast<std::size_t>(j));
    cplx v = kin * lap[o];
    if (i == j) v += c.potential * xi * xi;
    v += ig * der[o] * (xi + xj);
    return v;
  };

  constexpr int kl = 2, ku = 2, ldab = 2 * kl + ku + 1;
  band_.assign(static_cast<std::size_t>(ldab) * n, 0.0);
  rhs_.assign(static_cast<std::size_t>(n), 0.0);
  pivots_.assign(static_cast<std::size_t>(n), 0);
  const cplx a(0.0, 0.5 * dt / hbar_);
  for (int i = 0; i < n; ++i) {
    cplx acc = frame.values[i];
    for (int j = std::max(0, i - 2); j <= std::min(n - 1, i + 2); ++j) {
      const cplx hij = H(i, j);
      band_[static_cast<std::size_t>(kl + ku + i - j + j * ldab)] = (i == j ? 1.0 : 0.0) + a * hij;
      acc -= a * hij * frame.values[j];
    }
    rhs_[i] = acc;
  }
  const int nrhs = 1;
  int info = 0;
  zgbsv_(&n, &kl, &ku, &nrhs, band_.data(), &ldab, pivots_.data(), rhs_.data(), &n, &info);
  if (info != 0) throw Error("Crank-Nicolson banded solve failed (info=" + std::to_string(info) + ")");
  return WaveFrame{frame.grid, rhs_, frame.time + dt, frame.picture};
}

WaveFrame step_crank_nicolson(const LsodeSystem& sys, double t_anchor, const WaveFrame& frame, double dt) {
  CrankNicolson cn(gck_coeffs(sys, t_anchor), sys.hbar);
  return cn.step(frame, dt);
}

WaveFrame step_crank_nicolson(const TdqhSystem& sys, const WaveFrame& frame, double dt) {
  CrankNicolson cn(tdqh_coeffs(sys), sys.hbar);
  return cn.step(frame, dt);
}

namespace {

std::vector<WaveFrame> run(CrankNicolson& cn, const WaveFrame& initial, double dt, int steps, int keep_every) {
  if (steps < 0 || keep_every < 1) throw InvalidArgument("propagate: steps >= 0 and keep_every >= 1 required");
  std::vector<WaveFrame> frames{initial};
  WaveFrame cur = initial;
  for (int k = 1; k <= steps; ++k) {
    cur = cn.step(cur, dt);
    // Recompute the time from the step count to avoid drift in the sum.
    cur.time = initial.time + k * dt;
    if (k % keep_every == 0 || k == steps) frames.push_back(cur);
  }
  return frames;
}

}  // namespace

Propagation propagate(const LsodeSystem& sys, double t_anchor, const WaveFrame& initial, double dt, int steps,
                      int keep_every) {
  CrankNicolson cn(gck_coeffs(sys, t_anchor), sys.hbar);
  return Propagation{sys, t_anchor, run(cn, initial, dt, steps, keep_every)};
}

Propagation propagate(const TdqhSystem& sys, const WaveFrame& initial, double dt, int steps, int keep_every) {
  CrankNicolson cn(tdqh_coeffs(sys), sys.hbar);
  return Propagation{sys, 0.0, run(cn, initial, dt, steps, keep_every)};
}

}  // namespace arnold
