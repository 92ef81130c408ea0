#include <cmath>
#include <numbers>

#include "arnold/propagate.hpp"
#include "doctest.h"

using namespace arnold;
using std::numbers::pi;

TEST_CASE("free Gaussian closed form") {
  const GaussianParams p{1.0, 0.0, 0.0};
  const Grid g(-30.0, 30.0, 2401);
  const auto f0 = free_gaussian_frame(p, g, 0.0);
  for (std::size_t i = 0; i < g.size(); i += 97) {
    CHECK(f0.values[i].imag() == 0.0);
    CHECK(f0.values[i].real() == doctest::Approx(std::pow(pi, -0.25) * std::exp(-g.x(i) * g.x(i) / 2)));
  }
  CHECK(std::abs(norm(f0) - 1.0) < 1e-8);
  const GaussianParams q{0.8, 1.0, 0.7, 1.3, 0.9};
  CHECK(std::abs(norm(free_gaussian_frame(q, g, 2.5)) - 1.0) < 1e-8);

  // Second moment of |phi|^2 at hbar tau/(m sigma^2) = 1: width sqrt(2 var) = sigma sqrt(2).
  const GaussianParams w{1.5, 0.4, 0.0, 2.0, 1.0};
  const double tau = w.m * w.sigma * w.sigma / w.hbar;
  const auto ft = free_gaussian_frame(w, g, tau);
  std::vector<double> dens(g.size()), m1(g.size()), m2(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    dens[i] = std::norm(ft.values[i]);
    m1[i] = g.x(i) * dens[i];
    m2[i] = g.x(i) * g.x(i) * dens[i];
  }
  const double mean = integrate(g, m1) / integrate(g, dens);
  const double var = integrate(g, m2) / integrate(g, dens) - mean * mean;
  CHECK(std::abs(std::sqrt(2.0 * var) - w.sigma * std::sqrt(2.0)) < 1e-6);
}

TEST_CASE("free Gaussian satisfies the free equation") {
  const GaussianParams p{1.0, -0.5, 1.2};
  const Grid g(-16.0, 18.0, 1701);
  const double t = 0.7, dt = 1e-4;
  std::array<WaveFrame, 3> tri;
  for (int k = 0; k < 3; ++k) tri[k] = free_gaussian_frame(p, g, t + (k - 1) * dt);
  CHECK(schrodinger_residual(tri, make_hamiltonian(free_coeffs(1.0, 1.0), 1.0)) < 1e-6);
}

TEST_CASE("Crank-Nicolson preserves the norm") {
  const Grid g(-20.0, 20.0, 801);
  const auto f0 = free_gaussian_frame({1.0, -2.0, 1.0}, g, 0.0, Picture::position);
  const LsodeSystem freep = LsodeSystem::free_particle();
  WaveFrame f = f0;
  CrankNicolson cn(gck_coeffs(freep, 0.0), 1.0);
  for (int k = 0; k < 200; ++k) {
    const double before = norm(f);
    f = cn.step(f, 1e-2);
    CHECK(std::abs(norm(f) - before) < 1e-12);
  }
  CHECK(f.time == doctest::Approx(2.0));
  // The packet moves with the group velocity p/m.
  const auto exact = free_gaussian_frame({1.0, -2.0, 1.0}, g, 2.0, Picture::position);
  CHECK(relative_l2(f, exact) < 1e-3);

  TdqhSystem tq{TimeFn::constant(1), TimeFn::constant(0.3), TimeFn::constant(1)};
  f = f0;
  for (int k = 0; k < 100; ++k) {
    const double before = norm(f);
    f = step_crank_nicolson(tq, f, 1e-2);
    CHECK(std::abs(norm(f) - before) < 1e-10);
  }
}

TEST_CASE("oscillator coherent state revives after one period") {
  const Grid g(-10.0, 10.0, 401);
  const GaussianParams p{1.0, 1.5, 0.0};
  const auto f0 = free_gaussian_frame(p, g, 0.0, Picture::position);
  const int steps = static_cast<int>(std::lround(2 * pi / 1e-3));
  const double dt = 2 * pi / steps;
  const auto run = propagate(LsodeSystem::harmonic(1.0), 0.0, f0, dt, steps, steps);
  REQUIRE(run.frames.size() == 2);
  // Ground-state energy 1/2 gives the global phase exp(-i pi) after 2 pi.
  WaveFrame expect = f0;
  for (auto& v : expect.values) v = -v;
  expect.time = run.frames.back().time;
  CHECK(relative_l2(run.frames.back(), expect) < 1e-3);
}

TEST_CASE("the gauge block alone is unitary under Crank-Nicolson") {
  // A dilation generator: with only the -i Gamma hbar (x d + 1/2) term the
  // discrete l2 norm is invariant iff the block is Hermitian.
  const Grid g(-10.0, 10.0, 501);
  WaveFrame f = free_gaussian_frame({1.0, -1.0, 0.5}, g, 0.0, Picture::position);
  CrankNicolson cn([](double) { return QuadraticCoeffs{0.0, 0.0, 0.3}; }, 1.0);
  auto l2 = [](const WaveFrame& w) {
    double s = 0.0;
    for (const auto& v : w.values) s += std::norm(v);
    return s;
  };
  const double n0 = l2(f);
  for (int k = 0; k < 50; ++k) f = cn.step(f, 1e-2);
  CHECK(std::abs(l2(f) - n0) < 1e-12 * n0);
  // The packet is dilated: its width grows as exp(Gamma t).
  const auto ref = free_gaussian_frame({1.0, -1.0, 0.5}, g, 0.0, Picture::position);
  CHECK(relative_l2(f, ref) > 1e-2);
}
