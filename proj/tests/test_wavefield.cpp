#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "arnold/error.hpp"
#include "arnold/wavefield.hpp"
#include "doctest.h"

using namespace arnold;
using std::numbers::pi;

namespace {

// Normalized spreading Gaussian of the free equation (m = hbar = 1 unless given).
cplx gaussian(double x, double t, double sigma, double c = 0.0, double p = 0.0, double m = 1.0, double hbar = 1.0) {
  const cplx a = 1.0 + cplx(0.0, hbar * t / (m * sigma * sigma));
  const double xi = x - c - p * t / m;
  return std::pow(pi * sigma * sigma, -0.25) / std::sqrt(a) * std::exp(-xi * xi / (2.0 * sigma * sigma * a)) *
         std::exp(cplx(0.0, (p * x - p * p * t / (2.0 * m)) / hbar));
}

std::vector<cplx> free_h(double, const WaveFrame& f) {
  auto d2 = second_derivative(f.values, f.grid.spacing());
  for (auto& v : d2) v *= -0.5;
  return d2;
}

HamiltonianApply oscillator(double omega) {
  return [omega](double, const WaveFrame& f) {
    auto d2 = second_derivative(f.values, f.grid.spacing());
    for (std::size_t i = 0; i < d2.size(); ++i) {
      const double x = f.grid.x(i);
      d2[i] = -0.5 * d2[i] + 0.5 * omega * omega * x * x * f.values[i];
    }
    return d2;
  };
}

}  // namespace

TEST_CASE("grid construction") {
  const Grid g(-2.0, 2.0, 17);
  CHECK(g.spacing() == 0.25);
  CHECK(g.x(16) == 2.0);
  CHECK(g.x(4) == -1.0);
  CHECK_THROWS_AS(Grid(0.0, 1.0, 15), InvalidArgument);
  CHECK_THROWS_AS(Grid(1.0, 0.0, 32), InvalidArgument);
}

TEST_CASE("Simpson weights are exact on cubics") {
  for (std::size_t n : {17u, 18u, 33u, 64u}) {
    const Grid g(-1.3, 2.1, n);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = g.x(i);
      v[i] = 2.0 - x + 3.0 * x * x - 0.7 * x * x * x;
    }
    auto F = [](double x) { return 2.0 * x - x * x / 2 + x * x * x - 0.175 * x * x * x * x; };
    CHECK(std::abs(integrate(g, v) - (F(2.1) - F(-1.3))) < 1e-12);
  }
}

TEST_CASE("inner products of Gaussians") {
  const Grid g(-12.0, 14.0, 1301);
  const auto a = sample_frame(g, [](double x) { return gaussian(x, 0.0, 1.0); }, 0.0);
  const auto b = sample_frame(g, [](double x) { return gaussian(x, 0.0, 1.0, 2.0); }, 0.0);
  CHECK(std::abs(inner_product(a, a) - 1.0) < 1e-8);
  // Closed-form overlap exp(-d^2/(4 sigma^2)).
  CHECK(std::abs(inner_product(a, b) - std::exp(-1.0)) < 1e-6);
  CHECK(std::abs(std::exp(-1.0) - 0.3678794) < 1e-7);

  WaveFrame ib = b;
  for (auto& v : ib.values) v *= cplx(0.0, 1.0);
  CHECK(std::abs(inner_product(a, ib) - cplx(0.0, 1.0) * inner_product(a, b)) < 1e-15);
  CHECK(std::abs(inner_product(ib, a) - std::conj(inner_product(a, ib))) < 1e-15);

  WaveFrame other = b;
  other.time = 1.0;
  CHECK_THROWS_AS(inner_product(a, other), GridError);
  const auto c = sample_frame(Grid(-12.0, 14.0, 1300), [](double x) { return gaussian(x, 0.0, 1.0); }, 0.0);
  CHECK_THROWS_AS(inner_product(a, c), GridError);
}

TEST_CASE("property: inner product is conjugate-symmetric and positive") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Grid g(-15.0, 15.0, 600);
  for (int k = 0; k < 20; ++k) {
    const double c1 = 3 * u(rng), c2 = 3 * u(rng), p1 = 2 * u(rng), p2 = 2 * u(rng);
    const auto a = sample_frame(g, [&](double x) { return gaussian(x, 0.0, 1.2, c1, p1); }, 0.0);
    const auto b = sample_frame(g, [&](double x) { return gaussian(x, 0.0, 0.9, c2, p2); }, 0.0);
    CHECK(std::abs(inner_product(a, b) - std::conj(inner_product(b, a))) < 1e-14);
    CHECK(inner_product(a, a).real() > 0.0);
    CHECK(std::abs(inner_product(a, a).imag()) < 1e-15);
  }
}

TEST_CASE("resampling") {
  const Grid g(-10.0, 10.0, 401);
  const double sigma = 20 * g.spacing();
  auto fn = [&](double x) { return gaussian(x, 0.0, sigma, 0.5); };
  const auto f = sample_frame(g, fn, 0.0);

  const auto same = resample(f, g);
  CHECK(same.values == f.values);

  const Grid fine(-10.0, 10.0, 801);
  const auto r = resample(f, fine);
  double worst = 0.0;
  for (std::size_t i = 0; i < fine.size(); ++i) worst = std::max(worst, std::abs(r.values[i] - fn(fine.x(i))));
  CHECK(worst < 1e-6);

  // Back to the original grid.
  const auto back = resample(r, g);
  CHECK(relative_l2(back, f) < 1e-5);

  // Nodes beyond the source hull are zero-filled.
  const Grid wide(-12.0, 12.0, 481);
  const auto w = resample(f, wide);
  CHECK(w.values.front() == cplx(0.0));
  CHECK(w.values.back() == cplx(0.0));
}

TEST_CASE("plane wave interpolation at k dx = 0.3") {
  const Grid g(0.0, 60.0, 601);
  const double k = 0.3 / g.spacing();
  const auto f = sample_frame(g, [&](double x) { return std::exp(cplx(0.0, k * x)); }, 0.0);
  const Grid fine(0.0, 60.0, 1201);
  const auto r = resample(f, fine);
  double worst = 0.0;
  for (std::size_t i = 0; i < fine.size(); ++i) {
    worst = std::max(worst, std::abs(r.values[i] - std::exp(cplx(0.0, k * fine.x(i)))));
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("derivative stencils are exact on quartics, edges on quintics") {
  const Grid g(-1.0, 1.5, 20);
  const double h = g.spacing();
  auto p = [](double x) { return cplx(1.0 - x + 2 * x * x, 0.5 * x * x * x - 0.25 * x * x * x * x); };
  auto dp = [](double x) { return cplx(-1.0 + 4 * x, 1.5 * x * x - x * x * x); };
  auto d2p = [](double x) { return cplx(4.0, 3.0 * x - 3 * x * x); };
  const auto f = sample_frame(g, p, 0.0);
  const auto d1 = first_derivative(f.values, h);
  const auto d2 = second_derivative(f.values, h);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(std::abs(d1[i] - dp(g.x(i))) < 1e-11);
    CHECK(std::abs(d2[i] - d2p(g.x(i))) < 1e-9);
  }
  // Six-point edge rows of the second derivative take a quintic.
  auto q = [](double x) { return cplx(std::pow(x, 5), 0.0); };
  const auto fq = sample_frame(g, q, 0.0);
  const auto d2q = second_derivative(fq.values, h);
  for (std::size_t i : {0u, 1u, 18u, 19u}) CHECK(std::abs(d2q[i].real() - 20 * std::pow(g.x(i), 3)) < 1e-9);
}

TEST_CASE("boundary decay precondition") {
  const Grid g(-3.0, 3.0, 64);
  const auto wide = sample_frame(g, [](double x) { return gaussian(x, 0.0, 1.0); }, 0.0);
  CHECK_THROWS_AS(check_boundary_decay(wide), InvalidArgument);
  const auto narrow = sample_frame(g, [](double x) { return gaussian(x, 0.0, 0.4); }, 0.0);
  CHECK_NOTHROW(check_boundary_decay(narrow));
}

TEST_CASE("Schrodinger residual of the free Gaussian") {
  const double sigma = 1.0;
  const Grid g(-15.0, 15.0, 901);  // sigma = 30 dx
  const double dt = 1e-3, t = 0.4;
  std::array<WaveFrame, 3> tri;
  for (int k = 0; k < 3; ++k) {
    const double tk = t + (k - 1) * dt;
    tri[k] = sample_frame(g, [&](double x) { return gaussian(x, tk, sigma, 0.3, 0.8); }, tk);
  }
  const double r = schrodinger_residual(tri, free_h);
  CHECK(r < 1e-4);

  auto rotated = tri;
  for (auto& f : rotated) {
    for (auto& v : f.values) v *= std::exp(cplx(0.0, 0.77));
  }
  CHECK(std::abs(schrodinger_residual(rotated, free_h) - r) < 1e-12);

  auto bad = tri;
  bad[2].time += 1e-4;
  CHECK_THROWS_AS(schrodinger_residual(bad, free_h), GridError);
}

TEST_CASE("residual detects the wrong Hamiltonian") {
  const Grid g(-10.0, 10.0, 801);
  const double dt = 1e-3, t = 0.3;
  std::array<WaveFrame, 3> tri;
  for (int k = 0; k < 3; ++k) {
    const double tk = t + (k - 1) * dt;
    tri[k] = sample_frame(
        g, [&](double x) { return std::pow(pi, -0.25) * std::exp(-x * x / 2) * std::exp(cplx(0.0, -tk / 2)); }, tk);
  }
  const double matched = schrodinger_residual(tri, oscillator(1.0));
  const double wrong = schrodinger_residual(tri, oscillator(2.0));
  CHECK(matched < 1e-5);
  CHECK(wrong > 1e-1);
  CHECK(wrong > 10 * matched);
}

TEST_CASE("frame csv round trip") {
  const Grid g(-4.0, 4.0, 33);
  const auto f = sample_frame(g, [](double x) { return gaussian(x, 0.3, 1.0, 0.1, 0.5); }, 0.3, Picture::kappa);
  std::stringstream ss;
  write_frame_csv(ss, f);
  const std::string text = ss.str();
  CHECK(text.rfind("# t=0.29999999999999999\n# picture=kappa\nx,re,im\n", 0) == 0);
  const auto r = read_frame_csv(ss);
  CHECK(r.grid == g);
  CHECK(r.values == f.values);
  CHECK(r.time == 0.3);
  CHECK(r.picture == Picture::kappa);

  std::stringstream bad("# t=0\nx,re\n");
  CHECK_THROWS_AS(read_frame_csv(bad), Error);
}
