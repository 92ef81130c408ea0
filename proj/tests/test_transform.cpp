#include <cmath>
#include <numbers>
#include <random>

#include "arnold/error.hpp"
#include "arnold/propagate.hpp"
#include "arnold/transform.hpp"
#include "doctest.h"

using namespace arnold;
using std::numbers::pi;

namespace {

WaveFrame gauss_x(const Grid& g, double t, double sigma, double c, double p) {
  auto f = free_gaussian_frame({sigma, c, p}, g, 0.0, Picture::position);
  f.time = t;
  return f;
}

double max_abs_diff(const WaveFrame& a, const WaveFrame& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
  return m;
}

// Triplet of inverse-mapped free Gaussians at t - dt, t, t + dt.
template <class Inverse, class TauOf>
std::array<WaveFrame, 3> inverse_triplet(Inverse inv, TauOf tau_of, const GaussianParams& p, const Grid& kg,
                                         const Grid& xg, double t, double dt) {
  std::array<WaveFrame, 3> tri;
  for (int k = 0; k < 3; ++k) {
    const double tk = t + (k - 1) * dt;
    tri[k] = inv(free_gaussian_frame(p, kg, tau_of(tk)), xg);
    tri[k].time = tk;
  }
  return tri;
}

}  // namespace

TEST_CASE("classical transformation of the oscillator") {
  const auto b = canonical_basis(LsodeSystem::harmonic(1.0), 0.0, {-1.5, 1.5});
  const auto p = cat_forward(b, 1.0, pi / 4);
  CHECK(std::abs(p.kappa - std::sqrt(2.0)) < 1e-9);
  CHECK(std::abs(p.tau - 1.0) < 1e-9);
  const auto q = cat_inverse(b, {std::sqrt(2.0), 1.0});
  CHECK(std::abs(q.x - 1.0) < 1e-9);
  CHECK(std::abs(q.t - pi / 4) < 1e-10);
  const auto id = cat_forward(b, 0.37, 0.0);
  CHECK(id.kappa == doctest::Approx(0.37).epsilon(1e-12));
  CHECK(std::abs(id.tau) < 1e-12);
  const auto back = cat_inverse(b, {0.37, 0.0});
  CHECK(back.t == 0.0);
  CHECK(std::abs(back.x - 0.37) < 1e-12);
  CHECK_THROWS_AS(cat_forward(b, 1.0, 1.6), RangeError);
}

TEST_CASE("damped trajectory is straightened") {
  const auto b = canonical_basis(LsodeSystem::damped(1.0), 0.0, {-1.0, 2.0});
  std::vector<CatPoint> pts;
  for (double t : {0.3, 0.9, 1.5}) pts.push_back(cat_forward(b, 1.0 - std::exp(-t), t));
  // Least-squares line through the three points.
  double st = 0, sk = 0, stt = 0, stk = 0;
  for (auto& p : pts) {
    st += p.tau;
    sk += p.kappa;
    stt += p.tau * p.tau;
    stk += p.tau * p.kappa;
  }
  const double n = static_cast<double>(pts.size());
  const double slope = (n * stk - st * sk) / (n * stt - st * st);
  const double icpt = (sk - slope * st) / n;
  for (auto& p : pts) {
    CHECK(std::abs(p.kappa - (slope * p.tau + icpt)) < 1e-9);
    CHECK(std::abs(p.kappa - p.tau) < 1e-9);
  }
}

TEST_CASE("trajectories with a particular term map to lines") {
  LsodeSystem sys{parse_expr("0.3"), parse_expr("1+0.2*sin(t)"), parse_expr("0.5*cos(t)")};
  const auto b = canonical_basis(sys, 0.0, {-1.0, 1.2});
  const double A = 0.4, B = -0.8;
  for (double t = -0.9; t < 1.1; t += 0.1) {
    const auto s = b.at(t);
    const auto p = cat_forward(b, A * s.u1 + B * s.u2 + s.up, t);
    CHECK(std::abs(p.kappa - (A * p.tau + B)) < 1e-9);
  }
}

TEST_CASE("property: cat round trip") {
  std::mt19937_64 rng(3);
  const auto b = canonical_basis(LsodeSystem::damped(0.3, 1.0), 0.0, {-1.0, 1.0});
  std::uniform_real_distribution<double> xt(-3.0, 3.0), tt(-0.95, 0.95);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double x = xt(rng), t = tt(rng);
    const auto q = cat_inverse(b, cat_forward(b, x, t));
    worst = std::max({worst, std::abs(q.x - x), std::abs(q.t - t)});
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("QAT at the anchor is the identity") {
  const auto b = canonical_basis(LsodeSystem::harmonic(1.0), 0.0, {-1.5, 1.5});
  const Grid g(-10.0, 10.0, 512);
  const auto f = gauss_x(g, 0.0, 1.0, 0.5, 0.3);
  const auto out = qat_apply(b, f, g);
  CHECK(out.time == 0.0);
  CHECK(out.picture == Picture::kappa);
  CHECK(max_abs_diff(out, f) < 1e-13);
  auto k = f;
  k.picture = Picture::kappa;
  CHECK(max_abs_diff(qat_inverse(b, k, g), f) < 1e-13);
}

TEST_CASE("free particle QAT is the identity") {
  const auto b = canonical_basis(LsodeSystem::free_particle(), 0.0, {-2.0, 2.0});
  const Grid g(-10.0, 10.0, 400);
  const auto f = gauss_x(g, 1.3, 1.0, 0.5, 0.3);
  const auto out = qat_apply(b, f, g);
  CHECK(out.time == doctest::Approx(1.3).epsilon(1e-12));
  CHECK(max_abs_diff(out, f) < 1e-12);
}

TEST_CASE("QAT unitarity and round trip for the oscillator") {
  const auto b = canonical_basis(LsodeSystem::harmonic(1.0), 0.0, {-1.5, 1.5});
  const Grid g(-12.0, 12.0, 1024);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 5; ++i) {
    const auto a = gauss_x(g, 0.5, 1.0 + 0.2 * u(rng), u(rng), u(rng));
    const auto c = gauss_x(g, 0.5, 1.0 + 0.2 * u(rng), u(rng), u(rng));
    const Grid kg = suggest_kappa_grid(b, g, 0.5);
    const auto A = qat_apply(b, a, kg), C = qat_apply(b, c, kg);
    CHECK(std::abs(inner_product(A, C) - inner_product(a, c)) < 1e-6);
    CHECK(std::abs(norm(A) - norm(a)) < 1e-6);
  }
  const auto f = gauss_x(g, 0.4, 1.0, 0.3, 0.5);
  const Grid kg = suggest_kappa_grid(b, g, 0.4);
  const auto k = qat_apply(b, f, kg);
  CHECK(k.time == doctest::Approx(std::tan(0.4)).epsilon(1e-9));
  const auto back = qat_inverse(b, k, g);
  CHECK(back.time == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(relative_l2(back, f) < 1e-5);
  CHECK(std::abs(norm(back) - 1.0) < 1e-6);
}

TEST_CASE("inverse QAT of a free Gaussian solves the GCK equation") {
  const LsodeSystem sys = LsodeSystem::damped(0.3, 1.0);
  const auto b = canonical_basis(sys, 0.0, {-1.0, 1.5});
  const Grid xg(-12.0, 12.0, 1024), kg(-16.0, 16.0, 1024);
  const GaussianParams p{1.0, 0.5, 0.4};
  const auto tri = inverse_triplet([&](const WaveFrame& f, const Grid& g) { return qat_inverse(b, f, g); },
                                   [&](double t) { return tau_of_t(b, t); }, p, kg, xg, 0.6, 1e-3);
  const auto h = make_hamiltonian(gck_coeffs(sys, 0.0), sys.hbar);
  CHECK(schrodinger_residual(tri, h) < 5e-4);
  // The wrong Hamiltonian is rejected by a wide margin.
  const auto wrong = make_hamiltonian(gck_coeffs(LsodeSystem::harmonic(1.0), 0.0), 1.0);
  CHECK(schrodinger_residual(tri, wrong) > 10 * schrodinger_residual(tri, h));
}

TEST_CASE("quantum maps reject unsupported inputs") {
  LsodeSystem sys = LsodeSystem::harmonic(1.0);
  sys.lambda = parse_expr("0.1*t");
  const auto b = canonical_basis(sys, 0.0, {-1.0, 1.0});
  const Grid g(-10.0, 10.0, 256);
  const auto f = gauss_x(g, 0.2, 1.0, 0.0, 0.0);
  CHECK_THROWS_AS(qat_apply(b, f, g), InvalidArgument);
  const auto h = canonical_basis(LsodeSystem::harmonic(1.0), 0.0, {-2.0, 2.0});
  CHECK_THROWS_AS(qat_apply(h, gauss_x(g, 1.8, 1.0, 0.0, 0.0), g), RangeError);
  auto k = f;
  k.picture = Picture::kappa;
  CHECK_THROWS_AS(qat_apply(h, k, g), InvalidArgument);
  // Support reaching the boundary violates the precondition.
  CHECK_THROWS_AS(qat_apply(h, gauss_x(Grid(-2.0, 2.0, 64), 0.2, 1.0, 0.0, 0.0), g), InvalidArgument);
}

TEST_CASE("unfolded QAT and the Maslov phase") {
  const auto b = canonical_basis(LsodeSystem::harmonic(1.0), 0.0, {-0.5, 8.5});
  const Grid g(-10.0, 10.0, 801);
  const auto f0 = gauss_x(g, 0.4, 1.0, 0.6, -0.4);
  CHECK(max_abs_diff(unfolded_qat(b, 0, f0, g), qat_apply(b, f0, g)) == 0.0);

  for (int k : {1, 2}) {
    const double t = k * pi - 0.2;
    const auto f = gauss_x(g, t, 1.0, 0.6, -0.4);
    auto flipped = f;
    if (k % 2 == 1) std::reverse(flipped.values.begin(), flipped.values.end());
    const Grid kg = g;
    const auto lhs = unfolded_qat(b, k, f, kg);
    auto rhs = qat_apply_continued(b, flipped, kg);
    const cplx phase = k == 1 ? cplx(0.0, 1.0) : cplx(-1.0, 0.0);
    for (auto& v : rhs.values) v *= phase;
    CHECK(max_abs_diff(lhs, rhs) < 1e-6);
    CHECK(lhs.time == doctest::Approx(rhs.time).epsilon(1e-9));
  }

  // Branch 2 is the ordinary QAT one period earlier: u^(2)(t) = u(t - 2 pi).
  const auto f2 = gauss_x(g, 2 * pi - 0.2, 1.0, 0.6, -0.4);
  const auto f_shift = gauss_x(g, -0.2, 1.0, 0.6, -0.4);
  CHECK(max_abs_diff(unfolded_qat(b, 2, f2, g), qat_apply(b, f_shift, g)) < 1e-6);
  CHECK_THROWS_AS(unfolded_qat(b, 3, f2, g), RangeError);
}

TEST_CASE("TDQH reduction to an LSODE") {
  const auto ho = tdqh_to_lsode({TimeFn::constant(1), TimeFn::constant(0), TimeFn::constant(4)});
  for (double t : {-1.0, 0.0, 2.0}) {
    CHECK(ho.f_dot(t) == 0.0);
    CHECK(ho.omega2(t) == 4.0);
  }
  const double g = 0.4, w0 = 1.3;
  const auto ck = tdqh_to_lsode({parse_expr("exp(0.4*t)"), TimeFn::constant(0), parse_expr("1.69*exp(-0.4*t)")});
  for (int i = 0; i < 10; ++i) {
    const double t = -2.0 + 0.45 * i;
    CHECK(ck.f_dot(t) == doctest::Approx(-g).epsilon(1e-13));
    CHECK(ck.omega2(t) == doctest::Approx(w0 * w0).epsilon(1e-13));
  }
  const auto gc = tdqh_to_lsode({TimeFn::constant(1), TimeFn::constant(0.7), TimeFn::constant(0)});
  CHECK(gc.omega2(1.0) == doctest::Approx(-0.49));
  CHECK(gc.f_dot(1.0) == 0.0);

  // Wronskian of the derived basis follows mu (here mu(0) = 1).
  const TdqhSystem sys{parse_expr("1+0.3*sin(t)"), parse_expr("0.2*t"), parse_expr("1+0.1*t^2")};
  const GaugedQat gq(sys, 0.0, {-1.0, 1.0});
  for (double t : {-0.8, 0.1, 0.9}) CHECK(gq.wronskian(t) == doctest::Approx(sys.mu(t)).epsilon(1e-8));

  const TdqhSystem bad{parse_expr("t"), TimeFn::constant(0), TimeFn::constant(1)};
  CHECK_THROWS_AS(GaugedQat(bad, 0.5, {-1.0, 1.0}), DomainError);
}

TEST_CASE("gauged QAT") {
  const Grid xg(-12.0, 12.0, 1024), kg(-16.0, 16.0, 1024);
  const TdqhSystem plain{TimeFn::constant(1), TimeFn::constant(0), TimeFn::constant(1)};
  const GaugedQat g0(plain, 0.0, {-1.0, 1.0});
  const auto f = gauss_x(xg, 0.5, 1.0, 0.3, 0.2);
  const auto a = gqat_apply(g0, f, kg);
  const auto q = qat_apply(g0.basis(), f, kg);
  CHECK(a.values == q.values);
  CHECK(a.time == q.time);

  const TdqhSystem sys{TimeFn::constant(1), TimeFn::constant(0.3), TimeFn::constant(1)};
  const GaugedQat gq(sys, 0.0, {-1.5, 1.5});
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 5; ++i) {
    const auto p1 = gauss_x(xg, 0.5, 1.0 + 0.2 * u(rng), u(rng), u(rng));
    const auto p2 = gauss_x(xg, 0.5, 1.0 + 0.2 * u(rng), u(rng), u(rng));
    const auto G1 = gqat_apply(gq, p1, kg), G2 = gqat_apply(gq, p2, kg);
    CHECK(std::abs(inner_product(G1, G2) - inner_product(p1, p2)) < 1e-6);
  }
  // The gauge factor pulled back: gqat = exp((i/2)(m/hbar)(Gamma/W) x^2) qat pointwise.
  const auto G = gqat_apply(gq, f, kg);
  const auto Q = qat_apply(gq.basis(), f, kg);
  const double u2 = gq.basis().u2(0.5);
  double worst = 0.0;
  for (std::size_t i = 0; i < kg.size(); ++i) {
    const double x = u2 * kg.x(i);
    const cplx gauge = std::exp(cplx(0.0, 0.5 * 0.3 / gq.wronskian(0.5) * x * x));
    worst = std::max(worst, std::abs(G.values[i] - gauge * Q.values[i]));
  }
  CHECK(worst < 1e-12);

  const GaussianParams p{1.0, 0.4, -0.3};
  const auto tri = inverse_triplet([&](const WaveFrame& fr, const Grid& g) { return gqat_inverse(gq, fr, g); },
                                   [&](double t) { return gq.tau_of_t(t); }, p, kg, xg, 0.5, 1e-3);
  const auto h = make_hamiltonian(tdqh_coeffs(sys), sys.hbar);
  CHECK(schrodinger_residual(tri, h) < 5e-4);
}

TEST_CASE("gauged QAT with mu(t0) != 1") {
  const TdqhSystem sys{parse_expr("2*exp(0.3*t)"), parse_expr("0.2"), parse_expr("0.5*exp(-0.3*t)")};
  const GaugedQat gq(sys, 0.0, {-1.0, 1.0});
  CHECK(gq.scale() == 2.0);
  for (double t : {-0.5, 0.4}) CHECK(gq.wronskian(t) == doctest::Approx(sys.mu(t)).epsilon(1e-8));
  const Grid xg(-12.0, 12.0, 1024), kg(-16.0, 16.0, 1024);
  const GaussianParams p{1.0, 0.4, -0.3};
  const auto tri = inverse_triplet([&](const WaveFrame& fr, const Grid& g) { return gqat_inverse(gq, fr, g); },
                                   [&](double t) { return gq.tau_of_t(t); }, p, kg, xg, 0.4, 1e-3);
  const auto h = make_hamiltonian(tdqh_coeffs(sys), sys.hbar);
  CHECK(schrodinger_residual(tri, h) < 5e-4);
}
