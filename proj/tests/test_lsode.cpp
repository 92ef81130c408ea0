#include <cmath>
#include <numbers>
#include <random>

#include "arnold/error.hpp"
#include "arnold/lsode.hpp"
#include "arnold/quadrature.hpp"
#include "doctest.h"

using namespace arnold;
using std::numbers::pi;

namespace {

void check_canonicity(const CanonicalBasis& b) {
  const auto s = b.at(b.t0());
  CHECK(std::abs(s.u1) < 1e-10);
  CHECK(std::abs(s.u2 - 1.0) < 1e-10);
  CHECK(std::abs(s.du1 - 1.0) < 1e-10);
  CHECK(std::abs(s.du2) < 1e-10);
  CHECK(std::abs(s.up) < 1e-10);
  CHECK(std::abs(s.dup) < 1e-10);
}

}  // namespace

TEST_CASE("harmonic oscillator basis") {
  const auto b = canonical_basis(LsodeSystem::harmonic(2.0), 0.0, {-2.0, 2.0});
  check_canonicity(b);
  CHECK(std::abs(b.at(pi / 8).u1 - std::sqrt(2.0) / 4) < 1e-9);
  for (double t = -2.0; t <= 2.0; t += 0.0173) {
    const auto s = b.at(t);
    CHECK(std::abs(s.u1 - std::sin(2 * t) / 2) < 1e-9);
    CHECK(std::abs(s.u2 - std::cos(2 * t)) < 1e-9);
    CHECK(std::abs(b.wronskian(t) - 1.0) < 1e-8);
  }
  CHECK(b.validity().lo == doctest::Approx(-pi / 4).epsilon(1e-12));
  CHECK(b.validity().hi == doctest::Approx(pi / 4).epsilon(1e-12));
  CHECK(std::abs(b.validity().hi - pi / 4) < 1e-11);
  CHECK(b.tau_range().lo == -INFINITY);
  CHECK(b.tau_range().hi == INFINITY);
}

TEST_CASE("free particle basis") {
  const auto b = canonical_basis(LsodeSystem::free_particle(), 0.0, {-5.0, 5.0});
  check_canonicity(b);
  for (double t : {-4.0, -1.0, 0.5, 3.0}) {
    const auto s = b.at(t);
    CHECK(s.u1 == doctest::Approx(t));
    CHECK(s.u2 == doctest::Approx(1.0));
    CHECK(b.wronskian(t) == doctest::Approx(1.0));
    CHECK(tau_of_t(b, t) == doctest::Approx(t).epsilon(1e-13));
  }
  CHECK(b.zeros().empty());
  CHECK(b.validity().lo == -INFINITY);
  CHECK(b.tau_range().hi == doctest::Approx(5.0));
  CHECK(std::abs(t_of_tau(b, 3.0) - 3.0) < 1e-12);
  CHECK_THROWS_AS(t_of_tau(b, 6.0), RangeError);
}

TEST_CASE("damped particle basis against the closed form") {
  const auto b = canonical_basis(LsodeSystem::damped(1.0), 0.0, {-1.0, 3.0});
  check_canonicity(b);
  for (double t : {0.5, 1.0, 2.0}) {
    const auto s = b.at(t);
    CHECK(std::abs(s.u1 - (1 - std::exp(-t))) < 1e-9);
    CHECK(std::abs(s.u2 - 1.0) < 1e-9);
    CHECK(std::abs(b.wronskian(t) - std::exp(-t)) < 1e-9);
  }
  // tau(1) from an adaptive-Simpson oracle over the analytic W/u2^2 = e^{-t}.
  const double tau_oracle = adaptive_simpson([](double t) { return std::exp(-t); }, 0.0, 1.0, 1e-13);
  CHECK(std::abs(tau_oracle - 0.6321205588285577) < 1e-12);
  CHECK(std::abs(tau_of_t(b, 1.0) - tau_oracle) < 1e-9);
  CHECK(std::abs(tau_by_quadrature(b, 1.0) - tau_of_t(b, 1.0)) < 1e-8);
  CHECK(std::abs(t_of_tau(b, 0.5) - std::log(2.0)) < 1e-9);
}

TEST_CASE("tau and its inverse for the oscillator") {
  const auto b = canonical_basis(LsodeSystem::harmonic(1.0), 0.0, {-3.0, 3.0});
  CHECK(std::abs(tau_of_t(b, pi / 4) - 1.0) < 1e-9);
  CHECK(std::abs(t_of_tau(b, 1.0) - pi / 4) < 1e-10);
  CHECK(std::abs(t_of_tau(b, -40.0) + std::atan(40.0)) < 1e-9);
  CHECK_THROWS_AS(tau_of_t(b, 2.0), RangeError);
  for (double t : {-1.4, -0.7, 0.2, 0.9, 1.3}) {
    CHECK(std::abs(tau_by_quadrature(b, t) - tau_of_t(b, t)) < 1e-8 * std::max(1.0, std::abs(tau_of_t(b, t))));
    const double tau = tau_of_t(b, t);
    CHECK(std::abs(tau_of_t(b, t_of_tau(b, tau)) - tau) < 1e-12 * std::max(1.0, std::abs(tau)));
  }
}

TEST_CASE("invariants across several systems") {
  struct Case {
    LsodeSystem sys;
    Interval span;
  };
  std::vector<Case> cases = {
      {LsodeSystem::harmonic(0.5), {-4.0, 4.0}}, {LsodeSystem::harmonic(1.0), {-4.0, 4.0}},
      {LsodeSystem::harmonic(2.0), {-4.0, 4.0}}, {LsodeSystem::damped(0.5), {-2.0, 4.0}},
      {LsodeSystem::damped(1.0), {-2.0, 4.0}},   {LsodeSystem::damped(0.3, 1.0), {-2.0, 4.0}},
  };
  for (const auto& c : cases) {
    const auto b = canonical_basis(c.sys, 0.0, c.span);
    check_canonicity(b);
    for (double t : b.nodes()) {
      const double w = b.wronskian(t) * std::exp(b.damping_integral(t));
      CHECK(std::abs(w - 1.0) < 1e-8);
      // Damping integral against the analytic value (constant coefficient).
      CHECK(std::abs(b.damping_integral(t) - c.sys.f_dot(0.0) * t) < 1e-10);
    }
    // tau strictly increasing on the domain.
    const auto dom = b.domain();
    double prev = -INFINITY;
    for (int i = 1; i < 200; ++i) {
      const double t = dom.lo + (dom.hi - dom.lo) * i / 200.0;
      const double tau = tau_of_t(b, t);
      CHECK(tau > prev);
      prev = tau;
    }
    // No zero of u2 strictly inside T.
    for (double z : b.zeros()) CHECK(!b.validity().contains(z));
  }
}

TEST_CASE("general solution satisfies the LSODE with a particular term") {
  LsodeSystem sys{parse_expr("0.2+0.1*sin(t)"), parse_expr("1+0.5*cos(2*t)"), parse_expr("0.3*t")};
  const auto b = canonical_basis(sys, 0.0, {-2.0, 3.0});
  check_canonicity(b);
  const double A = 0.7, B = -1.3;
  auto x = [&](double t) {
    const auto s = b.at(t);
    return A * s.u1 + B * s.u2 + s.up;
  };
  for (double h : {1e-2, 5e-3}) {
    double worst = 0.0;
    for (double t : {-1.5, -0.3, 0.8, 2.2}) {
      const double xdd = (x(t + h) - 2 * x(t) + x(t - h)) / (h * h);
      const double xd = (x(t + h) - x(t - h)) / (2 * h);
      const double r = xdd + sys.f_dot(t) * xd + sys.omega2(t) * x(t) - sys.lambda(t);
      worst = std::max(worst, std::abs(r));
    }
    CHECK(worst < 10 * h * h);
  }
}

TEST_CASE("branch bases of the oscillator") {
  const auto b = canonical_basis(LsodeSystem::harmonic(1.0), 0.0, {-1.0, 9.0});
  const auto b0 = branch_basis(b, 0);
  CHECK(b0.t0() == b.t0());
  CHECK(b0.at(0.3).u1 == b.at(0.3).u1);

  const auto b1 = branch_basis(b, 1);
  CHECK(std::abs(b1.t0() - pi) < 1e-10);
  check_canonicity(b1);
  CHECK(std::abs(b1.at(pi).u2 - 1.0) < 1e-9);
  for (double t = pi / 2 + 0.05; t < 3 * pi / 2; t += 0.1) {
    CHECK(std::abs(b1.at(t).u2 + std::cos(t)) < 1e-9);
    CHECK(std::abs(b1.at(t).u1 + std::sin(t)) < 1e-9);
  }
  CHECK(std::abs(b1.validity().lo - pi / 2) < 1e-9);
  CHECK(std::abs(b1.validity().hi - 3 * pi / 2) < 1e-9);
  CHECK(b.branch_index(pi) == 1);
  CHECK(b.branch_index(5.0) == 2);
  CHECK_THROWS_AS(branch_basis(b, 3), RangeError);
  CHECK_THROWS_AS(branch_basis(b, -1), RangeError);
}

TEST_CASE("branch basis matches re-integration from the branch anchor") {
  const auto b = canonical_basis(LsodeSystem::harmonic(2.0), 0.0, {-0.5, 4.5});
  const auto b2 = branch_basis(b, 2);
  CHECK(std::abs(b2.t0() - pi) < 1e-10);
  // Independent route: integrate again from t2.
  const auto r = canonical_basis(LsodeSystem::harmonic(2.0), b2.t0(), {pi - 1.0, pi + 1.0});
  for (double t = pi - 0.7; t < pi + 0.7; t += 0.05) {
    CHECK(std::abs(b2.at(t).u1 - r.at(t).u1) < 1e-9);
    CHECK(std::abs(b2.at(t).u2 - r.at(t).u2) < 1e-9);
    CHECK(std::abs(b2.at(t).u1 - std::sin(2 * t) / 2) < 1e-9);
  }
}

TEST_CASE("invalid inputs") {
  auto sys = LsodeSystem::harmonic(1.0);
  sys.m = 0.0;
  CHECK_THROWS_AS(canonical_basis(sys, 0.0, {-1.0, 1.0}), InvalidArgument);
  CHECK_THROWS_AS(canonical_basis(LsodeSystem::harmonic(1.0), 2.0, {-1.0, 1.0}), InvalidArgument);
  // Coefficient undefined on part of the span.
  LsodeSystem bad{TimeFn(), parse_expr("sqrt(t)"), TimeFn()};
  CHECK_THROWS_AS(canonical_basis(bad, 0.5, {-1.0, 1.0}), DomainError);
}
