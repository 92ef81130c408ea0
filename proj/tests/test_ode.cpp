#include <cmath>
#include <vector>

#include "arnold/error.hpp"
#include "arnold/ode.hpp"
#include "arnold/quadrature.hpp"
#include "doctest.h"

using namespace arnold;

TEST_CASE("quintic Hermite pair is exact on quintic polynomials") {
  // y = p(t), v = p'(t): store nodes directly.
  auto p = [](double t) { return 1 - 2 * t + 0.5 * t * t + 0.3 * t * t * t - 0.1 * std::pow(t, 4) + 0.02 * std::pow(t, 5); };
  auto dp = [](double t) { return -2 + t + 0.9 * t * t - 0.4 * std::pow(t, 3) + 0.1 * std::pow(t, 4); };
  auto d2p = [](double t) { return 1 + 1.8 * t - 1.2 * t * t + 0.4 * std::pow(t, 3); };
  std::vector<double> ts = {-1.0, 0.3, 2.0};
  std::vector<double> y, dy;
  for (double t : ts) {
    y.insert(y.end(), {p(t), dp(t)});
    dy.insert(dy.end(), {dp(t), d2p(t)});
  }
  ode::Solution sol(2, ts, y, dy);
  for (double t : {-0.9, -0.2, 0.3, 1.1, 1.99}) {
    auto j = sol.pair(t, 0, 1);
    CHECK(j.value == doctest::Approx(p(t)).epsilon(1e-13));
    CHECK(j.derivative == doctest::Approx(dp(t)).epsilon(1e-12));
    CHECK(sol.pair_second(t, 0, 1) == doctest::Approx(d2p(t)).epsilon(1e-11));
    auto c = sol.component(t, 1);  // cubic Hermite of v: not exact for quartic, just close
    CHECK(std::abs(c.value - dp(t)) < 0.1);
  }
  CHECK_THROWS_AS(sol.pair(2.5, 0, 1), RangeError);
}

TEST_CASE("Dormand-Prince integrates the oscillator both directions") {
  ode::Rhs rhs = [](double, std::span<const double> y, std::span<double> dy) {
    dy[0] = y[1];
    dy[1] = -y[0];
  };
  const std::vector<double> y0 = {0.0, 1.0};
  auto sol = ode::integrate(rhs, 0.0, y0, -7.0, 9.0);
  CHECK(sol.t_min() == -7.0);
  CHECK(sol.t_max() == 9.0);
  double worst = 0.0;
  for (double t = -7.0; t <= 9.0; t += 0.01237) {
    auto j = sol.pair(t, 0, 1);
    worst = std::max({worst, std::abs(j.value - std::sin(t)), std::abs(j.derivative - std::cos(t))});
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("integrator reports failures with the time reached") {
  // y' = y^2 blows up at t = 1.
  ode::Rhs rhs = [](double, std::span<const double> y, std::span<double> dy) { dy[0] = y[0] * y[0]; };
  const std::vector<double> y0 = {1.0};
  try {
    ode::integrate(rhs, 0.0, y0, 0.0, 2.0);
    FAIL("expected IntegratorError");
  } catch (const IntegratorError& e) {
    CHECK(e.t_reached() > 0.9);
    CHECK(e.t_reached() < 1.0);
  }
}

TEST_CASE("stop predicate ends a sweep early") {
  ode::Rhs rhs = [](double, std::span<const double>, std::span<double> dy) { dy[0] = -1.0; };
  const std::vector<double> y0 = {1.0};
  auto sol = ode::integrate(rhs, 0.0, y0, 0.0, 5.0, {}, [](double, std::span<const double> y) { return y[0] < 0.5; });
  CHECK(sol.t_max() < 5.0);
}

TEST_CASE("adaptive Simpson") {
  CHECK(adaptive_simpson([](double x) { return std::exp(x); }, 0.0, 1.0, 1e-12) ==
        doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-12));
  CHECK(adaptive_simpson([](double x) { return 1.0 / (1.0 + x * x); }, 0.0, 3.0, 1e-12) ==
        doctest::Approx(std::atan(3.0)).epsilon(1e-12));
  CHECK(adaptive_simpson([](double x) { return x; }, 2.0, 0.0) == doctest::Approx(-2.0));
}

