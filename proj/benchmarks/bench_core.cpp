#include <benchmark/benchmark.h>

#include "arnold/ermakov.hpp"
#include "arnold/lsode.hpp"
#include "arnold/propagate.hpp"
#include "arnold/symmetry.hpp"
#include "arnold/timefn.hpp"
#include "arnold/transform.hpp"

using namespace arnold;

namespace {

WaveFrame packet(std::size_t n, double t = 0.0) {
  auto f = free_gaussian_frame({1.0, 0.5, 0.4}, Grid(-12.0, 12.0, n), 0.0, Picture::position);
  f.time = t;
  return f;
}

void BM_TimeFnEval(benchmark::State& s) {
  const auto f = TimeFn::parse("0.5*exp(-0.1*t)*cos(2*t) + sqrt(1 + t^2)");
  double t = 0.0;
  for (auto _ : s) {
    benchmark::DoNotOptimize(f(t));
    t += 1e-3;
  }
}
BENCHMARK(BM_TimeFnEval);

void BM_CanonicalBasis(benchmark::State& s) {
  const auto sys = LsodeSystem::damped(0.3, 1.0);
  for (auto _ : s) benchmark::DoNotOptimize(canonical_basis(sys, 0.0, {-1.0, 3.0}));
}
BENCHMARK(BM_CanonicalBasis)->Unit(benchmark::kMicrosecond);

void BM_CrankNicolsonStep(benchmark::State& s) {
  const auto n = static_cast<std::size_t>(s.range(0));
  CrankNicolson cn(gck_coeffs(LsodeSystem::damped(0.3, 1.0), 0.0), 1.0);
  WaveFrame f = packet(n);
  for (auto _ : s) {
    f = cn.step(f, 1e-3);
    benchmark::DoNotOptimize(f.values.data());
  }
  s.SetComplexityN(s.range(0));
}
BENCHMARK(BM_CrankNicolsonStep)->RangeMultiplier(2)->Range(512, 4096)->Complexity(benchmark::oN)->Unit(benchmark::kMicrosecond);

void BM_QatApply(benchmark::State& s) {
  const auto n = static_cast<std::size_t>(s.range(0));
  const auto b = canonical_basis(LsodeSystem::harmonic(1.0), 0.0, {-1.5, 1.5});
  const auto f = packet(n, 0.7);
  const Grid fit = suggest_kappa_grid(b, f.grid, 0.7);
  const Grid kg(fit.x_min(), fit.x_max(), 3 * n / 2 + 1);
  for (auto _ : s) benchmark::DoNotOptimize(qat_apply(b, f, kg));
}
BENCHMARK(BM_QatApply)->RangeMultiplier(2)->Range(512, 4096)->Unit(benchmark::kMicrosecond);

void BM_QaepApply(benchmark::State& s) {
  const AepMap map(canonical_basis(LsodeSystem::harmonic(1.0), 0.0, {-1.5, 1.5}),
                   canonical_basis(LsodeSystem::harmonic(2.0), 0.0, {-0.7, 0.7}));
  const auto f = packet(1024, 0.3);
  for (auto _ : s) benchmark::DoNotOptimize(qaep_apply(map, f, f.grid));
}
BENCHMARK(BM_QaepApply)->Unit(benchmark::kMicrosecond);

void BM_EpIntegrate(benchmark::State& s) {
  for (auto _ : s) {
    benchmark::DoNotOptimize(
        ep_integrate(TimeFn::constant(1.0), TimeFn::constant(0.2), 1.0, 1.3, 0.1, {0.0, 5.0}));
  }
}
BENCHMARK(BM_EpIntegrate)->Unit(benchmark::kMicrosecond);

void BM_HamiltonianDecomposition(benchmark::State& s) {
  const auto b = canonical_basis(LsodeSystem::damped(0.3, 1.0), 0.0, {-1.0, 2.0});
  const auto f = packet(1024);
  for (auto _ : s) benchmark::DoNotOptimize(decomposition_check(b, 0.7, f));
}
BENCHMARK(BM_HamiltonianDecomposition)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
