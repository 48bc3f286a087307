#include <benchmark/benchmark.h>

#include "thetagreen/curve.hpp"
#include "thetagreen/gaussmap.hpp"
#include "thetagreen/theta.hpp"

using namespace thetagreen;

namespace {

const CurveModel& curve() {
  static const CurveModel c = build_curve(std::vector<cd>{0.0, -1.0, 0.0, 0.0, 0.0});
  return c;
}

void BM_ThetaJetGenus2(benchmark::State& state) {
  const ThetaFunction th(PeriodMatrix::diagonal({cd(0, 1), cd(0, 2)}));
  CVector z(2);
  z << cd(0.13, 0.21), cd(-0.3, 0.4);
  for (auto _ : state) benchmark::DoNotOptimize(th.jet(z, 1e-12));
}
BENCHMARK(BM_ThetaJetGenus2);

void BM_ThetaLogNorm(benchmark::State& state) {
  const ThetaFunction& th = curve().theta();
  CVector z(2);
  z << cd(0.13, 0.21), cd(-0.3, 0.4);
  for (auto _ : state) benchmark::DoNotOptimize(th.log_norm(z));
}
BENCHMARK(BM_ThetaLogNorm);

void BM_AbelJacobi(benchmark::State& state) {
  const CurvePoint p = CurvePoint::finite(cd(0.4, 0.7), 1);
  for (auto _ : state) benchmark::DoNotOptimize(abel_jacobi_vector(curve(), p));
}
BENCHMARK(BM_AbelJacobi);

void BM_NuIntegralLogTheta(benchmark::State& state) {
  const QuadratureConfig q{0, static_cast<int>(state.range(0)), 1};
  CVector shift(2);
  shift << cd(0.1, 0.05), cd(-0.2, 0.1);
  const CVector kappa = curve().riemann_constant();
  for (auto _ : state) {
    const NuIntegral r = integrate_nu(
        curve(), [&](const CurveSample& s) { return curve().theta().log_norm(s.aj - kappa + shift); }, q);
    benchmark::DoNotOptimize(r.value);
  }
}
BENCHMARK(BM_NuIntegralLogTheta)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_Eta(benchmark::State& state) {
  const DivisorOnCurve d{{CurvePoint::finite(cd(0.4, 0.7), 1)}};
  const AbelianPoint p = divisor_to_theta_point(curve(), d);
  for (auto _ : state) benchmark::DoNotOptimize(eta_unchecked(p));
}
BENCHMARK(BM_Eta);

}  // namespace
BENCHMARK_MAIN();
