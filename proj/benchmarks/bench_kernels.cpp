#include <benchmark/benchmark.h>

#include <complex>

#include "cylkms/correlators.hpp"
#include "cylkms/series.hpp"

using namespace cylkms;

namespace {
constexpr double kTwoPi = 6.283185307179586;

void BM_PlaneThermal(benchmark::State& state) {
    const Epsilon eps(1e-8);
    for (auto _ : state) {
        benchmark::DoNotOptimize(dd_plane_thermal(0.7, 1.0, eps));
    }
}
BENCHMARK(BM_PlaneThermal);

void BM_CylinderThermal(benchmark::State& state) {
    const Epsilon eps(1e-6);
    const SeriesSpec spec(static_cast<int>(state.range(0)),
                          TailCorrection::IntegralTail);
    for (auto _ : state) {
        benchmark::DoNotOptimize(dd_cylinder_thermal(0.7, 1.0, kTwoPi, eps, spec));
    }
}
BENCHMARK(BM_CylinderThermal)->Arg(100)->Arg(1000)->Arg(10000);

void BM_LatticeInverseSquare(benchmark::State& state) {
    const SeriesSpec spec(static_cast<int>(state.range(0)),
                          TailCorrection::IntegralTail);
    const complex z(0.7, -1e-6);
    for (auto _ : state) {
        benchmark::DoNotOptimize(lattice_inverse_square(z, complex(kTwoPi, 0.0), spec));
    }
}
BENCHMARK(BM_LatticeInverseSquare)->Arg(100)->Arg(1000)->Arg(10000);

void BM_CotSeries(benchmark::State& state) {
    const complex z(0.9, 0.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            cot_series(z, static_cast<int>(state.range(0)), TailCorrection::IntegralTail));
    }
}
BENCHMARK(BM_CotSeries)->Arg(100)->Arg(1000)->Arg(10000);

void BM_CylinderVacuumW2(benchmark::State& state) {
    const Epsilon eps(1e-8);
    for (auto _ : state) {
        benchmark::DoNotOptimize(w2_cylinder_vacuum(1.0, 0.5, kTwoPi, eps));
    }
}
BENCHMARK(BM_CylinderVacuumW2);

TestFunction2D bench_bump(double x) {
    return centered_test_function(Diamond(SpacetimePoint::plane(0.0, x), 0.25, 0.25),
                                  0.9);
}

void BM_SmearEngineBuild(benchmark::State& state) {
    const CorrelatorKernel kernel = CorrelatorKernel::plane_thermal(1.0, Epsilon(1e-8));
    const TestFunction2D f = bench_bump(0.8);
    const TestFunction2D g = bench_bump(5.3);
    for (auto _ : state) {
        SmearEngine engine(kernel, f, g);
        benchmark::DoNotOptimize(engine);
    }
}
BENCHMARK(BM_SmearEngineBuild);

void BM_SmearEngineEvaluate(benchmark::State& state) {
    const CorrelatorKernel kernel = CorrelatorKernel::plane_thermal(1.0, Epsilon(1e-8));
    const TestFunction2D f = bench_bump(0.8);
    const TestFunction2D g = bench_bump(5.3);
    const SmearEngine engine(kernel, f, g);
    double t = 0.0;
    for (auto _ : state) {
        t += 0.01;
        if (t > 4.0) t = -4.0;
        benchmark::DoNotOptimize(engine.evaluate(complex(t, 0.0)));
    }
}
BENCHMARK(BM_SmearEngineEvaluate);
}  // namespace

BENCHMARK_MAIN();
