#include <benchmark/benchmark.h>

#include "covpen/bessel.hpp"
#include "covpen/moments.hpp"
#include "covpen/student_t.hpp"

static void BM_BesselK0(benchmark::State& state) {
    const double x = static_cast<double>(state.range(0)) / 100.0;
    for (auto _ : state) benchmark::DoNotOptimize(covpen::special::bessel_k0(x));
}
BENCHMARK(BM_BesselK0)->Arg(5)->Arg(150)->Arg(500)->Arg(3000);

static void BM_ProductDensity(benchmark::State& state) {
    const covpen::GaussianPair pair{1.0, 1.0, 0.4, 0.0, 0.0};
    double x = 0.01;
    for (auto _ : state) {
        benchmark::DoNotOptimize(covpen::product_density(x, pair));
        x = x > 8.0 ? 0.01 : x + 0.37;
    }
}
BENCHMARK(BM_ProductDensity);

static void BM_DensityMass(benchmark::State& state) {
    const covpen::GaussianPair pair{1.0, 1.0, 0.6, 0.0, 0.0};
    for (auto _ : state) benchmark::DoNotOptimize(covpen::product_density_mass(pair, -60.0, 60.0));
}
BENCHMARK(BM_DensityMass)->Unit(benchmark::kMillisecond);

static void BM_StudentTQuantile(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(covpen::special::student_t_quantile(0.9995, 119.0));
}
BENCHMARK(BM_StudentTQuantile);

BENCHMARK_MAIN();
