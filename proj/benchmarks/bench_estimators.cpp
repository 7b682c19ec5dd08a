#include <vector>

#include <benchmark/benchmark.h>

#include "covpen/estimators.hpp"
#include "covpen/synthetic.hpp"

namespace {

std::vector<double> series(std::size_t n) {
    return covpen::synthetic::gen_ar_returns({covpen::synthetic::ArSpec{{0.2}, 0.01, 0.0}, n, 7});
}

}  // namespace

// Dense path: SVD of the data.
static void BM_FitTlsDesign(benchmark::State& state) {
    const auto r = series(2000);
    const auto design = covpen::build_lag_matrix(r, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(covpen::fit_tls(design));
}
BENCHMARK(BM_FitTlsDesign)->Arg(3)->Arg(21)->Arg(126)->Unit(benchmark::kMicrosecond);

// Gram path as used by the backtest: prefix-sum statistics plus a p x p solve.
static void BM_FitTlsGram(benchmark::State& state) {
    const auto r = series(2000);
    const int p = static_cast<int>(state.range(0));
    const covpen::LaggedCrossProducts products(r, 126);
    for (auto _ : state) {
        benchmark::DoNotOptimize(covpen::fit_tls(products.compute(p, static_cast<std::size_t>(p), 2000)));
    }
}
BENCHMARK(BM_FitTlsGram)->Arg(3)->Arg(21)->Arg(126)->Unit(benchmark::kMicrosecond);

static void BM_FitOlsGram(benchmark::State& state) {
    const auto r = series(2000);
    const int p = static_cast<int>(state.range(0));
    const covpen::LaggedCrossProducts products(r, 126);
    for (auto _ : state) {
        benchmark::DoNotOptimize(covpen::fit_ols(products.compute(p, static_cast<std::size_t>(p), 2000)));
    }
}
BENCHMARK(BM_FitOlsGram)->Arg(3)->Arg(21)->Arg(126)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
