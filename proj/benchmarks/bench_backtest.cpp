#include <benchmark/benchmark.h>

#include "covpen/backtest.hpp"
#include "covpen/synthetic.hpp"

static void BM_RunAssetAllMethods(benchmark::State& state) {
    const auto r = covpen::synthetic::gen_ar_returns({covpen::synthetic::ArSpec{{0.2}, 0.01, 0.0}, 3000, 11});
    covpen::BacktestConfig config;
    config.estimator = state.range(0) == 0 ? covpen::Estimator::OLS : covpen::Estimator::TLS;
    for (auto _ : state) {
        benchmark::DoNotOptimize(covpen::run_asset_methods(r, config, covpen::kAllPenaltyMethods));
    }
    state.SetLabel(state.range(0) == 0 ? "OLS" : "TLS");
}
BENCHMARK(BM_RunAssetAllMethods)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
