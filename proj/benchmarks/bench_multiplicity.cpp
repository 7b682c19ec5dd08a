#include <vector>

#include <benchmark/benchmark.h>

#include "covpen/multiplicity.hpp"
#include "covpen/rng.hpp"

namespace {

covpen::StrategyPanel noise_panel(std::size_t n, std::size_t t) {
    covpen::Rng rng(3);
    std::vector<std::vector<double>> rows(n, std::vector<double>(t));
    for (auto& row : rows) {
        for (double& x : row) x = rng.normal();
    }
    return covpen::StrategyPanel::from_rows(rows);
}

}  // namespace

static void BM_RomanoWolf(benchmark::State& state) {
    const auto panel = noise_panel(20, 500);
    covpen::BootstrapOptions o;
    o.n_bootstrap = 1000;
    o.block_len = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(covpen::romano_wolf_stepdown(panel, 0.05, o));
}
BENCHMARK(BM_RomanoWolf)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_Cscv(benchmark::State& state) {
    const auto panel = noise_panel(50, 1000);
    const auto s = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(covpen::cscv(panel, s));
}
BENCHMARK(BM_Cscv)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
