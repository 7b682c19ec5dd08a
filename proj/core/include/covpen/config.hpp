#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "covpen/backtest.hpp"
#include "covpen/multiplicity.hpp"
#include "covpen/synthetic.hpp"

// Experiment configuration, read from an INI-style file:
//
//   # comment                      ; comment
//   [section]
//   key = value
//
// Sections and keys (all optional, defaults shown):
//
//   [data]      input = <csv path>         (empty: generate from [simulate])
//               benchmark_column =
//   [backtest]  horizon = 21
//               initial = 1008
//               lags = 3,5,7,9,12,15,18,21,26,31,36,42,49,56,63,84,105,126
//               estimators = OLS,TLS
//               methods = Naive,AIC,ImpSR,RSquared,SURE
//               benchmark = 0
//               penalty_n = design_rows | series_length
//               vol_target =              (annualised, e.g. 0.10)
//               scale_columns = false
//   [simulate]  kind = ar | joint_gaussian
//               n_assets = 100
//               t_obs = 3000
//               coefficients = 0.2         (AR)
//               noise_sigma = 0.01         (AR)
//               mean = 0                   (AR)
//               rho = 0.3, sigma_x = 1, sigma_r = 1, mu_x = 0, mu_r = 0
//   [diagnose]  input = <wide csv of strategy excess returns>
//               alpha = 0.05
//               bootstrap = 1000
//               block_len = 1
//               perf = mean | sharpe
//               haircut = Bonferroni
//               cscv_blocks = 8
//               cscv_perf = sharpe
//   [run]       seed = 0
//               jobs = 1
//               format = json | csv
//               out = out
//
// Unknown sections or keys are rejected. Command-line flags override [run].

namespace covpen {

enum class OutputFormat { Json, Csv };

struct SimulateConfig {
    enum class Kind { AR, JointGaussian };
    Kind kind = Kind::AR;
    std::size_t n_assets = 100;
    std::size_t t_obs = 3000;
    synthetic::ArSpec ar{{0.2}, 0.01, 0.0};
    synthetic::JointGaussianSpec joint{0.3, 1.0, 1.0, 0.0, 0.0};
};

struct DiagnoseConfig {
    std::filesystem::path input;
    double alpha = 0.05;
    std::size_t bootstrap = 1000;
    std::size_t block_len = 1;
    PerfFn perf = PerfFn::Mean;
    HaircutMethod haircut = HaircutMethod::Bonferroni;
    std::size_t cscv_blocks = 8;
    PerfFn cscv_perf = PerfFn::Sharpe;
};

struct ExperimentConfig {
    std::filesystem::path input;
    std::string benchmark_column;
    BacktestConfig backtest;
    std::vector<Estimator> estimators{Estimator::OLS, Estimator::TLS};
    std::vector<PenaltyMethod> methods{std::begin(kAllPenaltyMethods), std::end(kAllPenaltyMethods)};
    SimulateConfig simulate;
    DiagnoseConfig diagnose;
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
    OutputFormat format = OutputFormat::Json;
    std::filesystem::path out_dir = "out";

    /// Canonical "section.key = value" listing of every setting, one per line
    /// in a fixed order; stable across runs.
    std::string echo() const;
};

/// Throws ConfigError naming the file, plus the line for syntax errors or the
/// section and key for bad values.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(std::istream& in, const std::string& origin = "<config>");

std::string_view to_string(OutputFormat f);
OutputFormat parse_output_format(std::string_view s);

}  // namespace covpen
