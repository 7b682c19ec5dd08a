#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "covpen/estimators.hpp"
#include "covpen/penalties.hpp"

// Anchored walk-forward backtest. Window k trains on every observation before
// I + (k-1) h and trades the next h periods; at each window every grid lag is
// scored under a penalty method, the best lag is refitted on the in-sample
// block, and its signal is traded out of sample.

namespace covpen {

struct Range {
    std::size_t begin = 0;
    std::size_t end = 0;  // half-open
    std::size_t size() const { return end - begin; }
    bool operator==(const Range&) const = default;
};

struct WindowSplit {
    std::size_t index_k = 0;  // 1-based
    Range is_range;
    Range os_range;
    bool operator==(const WindowSplit&) const = default;
};

/// Per-period benchmark: a constant, or a series aligned with the returns.
struct Benchmark {
    double constant = 0.0;
    std::vector<double> series;

    double at(std::size_t t) const { return series.empty() ? constant : series.at(t); }
};

/// Which N enters the penalty term 2 Tr(M) / N.
enum class PenaltyN { DesignRows, SeriesLength };

inline const std::vector<int> kDefaultLagGrid = {3,  5,  7,  9,  12, 15, 18, 21,  26,
                                                 31, 36, 42, 49, 56, 63, 84, 105, 126};

struct BacktestConfig {
    std::size_t horizon_h = 21;
    std::size_t initial_I = 1008;
    std::vector<int> lag_grid = kDefaultLagGrid;
    Estimator estimator = Estimator::OLS;
    PenaltyMethod method = PenaltyMethod::RSquared;
    Benchmark benchmark;
    /// Annualised volatility target; only rescales the reported return stream.
    std::optional<double> vol_target;
    PenaltyN penalty_n = PenaltyN::DesignRows;
    FitOptions fit_options;

    /// Throws ConfigError unless the grid is non-empty, positive and strictly
    /// increasing, h >= 1 and I >= 3 max(grid).
    void validate() const;
};

/// K = floor((T - I) / h) windows tiling [I, I + K h). Throws
/// InsufficientDataError when K < 1.
std::vector<WindowSplit> make_windows(std::size_t series_len, const BacktestConfig& config);

struct WindowRecord {
    std::size_t index_k = 0;
    /// 0 when every lag failed and the window was traded flat.
    int chosen_lag = 0;
    std::optional<double> expected_sr;
    /// Out-of-sample excess strategy returns X_t R_t - bench_t.
    std::vector<double> oos_returns;
    bool flat = false;
    /// Grid lags whose fit or score failed in this window.
    std::size_t failed_lags = 0;

    bool operator==(const WindowRecord&) const = default;
};

struct BacktestReport {
    std::string asset_id;
    Estimator estimator = Estimator::OLS;
    PenaltyMethod method = PenaltyMethod::RSquared;
    std::vector<WindowRecord> per_window;
    /// Per-period Sharpe of the concatenated out-of-sample excess returns.
    double realized_sharpe = 0.0;
    std::optional<double> mad;
    std::optional<double> corr;
    int mode_lag = 0;
    std::size_t clamp_warnings = 0;
    /// Multiplier bringing the out-of-sample stream to vol_target (252-day
    /// annualisation); present only when a target is configured.
    std::optional<double> vol_scale;

    bool operator==(const BacktestReport&) const = default;
};

BacktestReport run_asset(std::span<const double> returns, const BacktestConfig& config);

/// One report per method, sharing the per-lag fits across methods.
/// config.method is ignored.
std::vector<BacktestReport> run_asset_methods(std::span<const double> returns,
                                              const BacktestConfig& config,
                                              std::span<const PenaltyMethod> methods);

/// mean / population std of strategy - benchmark.
double realized_sharpe(std::span<const double> strategy, double benchmark = 0.0);
double realized_sharpe(std::span<const double> strategy, std::span<const double> benchmark);

struct AlignmentMetrics {
    /// Absent when either paired sequence is constant.
    std::optional<double> corr;
    double mad = 0.0;
    std::size_t n_pairs = 0;
};

/// Pairs window k's expected SR with the cumulative realised SR over blocks
/// 1..k. Windows with no expected SR, or whose cumulative SR is undefined, are
/// skipped. Requires K >= 3 blocks and at least one usable pair.
AlignmentMetrics alignment_metrics(std::span<const std::optional<double>> expected,
                                   const std::vector<std::vector<double>>& oos_blocks);
AlignmentMetrics alignment_metrics(std::span<const double> expected,
                                   const std::vector<std::vector<double>>& oos_blocks);

/// Most frequent chosen lag over non-flat windows, ties to the smaller lag;
/// 0 when every window was flat.
int mode_lag(std::span<const WindowRecord> windows);

}  // namespace covpen
