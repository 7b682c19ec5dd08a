#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

// Multiple-testing baselines for a panel of candidate strategies: the
// Romano-Wolf stepdown with the bootstrap reality check, haircut Sharpe
// ratios, and combinatorially-symmetric cross-validation (CSCV).

namespace covpen {

/// n x T excess returns, one strategy per row.
struct StrategyPanel {
    Eigen::MatrixXd excess_returns;

    std::size_t n_strategies() const { return static_cast<std::size_t>(excess_returns.rows()); }
    std::size_t t_obs() const { return static_cast<std::size_t>(excess_returns.cols()); }

    static StrategyPanel from_rows(const std::vector<std::vector<double>>& rows);

    /// Throws DomainError when empty or non-finite, DegenerateError when a row
    /// has zero variance.
    void validate() const;
};

enum class PerfFn { Mean, Sharpe };

std::string_view to_string(PerfFn f);
PerfFn parse_perf_fn(std::string_view name);

/// Performance of one return stream: mean, or mean / population std.
double performance(PerfFn f, std::span<const double> xs);

struct BootstrapOptions {
    std::size_t n_bootstrap = 1000;
    PerfFn perf = PerfFn::Mean;
    /// Circular block length; 1 is the i.i.d. bootstrap.
    std::size_t block_len = 1;
    std::uint64_t seed = 0;
};

struct Echelon {
    std::size_t k = 0;
    std::vector<std::size_t> members;  // ascending strategy ids
    double critical_value = 0.0;
};

struct EchelonResult {
    std::vector<Echelon> echelons;
    double brc_pvalue = 1.0;
    /// sqrt(T) max_i p_i.
    double v_hat = 0.0;
    std::size_t n_bootstrap = 0;
    double alpha = 0.0;
};

/// Non-studentised stepdown: step k takes the (1 - alpha/k) empirical
/// quantile of sqrt(T) max_i (p_i^(b) - p_i) over the strategies still
/// standing, and rejects those with sqrt(T) p_i above it. Replicate b
/// resamples time indices (jointly across strategies) from a stream seeded by
/// derive_seed(seed, b), and the same replicates serve every step.
/// Requires n >= 1, T >= 30, B >= 200, 0 < alpha < 1.
EchelonResult romano_wolf_stepdown(const StrategyPanel& panel, double alpha,
                                   const BootstrapOptions& options = {});

/// Fraction of replicates whose sqrt(T) max_i (p_i^(b) - p_i) exceeds
/// sqrt(T) max_i p_i.
double brc_pvalue(const StrategyPanel& panel, const BootstrapOptions& options = {});

enum class HaircutMethod { Independent, Bonferroni, Holm, BHY };

std::string_view to_string(HaircutMethod m);
HaircutMethod parse_haircut_method(std::string_view name);

struct HaircutResult {
    HaircutMethod method = HaircutMethod::Bonferroni;
    std::size_t n_trials = 0;
    double p_single = 0.0;
    double p_multi = 0.0;
    double haircut_sr = 0.0;
    /// 1 - haircut_sr / sr; 0 when sr is 0.
    double haircut_pct = 0.0;
};

/// Two-sided p-value of sr sqrt(T) under Student's t with T - 1 dof.
double sharpe_pvalue(double sr, std::size_t t_obs);

/// Multiplicity-adjusted p-value. Holm and BHY need the p-values of the other
/// n - 1 trials; the test's own p_single completes the family.
double adjust_pvalue(double p_single, std::size_t n_trials, HaircutMethod method,
                     std::span<const double> other_pvalues = {});

/// Per-period Sharpe whose two-sided t p-value equals p_multi; 0 once
/// p_multi >= 1.
double sharpe_from_pvalue(double p_multi, std::size_t t_obs);

HaircutResult haircut_sharpe(double sr, std::size_t t_obs, std::size_t n_trials, HaircutMethod method,
                             std::span<const double> other_pvalues = {});

struct CSCVResult {
    std::size_t s_blocks = 0;
    std::size_t n_combinations = 0;
    /// Observations dropped from the end so that S divides T.
    std::size_t dropped_tail = 0;
    double pbo = 0.0;
    double prob_loss = 0.0;
    double degradation_slope = 0.0;
    bool dominates_random = false;
    /// Per combination, in enumeration order.
    std::vector<double> omega;
    std::vector<double> is_perf;
    std::vector<double> os_perf;
};

/// In-sample block sets of every balanced split of S blocks, as bitmasks in
/// increasing order.
std::vector<std::uint32_t> cscv_partitions(std::size_t s_blocks);

/// Requires an even S in [2, 16], at least two strategies and T >= 2S.
CSCVResult cscv(const StrategyPanel& panel, std::size_t s_blocks, PerfFn perf = PerfFn::Sharpe);

}  // namespace covpen
