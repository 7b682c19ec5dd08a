#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "covpen/asset_table.hpp"
#include "covpen/backtest.hpp"
#include "covpen/config.hpp"

// Runs the estimator x method grid over every asset of a table and condenses
// the per-asset reports into a manifest with cross-sectional summaries.

namespace covpen {

enum class AssetStatus { Ok, Partial, Failed };

std::string_view to_string(AssetStatus s);

struct AssetOutcome {
    std::string asset_id;
    AssetStatus status = AssetStatus::Ok;
    /// One entry per estimator that failed, "<estimator>: <message>".
    std::vector<std::string> reasons;
    /// Successful reports in estimator-major, method-minor order.
    std::vector<BacktestReport> reports;
    std::vector<std::string> report_paths;
};

struct SummaryStat {
    std::size_t n = 0;
    std::optional<double> mean;
    std::optional<double> standard_error;  // sample std / sqrt(n); needs n >= 2
};

struct SummaryRow {
    Estimator estimator = Estimator::OLS;
    PenaltyMethod method = PenaltyMethod::Naive;
    SummaryStat realized_sharpe;
    SummaryStat mad;
    SummaryStat corr;
};

/// Two-sided paired t-test of per-asset realised Sharpe ratios between two
/// grid columns, over assets where both succeeded.
struct PairComparison {
    std::string first;   // "<estimator>-<method>"
    std::string second;
    std::size_t n = 0;
    /// Assets dropped because one side failed.
    std::size_t excluded = 0;
    double mean_diff = 0.0;
    double t_stat = 0.0;
    double p_value = 1.0;
    /// min(1, p_value * number of column pairs).
    double p_bonferroni = 1.0;
};

struct RunManifest {
    std::string tool_version;
    std::uint64_t seed = 0;
    std::string config_echo;
    /// Every input asset exactly once, rejected-at-ingest ones included.
    std::vector<AssetOutcome> assets;
    std::vector<SummaryRow> summary;
    std::vector<PairComparison> comparisons;
    std::size_t n_ok = 0;
    std::size_t n_partial = 0;
    std::size_t n_failed = 0;
    std::vector<std::string> warnings;
    /// FNV-1a 64 of the manifest JSON with this field empty.
    std::string manifest_hash;

    bool has_failures() const { return n_partial + n_failed > 0; }
};

/// Universe of n_assets series from config.simulate; asset i (named
/// "SYN0001", ...) uses seed derive_seed(seed, i) and dates counted from
/// 2000-01-03. For the joint-Gaussian kind the asset returns are the R draws.
AssetTable simulate_universe(const SimulateConfig& config, std::uint64_t seed);

/// Throws ConfigError for an empty table and Error when no asset succeeds.
/// Assets are processed by config.jobs workers; the result does not depend on
/// the worker count.
RunManifest run_experiment(const ExperimentConfig& config, const AssetTable& table);

/// Loads config.input, or simulates a universe when it is empty.
RunManifest run_experiment(const ExperimentConfig& config);

/// Recomputes summary rows and pairwise comparisons from the outcomes.
void summarize(RunManifest& manifest, const std::vector<Estimator>& estimators,
               const std::vector<PenaltyMethod>& methods);

/// Writes manifest.json, summary.csv, comparisons.csv and every per-asset
/// report under out_dir. Throws IoError naming the path on failure.
void write_outputs(const RunManifest& manifest, const std::filesystem::path& out_dir, OutputFormat format);

}  // namespace covpen
