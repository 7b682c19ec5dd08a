#pragma once

#include <cstddef>
#include <optional>
#include <span>

// Descriptive statistics shared across modules. Standard deviations use the
// population convention (divide by n) unless the name says otherwise.

namespace covpen::stats {

double mean(std::span<const double> xs);
double population_variance(std::span<const double> xs);
double population_std(std::span<const double> xs);

/// Sample standard deviation (divide by n - 1).
double sample_std(std::span<const double> xs);

/// Per-period Sharpe ratio mean / population std. Throws DegenerateError for
/// zero variance and InsufficientDataError for an empty input.
double sharpe(std::span<const double> xs);

/// Pearson correlation; nullopt when either input has zero variance.
std::optional<double> pearson(std::span<const double> xs, std::span<const double> ys);

/// Least-squares slope of ys on xs; nullopt when xs is constant.
std::optional<double> ols_slope(std::span<const double> xs, std::span<const double> ys);

/// Empirical quantile by inverting the ECDF: the ceil(level * n)-th order
/// statistic (1-based), clamped to [1, n]. Sorts a copy.
double empirical_quantile(std::span<const double> xs, double level);

struct PairedTTest {
    std::size_t n = 0;
    double mean_diff = 0.0;
    double t_stat = 0.0;
    double p_value = 1.0;  // two-sided, n - 1 degrees of freedom
};

/// Two-sided paired t-test on differences xs - ys.
PairedTTest paired_t_test(std::span<const double> xs, std::span<const double> ys);

/// One-sided sign test: P(Binomial(n, 1/2) >= wins).
double sign_test_upper(std::size_t wins, std::size_t n);

}  // namespace covpen::stats
