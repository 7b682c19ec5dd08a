#include "covpen/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "covpen/error.hpp"
#include "covpen/student_t.hpp"

namespace covpen::stats {

double mean(std::span<const double> xs) {
    if (xs.empty()) throw InsufficientDataError("mean: empty input");
    double sum = 0.0;
    for (double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
}

double population_variance(std::span<const double> xs) {
    const double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return ss / static_cast<double>(xs.size());
}

double population_std(std::span<const double> xs) { return std::sqrt(population_variance(xs)); }

double sample_std(std::span<const double> xs) {
    if (xs.size() < 2) throw InsufficientDataError("sample_std: need at least two values");
    const double n = static_cast<double>(xs.size());
    return std::sqrt(population_variance(xs) * n / (n - 1.0));
}

double sharpe(std::span<const double> xs) {
    const double m = mean(xs);
    const double sd = population_std(xs);
    if (!(sd > 0.0) || sd <= 1e-14 * std::abs(m)) {
        throw DegenerateError("sharpe: zero variance");
    }
    return m / sd;
}

std::optional<double> pearson(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw DimensionError("pearson: length mismatch");
    if (xs.size() < 2) return std::nullopt;
    // Exactly constant inputs can leave rounding noise in the centred sums.
    const auto constant = [](std::span<const double> v) {
        return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
    };
    if (constant(xs) || constant(ys)) return std::nullopt;
    const double mx = mean(xs);
    const double my = mean(ys);
    double sxx = 0.0;
    double syy = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (!(sxx > 0.0) || !(syy > 0.0)) return std::nullopt;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::optional<double> ols_slope(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw DimensionError("ols_slope: length mismatch");
    if (xs.size() < 2) return std::nullopt;
    const double mx = mean(xs);
    const double my = mean(ys);
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (!(sxx > 0.0)) return std::nullopt;
    return sxy / sxx;
}

double empirical_quantile(std::span<const double> xs, double level) {
    if (xs.empty()) throw InsufficientDataError("empirical_quantile: empty input");
    if (!(level >= 0.0 && level <= 1.0)) throw DomainError("empirical_quantile: level in [0,1]");
    std::vector<double> sorted(xs.begin(), xs.end());
    const auto n = static_cast<double>(sorted.size());
    auto rank = static_cast<std::size_t>(std::ceil(level * n - 1e-12));
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(rank - 1), sorted.end());
    return sorted[rank - 1];
}

PairedTTest paired_t_test(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw DimensionError("paired_t_test: length mismatch");
    if (xs.size() < 2) throw InsufficientDataError("paired_t_test: need at least two pairs");
    std::vector<double> diff(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) diff[i] = xs[i] - ys[i];
    PairedTTest out;
    out.n = diff.size();
    out.mean_diff = mean(diff);
    const double sd = sample_std(diff);
    if (!(sd > 0.0)) {
        out.t_stat = out.mean_diff == 0.0 ? 0.0 : std::copysign(INFINITY, out.mean_diff);
        out.p_value = out.mean_diff == 0.0 ? 1.0 : 0.0;
        return out;
    }
    out.t_stat = out.mean_diff / (sd / std::sqrt(static_cast<double>(out.n)));
    out.p_value = special::student_t_two_sided(std::abs(out.t_stat), static_cast<double>(out.n - 1));
    return out;
}

double sign_test_upper(std::size_t wins, std::size_t n) {
    if (wins > n) throw DomainError("sign_test_upper: wins exceeds n");
    // Sum of C(n, k) / 2^n in log space.
    double total = 0.0;
    for (std::size_t k = wins; k <= n; ++k) {
        const double log_term = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                                std::lgamma(static_cast<double>(n - k) + 1.0) -
                                static_cast<double>(n) * std::log(2.0);
        total += std::exp(log_term);
    }
    return std::min(total, 1.0);
}

}  // namespace covpen::stats
