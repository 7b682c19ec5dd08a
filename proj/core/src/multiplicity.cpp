#include "covpen/multiplicity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include "covpen/error.hpp"
#include "covpen/rng.hpp"
#include "covpen/stats.hpp"
#include "covpen/student_t.hpp"

namespace covpen {

StrategyPanel StrategyPanel::from_rows(const std::vector<std::vector<double>>& rows) {
    StrategyPanel panel;
    if (rows.empty()) return panel;
    const std::size_t t = rows.front().size();
    panel.excess_returns.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(t));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != t) throw DimensionError("StrategyPanel: rows differ in length");
        for (std::size_t j = 0; j < t; ++j) {
            panel.excess_returns(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return panel;
}

void StrategyPanel::validate() const {
    if (excess_returns.size() == 0) throw DomainError("StrategyPanel: empty panel");
    if (!excess_returns.allFinite()) throw DomainError("StrategyPanel: non-finite values");
    for (Eigen::Index i = 0; i < excess_returns.rows(); ++i) {
        const auto row = excess_returns.row(i);
        if ((row.array() - row.mean()).square().sum() <= 0.0) {
            throw DegenerateError("StrategyPanel: strategy " + std::to_string(i) + " has zero variance");
        }
    }
}

std::string_view to_string(PerfFn f) { return f == PerfFn::Mean ? "mean" : "sharpe"; }

PerfFn parse_perf_fn(std::string_view name) {
    if (name == "mean") return PerfFn::Mean;
    if (name == "sharpe") return PerfFn::Sharpe;
    throw ConfigError("unknown performance functional '" + std::string(name) + "'");
}

double performance(PerfFn f, std::span<const double> xs) {
    return f == PerfFn::Mean ? stats::mean(xs) : stats::sharpe(xs);
}

namespace {

double perf_from_sums(PerfFn f, double sum, double sum_sq, double n) {
    const double m = sum / n;
    if (f == PerfFn::Mean) return m;
    const double var = sum_sq / n - m * m;
    if (!(var > 1e-28 * std::max(1.0, m * m))) throw DegenerateError("performance: zero variance");
    return m / std::sqrt(var);
}

Eigen::VectorXd row_perf(const StrategyPanel& panel, PerfFn f) {
    Eigen::VectorXd out(panel.excess_returns.rows());
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        const Eigen::VectorXd row = panel.excess_returns.row(i).transpose();
        out(i) = performance(f, std::span<const double>(row.data(), static_cast<std::size_t>(row.size())));
    }
    return out;
}

void check_bootstrap(const StrategyPanel& panel, const BootstrapOptions& o) {
    panel.validate();
    if (panel.t_obs() < 30) throw InsufficientDataError("bootstrap: need T >= 30");
    if (o.n_bootstrap < 200) throw DomainError("bootstrap: need B >= 200");
    if (o.block_len < 1 || o.block_len > panel.t_obs()) throw DomainError("bootstrap: block_len out of range");
}

// deltas(b, i) = p_i^(b) - p_i.
Eigen::MatrixXd bootstrap_deltas(const StrategyPanel& panel, const Eigen::VectorXd& perf,
                                 const BootstrapOptions& o) {
    const auto n = panel.excess_returns.rows();
    const std::size_t T = panel.t_obs();
    const auto& R = panel.excess_returns;
    Eigen::MatrixXd deltas(static_cast<Eigen::Index>(o.n_bootstrap), n);
    Eigen::VectorXd sum(n);
    Eigen::VectorXd sum_sq(n);
    for (std::size_t b = 0; b < o.n_bootstrap; ++b) {
        Rng rng(derive_seed(o.seed, b));
        sum.setZero();
        sum_sq.setZero();
        std::size_t drawn = 0;
        while (drawn < T) {
            const std::size_t start = rng.below(T);
            for (std::size_t j = 0; j < o.block_len && drawn < T; ++j, ++drawn) {
                const auto col = R.col(static_cast<Eigen::Index>((start + j) % T));
                sum += col;
                sum_sq += col.cwiseAbs2();
            }
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            deltas(static_cast<Eigen::Index>(b), i) =
                perf_from_sums(o.perf, sum(i), sum_sq(i), static_cast<double>(T)) - perf(i);
        }
    }
    return deltas;
}

}  // namespace

EchelonResult romano_wolf_stepdown(const StrategyPanel& panel, double alpha, const BootstrapOptions& options) {
    check_bootstrap(panel, options);
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("romano_wolf_stepdown: alpha must lie in (0, 1)");

    const Eigen::VectorXd perf = row_perf(panel, options.perf);
    const Eigen::MatrixXd deltas = bootstrap_deltas(panel, perf, options);
    const double root_t = std::sqrt(static_cast<double>(panel.t_obs()));
    const auto n = static_cast<std::size_t>(perf.size());
    const auto B = static_cast<Eigen::Index>(options.n_bootstrap);

    EchelonResult out;
    out.n_bootstrap = options.n_bootstrap;
    out.alpha = alpha;
    out.v_hat = root_t * perf.maxCoeff();

    std::size_t exceed = 0;
    for (Eigen::Index b = 0; b < B; ++b) {
        if (root_t * deltas.row(b).maxCoeff() > out.v_hat) ++exceed;
    }
    out.brc_pvalue = static_cast<double>(exceed) / static_cast<double>(options.n_bootstrap);

    std::vector<std::size_t> active(n);
    std::iota(active.begin(), active.end(), 0);
    std::vector<double> v(static_cast<std::size_t>(B));
    for (std::size_t k = 1; !active.empty(); ++k) {
        for (Eigen::Index b = 0; b < B; ++b) {
            double m = -INFINITY;
            for (std::size_t i : active) m = std::max(m, deltas(b, static_cast<Eigen::Index>(i)));
            v[static_cast<std::size_t>(b)] = root_t * m;
        }
        const double c_k = stats::empirical_quantile(v, 1.0 - alpha / static_cast<double>(k));

        Echelon e{k, {}, c_k};
        std::vector<std::size_t> still;
        for (std::size_t i : active) {
            (root_t * perf(static_cast<Eigen::Index>(i)) > c_k ? e.members : still).push_back(i);
        }
        if (e.members.empty()) break;
        out.echelons.push_back(std::move(e));
        active = std::move(still);
    }
    return out;
}

double brc_pvalue(const StrategyPanel& panel, const BootstrapOptions& options) {
    check_bootstrap(panel, options);
    const Eigen::VectorXd perf = row_perf(panel, options.perf);
    const Eigen::MatrixXd deltas = bootstrap_deltas(panel, perf, options);
    const double v_hat = perf.maxCoeff();
    std::size_t exceed = 0;
    for (Eigen::Index b = 0; b < deltas.rows(); ++b) {
        if (deltas.row(b).maxCoeff() > v_hat) ++exceed;
    }
    return static_cast<double>(exceed) / static_cast<double>(options.n_bootstrap);
}

std::string_view to_string(HaircutMethod m) {
    switch (m) {
        case HaircutMethod::Independent: return "Independent";
        case HaircutMethod::Bonferroni: return "Bonferroni";
        case HaircutMethod::Holm: return "Holm";
        case HaircutMethod::BHY: return "BHY";
    }
    return "?";
}

HaircutMethod parse_haircut_method(std::string_view name) {
    for (auto m : {HaircutMethod::Independent, HaircutMethod::Bonferroni, HaircutMethod::Holm,
                   HaircutMethod::BHY}) {
        if (name == to_string(m)) return m;
    }
    throw ConfigError("unknown haircut method '" + std::string(name) + "'");
}

double sharpe_pvalue(double sr, std::size_t t_obs) {
    if (t_obs < 2) throw InsufficientDataError("sharpe_pvalue: need T >= 2");
    if (!std::isfinite(sr)) throw DomainError("sharpe_pvalue: non-finite Sharpe ratio");
    const double t = std::abs(sr) * std::sqrt(static_cast<double>(t_obs));
    return special::student_t_two_sided(t, static_cast<double>(t_obs - 1));
}

double adjust_pvalue(double p_single, std::size_t n_trials, HaircutMethod method,
                     std::span<const double> other_pvalues) {
    if (!(p_single >= 0.0 && p_single <= 1.0)) throw DomainError("adjust_pvalue: p_single outside [0, 1]");
    if (n_trials < 1) throw DomainError("adjust_pvalue: n_trials must be at least 1");
    const double n = static_cast<double>(n_trials);
    if (n_trials == 1) return p_single;  // a single test needs no adjustment

    switch (method) {
        case HaircutMethod::Independent: return 1.0 - std::pow(1.0 - p_single, n);
        case HaircutMethod::Bonferroni: return std::min(1.0, n * p_single);
        case HaircutMethod::Holm:
        case HaircutMethod::BHY: break;
    }

    if (other_pvalues.size() + 1 != n_trials) {
        throw DomainError("adjust_pvalue: Holm and BHY need the p-values of the other n - 1 trials");
    }
    std::vector<double> ps(other_pvalues.begin(), other_pvalues.end());
    for (double p : ps) {
        if (!(p >= 0.0 && p <= 1.0)) throw DomainError("adjust_pvalue: trial p-value outside [0, 1]");
    }
    ps.push_back(p_single);
    std::sort(ps.begin(), ps.end());
    const auto own = static_cast<std::size_t>(std::lower_bound(ps.begin(), ps.end(), p_single) - ps.begin());

    if (method == HaircutMethod::Holm) {
        double adj = 0.0;
        for (std::size_t i = 0; i <= own; ++i) {
            adj = std::max(adj, std::min(1.0, (n - static_cast<double>(i)) * ps[i]));
        }
        return adj;
    }
    double harmonic = 0.0;
    for (std::size_t i = 1; i <= n_trials; ++i) harmonic += 1.0 / static_cast<double>(i);
    double adj = 1.0;
    for (std::size_t i = own; i < n_trials; ++i) {
        adj = std::min(adj, n * harmonic * ps[i] / static_cast<double>(i + 1));
    }
    return std::min(adj, 1.0);
}

double sharpe_from_pvalue(double p_multi, std::size_t t_obs) {
    if (t_obs < 2) throw InsufficientDataError("sharpe_from_pvalue: need T >= 2");
    if (!(p_multi > 0.0)) throw DomainError("sharpe_from_pvalue: p-value must be positive");
    if (p_multi >= 1.0) return 0.0;
    const double t = special::student_t_quantile(1.0 - p_multi / 2.0, static_cast<double>(t_obs - 1));
    return t / std::sqrt(static_cast<double>(t_obs));
}

HaircutResult haircut_sharpe(double sr, std::size_t t_obs, std::size_t n_trials, HaircutMethod method,
                             std::span<const double> other_pvalues) {
    HaircutResult out;
    out.method = method;
    out.n_trials = n_trials;
    out.p_single = sharpe_pvalue(sr, t_obs);
    out.p_multi = std::max(adjust_pvalue(out.p_single, n_trials, method, other_pvalues), out.p_single);
    out.haircut_sr = out.p_multi >= 1.0 ? 0.0 : std::copysign(sharpe_from_pvalue(out.p_multi, t_obs), sr);
    out.haircut_pct = sr != 0.0 ? 1.0 - out.haircut_sr / sr : 0.0;
    return out;
}

std::vector<std::uint32_t> cscv_partitions(std::size_t s_blocks) {
    if (s_blocks < 2 || s_blocks > 16 || s_blocks % 2 != 0) {
        throw DomainError("cscv: S must be an even number between 2 and 16");
    }
    std::vector<std::uint32_t> out;
    const std::uint32_t limit = 1u << s_blocks;
    for (std::uint32_t mask = 0; mask < limit; ++mask) {
        if (static_cast<std::size_t>(std::popcount(mask)) == s_blocks / 2) out.push_back(mask);
    }
    return out;
}

CSCVResult cscv(const StrategyPanel& panel, std::size_t s_blocks, PerfFn perf) {
    const auto masks = cscv_partitions(s_blocks);
    panel.validate();
    const std::size_t n = panel.n_strategies();
    if (n < 2) throw DomainError("cscv: need at least two strategies");
    const std::size_t block = panel.t_obs() / s_blocks;
    if (block < 2) throw InsufficientDataError("cscv: need T >= 2S");

    CSCVResult out;
    out.s_blocks = s_blocks;
    out.n_combinations = masks.size();
    out.dropped_tail = panel.t_obs() - block * s_blocks;

    // Per-block sums; performance on a union of blocks depends only on these,
    // so the chronological re-ordering of each half is implicit.
    Eigen::MatrixXd sums(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(s_blocks));
    Eigen::MatrixXd sums_sq(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(s_blocks));
    for (std::size_t s = 0; s < s_blocks; ++s) {
        const auto blk = panel.excess_returns.middleCols(static_cast<Eigen::Index>(s * block),
                                                         static_cast<Eigen::Index>(block));
        sums.col(static_cast<Eigen::Index>(s)) = blk.rowwise().sum();
        sums_sq.col(static_cast<Eigen::Index>(s)) = blk.cwiseAbs2().rowwise().sum();
    }
    const double half_n = static_cast<double>(block * s_blocks / 2);

    std::size_t below = 0;
    std::size_t losses = 0;
    double best_os_total = 0.0;
    double median_os_total = 0.0;
    std::vector<double> is_p(n);
    std::vector<double> os_p(n);
    for (std::uint32_t mask : masks) {
        for (std::size_t i = 0; i < n; ++i) {
            double is_s = 0.0, is_q = 0.0, os_s = 0.0, os_q = 0.0;
            for (std::size_t s = 0; s < s_blocks; ++s) {
                const double a = sums(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(s));
                const double q = sums_sq(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(s));
                if (mask & (1u << s)) {
                    is_s += a;
                    is_q += q;
                } else {
                    os_s += a;
                    os_q += q;
                }
            }
            is_p[i] = perf_from_sums(perf, is_s, is_q, half_n);
            os_p[i] = perf_from_sums(perf, os_s, os_q, half_n);
        }
        const auto best = static_cast<std::size_t>(std::max_element(is_p.begin(), is_p.end()) - is_p.begin());
        std::size_t rank = 1;
        for (std::size_t j = 0; j < n; ++j) {
            if (os_p[j] < os_p[best]) ++rank;
        }
        const double omega = static_cast<double>(rank) / static_cast<double>(n + 1);
        if (omega < 0.5) ++below;
        if (os_p[best] < 0.0) ++losses;

        std::vector<double> sorted = os_p;
        std::sort(sorted.begin(), sorted.end());
        const double median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
        best_os_total += os_p[best];
        median_os_total += median;

        out.omega.push_back(omega);
        out.is_perf.push_back(is_p[best]);
        out.os_perf.push_back(os_p[best]);
    }

    const double c = static_cast<double>(masks.size());
    out.pbo = static_cast<double>(below) / c;
    out.prob_loss = static_cast<double>(losses) / c;
    out.degradation_slope = stats::ols_slope(out.is_perf, out.os_perf).value_or(0.0);
    out.dominates_random = best_os_total > median_os_total;
    return out;
}

}  // namespace covpen
