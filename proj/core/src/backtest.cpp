#include "covpen/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "covpen/error.hpp"
#include "covpen/moments.hpp"
#include "covpen/stats.hpp"

namespace covpen {

void BacktestConfig::validate() const {
    if (horizon_h < 1) throw ConfigError("backtest: horizon_h must be at least 1");
    if (lag_grid.empty()) throw ConfigError("backtest: lag_grid is empty");
    for (std::size_t i = 0; i < lag_grid.size(); ++i) {
        if (lag_grid[i] < 1) throw ConfigError("backtest: lags must be positive");
        if (i > 0 && lag_grid[i] <= lag_grid[i - 1]) {
            throw ConfigError("backtest: lag_grid must be strictly increasing");
        }
    }
    const auto max_lag = static_cast<std::size_t>(lag_grid.back());
    if (initial_I < 3 * max_lag) {
        throw ConfigError("backtest: initial_I must be at least 3 * max(lag_grid) = " +
                          std::to_string(3 * max_lag));
    }
    if (vol_target && !(*vol_target > 0.0)) throw ConfigError("backtest: vol_target must be positive");
}

std::vector<WindowSplit> make_windows(std::size_t series_len, const BacktestConfig& config) {
    if (config.horizon_h < 1) throw ConfigError("make_windows: horizon_h must be at least 1");
    const std::size_t I = config.initial_I;
    const std::size_t h = config.horizon_h;
    const std::size_t K = series_len > I ? (series_len - I) / h : 0;
    if (K < 1) {
        throw InsufficientDataError("make_windows: need at least I + h = " + std::to_string(I + h) +
                                    " observations, have " + std::to_string(series_len));
    }
    std::vector<WindowSplit> out;
    out.reserve(K);
    for (std::size_t k = 1; k <= K; ++k) {
        const std::size_t os_begin = I + (k - 1) * h;
        out.push_back({k, {0, os_begin}, {os_begin, os_begin + h}});
    }
    return out;
}

double realized_sharpe(std::span<const double> strategy, double benchmark) {
    std::vector<double> excess(strategy.begin(), strategy.end());
    for (double& x : excess) x -= benchmark;
    return stats::sharpe(excess);
}

double realized_sharpe(std::span<const double> strategy, std::span<const double> benchmark) {
    if (strategy.size() != benchmark.size()) throw DimensionError("realized_sharpe: length mismatch");
    std::vector<double> excess(strategy.size());
    for (std::size_t i = 0; i < excess.size(); ++i) excess[i] = strategy[i] - benchmark[i];
    return stats::sharpe(excess);
}

AlignmentMetrics alignment_metrics(std::span<const std::optional<double>> expected,
                                   const std::vector<std::vector<double>>& oos_blocks) {
    if (expected.size() != oos_blocks.size()) throw DimensionError("alignment_metrics: length mismatch");
    if (oos_blocks.size() < 3) throw InsufficientDataError("alignment_metrics: need K >= 3 windows");

    std::vector<double> cumulative;
    std::vector<double> exp_used;
    std::vector<double> real_used;
    for (std::size_t k = 0; k < oos_blocks.size(); ++k) {
        cumulative.insert(cumulative.end(), oos_blocks[k].begin(), oos_blocks[k].end());
        if (!expected[k]) continue;
        double realized = 0.0;
        try {
            realized = stats::sharpe(cumulative);
        } catch (const DegenerateError&) {
            continue;
        }
        exp_used.push_back(*expected[k]);
        real_used.push_back(realized);
    }
    if (exp_used.empty()) throw InsufficientDataError("alignment_metrics: no usable windows");

    AlignmentMetrics out;
    out.n_pairs = exp_used.size();
    double gap = 0.0;
    for (std::size_t i = 0; i < exp_used.size(); ++i) gap += std::abs(real_used[i] - exp_used[i]);
    out.mad = gap / static_cast<double>(exp_used.size());
    out.corr = stats::pearson(exp_used, real_used);
    return out;
}

AlignmentMetrics alignment_metrics(std::span<const double> expected,
                                   const std::vector<std::vector<double>>& oos_blocks) {
    std::vector<std::optional<double>> wrapped(expected.begin(), expected.end());
    return alignment_metrics(wrapped, oos_blocks);
}

int mode_lag(std::span<const WindowRecord> windows) {
    std::map<int, std::size_t> counts;
    for (const auto& w : windows) {
        if (!w.flat) ++counts[w.chosen_lag];
    }
    int best = 0;
    std::size_t best_count = 0;
    for (const auto& [lag, count] : counts) {  // ascending lag, so ties keep the smaller
        if (count > best_count) {
            best = lag;
            best_count = count;
        }
    }
    return best;
}

namespace {

struct LagFit {
    int lag = 0;
    std::optional<LinearSignalModel> model;
};

std::optional<double> in_sample_sharpe(const LinearSignalModel& model, std::span<const double> returns,
                                       const Benchmark& bench, std::size_t is_end) {
    std::vector<double> s;
    s.reserve(is_end);
    for (std::size_t t = static_cast<std::size_t>(model.lag_p); t < is_end; ++t) {
        s.push_back(predict_at(model, returns, t) * returns[t] - bench.at(t));
    }
    try {
        return stats::sharpe(s);
    } catch (const Error&) {
        return std::nullopt;
    }
}

// Throws covpen::Error when the lag cannot be scored under `method`.
PenaltyScore score_lag(PenaltyMethod method, const LinearSignalModel& model,
                       const std::optional<double>& naive_sr, double n_penalty,
                       std::size_t& clamp_warnings) {
    PenaltyScore s;
    s.method = method;
    s.lag_p = model.lag_p;
    switch (method) {
        case PenaltyMethod::Naive:
            if (!naive_sr) throw DegenerateError("naive: in-sample strategy has zero variance");
            s.score = *naive_sr;
            break;
        case PenaltyMethod::AIC:
            s.score = -aic_score(model.rss, static_cast<double>(model.n_obs), model.lag_p + 1.0);
            break;
        case PenaltyMethod::ImpSR: {
            double sr_in = sharpe_from_rho(model.rho_in);
            if (std::abs(sr_in) > kImpliedSharpeClamp) {
                sr_in = std::copysign(kImpliedSharpeClamp, sr_in);
                ++clamp_warnings;
            }
            s.score = implied_sharpe(sr_in, model.hat_trace, n_penalty);
            s.expected_sr = s.score;
            break;
        }
        case PenaltyMethod::RSquared:
            s.score = mallows_rho2(model.rho_in, model.hat_trace, n_penalty);
            s.expected_sr = expected_sharpe_from_rho2(s.score, model.rho_in);
            break;
        case PenaltyMethod::SURE:
            s.score = sure_rho2(model.rho_in, model.divergence, n_penalty);
            s.expected_sr = expected_sharpe_from_rho2(s.score, model.rho_in);
            break;
    }
    if (!std::isfinite(s.score)) throw DegenerateError("non-finite penalty score");
    return s;
}

}  // namespace

std::vector<BacktestReport> run_asset_methods(std::span<const double> returns,
                                              const BacktestConfig& config,
                                              std::span<const PenaltyMethod> methods) {
    config.validate();
    if (methods.empty()) throw ConfigError("run_asset: no penalty methods requested");
    for (double r : returns) {
        if (!std::isfinite(r)) throw DomainError("run_asset: non-finite return");
    }
    if (!config.benchmark.series.empty() && config.benchmark.series.size() != returns.size()) {
        throw DimensionError("run_asset: benchmark series length differs from the returns");
    }

    const auto windows = make_windows(returns.size(), config);
    const LaggedCrossProducts products(returns, config.lag_grid.back());
    const bool need_naive = std::find(methods.begin(), methods.end(), PenaltyMethod::Naive) != methods.end();

    std::vector<BacktestReport> reports(methods.size());
    for (std::size_t m = 0; m < methods.size(); ++m) {
        reports[m].estimator = config.estimator;
        reports[m].method = methods[m];
    }

    for (const auto& w : windows) {
        const std::size_t is_end = w.is_range.end;

        std::vector<LagFit> fits;
        std::vector<std::optional<double>> naive(config.lag_grid.size());
        fits.reserve(config.lag_grid.size());
        for (std::size_t g = 0; g < config.lag_grid.size(); ++g) {
            const int p = config.lag_grid[g];
            LagFit lf{p, std::nullopt};
            try {
                lf.model = fit(config.estimator, products.compute(p, static_cast<std::size_t>(p), is_end),
                               config.fit_options);
                if (need_naive) naive[g] = in_sample_sharpe(*lf.model, returns, config.benchmark, is_end);
            } catch (const Error&) {
                lf.model.reset();
            }
            fits.push_back(std::move(lf));
        }

        for (std::size_t m = 0; m < methods.size(); ++m) {
            BacktestReport& rep = reports[m];
            WindowRecord rec;
            rec.index_k = w.index_k;

            std::vector<PenaltyScore> scores;
            for (std::size_t g = 0; g < fits.size(); ++g) {
                if (!fits[g].model) {
                    ++rec.failed_lags;
                    continue;
                }
                const double n_penalty = config.penalty_n == PenaltyN::DesignRows
                                             ? static_cast<double>(fits[g].model->n_obs)
                                             : static_cast<double>(is_end);
                try {
                    scores.push_back(score_lag(methods[m], *fits[g].model, naive[g], n_penalty,
                                               rep.clamp_warnings));
                } catch (const Error&) {
                    ++rec.failed_lags;
                }
            }

            rec.oos_returns.reserve(w.os_range.size());
            if (scores.empty()) {
                rec.flat = true;
                for (std::size_t t = w.os_range.begin; t < w.os_range.end; ++t) {
                    rec.oos_returns.push_back(-config.benchmark.at(t));
                }
            } else {
                rec.chosen_lag = select_lag(scores);
                const auto chosen = std::find_if(scores.begin(), scores.end(),
                                                 [&](const PenaltyScore& s) { return s.lag_p == rec.chosen_lag; });
                rec.expected_sr = chosen->expected_sr;
                const auto fit_it = std::find_if(fits.begin(), fits.end(),
                                                 [&](const LagFit& f) { return f.lag == rec.chosen_lag; });
                const LinearSignalModel& model = *fit_it->model;
                for (std::size_t t = w.os_range.begin; t < w.os_range.end; ++t) {
                    rec.oos_returns.push_back(predict_at(model, returns, t) * returns[t] -
                                              config.benchmark.at(t));
                }
            }
            rep.per_window.push_back(std::move(rec));
        }
    }

    for (auto& rep : reports) {
        std::vector<double> all;
        std::vector<std::vector<double>> blocks;
        std::vector<std::optional<double>> expected;
        for (const auto& rec : rep.per_window) {
            all.insert(all.end(), rec.oos_returns.begin(), rec.oos_returns.end());
            blocks.push_back(rec.oos_returns);
            expected.push_back(rec.expected_sr);
        }
        rep.realized_sharpe = stats::sharpe(all);
        if (blocks.size() >= 3) {
            try {
                const AlignmentMetrics am = alignment_metrics(expected, blocks);
                rep.mad = am.mad;
                rep.corr = am.corr;
            } catch (const InsufficientDataError&) {
                // No window carries an expected SR (AIC) or too few windows.
            }
        }
        rep.mode_lag = mode_lag(rep.per_window);
        if (config.vol_target) {
            const double vol = stats::population_std(all) * std::sqrt(252.0);
            if (vol > 0.0) rep.vol_scale = *config.vol_target / vol;
        }
    }
    return reports;
}

BacktestReport run_asset(std::span<const double> returns, const BacktestConfig& config) {
    const PenaltyMethod method[] = {config.method};
    return std::move(run_asset_methods(returns, config, method).front());
}

}  // namespace covpen
