#include "covpen/penalties.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "covpen/error.hpp"
#include "covpen/moments.hpp"
#include "covpen/stats.hpp"

namespace covpen {

std::string_view to_string(PenaltyMethod m) {
    switch (m) {
        case PenaltyMethod::Naive: return "Naive";
        case PenaltyMethod::AIC: return "AIC";
        case PenaltyMethod::ImpSR: return "ImpSR";
        case PenaltyMethod::RSquared: return "RSquared";
        case PenaltyMethod::SURE: return "SURE";
    }
    return "?";
}

PenaltyMethod parse_penalty_method(std::string_view name) {
    for (PenaltyMethod m : kAllPenaltyMethods) {
        if (name == to_string(m)) return m;
    }
    throw ConfigError("unknown penalty method '" + std::string(name) + "'");
}

namespace {

void require_rho(double rho_in, const char* fn) {
    if (!(std::abs(rho_in) <= 1.0)) throw DomainError(std::string(fn) + ": |rho_in| must be <= 1");
}

void require_n(double n_obs, const char* fn) {
    if (!(n_obs > 0.0)) throw DomainError(std::string(fn) + ": n_obs must be positive");
}

}  // namespace

double mallows_rho2(double rho_in, double hat_trace, double n_obs) {
    require_rho(rho_in, "mallows_rho2");
    require_n(n_obs, "mallows_rho2");
    if (!(hat_trace >= 0.0)) throw DomainError("mallows_rho2: hat_trace must be non-negative");
    return rho_in * rho_in - 2.0 * hat_trace / n_obs;
}

double implied_sharpe(double sr_in, double hat_trace, double n_obs) {
    if (!(std::abs(sr_in) < std::numbers::sqrt2 / 2.0)) {
        throw DomainError("implied_sharpe: |sr_in| must be below sqrt(2)/2");
    }
    require_n(n_obs, "implied_sharpe");
    if (!(hat_trace >= 0.0)) throw DomainError("implied_sharpe: hat_trace must be non-negative");
    return sr_in - 2.0 * hat_trace / n_obs * std::pow(1.0 - sr_in * sr_in, 1.5);
}

double sure_rho2(double rho_in, double hat_diag_sum, double n_obs) {
    require_rho(rho_in, "sure_rho2");
    require_n(n_obs, "sure_rho2");
    if (!std::isfinite(hat_diag_sum)) throw DomainError("sure_rho2: divergence must be finite");
    return rho_in * rho_in - 2.0 * hat_diag_sum / n_obs;
}

double aic_score(double rss, double n_obs, double k) {
    if (!(rss > 0.0)) throw DomainError("aic_score: rss must be positive");
    if (!(n_obs > k)) throw DomainError("aic_score: n_obs must exceed k");
    return n_obs * std::log(rss / n_obs) + 2.0 * k;
}

double naive_score(std::span<const double> strategy_returns_in) {
    return stats::sharpe(strategy_returns_in);
}

int select_lag(std::span<const PenaltyScore> scores) {
    if (scores.empty()) throw InsufficientDataError("select_lag: no scores");
    const PenaltyMethod method = scores.front().method;
    const PenaltyScore* best = &scores.front();
    for (const auto& s : scores) {
        if (s.method != method) throw DomainError("select_lag: scores mix penalty methods");
        if (!std::isfinite(s.score)) throw DomainError("select_lag: non-finite score");
        if (s.score > best->score || (s.score == best->score && s.lag_p < best->lag_p)) {
            best = &s;
        }
    }
    return best->lag_p;
}

double expected_sharpe_from_rho2(double rho2_out, double rho_in) {
    const double magnitude = std::sqrt(std::max(rho2_out, 0.0));
    return sharpe_from_rho(std::min(magnitude, 1.0) * (rho_in < 0.0 ? -1.0 : 1.0));
}

}  // namespace covpen
