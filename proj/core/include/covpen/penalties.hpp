#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

// Covariance-penalty corrections: map in-sample fit quality plus effective
// degrees of freedom to an estimate of out-of-sample performance. Every
// selection criterion is oriented so that larger is better.

namespace covpen {

enum class PenaltyMethod { Naive, AIC, ImpSR, RSquared, SURE };

inline constexpr PenaltyMethod kAllPenaltyMethods[] = {
    PenaltyMethod::Naive, PenaltyMethod::AIC, PenaltyMethod::ImpSR, PenaltyMethod::RSquared,
    PenaltyMethod::SURE};

std::string_view to_string(PenaltyMethod m);
PenaltyMethod parse_penalty_method(std::string_view name);

struct PenaltyScore {
    PenaltyMethod method = PenaltyMethod::Naive;
    int lag_p = 0;
    /// Selection criterion; AIC is stored negated.
    double score = 0.0;
    /// Corrected out-of-sample Sharpe estimate (ImpSR, RSquared, SURE); absent
    /// for Naive and AIC.
    std::optional<double> expected_sr;
};

/// Mallows-type correction of the squared correlation:
///   rho_in^2 - (2 / n_obs) hat_trace.
/// The result may be negative.
double mallows_rho2(double rho_in, double hat_trace, double n_obs);

/// Delta-method correction of an in-sample Sharpe ratio:
///   sr_in - (2 hat_trace / n_obs) (1 - sr_in^2)^{3/2},  |sr_in| < sqrt(2)/2.
double implied_sharpe(double sr_in, double hat_trace, double n_obs);

/// SURE correction rho_in^2 - (2 / n_obs) sum_t dXhat_t/dR_t.
double sure_rho2(double rho_in, double hat_diag_sum, double n_obs);

/// Gaussian AIC n ln(rss / n) + 2k (lower is better).
double aic_score(double rss, double n_obs, double k);

/// In-sample Sharpe (population std) of the strategy returns.
double naive_score(std::span<const double> strategy_returns_in);

/// Lag of the highest score; exact ties go to the smaller lag. All scores must
/// share one method.
int select_lag(std::span<const PenaltyScore> scores);

/// Expected Sharpe from a corrected squared correlation: the signed root
/// sign(rho_in) sqrt(max(rho2, 0)) mapped through sharpe_from_rho.
double expected_sharpe_from_rho2(double rho2_out, double rho_in);

/// Largest |sr_in| accepted by implied_sharpe after clamping.
inline constexpr double kImpliedSharpeClamp = 0.70710678118654752440 - 1e-6;

}  // namespace covpen
