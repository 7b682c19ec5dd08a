#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

// Autoregressive signal models r_t = b0 + b1 r_{t-1} + ... + bp r_{t-p}, fitted
// by ordinary or total least squares.
//
// Two fitting paths share one set of formulas:
//   * from a DesignMatrix, via SVDs of the data matrices (accurate down to
//     exact fits, used by tests and one-off fits);
//   * from CrossProducts, the sufficient statistics of the regression, via
//     symmetric eigendecompositions (used by the backtest, where the lag Gram
//     matrices come from prefix sums in O(p^2)).

namespace covpen {

enum class Estimator { OLS, TLS };

std::string_view to_string(Estimator e);
Estimator parse_estimator(std::string_view name);

/// Lagged-return design. Column 0 is the intercept; column j holds r_{t-j}.
struct DesignMatrix {
    Eigen::MatrixXd values;
    Eigen::VectorXd target;
    /// Series index of target(0).
    std::size_t first_target_index = 0;
    int lag_p = 0;

    std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(values.cols()); }
};

/// Design with targets r_p .. r_{n-1}. Requires p >= 1 and at least p + 1
/// rows (n >= 2p + 1).
DesignMatrix build_lag_matrix(std::span<const double> returns, int p);

/// Design with targets at series indices [begin, end); requires begin >= p.
DesignMatrix build_lag_matrix(std::span<const double> returns, int p, std::size_t begin,
                              std::size_t end);

struct FitOptions {
    /// TLS only: scale the centred target and lag columns to unit variance
    /// before the SVD. Off by default, which keeps the estimator's literal
    /// scale dependence.
    bool scale_columns = false;
};

struct LinearSignalModel {
    Estimator estimator = Estimator::OLS;
    int lag_p = 0;
    /// Intercept first, then the p lag coefficients.
    Eigen::VectorXd beta;
    /// Smallest singular value of the centred [target | lags]; TLS only.
    std::optional<double> sigma_min;
    /// Effective degrees of freedom Tr(M), intercept included.
    double hat_trace = 0.0;
    /// sum_t dXhat_t / dR_t including the dependence of sigma_min on the
    /// target. Equals hat_trace for OLS.
    double divergence = 0.0;
    /// In-sample Pearson correlation of the fitted signal with the target.
    double rho_in = 0.0;
    /// Number of design rows the model was fitted on.
    std::size_t n_obs = 0;
    /// In-sample residual sum of squares.
    double rss = 0.0;
};

/// Thresholds shared by both fitting paths.
inline constexpr double kMaxConditionNumber = 1e12;
inline constexpr double kTlsRelativeGap = 1e-10;

/// Throws RankDeficientError when cond(Z) > 1e12 and InsufficientDataError
/// unless rows >= cols + 1.
LinearSignalModel fit_ols(const DesignMatrix& design);

/// Throws DegenerateError when lambda_min(Zc)^2 - sigma_min^2 falls below
/// 1e-10 * lambda_max(Zc)^2.
LinearSignalModel fit_tls(const DesignMatrix& design, const FitOptions& options = {});

LinearSignalModel fit(Estimator estimator, const DesignMatrix& design,
                      const FitOptions& options = {});

/// Fitted signal Z * beta.
Eigen::VectorXd predict(const LinearSignalModel& model, const DesignMatrix& design);

/// Signal for the return at series index t, from r_{t-1} .. r_{t-p}.
double predict_at(const LinearSignalModel& model, std::span<const double> returns,
                  std::size_t t);

/// Tr(M): the column count for OLS, 1 + sum lambda_i^2 / (lambda_i^2 - sigma^2)
/// for TLS.
double effective_dof(const LinearSignalModel& model);

/// Sufficient statistics of a lag regression: raw (uncentred) cross products
/// of the lag block Z (no intercept column) and the target r.
struct CrossProducts {
    std::size_t n = 0;
    int lag_p = 0;
    Eigen::VectorXd sum_z;
    double sum_r = 0.0;
    Eigen::MatrixXd zz;
    Eigen::VectorXd zr;
    double rr = 0.0;
};

CrossProducts cross_products(const DesignMatrix& design);

LinearSignalModel fit_ols(const CrossProducts& cp);
LinearSignalModel fit_tls(const CrossProducts& cp, const FitOptions& options = {});
LinearSignalModel fit(Estimator estimator, const CrossProducts& cp,
                      const FitOptions& options = {});

/// Prefix sums of lagged products of one series, so that CrossProducts for
/// any lag p <= max_lag and any target range can be assembled in O(p^2).
class LaggedCrossProducts {
public:
    LaggedCrossProducts(std::span<const double> returns, int max_lag);

    /// Statistics for targets at series indices [begin, end), begin >= p.
    CrossProducts compute(int p, std::size_t begin, std::size_t end) const;

    int max_lag() const { return max_lag_; }
    std::size_t size() const { return n_; }

private:
    double lagged_sum(int d, std::size_t from, std::size_t to) const;

    std::size_t n_;
    int max_lag_;
    // prefix_[d * (n_ + 1) + t] = sum_{d <= s < t} r_s r_{s-d}
    std::vector<double> prefix_;
    std::vector<double> level_;  // level_[t] = sum_{s < t} r_s
};

}  // namespace covpen
