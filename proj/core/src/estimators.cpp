#include "covpen/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "covpen/error.hpp"

namespace covpen {

std::string_view to_string(Estimator e) { return e == Estimator::OLS ? "OLS" : "TLS"; }

Estimator parse_estimator(std::string_view name) {
    if (name == "OLS" || name == "ols") return Estimator::OLS;
    if (name == "TLS" || name == "tls") return Estimator::TLS;
    throw ConfigError("unknown estimator '" + std::string(name) + "'");
}

DesignMatrix build_lag_matrix(std::span<const double> returns, int p, std::size_t begin,
                              std::size_t end) {
    if (p < 1) throw DomainError("build_lag_matrix: lag order must be at least 1");
    const auto lag = static_cast<std::size_t>(p);
    if (begin < lag) throw DomainError("build_lag_matrix: first target needs p earlier returns");
    if (end > returns.size() || end < begin) {
        throw DomainError("build_lag_matrix: target range outside the series");
    }
    const std::size_t rows = end - begin;
    if (rows < lag + 1) {
        throw InsufficientDataError("build_lag_matrix: " + std::to_string(rows) +
                                    " rows for " + std::to_string(lag + 1) + " columns");
    }

    DesignMatrix design;
    design.lag_p = p;
    design.first_target_index = begin;
    design.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(lag + 1));
    design.target.resize(static_cast<Eigen::Index>(rows));
    for (std::size_t i = 0; i < rows; ++i) {
        const std::size_t t = begin + i;
        const auto row = static_cast<Eigen::Index>(i);
        if (!std::isfinite(returns[t])) throw DomainError("build_lag_matrix: non-finite return");
        design.target(row) = returns[t];
        design.values(row, 0) = 1.0;
        for (std::size_t j = 1; j <= lag; ++j) {
            design.values(row, static_cast<Eigen::Index>(j)) = returns[t - j];
        }
    }
    return design;
}

DesignMatrix build_lag_matrix(std::span<const double> returns, int p) {
    if (p < 1) throw DomainError("build_lag_matrix: lag order must be at least 1");
    const auto lag = static_cast<std::size_t>(p);
    if (returns.size() < 2 * lag + 1) {
        throw InsufficientDataError("build_lag_matrix: series of length " +
                                    std::to_string(returns.size()) + " too short for p = " +
                                    std::to_string(p));
    }
    return build_lag_matrix(returns, p, lag, returns.size());
}

namespace {

void require_fit_rows(std::size_t rows, std::size_t cols) {
    if (rows < cols + 1) {
        throw InsufficientDataError("fit: need at least cols + 1 = " + std::to_string(cols + 1) +
                                    " rows, got " + std::to_string(rows));
    }
}

double correlation_or_zero(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const Eigen::VectorXd ac = a.array() - a.mean();
    const Eigen::VectorXd bc = b.array() - b.mean();
    const double den = std::sqrt(ac.squaredNorm() * bc.squaredNorm());
    if (!(den > 0.0)) return 0.0;
    return std::clamp(ac.dot(bc) / den, -1.0, 1.0);
}

void finish_in_sample(LinearSignalModel& model, const DesignMatrix& design) {
    const Eigen::VectorXd fitted = design.values * model.beta;
    model.rho_in = correlation_or_zero(fitted, design.target);
    model.rss = (design.target - fitted).squaredNorm();
    model.n_obs = design.rows();
}

}  // namespace

LinearSignalModel fit_ols(const DesignMatrix& design) {
    require_fit_rows(design.rows(), design.cols());
    Eigen::BDCSVD<Eigen::MatrixXd> svd(design.values, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    const double s_max = s(0);
    const double s_min = s(s.size() - 1);
    if (!(s_min > 0.0) || s_max / s_min > kMaxConditionNumber) {
        throw RankDeficientError("fit_ols: design condition number exceeds 1e12");
    }

    LinearSignalModel model;
    model.estimator = Estimator::OLS;
    model.lag_p = design.lag_p;
    model.beta = svd.solve(design.target);
    model.hat_trace = static_cast<double>(design.cols());
    model.divergence = model.hat_trace;
    finish_in_sample(model, design);
    return model;
}

LinearSignalModel fit_tls(const DesignMatrix& design, const FitOptions& options) {
    require_fit_rows(design.rows(), design.cols());
    const Eigen::Index p = design.values.cols() - 1;
    const auto n = static_cast<double>(design.rows());

    const Eigen::MatrixXd lags = design.values.rightCols(p);
    const Eigen::RowVectorXd lag_mean = lags.colwise().mean();
    const double target_mean = design.target.mean();
    Eigen::MatrixXd zc = lags.rowwise() - lag_mean;
    Eigen::VectorXd rc = design.target.array() - target_mean;

    Eigen::VectorXd col_scale = Eigen::VectorXd::Ones(p);
    double target_scale = 1.0;
    if (options.scale_columns) {
        col_scale = (zc.colwise().squaredNorm() / n).cwiseSqrt().transpose();
        target_scale = std::sqrt(rc.squaredNorm() / n);
        if (!(col_scale.minCoeff() > 0.0) || !(target_scale > 0.0)) {
            throw DegenerateError("fit_tls: constant column cannot be scaled");
        }
        zc = zc * col_scale.cwiseInverse().asDiagonal();
        rc /= target_scale;
    }

    Eigen::BDCSVD<Eigen::MatrixXd> zsvd(zc, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd lambda = zsvd.singularValues();
    const double lambda_max = lambda(0);
    const double lambda_min = lambda(p - 1);
    if (!(lambda_min > 0.0) || lambda_max / lambda_min > kMaxConditionNumber) {
        throw RankDeficientError("fit_tls: lag block condition number exceeds 1e12");
    }

    Eigen::MatrixXd augmented(zc.rows(), p + 1);
    augmented.col(0) = rc;
    augmented.rightCols(p) = zc;
    Eigen::BDCSVD<Eigen::MatrixXd> csvd(augmented);
    const double sigma = csvd.singularValues()(p);
    const double sigma2 = sigma * sigma;

    if (lambda_min * lambda_min - sigma2 < kTlsRelativeGap * lambda_max * lambda_max) {
        throw DegenerateError("fit_tls: smallest singular value of [R, Z] reaches that of Z");
    }

    const Eigen::ArrayXd lambda2 = lambda.array().square();
    const Eigen::ArrayXd shifted = lambda2 - sigma2;
    // beta = V diag(lambda / (lambda^2 - sigma^2)) U' r
    const Eigen::VectorXd ur = zsvd.matrixU().transpose() * rc;
    const Eigen::VectorXd coeff = (lambda.array() / shifted * ur.array()).matrix();
    const Eigen::VectorXd beta_scaled = zsvd.matrixV() * coeff;

    LinearSignalModel model;
    model.estimator = Estimator::TLS;
    model.lag_p = design.lag_p;
    model.sigma_min = sigma;
    model.hat_trace = 1.0 + (lambda2 / shifted).sum();

    // d sigma^2 / dR_t = 2 v0 (Cv)_t, and Z'Cv = sigma^2 v_z = -sigma^2 v0 beta,
    // so the sigma-dependence lowers the divergence by
    // 2 sigma^2 beta' A beta / (1 + |beta|^2), A = (Z'Z - sigma^2 I)^{-1}.
    const Eigen::VectorXd vb = zsvd.matrixV().transpose() * beta_scaled;
    const double quad = (vb.array().square() / shifted).sum();
    model.divergence = model.hat_trace - 2.0 * sigma2 * quad / (1.0 + beta_scaled.squaredNorm());

    model.beta.resize(p + 1);
    const Eigen::VectorXd beta_lags =
        (beta_scaled.array() * target_scale / col_scale.array()).matrix();
    model.beta.tail(p) = beta_lags;
    model.beta(0) = target_mean - lag_mean.dot(beta_lags);
    finish_in_sample(model, design);
    return model;
}

LinearSignalModel fit(Estimator estimator, const DesignMatrix& design, const FitOptions& options) {
    return estimator == Estimator::OLS ? fit_ols(design) : fit_tls(design, options);
}

Eigen::VectorXd predict(const LinearSignalModel& model, const DesignMatrix& design) {
    if (static_cast<Eigen::Index>(design.cols()) != model.beta.size()) {
        throw DimensionError("predict: design has " + std::to_string(design.cols()) +
                             " columns, model expects " + std::to_string(model.beta.size()));
    }
    return design.values * model.beta;
}

double predict_at(const LinearSignalModel& model, std::span<const double> returns, std::size_t t) {
    const auto p = static_cast<std::size_t>(model.lag_p);
    if (t < p || t >= returns.size()) throw DomainError("predict_at: index outside the series");
    double x = model.beta(0);
    for (std::size_t j = 1; j <= p; ++j) x += model.beta(static_cast<Eigen::Index>(j)) * returns[t - j];
    return x;
}

double effective_dof(const LinearSignalModel& model) { return model.hat_trace; }

CrossProducts cross_products(const DesignMatrix& design) {
    const Eigen::Index p = design.values.cols() - 1;
    const Eigen::MatrixXd lags = design.values.rightCols(p);
    CrossProducts cp;
    cp.n = design.rows();
    cp.lag_p = design.lag_p;
    cp.sum_z = lags.colwise().sum().transpose();
    cp.sum_r = design.target.sum();
    cp.zz = lags.transpose() * lags;
    cp.zr = lags.transpose() * design.target;
    cp.rr = design.target.squaredNorm();
    return cp;
}

namespace {

struct Centered {
    double n = 0.0;
    Eigen::VectorXd zbar;
    double rbar = 0.0;
    Eigen::MatrixXd szz;
    Eigen::VectorXd szr;
    double srr = 0.0;
};

Centered center(const CrossProducts& cp) {
    const auto cols = static_cast<std::size_t>(cp.lag_p) + 1;
    require_fit_rows(cp.n, cols);
    Centered c;
    c.n = static_cast<double>(cp.n);
    c.zbar = cp.sum_z / c.n;
    c.rbar = cp.sum_r / c.n;
    c.szz = cp.zz - c.n * c.zbar * c.zbar.transpose();
    c.szr = cp.zr - c.n * c.rbar * c.zbar;
    c.srr = cp.rr - c.n * c.rbar * c.rbar;
    return c;
}

// The Gram route squares the condition number, so the threshold applies to
// cond(Z'Z).
void require_well_conditioned(const Eigen::VectorXd& eig_ascending, const char* fn) {
    const double lo = eig_ascending(0);
    const double hi = eig_ascending(eig_ascending.size() - 1);
    if (!(lo > 0.0) || hi / lo > kMaxConditionNumber) {
        throw RankDeficientError(std::string(fn) + ": lag Gram matrix condition number exceeds 1e12");
    }
}

void finish_from_moments(LinearSignalModel& model, const Centered& c,
                         const Eigen::VectorXd& beta_lags) {
    const double cross = beta_lags.dot(c.szr);
    const double fit_ss = beta_lags.dot(c.szz * beta_lags);
    const double den = std::sqrt(std::max(fit_ss, 0.0) * std::max(c.srr, 0.0));
    model.rho_in = den > 0.0 ? std::clamp(cross / den, -1.0, 1.0) : 0.0;
    model.rss = std::max(c.srr - 2.0 * cross + fit_ss, 0.0);
    model.n_obs = static_cast<std::size_t>(c.n);
    model.beta.resize(beta_lags.size() + 1);
    model.beta.tail(beta_lags.size()) = beta_lags;
    model.beta(0) = c.rbar - c.zbar.dot(beta_lags);
}

}  // namespace

LinearSignalModel fit_ols(const CrossProducts& cp) {
    const Centered c = center(cp);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c.szz, Eigen::EigenvaluesOnly);
    require_well_conditioned(eig.eigenvalues(), "fit_ols");
    Eigen::LLT<Eigen::MatrixXd> llt(c.szz);
    if (llt.info() != Eigen::Success) throw RankDeficientError("fit_ols: Gram matrix not positive definite");

    LinearSignalModel model;
    model.estimator = Estimator::OLS;
    model.lag_p = cp.lag_p;
    model.hat_trace = static_cast<double>(cp.lag_p + 1);
    model.divergence = model.hat_trace;
    finish_from_moments(model, c, llt.solve(c.szr));
    return model;
}

LinearSignalModel fit_tls(const CrossProducts& cp, const FitOptions& options) {
    Centered c = center(cp);
    const Eigen::Index p = cp.lag_p;

    Eigen::VectorXd col_scale = Eigen::VectorXd::Ones(p);
    double target_scale = 1.0;
    if (options.scale_columns) {
        col_scale = (c.szz.diagonal() / c.n).cwiseSqrt();
        target_scale = std::sqrt(c.srr / c.n);
        if (!(col_scale.minCoeff() > 0.0) || !(target_scale > 0.0)) {
            throw DegenerateError("fit_tls: constant column cannot be scaled");
        }
        const Eigen::VectorXd inv = col_scale.cwiseInverse();
        c.szz = inv.asDiagonal() * c.szz * inv.asDiagonal();
        c.szr = inv.cwiseProduct(c.szr) / target_scale;
        c.srr /= target_scale * target_scale;
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> zeig(c.szz, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd lambda2 = zeig.eigenvalues();  // ascending
    require_well_conditioned(lambda2, "fit_tls");

    Eigen::MatrixXd augmented(p + 1, p + 1);
    augmented(0, 0) = c.srr;
    augmented.block(1, 0, p, 1) = c.szr;
    augmented.block(0, 1, 1, p) = c.szr.transpose();
    augmented.block(1, 1, p, p) = c.szz;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ceig(augmented, Eigen::EigenvaluesOnly);
    const double sigma2 = std::max(ceig.eigenvalues()(0), 0.0);

    const double lambda2_min = lambda2(0);
    const double lambda2_max = lambda2(p - 1);
    if (lambda2_min - sigma2 < kTlsRelativeGap * lambda2_max) {
        throw DegenerateError("fit_tls: smallest singular value of [R, Z] reaches that of Z");
    }

    const Eigen::MatrixXd shifted =
        c.szz - sigma2 * Eigen::MatrixXd::Identity(p, p);
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    if (llt.info() != Eigen::Success) throw DegenerateError("fit_tls: shifted Gram matrix not positive definite");
    const Eigen::VectorXd beta_scaled = llt.solve(c.szr);

    LinearSignalModel model;
    model.estimator = Estimator::TLS;
    model.lag_p = cp.lag_p;
    model.sigma_min = std::sqrt(sigma2);
    model.hat_trace = 1.0 + (lambda2.array() / (lambda2.array() - sigma2)).sum();
    const double quad = beta_scaled.dot(llt.solve(beta_scaled));
    model.divergence = model.hat_trace - 2.0 * sigma2 * quad / (1.0 + beta_scaled.squaredNorm());

    // Correlation and residuals are evaluated in the caller's units.
    Centered raw = center(cp);
    const Eigen::VectorXd beta_lags =
        (beta_scaled.array() * target_scale / col_scale.array()).matrix();
    finish_from_moments(model, raw, beta_lags);
    return model;
}

LinearSignalModel fit(Estimator estimator, const CrossProducts& cp, const FitOptions& options) {
    return estimator == Estimator::OLS ? fit_ols(cp) : fit_tls(cp, options);
}

LaggedCrossProducts::LaggedCrossProducts(std::span<const double> returns, int max_lag)
    : n_(returns.size()), max_lag_(max_lag) {
    if (max_lag < 1) throw DomainError("LaggedCrossProducts: max_lag must be at least 1");
    const std::size_t width = n_ + 1;
    prefix_.assign(static_cast<std::size_t>(max_lag + 1) * width, 0.0);
    level_.assign(width, 0.0);
    for (std::size_t t = 0; t < n_; ++t) {
        if (!std::isfinite(returns[t])) throw DomainError("LaggedCrossProducts: non-finite return");
        level_[t + 1] = level_[t] + returns[t];
    }
    for (int d = 0; d <= max_lag; ++d) {
        double* row = prefix_.data() + static_cast<std::size_t>(d) * width;
        const auto lag = static_cast<std::size_t>(d);
        for (std::size_t t = 0; t < n_; ++t) {
            row[t + 1] = row[t] + (t >= lag ? returns[t] * returns[t - lag] : 0.0);
        }
    }
}

double LaggedCrossProducts::lagged_sum(int d, std::size_t from, std::size_t to) const {
    const double* row = prefix_.data() + static_cast<std::size_t>(d) * (n_ + 1);
    return row[to] - row[from];
}

CrossProducts LaggedCrossProducts::compute(int p, std::size_t begin, std::size_t end) const {
    if (p < 1 || p > max_lag_) throw DomainError("LaggedCrossProducts: lag outside [1, max_lag]");
    const auto lag = static_cast<std::size_t>(p);
    if (begin < lag || end > n_ || end <= begin) {
        throw DomainError("LaggedCrossProducts: target range outside the series");
    }
    CrossProducts cp;
    cp.n = end - begin;
    cp.lag_p = p;
    cp.sum_z.resize(p);
    cp.zr.resize(p);
    cp.zz.resize(p, p);
    cp.sum_r = level_[end] - level_[begin];
    cp.rr = lagged_sum(0, begin, end);
    for (std::size_t i = 0; i < lag; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        cp.sum_z(ii) = level_[end - 1 - i] - level_[begin - 1 - i];
        cp.zr(ii) = lagged_sum(static_cast<int>(i + 1), begin, end);
        for (std::size_t j = i; j < lag; ++j) {
            const double v = lagged_sum(static_cast<int>(j - i), begin - 1 - i, end - 1 - i);
            cp.zz(ii, static_cast<Eigen::Index>(j)) = v;
            cp.zz(static_cast<Eigen::Index>(j), ii) = v;
        }
    }
    return cp;
}

}  // namespace covpen
