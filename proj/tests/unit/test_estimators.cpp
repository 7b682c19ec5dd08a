#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "covpen/error.hpp"
#include "covpen/estimators.hpp"
#include "covpen/rng.hpp"
#include "covpen/synthetic.hpp"

using namespace covpen;

namespace {

DesignMatrix random_design(std::size_t rows, int p, Rng& rng, double noise = 1.0) {
    DesignMatrix d;
    d.lag_p = p;
    d.values.resize(static_cast<Eigen::Index>(rows), p + 1);
    d.target.resize(static_cast<Eigen::Index>(rows));
    Eigen::VectorXd b(p);
    for (int j = 0; j < p; ++j) b(j) = rng.normal();
    for (Eigen::Index i = 0; i < d.values.rows(); ++i) {
        d.values(i, 0) = 1.0;
        double y = 0.3;
        for (int j = 0; j < p; ++j) {
            d.values(i, j + 1) = rng.normal() * (1.0 + 0.5 * j);
            y += b(j) * d.values(i, j + 1);
        }
        d.target(i) = y + noise * rng.normal();
    }
    return d;
}

Eigen::MatrixXd centred(const Eigen::MatrixXd& m) { return m.rowwise() - m.colwise().mean(); }

// Classical TLS solution: the right singular vector of [r | Z] (centred) for
// the smallest singular value, normalised so its target entry is -1.
Eigen::VectorXd tls_beta_from_null_vector(const DesignMatrix& d) {
    const Eigen::Index p = d.values.cols() - 1;
    Eigen::MatrixXd a(d.values.rows(), p + 1);
    a.col(0) = d.target;
    a.rightCols(p) = d.values.rightCols(p);
    const Eigen::MatrixXd ac = centred(a);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(ac, Eigen::ComputeThinV);
    const Eigen::VectorXd v = svd.matrixV().col(p);
    Eigen::VectorXd beta(p + 1);
    beta.tail(p) = -v.tail(p) / v(0);
    const Eigen::RowVectorXd means = a.colwise().mean();
    beta(0) = means(0) - means.tail(p).dot(beta.tail(p));
    return beta;
}

double smallest_singular_value(const DesignMatrix& d) {
    const Eigen::Index p = d.values.cols() - 1;
    Eigen::MatrixXd a(d.values.rows(), p + 1);
    a.col(0) = d.target;
    a.rightCols(p) = d.values.rightCols(p);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(centred(a));
    return svd.singularValues()(p);
}

// Trace of the explicitly formed smoother 11'/n + Zc (Zc'Zc - s^2 I)^{-1} Zc'.
double dense_hat_trace(const DesignMatrix& d, double s) {
    const Eigen::Index p = d.values.cols() - 1;
    const Eigen::MatrixXd zc = centred(d.values.rightCols(p));
    const Eigen::MatrixXd shifted = zc.transpose() * zc - s * s * Eigen::MatrixXd::Identity(p, p);
    const Eigen::MatrixXd m = zc * shifted.inverse() * zc.transpose();
    return 1.0 + m.trace();
}

double orthogonal_loss(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double b) {
    return (y - b * x).squaredNorm() / (1 + b * b);
}

// Brute-force orthogonal-distance slope: coarse grid over the angle, then
// golden-section refinement on the best bracket.
double orthogonal_slope(const DesignMatrix& d) {
    const Eigen::VectorXd x = d.values.col(1).array() - d.values.col(1).mean();
    const Eigen::VectorXd y = d.target.array() - d.target.mean();
    const int grid = 20000;
    const double pi = 3.14159265358979323846;
    int best = 0;
    double best_loss = 1e300;
    for (int i = 1; i < grid; ++i) {
        const double b = std::tan(-pi / 2 + pi * i / grid);
        const double l = orthogonal_loss(x, y, b);
        if (l < best_loss) {
            best_loss = l;
            best = i;
        }
    }
    double lo = -pi / 2 + pi * (best - 1) / grid, hi = -pi / 2 + pi * (best + 1) / grid;
    const double g = (std::sqrt(5.0) - 1) / 2;
    for (int it = 0; it < 200; ++it) {
        const double a = hi - g * (hi - lo), c = lo + g * (hi - lo);
        if (orthogonal_loss(x, y, std::tan(a)) < orthogonal_loss(x, y, std::tan(c))) hi = c;
        else lo = a;
    }
    return std::tan(0.5 * (lo + hi));
}

}  // namespace

TEST(BuildLagMatrix, SmallExample) {
    const std::vector<double> r{1, 2, 3, 4, 5};
    const auto d = build_lag_matrix(r, 2);
    ASSERT_EQ(d.rows(), 3u);
    ASSERT_EQ(d.cols(), 3u);
    EXPECT_EQ(d.values(0, 0), 1.0);
    EXPECT_EQ(d.values(0, 1), 2.0);
    EXPECT_EQ(d.values(0, 2), 1.0);
    EXPECT_EQ(d.target(0), 3.0);
    EXPECT_EQ(d.first_target_index, 2u);
    EXPECT_THROW(build_lag_matrix(r, 0), DomainError);
    EXPECT_THROW(build_lag_matrix(std::vector<double>{1, 2, 3}, 2), InsufficientDataError);
}

TEST(BuildLagMatrix, NoLookAhead) {
    auto r = synthetic::gen_ar_returns({synthetic::ArSpec{{0.3}, 1.0, 0.0}, 200, 4});
    const std::size_t t = 120;
    const auto before = build_lag_matrix(r, 5);
    std::reverse(r.begin() + t + 1, r.end());
    const auto after = build_lag_matrix(r, 5);
    for (std::size_t i = 0; i < before.rows(); ++i) {
        if (before.first_target_index + i > t) break;
        const auto row = static_cast<Eigen::Index>(i);
        EXPECT_EQ(before.values.row(row), after.values.row(row));
        EXPECT_EQ(before.target(row), after.target(row));
    }
}

TEST(FitOls, ExactFitRecoversCoefficients) {
    Rng rng(1);
    auto d = random_design(80, 3, rng, 0.0);
    Eigen::VectorXd truth(4);
    truth << 0.1, -0.4, 0.25, 0.8;
    d.target = d.values * truth;
    const auto m = fit_ols(d);
    EXPECT_LT((m.beta - truth).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_NEAR(m.rho_in, 1.0, 1e-12);
    EXPECT_EQ(m.hat_trace, 4.0);
}

TEST(FitOls, NoiseHasSmallCorrelation) {
    const auto r = synthetic::gen_ar_returns({synthetic::ArSpec{{}, 1.0, 0.0}, 5000, 2});
    const auto m = fit_ols(build_lag_matrix(r, 3));
    EXPECT_LT(std::abs(m.rho_in), 0.05);
    EXPECT_EQ(fit_ols(build_lag_matrix(r, 5)).hat_trace, 6.0);
    EXPECT_EQ(effective_dof(m), 4.0);
}

TEST(FitOls, ResidualsOrthogonalToDesign) {
    Rng rng(3);
    const auto d = random_design(200, 4, rng);
    const auto m = fit_ols(d);
    const Eigen::VectorXd resid = d.target - predict(m, d);
    EXPECT_LT((d.values.transpose() * resid).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_NEAR(m.rss, resid.squaredNorm(), 1e-9);
}

TEST(FitOls, RankDeficientRejected) {
    Rng rng(4);
    auto d = random_design(50, 3, rng);
    d.values.col(3) = d.values.col(2);
    EXPECT_THROW(fit_ols(d), RankDeficientError);
}

TEST(Predict, ZeroBetaAndDimensionChecks) {
    Rng rng(5);
    const auto d = random_design(40, 2, rng);
    auto m = fit_ols(d);
    m.beta.setZero();
    EXPECT_EQ(predict(m, d).cwiseAbs().maxCoeff(), 0.0);
    const auto other = random_design(40, 3, rng);
    EXPECT_THROW(predict(m, other), DimensionError);
}

TEST(FitTls, ExactFitEqualsOls) {
    Rng rng(6);
    auto d = random_design(100, 3, rng, 0.0);
    const auto tls = fit_tls(d);
    const auto ols = fit_ols(d);
    EXPECT_LT(*tls.sigma_min, 1e-8);
    EXPECT_LT((tls.beta - ols.beta).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_NEAR(tls.hat_trace, 4.0, 1e-10);
    EXPECT_EQ(tls.estimator, Estimator::TLS);
}

TEST(FitTls, RandomDesignExceedsOlsDof) {
    const auto r = synthetic::gen_ar_returns({synthetic::ArSpec{{0.1}, 1.0, 0.0}, 505, 8});
    const auto m = fit_tls(build_lag_matrix(r, 5));
    EXPECT_GT(m.hat_trace, 6.0);
}

TEST(FitTls, MatchesNullVectorAndDenseTrace) {
    Rng rng(7);
    for (int rep = 0; rep < 50; ++rep) {
        const int p = 1 + rep % 6;
        const auto d = random_design(60 + 10 * rep, p, rng, 0.5 + 0.05 * rep);
        const auto m = fit_tls(d);
        const Eigen::VectorXd ref = tls_beta_from_null_vector(d);
        for (Eigen::Index j = 0; j < ref.size(); ++j) {
            EXPECT_NEAR(m.beta(j), ref(j), 1e-6 * std::max(1.0, std::abs(ref(j))));
        }
        const double s = smallest_singular_value(d);
        EXPECT_NEAR(*m.sigma_min, s, 1e-9 * std::max(1.0, s));
        EXPECT_NEAR(m.hat_trace, dense_hat_trace(d, s), 1e-6);
        EXPECT_NEAR(effective_dof(m), m.hat_trace, 1e-12);
    }
}

TEST(FitTls, TwoColumnOrthogonalDistance) {
    Rng rng(8);
    for (int rep = 0; rep < 20; ++rep) {
        const auto d = random_design(150, 1, rng, 0.3 + 0.1 * rep);
        const double ref = orthogonal_slope(d);
        EXPECT_NEAR(fit_tls(d).beta(1), ref, 1e-4 * std::max(1.0, std::abs(ref)));
    }
}

TEST(FitTls, DivergenceMatchesFiniteDifference) {
    Rng rng(9);
    const auto d = random_design(40, 2, rng, 0.8);
    const auto m = fit_tls(d);
    const double h = 1e-6;
    double div = 0.0;
    for (Eigen::Index t = 0; t < d.target.size(); ++t) {
        DesignMatrix up = d, down = d;
        up.target(t) += h;
        down.target(t) -= h;
        div += (predict(fit_tls(up), up)(t) - predict(fit_tls(down), down)(t)) / (2 * h);
    }
    EXPECT_NEAR(m.divergence, div, 1e-5);
    EXPECT_NE(m.divergence, m.hat_trace);
    const auto ols = fit_ols(d);
    EXPECT_EQ(ols.divergence, ols.hat_trace);
}

TEST(FitTls, InterlacingAndDofOrdering) {
    Rng rng(10);
    for (int rep = 0; rep < 1000; ++rep) {
        const int p = 1 + rep % 8;
        const auto d = random_design(30 + rep % 200, p, rng, 0.2 + (rep % 10) * 0.2);
        LinearSignalModel tls, ols;
        try {
            tls = fit_tls(d);
            ols = fit_ols(d);
        } catch (const DegenerateError&) {
            continue;
        }
        const Eigen::MatrixXd zc = centred(d.values.rightCols(p));
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(zc);
        const double lambda_min = svd.singularValues()(p - 1);
        EXPECT_GE(lambda_min, *tls.sigma_min);
        EXPECT_GE(*tls.sigma_min, 0.0);
        EXPECT_GE(tls.hat_trace, ols.hat_trace);
        // Least squares maximises in-sample correlation over linear signals.
        EXPECT_GE(std::abs(ols.rho_in), std::abs(tls.rho_in) - 1e-10);
        EXPECT_LE(std::abs(tls.rho_in), 1.0);
    }
}

TEST(FitTls, ScaleColumnsOption) {
    Rng rng(11);
    auto d = random_design(120, 2, rng, 0.5);
    d.values.col(2) *= 100.0;
    const auto raw = fit_tls(d);
    const auto scaled = fit_tls(d, FitOptions{true});
    EXPECT_GT((raw.beta - scaled.beta).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_GE(scaled.hat_trace, 3.0);
}

TEST(GramPath, AgreesWithDesignPath) {
    const auto r = synthetic::gen_ar_returns({synthetic::ArSpec{{0.2, -0.1}, 0.01, 0.0005}, 900, 12});
    const LaggedCrossProducts lcp(r, 10);
    for (int p : {1, 3, 10}) {
        const auto d = build_lag_matrix(r, p, 20, 700);
        const auto a = lcp.compute(p, 20, 700);
        const auto b = cross_products(d);
        EXPECT_EQ(a.n, b.n);
        EXPECT_NEAR(a.sum_r, b.sum_r, 1e-12);
        EXPECT_NEAR(a.rr, b.rr, 1e-12);
        EXPECT_LT((a.zz - b.zz).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT((a.zr - b.zr).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT((a.sum_z - b.sum_z).cwiseAbs().maxCoeff(), 1e-12);
        for (Estimator e : {Estimator::OLS, Estimator::TLS}) {
            const auto md = fit(e, d);
            const auto mg = fit(e, a);
            EXPECT_LT((md.beta - mg.beta).cwiseAbs().maxCoeff(), 1e-6 * md.beta.cwiseAbs().maxCoeff());
            EXPECT_NEAR(md.hat_trace, mg.hat_trace, 1e-6);
            EXPECT_NEAR(md.divergence, mg.divergence, 1e-5);
            EXPECT_NEAR(md.rho_in, mg.rho_in, 1e-7);
            EXPECT_NEAR(md.rss / mg.rss, 1.0, 1e-7);
            EXPECT_EQ(md.n_obs, mg.n_obs);
        }
    }
}

TEST(PredictAt, MatchesDesignRow) {
    const auto r = synthetic::gen_ar_returns({synthetic::ArSpec{{0.3}, 1.0, 0.0}, 300, 13});
    const auto d = build_lag_matrix(r, 4);
    const auto m = fit_ols(d);
    const Eigen::VectorXd xhat = predict(m, d);
    for (std::size_t i = 0; i < d.rows(); i += 37) {
        EXPECT_NEAR(predict_at(m, r, d.first_target_index + i), xhat(static_cast<Eigen::Index>(i)), 1e-12);
    }
}

TEST(EstimatorNames, RoundTrip) {
    EXPECT_EQ(parse_estimator(to_string(Estimator::TLS)), Estimator::TLS);
    EXPECT_EQ(parse_estimator("OLS"), Estimator::OLS);
    EXPECT_THROW(parse_estimator("LASSO"), Error);
}
