#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "covpen/error.hpp"
#include "covpen/estimators.hpp"
#include "covpen/moments.hpp"
#include "covpen/stats.hpp"
#include "covpen/synthetic.hpp"

using namespace covpen;
using namespace covpen::synthetic;

namespace {

double lag1_autocorr(const std::vector<double>& r) {
    const std::vector<double> a(r.begin(), r.end() - 1), b(r.begin() + 1, r.end());
    return *stats::pearson(a, b);
}

}  // namespace

TEST(Validate, RejectsBadSpecs) {
    EXPECT_THROW(validate({JointGaussianSpec{1.1}, 10, 0}), DomainError);
    EXPECT_THROW(validate({JointGaussianSpec{0.1, 0.0}, 10, 0}), DomainError);
    EXPECT_THROW(validate({ArSpec{{1.0}, 1.0, 0.0}, 10, 0}), DomainError);
    EXPECT_THROW(validate({ArSpec{{0.6, 0.5}, 1.0, 0.0}, 10, 0}), DomainError);
    EXPECT_THROW(validate({ArSpec{{0.2}, -1.0, 0.0}, 10, 0}), DomainError);
    EXPECT_NO_THROW(validate({ArSpec{{0.5, -0.3}, 1.0, 0.0}, 10, 0}));
    EXPECT_NEAR(ar_spectral_radius({0.5}), 0.5, 1e-12);
    EXPECT_NEAR(ar_spectral_radius({0.0, 0.25}), 0.5, 1e-12);
}

TEST(JointGaussian, PerfectCorrelation) {
    const auto s = gen_joint_gaussian({JointGaussianSpec{1.0, 2.0, 3.0, 0.1, 0.2}, 1000, 1});
    for (std::size_t i = 0; i < 1000; ++i) {
        EXPECT_NEAR(s.returns[i] - 0.2, 1.5 * (s.signal[i] - 0.1), 1e-12);
    }
}

TEST(JointGaussian, LargeSampleProperties) {
    const std::size_t n = 1'000'000;
    const double bound = 3.0 / std::sqrt(static_cast<double>(n));
    const auto z = gen_joint_gaussian({JointGaussianSpec{0.0}, n, 2});
    EXPECT_LT(std::abs(*stats::pearson(z.signal, z.returns)), bound);
    const auto s = gen_joint_gaussian({JointGaussianSpec{0.45, 2.0, 0.5}, n, 3});
    EXPECT_NEAR(*stats::pearson(s.signal, s.returns), 0.45, bound);
    EXPECT_NEAR(stats::population_std(s.signal) / 2.0, 1.0, 0.005);
    EXPECT_NEAR(stats::population_std(s.returns) / 0.5, 1.0, 0.005);
    // Marginal normality: excess kurtosis within 3 SE of zero (SE ~ sqrt(24/n)).
    for (const auto* xs : {&s.signal, &s.returns}) {
        const double m = stats::mean(*xs);
        double m2 = 0, m4 = 0;
        for (double x : *xs) {
            m2 += (x - m) * (x - m);
            m4 += std::pow(x - m, 4);
        }
        m2 /= n;
        m4 /= n;
        EXPECT_LT(std::abs(m4 / (m2 * m2) - 3.0), 3 * std::sqrt(24.0 / n));
    }
}

TEST(JointGaussian, Deterministic) {
    const SimSpec spec{JointGaussianSpec{0.3}, 500, 99};
    const auto a = gen_joint_gaussian(spec);
    const auto b = gen_joint_gaussian(spec);
    EXPECT_EQ(a.signal, b.signal);
    EXPECT_EQ(a.returns, b.returns);
    EXPECT_NE(a.signal, gen_joint_gaussian({JointGaussianSpec{0.3}, 500, 100}).signal);
    EXPECT_THROW(gen_ar_returns(spec), DomainError);
}

TEST(ArReturns, WhiteNoiseAndAutocorrelation) {
    const auto noise = gen_ar_returns({ArSpec{{}, 1.0, 0.0}, 100000, 4});
    EXPECT_EQ(noise.size(), 100000u);
    EXPECT_LT(std::abs(lag1_autocorr(noise)), 3.0 / std::sqrt(1e5));
    const auto ar = gen_ar_returns({ArSpec{{0.5}, 1.0, 0.0}, 100000, 5});
    EXPECT_NEAR(lag1_autocorr(ar), 0.5, 0.02);
    EXPECT_EQ(ar, gen_ar_returns({ArSpec{{0.5}, 1.0, 0.0}, 100000, 5}));
}

TEST(ArReturns, MeanLevel) {
    const auto r = gen_ar_returns({ArSpec{{0.3}, 0.01, 0.002}, 50000, 6});
    EXPECT_NEAR(stats::mean(r), 0.002, 4 * 0.01 / std::sqrt(0.49 * 50000));
}

TEST(McOracle, Examples) {
    const auto zero = mc_moments_oracle({0.0}, 1'000'000, 7);
    EXPECT_LT(std::abs(zero.value.mu1), 3 * zero.standard_error.mu1);
    const auto six = mc_moments_oracle({0.6}, 1'000'000, 8);
    EXPECT_NEAR(six.value.mu2, 1.36, 3 * six.standard_error.mu2);
    const auto nine = mc_moments_oracle({0.9}, 1'000'000, 9);
    EXPECT_NEAR(nine.value.mu4, product_moments(0.9).mu4, 3 * nine.standard_error.mu4);
    EXPECT_NEAR(nine.value.kurtosis(), kurt_from_rho(0.9), 0.03 * kurt_from_rho(0.9));
    EXPECT_THROW(mc_moments_oracle({0.1}, 9999, 1), DomainError);
}

TEST(SampleMoments, JackknifeOfMeanIsClassicalSe) {
    const std::vector<double> xs{0.3, -1.2, 2.2, 0.9, 1.4, -0.4, 0.0, 3.1};
    const auto est = sample_moments(xs);
    EXPECT_NEAR(est.value.mu1, stats::mean(xs), 1e-15);
    EXPECT_NEAR(est.standard_error.mu1, stats::sample_std(xs) / std::sqrt(8.0), 1e-12);
    EXPECT_NEAR(est.value.mu2, stats::population_variance(xs), 1e-14);
}

TEST(FreshSample, DeterministicAndGapShrinks) {
    const FitRoutine ols = [](const DesignMatrix& d) { return fit_ols(d); };
    const ArSpec strong{{0.5}, 1.0, 0.0};
    const auto a = fresh_sample_rho_oracle(ols, strong, {1, 500, 200, 3});
    const auto b = fresh_sample_rho_oracle(ols, strong, {1, 500, 200, 3});
    EXPECT_EQ(a.rho2_in, b.rho2_in);
    EXPECT_EQ(a.r2_out, b.r2_out);
    EXPECT_EQ(a.failures, 0u);
    const auto big = fresh_sample_rho_oracle(ols, strong, {1, 5000, 200, 3});
    const double gap_small = FreshSampleResult::summarize(a.rho2_in).mean -
                             FreshSampleResult::summarize(a.r2_out).mean;
    const double gap_big = FreshSampleResult::summarize(big.rho2_in).mean -
                           FreshSampleResult::summarize(big.r2_out).mean;
    EXPECT_GT(gap_small, 0.0);
    EXPECT_LT(std::abs(gap_big), std::abs(gap_small));
    EXPECT_THROW(fresh_sample_rho_oracle(ols, strong, {1, 500, 99, 3}), DomainError);
}

TEST(FreshSample, SummaryInterval) {
    const auto s = FreshSampleResult::summarize({1.0, 2.0, 3.0, 4.0});
    EXPECT_DOUBLE_EQ(s.mean, 2.5);
    EXPECT_NEAR(s.standard_error, std::sqrt(5.0 / 3.0) / 2.0, 1e-15);
    EXPECT_NEAR(s.ci_high - s.mean, 1.96 * s.standard_error, 1e-15);
}
