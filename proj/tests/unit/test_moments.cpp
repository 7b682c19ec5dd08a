#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <gtest/gtest.h>

#include "covpen/error.hpp"
#include "covpen/moments.hpp"
#include "covpen/synthetic.hpp"

using namespace covpen;

namespace {

// Plain sample statistics of X*R from the generator, computed here rather
// than through the library's oracle.
struct Sampled {
    double mean, m2, m3, m4;
};

Sampled sample_product(const synthetic::JointGaussianSpec& spec, std::size_t n, std::uint64_t seed) {
    const auto draw = synthetic::gen_joint_gaussian({spec, n, seed});
    std::vector<double> s(n);
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        s[i] = draw.signal[i] * draw.returns[i];
        mean += s[i];
    }
    mean /= static_cast<double>(n);
    Sampled out{mean, 0.0, 0.0, 0.0};
    for (double v : s) {
        const double d = v - mean;
        out.m2 += d * d;
        out.m3 += d * d * d;
        out.m4 += d * d * d * d;
    }
    out.m2 /= static_cast<double>(n);
    out.m3 /= static_cast<double>(n);
    out.m4 /= static_cast<double>(n);
    return out;
}

double integrate_density(const GaussianPair& pair) {
    boost::math::quadrature::tanh_sinh<double> ts;
    auto pos = [&](double x) { return product_density(x, pair); };
    auto neg = [&](double x) { return product_density(-x, pair); };
    return ts.integrate(pos, 0.0, 400.0) + ts.integrate(neg, 0.0, 400.0);
}

}  // namespace

TEST(ProductMoments, ClosedFormValues) {
    const auto m0 = product_moments(0.0);
    EXPECT_EQ(m0.mu1, 0.0);
    EXPECT_EQ(m0.mu2, 1.0);
    EXPECT_EQ(m0.mu3, 0.0);
    EXPECT_EQ(m0.mu4, 9.0);
    const auto m1 = product_moments(1.0);
    EXPECT_EQ(m1.mu1, 1.0);
    EXPECT_EQ(m1.mu2, 2.0);
    EXPECT_EQ(m1.mu3, 8.0);
    EXPECT_EQ(m1.mu4, 60.0);
    EXPECT_THROW(product_moments(1.0001), DomainError);
}

TEST(ProductMoments, FourthMomentMonteCarlo) {
    const auto est = synthetic::mc_moments_oracle({0.5, 1, 1, 0, 0}, 1'000'000, 11);
    EXPECT_NEAR(est.value.mu4, product_moments(0.5).mu4, 3 * est.standard_error.mu4);
}

TEST(ProductMoments, MonteCarloRelativeAgreement) {
    for (double rho : {0.0, 0.3, 0.6, 0.9}) {
        const auto s = sample_product({rho, 1, 1, 0, 0}, 1'000'000, 100 + static_cast<std::uint64_t>(rho * 10));
        const auto m = product_moments(rho);
        if (rho == 0.0) {
            EXPECT_NEAR(s.mean, 0.0, 0.005);
            EXPECT_NEAR(s.m3, 0.0, 0.1);
        } else {
            EXPECT_NEAR(s.mean / m.mu1, 1.0, 0.01) << rho;
            EXPECT_NEAR(s.m3 / m.mu3, 1.0, 0.03) << rho;
        }
        EXPECT_NEAR(s.m2 / m.mu2, 1.0, 0.01) << rho;
        EXPECT_NEAR(s.m4 / m.mu4, 1.0, 0.03) << rho;
    }
}

TEST(ProductMoments, GeneralScalingMonteCarlo) {
    const synthetic::JointGaussianSpec spec{0.4, 2.0, 0.5, 0.3, -0.2};
    const auto est = synthetic::mc_moments_oracle(spec, 1'000'000, 5);
    const auto m = product_moments(spec.pair());
    EXPECT_NEAR(est.value.mu1, m.mu1, 3 * est.standard_error.mu1);
    EXPECT_NEAR(est.value.mu2, m.mu2, 3 * est.standard_error.mu2);
    EXPECT_NEAR(est.value.mu3, m.mu3, 3 * est.standard_error.mu3);
    EXPECT_NEAR(est.value.mu4, m.mu4, 3 * est.standard_error.mu4);
}

TEST(SharpeFromRho, ValuesAndShape) {
    EXPECT_EQ(sharpe_from_rho(0.0), 0.0);
    EXPECT_NEAR(sharpe_from_rho(1.0), 0.70710678, 1e-8);
    // 90% of the peak Sharpe is reached near rho = 0.83; 0.85 is within 2%.
    EXPECT_NEAR(sharpe_from_rho(rho_from_sharpe(0.9 / std::sqrt(2.0))), 0.9 / std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(rho_from_sharpe(0.9 / std::sqrt(2.0)), std::sqrt(0.405 / 0.595), 1e-12);
    EXPECT_NEAR(sharpe_from_rho(0.85) / (0.9 / std::sqrt(2.0)), 1.0, 0.02);
    double prev = -1.0;
    for (int i = -99; i <= 99; ++i) {
        const double rho = i / 100.0;
        const double sr = sharpe_from_rho(rho);
        EXPECT_GT(sr, prev);
        prev = sr;
        EXPECT_EQ(sharpe_from_rho(-rho), -sr);
        EXPECT_NEAR(sr * sr, rho * rho / (1 + rho * rho), 1e-15);
    }
    EXPECT_THROW(sharpe_from_rho(-1.5), DomainError);
}

TEST(SharpeFromRho, InverseRoundTrip) {
    for (double sr : {-0.7, -0.3, 0.0, 0.1, 0.5, 0.707}) {
        EXPECT_NEAR(sharpe_from_rho(rho_from_sharpe(sr)), sr, 1e-12);
    }
}

TEST(SkewKurt, ValuesAndSymmetry) {
    EXPECT_EQ(skew_from_rho(0.0), 0.0);
    EXPECT_NEAR(skew_from_rho(1.0), 2.82842712, 1e-8);
    EXPECT_NEAR(skew_from_rho(0.60) / (0.9 * std::pow(2.0, 1.5)), 1.0, 0.01);
    EXPECT_EQ(kurt_from_rho(0.0), 9.0);
    EXPECT_EQ(kurt_from_rho(1.0), 15.0);
    EXPECT_EQ(kurt_from_rho(-1.0), 15.0);
    for (int i = -99; i <= 99; ++i) {
        const double rho = i / 100.0;
        EXPECT_EQ(skew_from_rho(-rho), -skew_from_rho(rho));
        EXPECT_EQ(kurt_from_rho(-rho), kurt_from_rho(rho));
        EXPECT_GE(kurt_from_rho(rho), 9.0);
        EXPECT_LE(std::abs(skew_from_rho(rho)), std::pow(2.0, 1.5));
    }
}

TEST(SkewKurt, KurtosisMonteCarlo) {
    const auto s = sample_product({0.3, 1, 1, 0, 0}, 1'000'000, 21);
    EXPECT_NEAR(s.m4 / (s.m2 * s.m2) / kurt_from_rho(0.3), 1.0, 0.03);
}

TEST(NonzeroMean, ReducesAtZeroMeans) {
    EXPECT_NEAR(sharpe_nonzero_mean({1, 1, 0.5, 0, 0}), sharpe_from_rho(0.5), 1e-12);
    EXPECT_NEAR(skew_nonzero_mean({1, 1, 0.7, 0, 0}), skew_from_rho(0.7), 1e-12);
    EXPECT_NEAR(sharpe_nonzero_mean({2, 3, 0.0, 2, 3}), 1 / std::sqrt(3.0), 1e-12);
    // Uncorrelated with nonzero means: skew = 6ab / (a^2 + b^2 + 1)^1.5.
    EXPECT_NEAR(skew_nonzero_mean({1, 1, 0.0, 0.4, -0.9}), 6 * 0.4 * -0.9 / std::pow(1.97, 1.5), 1e-12);
    EXPECT_THROW(sharpe_nonzero_mean({0.0, 1, 0.1, 0, 0}), DomainError);
}

TEST(NonzeroMean, MonteCarlo) {
    // SR[R] = 0.2, SR[X] = 0.3.
    const auto s = sample_product({0.1, 1, 1, 0.3, 0.2}, 1'000'000, 31);
    EXPECT_NEAR(s.mean / std::sqrt(s.m2) / sharpe_nonzero_mean({1, 1, 0.1, 0.3, 0.2}), 1.0, 0.01);
    const auto k = sample_product({0.4, 1, 1, 0.5, 0.5}, 1'000'000, 32);
    EXPECT_NEAR(k.m3 / std::pow(k.m2, 1.5) / skew_nonzero_mean({1, 1, 0.4, 0.5, 0.5}), 1.0, 0.03);
}

TEST(ProductDensity, BesselOracleAndSymmetry) {
    const GaussianPair unit{1, 1, 0, 0, 0};
    EXPECT_NEAR(product_density(1.0, unit), boost::math::cyl_bessel_k(0, 1.0) / std::numbers::pi, 1e-15);
    EXPECT_NEAR(product_density(0.7, {1, 1, 0.4, 0, 0}), product_density(-0.7, {1, 1, -0.4, 0, 0}), 1e-15);
    EXPECT_GT(product_density(-3.0, {1, 1, 0.8, 0, 0}), 0.0);
}

TEST(ProductDensity, Errors) {
    EXPECT_THROW(product_density(0.0, {1, 1, 0.2, 0, 0}), DomainError);
    EXPECT_THROW(product_density(1.0, {1, 1, 1.0, 0, 0}), DomainError);
    EXPECT_THROW(product_density(1.0, {1, 1, 0.2, 0.1, 0}), DomainError);
}

TEST(ProductDensity, NormalisesUnderIndependentQuadrature) {
    for (double rho : {0.0, 0.2, 0.4, 0.6, 0.8}) {
        EXPECT_NEAR(integrate_density({1, 1, rho, 0, 0}), 1.0, 1e-6) << rho;
        EXPECT_NEAR(product_density_mass({1, 1, rho, 0, 0}, -400.0, 400.0), 1.0, 1e-6) << rho;
    }
    EXPECT_NEAR(integrate_density({0.5, 3.0, -0.3, 0, 0}), 1.0, 1e-6);
}

TEST(ProductDensity, MassOverFiniteWindow) {
    EXPECT_NEAR(product_density_mass({1, 1, 0.6, 0, 0}, -30.0, 30.0), 1.0, 1e-6);
    boost::math::quadrature::tanh_sinh<double> ts;
    const GaussianPair pair{1, 1, 0.3, 0, 0};
    const double ref = ts.integrate([&](double x) { return product_density(x, pair); }, 0.5, 2.0);
    EXPECT_NEAR(product_density_mass(pair, 0.5, 2.0), ref, 1e-10);
}
