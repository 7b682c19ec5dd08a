#include <cmath>
#include <set>
#include <vector>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <gtest/gtest.h>

#include "covpen/error.hpp"
#include "covpen/rng.hpp"
#include "covpen/stats.hpp"

using namespace covpen;

TEST(Rng, SplitMixReferenceStream) {
    // First outputs of SplitMix64 seeded with 0, from the reference C code.
    SplitMix64 sm(0);
    EXPECT_EQ(sm.next(), 0xE220A8397B1DCDAFULL);
    EXPECT_EQ(sm.next(), 0x6E789E6AA1B965F4ULL);
    EXPECT_EQ(sm.next(), 0x06C45D188009454FULL);
}

TEST(Rng, DeterministicAndSeedSensitive) {
    Rng a(42), b(42), c(43);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next();
        EXPECT_EQ(x, b.next());
        differs = differs || x != c.next();
    }
    EXPECT_TRUE(differs);
}

TEST(Rng, UniformOpenInterval) {
    Rng rng(7);
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    EXPECT_NEAR(sum / 100000, 0.5, 0.005);
}

TEST(Rng, NormalMoments) {
    Rng rng(9);
    const int n = 400000;
    double s1 = 0, s2 = 0, s4 = 0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        s1 += z;
        s2 += z * z;
        s4 += z * z * z * z;
    }
    EXPECT_NEAR(s1 / n, 0.0, 0.01);
    EXPECT_NEAR(s2 / n, 1.0, 0.01);
    EXPECT_NEAR(s4 / n, 3.0, 0.05);
}

TEST(Rng, BelowIsUnbiased) {
    Rng rng(1);
    std::vector<int> counts(7);
    for (int i = 0; i < 70000; ++i) ++counts[rng.below(7)];
    for (int c : counts) EXPECT_NEAR(c, 10000, 400);
}

TEST(Rng, DerivedSeedsDistinct) {
    std::set<std::uint64_t> seen;
    for (std::uint64_t s = 0; s < 1000; ++s) seen.insert(derive_seed(5, s));
    EXPECT_EQ(seen.size(), 1000u);
    EXPECT_NE(derive_seed(5, 0), derive_seed(6, 0));
}

TEST(Stats, BasicMoments) {
    const std::vector<double> xs{2, 0, 2, 0};
    EXPECT_DOUBLE_EQ(stats::mean(xs), 1.0);
    EXPECT_DOUBLE_EQ(stats::population_std(xs), 1.0);
    EXPECT_DOUBLE_EQ(stats::sample_std(xs), std::sqrt(4.0 / 3.0));
    EXPECT_DOUBLE_EQ(stats::sharpe(xs), 1.0);
    const std::vector<double> flat{3, 3, 3};
    EXPECT_THROW(stats::sharpe(flat), DegenerateError);
    EXPECT_THROW(stats::sharpe(std::vector<double>{}), InsufficientDataError);
}

TEST(Stats, PearsonAndSlope) {
    const std::vector<double> x{1, 2, 3, 4}, y{2, 4, 6, 8.5}, c{1, 1, 1, 1};
    EXPECT_NEAR(*stats::pearson(x, x), 1.0, 1e-15);
    EXPECT_FALSE(stats::pearson(x, c).has_value());
    EXPECT_NEAR(*stats::ols_slope(x, y), 2.15, 1e-12);
    EXPECT_FALSE(stats::ols_slope(c, y).has_value());
}

TEST(Stats, EmpiricalQuantile) {
    const std::vector<double> xs{5, 1, 4, 2, 3};
    EXPECT_EQ(stats::empirical_quantile(xs, 0.0), 1.0);
    EXPECT_EQ(stats::empirical_quantile(xs, 0.4), 2.0);
    EXPECT_EQ(stats::empirical_quantile(xs, 0.41), 3.0);
    EXPECT_EQ(stats::empirical_quantile(xs, 1.0), 5.0);
}

TEST(Stats, PairedTTestMatchesBoost) {
    const std::vector<double> a{1.2, 0.4, 2.2, 1.9, 0.7, 1.1}, b{0.9, 0.5, 1.4, 1.0, 0.8, 0.2};
    const auto r = stats::paired_t_test(a, b);
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    const double t = stats::mean(d) / (stats::sample_std(d) / std::sqrt(6.0));
    EXPECT_NEAR(r.t_stat, t, 1e-12);
    const boost::math::students_t dist(5.0);
    EXPECT_NEAR(r.p_value, 2 * boost::math::cdf(complement(dist, std::abs(t))), 1e-12);
}

TEST(Stats, SignTestMatchesBinomialTail) {
    for (std::size_t n : {10u, 100u}) {
        const boost::math::binomial dist(static_cast<double>(n), 0.5);
        for (std::size_t w : {0u, 3u, 6u, 9u, 10u}) {
            const double ref = w == 0 ? 1.0 : boost::math::cdf(complement(dist, static_cast<double>(w - 1)));
            EXPECT_NEAR(stats::sign_test_upper(w, n), ref, 1e-12) << n << " " << w;
        }
    }
    EXPECT_NEAR(stats::sign_test_upper(61, 100), 0.0176, 5e-4);
}
