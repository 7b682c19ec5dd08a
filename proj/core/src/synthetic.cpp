#include "covpen/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "covpen/error.hpp"
#include "covpen/rng.hpp"
#include "covpen/stats.hpp"

namespace covpen::synthetic {

double ar_spectral_radius(const std::vector<double>& coefficients) {
    const auto p = static_cast<Eigen::Index>(coefficients.size());
    if (p == 0) return 0.0;
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index j = 0; j < p; ++j) companion(0, j) = coefficients[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 1; i < p; ++i) companion(i, i - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

void validate(const SimSpec& spec) {
    if (const auto* jg = std::get_if<JointGaussianSpec>(&spec.kind)) {
        jg->pair().validate();
        return;
    }
    const auto& ar = std::get<ArSpec>(spec.kind);
    if (!(ar.noise_sigma > 0.0) || !std::isfinite(ar.noise_sigma)) {
        throw DomainError("ArSpec: noise_sigma must be positive");
    }
    for (double c : ar.coefficients) {
        if (!std::isfinite(c)) throw DomainError("ArSpec: non-finite coefficient");
    }
    if (ar_spectral_radius(ar.coefficients) >= 1.0) {
        throw DomainError("ArSpec: process is not stationary (companion spectral radius >= 1)");
    }
}

JointSample gen_joint_gaussian(const SimSpec& spec) {
    validate(spec);
    const auto* jg = std::get_if<JointGaussianSpec>(&spec.kind);
    if (jg == nullptr) throw DomainError("gen_joint_gaussian: spec is not JointGaussian");
    Rng rng(spec.seed);
    const double tail = std::sqrt(std::max(0.0, 1.0 - jg->rho * jg->rho));
    JointSample out;
    out.signal.resize(spec.t_obs);
    out.returns.resize(spec.t_obs);
    for (std::size_t t = 0; t < spec.t_obs; ++t) {
        const double z1 = rng.normal();
        const double z2 = rng.normal();
        out.signal[t] = jg->mu_x + jg->sigma_x * z1;
        out.returns[t] = jg->mu_r + jg->sigma_r * (jg->rho * z1 + tail * z2);
    }
    return out;
}

std::vector<double> gen_ar_returns(const SimSpec& spec) {
    validate(spec);
    const auto* ar = std::get_if<ArSpec>(&spec.kind);
    if (ar == nullptr) throw DomainError("gen_ar_returns: spec is not AR");
    const std::size_t p = ar->coefficients.size();
    const std::size_t burn_in = 10 * std::max<std::size_t>(p, 1);
    const std::size_t total = burn_in + spec.t_obs;

    Rng rng(spec.seed);
    std::vector<double> dev(total, 0.0);  // deviations from the mean
    for (std::size_t t = 0; t < total; ++t) {
        double x = ar->noise_sigma * rng.normal();
        for (std::size_t k = 1; k <= p && k <= t; ++k) x += ar->coefficients[k - 1] * dev[t - k];
        dev[t] = x;
    }
    std::vector<double> out(spec.t_obs);
    for (std::size_t t = 0; t < spec.t_obs; ++t) out[t] = ar->mean + dev[burn_in + t];
    return out;
}

MomentEstimate sample_moments(const std::vector<double>& xs) {
    const std::size_t n = xs.size();
    if (n < 3) throw InsufficientDataError("sample_moments: need at least three values");
    const double nd = static_cast<double>(n);
    const double xbar = stats::mean(xs);

    double s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0;
    for (double x : xs) {
        const double d = x - xbar;
        const double d2 = d * d;
        s1 += d;
        s2 += d2;
        s3 += d2 * d;
        s4 += d2 * d2;
    }

    auto central = [](double m, double t1, double t2, double t3, double t4) {
        const double a = t1 / m;
        const double e2 = t2 / m;
        const double e3 = t3 / m;
        const double e4 = t4 / m;
        return CentralMoments{a, e2 - a * a, e3 - 3.0 * a * e2 + 2.0 * a * a * a,
                              e4 - 4.0 * a * e3 + 6.0 * a * a * e2 - 3.0 * a * a * a * a};
    };

    MomentEstimate out;
    out.n_samples = n;
    out.value = central(nd, s1, s2, s3, s4);
    out.value.mu1 += xbar;

    // Delete-one jackknife from the power sums.
    std::array<double, 4> sum{};
    std::array<double, 4> sum_sq{};
    for (double x : xs) {
        const double d = x - xbar;
        const double d2 = d * d;
        CentralMoments loo = central(nd - 1.0, s1 - d, s2 - d2, s3 - d2 * d, s4 - d2 * d2);
        const std::array<double, 4> v{loo.mu1, loo.mu2, loo.mu3, loo.mu4};
        for (int k = 0; k < 4; ++k) {
            sum[k] += v[k];
            sum_sq[k] += v[k] * v[k];
        }
    }
    std::array<double, 4> se{};
    for (int k = 0; k < 4; ++k) {
        const double m = sum[k] / nd;
        const double ss = std::max(sum_sq[k] - nd * m * m, 0.0);
        se[k] = std::sqrt((nd - 1.0) / nd * ss);
    }
    out.standard_error = {se[0], se[1], se[2], se[3]};
    return out;
}

MomentEstimate mc_moments_oracle(const JointGaussianSpec& spec, std::size_t n_samples,
                                 std::uint64_t seed) {
    if (n_samples < 10000) throw DomainError("mc_moments_oracle: need at least 1e4 samples");
    const JointSample draw = gen_joint_gaussian({spec, n_samples, seed});
    std::vector<double> product(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) product[i] = draw.signal[i] * draw.returns[i];
    return sample_moments(product);
}

FreshSampleResult::Summary FreshSampleResult::summarize(const std::vector<double>& xs) {
    Summary s;
    s.mean = stats::mean(xs);
    s.standard_error = xs.size() > 1 ? stats::sample_std(xs) / std::sqrt(static_cast<double>(xs.size())) : 0.0;
    s.ci_low = s.mean - 1.96 * s.standard_error;
    s.ci_high = s.mean + 1.96 * s.standard_error;
    return s;
}

FreshSampleResult fresh_sample_rho_oracle(const FitRoutine& routine, const ArSpec& spec,
                                          const FreshSampleOptions& options) {
    if (options.n_reps < 100) throw DomainError("fresh_sample_rho_oracle: need at least 100 replications");
    validate({spec, options.t_obs, options.seed});

    FreshSampleResult out;
    for (std::size_t r = 0; r < options.n_reps; ++r) {
        const auto in_series = gen_ar_returns({spec, options.t_obs, derive_seed(options.seed, 2 * r)});
        const auto out_series =
            gen_ar_returns({spec, options.t_obs, derive_seed(options.seed, 2 * r + 1)});
        try {
            const DesignMatrix in_design = build_lag_matrix(in_series, options.lag_p);
            const LinearSignalModel model = routine(in_design);
            const DesignMatrix out_design = build_lag_matrix(out_series, options.lag_p);
            const Eigen::VectorXd signal = predict(model, out_design);

            const Eigen::VectorXd& target = out_design.target;
            const auto sig = std::span<const double>(signal.data(), static_cast<std::size_t>(signal.size()));
            const auto tgt = std::span<const double>(target.data(), static_cast<std::size_t>(target.size()));
            const double corr = stats::pearson(sig, tgt).value_or(0.0);
            const double sst = (target.array() - target.mean()).square().sum();
            const double sse = (target - signal).squaredNorm();

            out.rho2_in.push_back(model.rho_in * model.rho_in);
            out.rho2_out.push_back(corr * corr);
            out.r2_out.push_back(1.0 - sse / sst);
            out.hat_trace.push_back(model.hat_trace);
            out.divergence.push_back(model.divergence);
            out.n_obs.push_back(static_cast<double>(model.n_obs));
        } catch (const Error&) {
            ++out.failures;
        }
    }
    return out;
}

}  // namespace covpen::synthetic
