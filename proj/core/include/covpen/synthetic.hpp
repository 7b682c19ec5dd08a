#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <variant>
#include <vector>

#include "covpen/estimators.hpp"
#include "covpen/moments.hpp"

// Seeded generators with known ground truth, and the Monte-Carlo oracles built
// on them.

namespace covpen::synthetic {

struct JointGaussianSpec {
    double rho = 0.0;
    double sigma_x = 1.0;
    double sigma_r = 1.0;
    double mu_x = 0.0;
    double mu_r = 0.0;

    GaussianPair pair() const { return {sigma_x, sigma_r, rho, mu_x, mu_r}; }
};

struct ArSpec {
    /// phi_1 .. phi_p of r_t = mean + sum phi_k (r_{t-k} - mean) + e_t.
    std::vector<double> coefficients;
    double noise_sigma = 1.0;
    double mean = 0.0;
};

struct SimSpec {
    std::variant<JointGaussianSpec, ArSpec> kind;
    std::size_t t_obs = 0;
    std::uint64_t seed = 0;
};

/// Throws DomainError for |rho| > 1, non-positive sigmas, or an AR spec whose
/// companion matrix has spectral radius >= 1.
void validate(const SimSpec& spec);

/// Spectral radius of the AR companion matrix.
double ar_spectral_radius(const std::vector<double>& coefficients);

struct JointSample {
    std::vector<double> signal;
    std::vector<double> returns;
};

/// X = mu_x + sigma_x z1, R = mu_r + sigma_r (rho z1 + sqrt(1 - rho^2) z2).
JointSample gen_joint_gaussian(const SimSpec& spec);

/// AR series of length t_obs after discarding a burn-in of 10 * max(1, p)
/// draws started from the mean.
std::vector<double> gen_ar_returns(const SimSpec& spec);

struct MomentEstimate {
    CentralMoments value;
    /// Delete-one jackknife standard errors of each component.
    CentralMoments standard_error;
    std::size_t n_samples = 0;
};

/// Plug-in mean and central moments of X*R over n_samples draws.
MomentEstimate mc_moments_oracle(const JointGaussianSpec& spec, std::size_t n_samples,
                                 std::uint64_t seed);

/// Plug-in moments with jackknife standard errors for an arbitrary sample.
MomentEstimate sample_moments(const std::vector<double>& xs);

using FitRoutine = std::function<LinearSignalModel(const DesignMatrix&)>;

struct FreshSampleOptions {
    int lag_p = 1;
    std::size_t t_obs = 500;
    std::size_t n_reps = 500;
    std::uint64_t seed = 0;
};

struct FreshSampleResult {
    /// Per successful replication.
    std::vector<double> rho2_in;         // in-sample squared correlation
    std::vector<double> rho2_out;        // squared correlation on the fresh draw
    std::vector<double> r2_out;          // 1 - SSE/SST on the fresh draw
    std::vector<double> hat_trace;
    std::vector<double> divergence;
    std::vector<double> n_obs;
    std::size_t failures = 0;

    struct Summary {
        double mean = 0.0;
        double standard_error = 0.0;
        double ci_low = 0.0;   // mean -/+ 1.96 SE
        double ci_high = 0.0;
    };
    static Summary summarize(const std::vector<double>& xs);
};

/// Each replication draws an in-sample series from `spec`, fits `routine` on
/// its lag design, then evaluates the fitted signal on an independent fresh
/// draw of the same spec. Replication r uses seeds derived from
/// (options.seed, 2r) and (options.seed, 2r + 1).
FreshSampleResult fresh_sample_rho_oracle(const FitRoutine& routine, const ArSpec& spec,
                                          const FreshSampleOptions& options);

}  // namespace covpen::synthetic
