#pragma once

// Closed-form statistics of the one-period strategy S = X * R when the signal X
// and the return R are jointly Gaussian.

namespace covpen {

/// First four moments of the strategy return. `mu1` is the mean; `mu2`..`mu4`
/// are central moments.
struct CentralMoments {
    double mu1 = 0.0;
    double mu2 = 0.0;
    double mu3 = 0.0;
    double mu4 = 0.0;

    double sharpe() const;
    double skewness() const;
    /// Non-excess (raw) kurtosis.
    double kurtosis() const;
};

/// Signal/return pair: X ~ N(mu_x, sigma_x^2), R ~ N(mu_r, sigma_r^2),
/// corr(X, R) = rho.
struct GaussianPair {
    double sigma_x = 1.0;
    double sigma_r = 1.0;
    double rho = 0.0;
    double mu_x = 0.0;
    double mu_r = 0.0;

    /// Throws DomainError unless sigmas are positive, |rho| <= 1 and means are
    /// finite.
    void validate() const;

    double signal_sharpe() const { return mu_x / sigma_x; }
    double return_sharpe() const { return mu_r / sigma_r; }
};

/// Moments of x*y for standard normals with correlation rho:
/// (rho, 1 + rho^2, 2 rho (3 + rho^2), 3 (3 + 14 rho^2 + 3 rho^4)).
CentralMoments product_moments(double rho);

/// Moments of X*R for a general pair. The standardized moments are obtained by
/// Isserlis' theorem with means SR[X], SR[R]; mu_k is then scaled by
/// (sigma_x sigma_r)^k.
CentralMoments product_moments(const GaussianPair& pair);

/// rho / sqrt(1 + rho^2).
double sharpe_from_rho(double rho);

/// Inverse of sharpe_from_rho on |sr| < sqrt(2)/2.
double rho_from_sharpe(double sr);

double skew_from_rho(double rho);

/// Non-excess kurtosis; 9 at rho = 0, 15 at |rho| = 1.
double kurt_from_rho(double rho);

/// Sharpe ratio of X*R with non-zero means:
/// (SR[R] SR[X] + rho) / sqrt(SR[R]^2 + SR[X]^2 + 2 rho SR[R] SR[X] + rho^2 + 1).
double sharpe_nonzero_mean(const GaussianPair& pair);

/// Skewness of X*R with non-zero means. With a = SR[X], b = SR[R]:
///   (2 rho (rho^2 + 3 + 3a^2 + 3b^2) + 6ab (1 + rho^2))
///     / (a^2 + b^2 + 2 rho a b + rho^2 + 1)^{3/2}
double skew_nonzero_mean(const GaussianPair& pair);

/// Exact density of X*R for zero means and |rho| < 1:
///   exp(rho x / s) K0(|x| / s) / (pi sigma_x sigma_r sqrt(1 - rho^2)),
///   s = sigma_x sigma_r (1 - rho^2).
/// Throws DomainError at x = 0 (log singularity) and at |rho| = 1, where the
/// law degenerates to a scaled chi-square with one degree of freedom.
double product_density(double x, const GaussianPair& pair);

/// Probability mass of the product density over [lo, hi].
///
/// An interval straddling zero excludes (-1e-8, 1e-8) from numerical
/// quadrature and adds the analytic integral of the leading log term there.
double product_density_mass(const GaussianPair& pair, double lo, double hi,
                            double abs_tol = 1e-11);

/// Half-width of the window around zero handled analytically by
/// product_density_mass.
inline constexpr double kDensityExclusion = 1e-8;

}  // namespace covpen
