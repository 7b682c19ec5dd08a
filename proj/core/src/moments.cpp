#include "covpen/moments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "covpen/bessel.hpp"
#include "covpen/detail/quadrature.hpp"
#include "covpen/error.hpp"

namespace covpen {
namespace {

void require_correlation(double rho, const char* fn) {
    if (!(std::abs(rho) <= 1.0)) {
        throw DomainError(std::string(fn) + ": correlation must lie in [-1, 1]");
    }
}

}  // namespace

double CentralMoments::sharpe() const { return mu1 / std::sqrt(mu2); }
double CentralMoments::skewness() const { return mu3 / std::pow(mu2, 1.5); }
double CentralMoments::kurtosis() const { return mu4 / (mu2 * mu2); }

void GaussianPair::validate() const {
    if (!(sigma_x > 0.0) || !(sigma_r > 0.0) || !std::isfinite(sigma_x) ||
        !std::isfinite(sigma_r)) {
        throw DomainError("GaussianPair: standard deviations must be positive and finite");
    }
    require_correlation(rho, "GaussianPair");
    if (!std::isfinite(mu_x) || !std::isfinite(mu_r)) {
        throw DomainError("GaussianPair: means must be finite");
    }
}

CentralMoments product_moments(double rho) {
    require_correlation(rho, "product_moments");
    const double r2 = rho * rho;
    return {rho, 1.0 + r2, 2.0 * rho * (3.0 + r2), 3.0 * (3.0 + 14.0 * r2 + 3.0 * r2 * r2)};
}

CentralMoments product_moments(const GaussianPair& pair) {
    pair.validate();
    const double a = pair.signal_sharpe();
    const double b = pair.return_sharpe();
    const double r = pair.rho;
    const double a2 = a * a;
    const double b2 = b * b;
    const double r2 = r * r;
    const double ab = a * b;

    const double m1 = ab + r;
    const double m2 = a2 + b2 + 2.0 * r * ab + r2 + 1.0;
    const double m3 = 2.0 * r * (r2 + 3.0 + 3.0 * a2 + 3.0 * b2) + 6.0 * ab * (1.0 + r2);
    const double m4 = 3.0 * a2 * a2 + 3.0 * b2 * b2 + 12.0 * ab * r * (a2 + b2) +
                      12.0 * a2 * b2 * r2 + 6.0 * a2 * b2 + 42.0 * r2 * (a2 + b2) +
                      18.0 * (a2 + b2) + 36.0 * ab * r * r2 + 84.0 * ab * r +
                      9.0 * r2 * r2 + 42.0 * r2 + 9.0;

    const double s = pair.sigma_x * pair.sigma_r;
    const double s2 = s * s;
    return {m1 * s, m2 * s2, m3 * s2 * s, m4 * s2 * s2};
}

double sharpe_from_rho(double rho) {
    require_correlation(rho, "sharpe_from_rho");
    return rho / std::sqrt(1.0 + rho * rho);
}

double rho_from_sharpe(double sr) {
    if (!(std::abs(sr) < std::numbers::sqrt2 / 2.0)) {
        throw DomainError("rho_from_sharpe: |sr| must be below sqrt(2)/2");
    }
    return sr / std::sqrt(1.0 - sr * sr);
}

double skew_from_rho(double rho) {
    require_correlation(rho, "skew_from_rho");
    const double r2 = rho * rho;
    // Multiplying by sqrt(d) / d^2 keeps skew(+-1) = +-2 sqrt(2) exact in floating point.
    const double d = 1.0 + r2;
    return 2.0 * rho * (3.0 + r2) * std::sqrt(d) / (d * d);
}

double kurt_from_rho(double rho) {
    require_correlation(rho, "kurt_from_rho");
    const double r2 = rho * rho;
    const double d = 1.0 + r2;
    return 3.0 * (3.0 + 14.0 * r2 + 3.0 * r2 * r2) / (d * d);
}

double sharpe_nonzero_mean(const GaussianPair& pair) {
    pair.validate();
    const double a = pair.signal_sharpe();
    const double b = pair.return_sharpe();
    const double r = pair.rho;
    return (a * b + r) / std::sqrt(a * a + b * b + 2.0 * r * a * b + r * r + 1.0);
}

double skew_nonzero_mean(const GaussianPair& pair) {
    pair.validate();
    const double a = pair.signal_sharpe();
    const double b = pair.return_sharpe();
    const double r = pair.rho;
    const double num = 2.0 * r * (r * r + 3.0 + 3.0 * a * a + 3.0 * b * b) +
                       6.0 * a * b * (1.0 + r * r);
    const double den = a * a + b * b + 2.0 * r * a * b + r * r + 1.0;
    return num / std::pow(den, 1.5);
}

namespace {

void require_density_pair(const GaussianPair& pair) {
    pair.validate();
    if (pair.mu_x != 0.0 || pair.mu_r != 0.0) {
        throw DomainError("product_density: closed form requires zero means");
    }
    if (std::abs(pair.rho) >= 1.0) {
        throw DomainError(
            "product_density: |rho| = 1 is the degenerate chi-square(1) limit; no density "
            "of the Bessel form exists there");
    }
}

double density_unchecked(double x, const GaussianPair& pair) {
    const double ss = pair.sigma_x * pair.sigma_r;
    const double scale = ss * (1.0 - pair.rho * pair.rho);
    const double z = std::abs(x) / scale;
    // exp(rho x / scale) K0(z) = exp((rho x - |x|) / scale) * exp(z) K0(z)
    return std::exp((pair.rho * x - std::abs(x)) / scale) * special::bessel_k0_scaled(z) /
           (std::numbers::pi * ss * std::sqrt(1.0 - pair.rho * pair.rho));
}

}  // namespace

double product_density(double x, const GaussianPair& pair) {
    require_density_pair(pair);
    if (x == 0.0) throw DomainError("product_density: density is unbounded at x = 0");
    if (!std::isfinite(x)) throw DomainError("product_density: x must be finite");
    return density_unchecked(x, pair);
}

double product_density_mass(const GaussianPair& pair, double lo, double hi, double abs_tol) {
    require_density_pair(pair);
    if (!(lo < hi)) throw DomainError("product_density_mass: require lo < hi");

    auto f = [&pair](double x) { return x == 0.0 ? 0.0 : density_unchecked(x, pair); };
    constexpr double eps = kDensityExclusion;

    if (lo >= -eps && hi <= eps) {
        throw DomainError("product_density_mass: interval lies inside the exclusion window");
    }
    if (hi <= -eps || lo >= eps) {
        return detail::integrate_gk15(f, lo, hi, abs_tol).value;
    }

    double mass = 0.0;
    if (lo < -eps) mass += detail::integrate_gk15(f, lo, -eps, 0.5 * abs_tol).value;
    if (hi > eps) mass += detail::integrate_gk15(f, eps, hi, 0.5 * abs_tol).value;

    // Near zero K0(z) ~ -ln(z/2) - gamma and the exponential factor is odd to
    // first order, so the window contributes
    //   2/(pi ss sqrt(1 - rho^2)) * eps * (1 - ln(eps / (2 scale)) - gamma).
    const double ss = pair.sigma_x * pair.sigma_r;
    const double scale = ss * (1.0 - pair.rho * pair.rho);
    const double left = std::max(lo, -eps);
    const double right = std::min(hi, eps);
    auto half_window = [&](double w) {
        if (w <= 0.0) return 0.0;
        return w * (1.0 - std::log(w / (2.0 * scale)) - std::numbers::egamma) /
               (std::numbers::pi * ss * std::sqrt(1.0 - pair.rho * pair.rho));
    };
    mass += half_window(-left) + half_window(right);
    return mass;
}

}  // namespace covpen
