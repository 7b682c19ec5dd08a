#include "covpen/bessel.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "covpen/error.hpp"

namespace covpen::special {
namespace {

constexpr double kSeriesLimit = 2.0;
constexpr int kMaxIterations = 10000;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// K0(x) = -(ln(x/2) + gamma) I0(x) + sum_{k>=1} (x^2/4)^k / (k!)^2 * H_k
double k0_series(double x) {
    const double y = 0.25 * x * x;
    double term = 1.0;
    double sum_i = 1.0;
    double sum_h = 0.0;
    double harmonic = 0.0;
    for (int k = 1; k < kMaxIterations; ++k) {
        term *= y / (static_cast<double>(k) * k);
        harmonic += 1.0 / k;
        sum_i += term;
        sum_h += term * harmonic;
        if (term < kEps * sum_i * 1e-2) break;
    }
    return -(std::log(0.5 * x) + std::numbers::egamma) * sum_i + sum_h;
}

// Steed's continued fraction (Temme's CF2 formulation) for order zero; returns
// exp(x) K0(x).
double k0_scaled_cf(double x) {
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d;
    double delh = d;
    double q1 = 0.0;
    double q2 = 1.0;
    const double a1 = 0.25;
    double q = a1;
    double c = a1;
    double a = -a1;
    double s = 1.0 + q * delh;
    for (int i = 1; i < kMaxIterations; ++i) {
        a -= 2.0 * i;
        c = -a * c / (i + 1.0);
        const double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const double dels = q * delh;
        s += dels;
        if (std::abs(dels / s) < kEps) break;
    }
    return std::sqrt(std::numbers::pi / (2.0 * x)) / s;
}

void require_positive(double x) {
    if (!(x > 0.0)) throw DomainError("bessel_k0: argument must be positive");
}

}  // namespace

double bessel_k0(double x) {
    require_positive(x);
    if (x <= kSeriesLimit) return k0_series(x);
    return k0_scaled_cf(x) * std::exp(-x);
}

double bessel_k0_scaled(double x) {
    require_positive(x);
    if (x <= kSeriesLimit) return k0_series(x) * std::exp(x);
    return k0_scaled_cf(x);
}

double bessel_i0(double x) {
    const double y = 0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < kMaxIterations; ++k) {
        term *= y / (static_cast<double>(k) * k);
        sum += term;
        if (term < kEps * sum * 1e-2) break;
    }
    return sum;
}

}  // namespace covpen::special
