#include "covpen/student_t.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "covpen/error.hpp"

namespace covpen::special {
namespace {

constexpr double kTiny = 1e-300;
constexpr double kEps = 1e-16;

double beta_continued_fraction(double a, double b, double x) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 10000; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

double t_density(double t, double dof) {
    const double log_norm = std::lgamma(0.5 * (dof + 1.0)) - std::lgamma(0.5 * dof) -
                            0.5 * std::log(dof * std::numbers::pi);
    return std::exp(log_norm - 0.5 * (dof + 1.0) * std::log1p(t * t / dof));
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("incomplete_beta: a, b must be positive");
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("incomplete_beta: x must lie in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double dof) {
    if (!(dof > 0.0)) throw DomainError("student_t_cdf: dof must be positive");
    if (std::isnan(t)) throw DomainError("student_t_cdf: t is NaN");
    if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
    const double x = dof / (dof + t * t);
    const double tail = 0.5 * incomplete_beta(0.5 * dof, 0.5, x);
    return t > 0.0 ? 1.0 - tail : tail;
}

double student_t_two_sided(double t, double dof) {
    if (!(dof > 0.0)) throw DomainError("student_t_two_sided: dof must be positive");
    if (std::isinf(t)) return 0.0;
    const double x = dof / (dof + t * t);
    return incomplete_beta(0.5 * dof, 0.5, x);
}

double student_t_quantile(double p, double dof) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("student_t_quantile: p must lie in (0, 1)");
    if (!(dof > 0.0)) throw DomainError("student_t_quantile: dof must be positive");
    if (p == 0.5) return 0.0;

    // Bracket the root, then Newton steps that fall back to bisection whenever
    // they leave the bracket.
    double lo = -1.0;
    double hi = 1.0;
    while (student_t_cdf(lo, dof) > p) lo *= 2.0;
    while (student_t_cdf(hi, dof) < p) hi *= 2.0;

    double t = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        const double f = student_t_cdf(t, dof) - p;
        if (std::abs(f) < 1e-13) break;
        if (f > 0.0) {
            hi = t;
        } else {
            lo = t;
        }
        const double step = f / t_density(t, dof);
        double next = t - step;
        if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
        if (std::abs(next - t) < 1e-15 * std::max(1.0, std::abs(t))) {
            t = next;
            break;
        }
        t = next;
    }
    return t;
}

}  // namespace covpen::special
