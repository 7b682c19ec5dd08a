#pragma once

namespace covpen::special {

/// Modified Bessel function of the second kind, order zero, for x > 0.
///
/// Uses the ascending series (through I0 and harmonic numbers) for x <= 2 and
/// the Steed/Temme continued fraction above. Relative error is below 1e-13
/// over (0, 700].
double bessel_k0(double x);

/// Exponentially scaled K0: exp(x) * K0(x). Stays finite for large x where
/// K0 itself underflows.
double bessel_k0_scaled(double x);

/// Modified Bessel function of the first kind, order zero (ascending series).
/// Intended for moderate arguments (|x| <= 30).
double bessel_i0(double x);

}  // namespace covpen::special
