#pragma once

#include <functional>

namespace covpen::detail {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int intervals = 0;
};

// Globally adaptive Gauss-Kronrod (7/15) quadrature: the interval with the
// largest error estimate is bisected until the summed estimate falls below
// abs_tol or max_intervals is reached.
QuadratureResult integrate_gk15(const std::function<double(double)>& f, double a,
                                double b, double abs_tol, int max_intervals = 4000);

}  // namespace covpen::detail
