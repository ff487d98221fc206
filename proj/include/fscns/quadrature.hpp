#pragma once

#include <functional>

namespace fscns {

// Adaptive Gauss-Kronrod (15-point) integral of f over [a, b].
// Throws std::runtime_error when the error estimate stays above the
// requested relative tolerance.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-10);

}  // namespace fscns
