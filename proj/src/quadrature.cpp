#include "fscns/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <stdexcept>

namespace fscns {

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol) {
  double error = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
          f, a, b, 15, rel_tol, &error);
  if (!std::isfinite(value)) {
    throw std::runtime_error("quadrature produced a non-finite value");
  }
  const double scale = std::max(std::abs(value), 1.0);
  if (error > 1e-6 * scale) {
    throw std::runtime_error("quadrature failed to reach requested accuracy");
  }
  return value;
}

}  // namespace fscns
