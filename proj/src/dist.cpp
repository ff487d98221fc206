#include "fscns/dist.hpp"

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <limits>

namespace fscns {

namespace {
constexpr double kLogSqrt2Pi = 0.918938533204672741780329736406;  // log(sqrt(2*pi))
constexpr double kInvSqrt2 = 0.707106781186547524400844362105;

// Mills-ratio asymptotic expansion kicks in where erfc would lose the tail
// (Phi below ~1e-280, i.e. z < -35.8).
constexpr double kTailSwitch = -35.8;
}  // namespace

double std_normal_pdf(double z) {
  return std::exp(-0.5 * z * z - kLogSqrt2Pi);
}

double std_normal_log_pdf(double z) { return -0.5 * z * z - kLogSqrt2Pi; }

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

double std_normal_log_cdf(double z) {
  if (z >= kTailSwitch) {
    double c = std_normal_cdf(z);
    if (c >= 1.0) return 0.0;
    if (c > 0.0) return std::log(c);
  }
  // Phi(z) = phi(t)/t * [1 - 1/t^2 + 3/t^4 - 15/t^6 + 105/t^8 - 945/t^10 ...]
  // with t = -z.
  const double t = -z;
  const double t2 = t * t;
  double series = -1.0 / t2;
  double term = -series;  // 1/t^2
  term *= 3.0 / t2;
  series += term;  // +3/t^4
  term *= -5.0 / t2;
  series += term;  // -15/t^6
  term *= -7.0 / t2;
  series += term;  // +105/t^8
  term *= -9.0 / t2;
  series += term;  // -945/t^10
  return -0.5 * t2 - std::log(t) - kLogSqrt2Pi + std::log1p(series);
}

double std_normal_quantile(double p) {
  static const boost::math::normal_distribution<double> unit;
  return boost::math::quantile(unit, p);
}

double normal_pdf(double x, const ComponentParams& p) {
  return std_normal_pdf((x - p.mu) / p.sigma) / p.sigma;
}

double normal_log_pdf(double x, const ComponentParams& p) {
  return std_normal_log_pdf((x - p.mu) / p.sigma) - std::log(p.sigma);
}

double normal_cdf(double x, const ComponentParams& p) {
  return std_normal_cdf((x - p.mu) / p.sigma);
}

double normal_log_cdf(double x, const ComponentParams& p) {
  return std_normal_log_cdf((x - p.mu) / p.sigma);
}

double log_sum_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  double hi = a > b ? a : b;
  double lo = a > b ? b : a;
  return hi + std::log1p(std::exp(lo - hi));
}

}  // namespace fscns
