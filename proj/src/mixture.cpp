#include "fscns/mixture.hpp"

#include <cmath>
#include <stdexcept>

namespace fscns {

double mixture_pdf(double x, const MixtureParams& psi) {
  return psi.pi * normal_pdf(x, psi.comp1) +
         (1.0 - psi.pi) * normal_pdf(x, psi.comp2);
}

double mixture_cdf(double x, const MixtureParams& psi) {
  return psi.pi * normal_cdf(x, psi.comp1) +
         (1.0 - psi.pi) * normal_cdf(x, psi.comp2);
}

double mixture_log_pdf(double x, const MixtureParams& psi) {
  return log_sum_exp(std::log(psi.pi) + normal_log_pdf(x, psi.comp1),
                     std::log1p(-psi.pi) + normal_log_pdf(x, psi.comp2));
}

double mixture_log_cdf(double x, const MixtureParams& psi) {
  return log_sum_exp(std::log(psi.pi) + normal_log_cdf(x, psi.comp1),
                     std::log1p(-psi.pi) + normal_log_cdf(x, psi.comp2));
}

double ns_density(double x, const MixtureParams& psi, SetSize k) {
  return std::exp(ns_log_density(x, psi, k));
}

double ns_log_density(double x, const MixtureParams& psi, SetSize k) {
  k.validate();
  return std::log(static_cast<double>(k.k)) + mixture_log_pdf(x, psi) +
         (k.k - 1) * mixture_log_cdf(x, psi);
}

double log_ns_likelihood(std::span<const double> data, const MixtureParams& psi,
                         SetSize k) {
  if (data.empty()) throw std::invalid_argument("empty data");
  psi.validate();
  k.validate();
  double total = 0.0;
  for (double x : data) total += ns_log_density(x, psi, k);
  return total;
}

double log_improper_likelihood(std::span<const double> data,
                               const MixtureParams& psi, SetSize k) {
  if (data.empty()) throw std::invalid_argument("empty data");
  psi.validate();
  k.validate();
  const double log_pi = std::log(psi.pi);
  const double log_1mpi = std::log1p(-psi.pi);
  const double log_k = std::log(static_cast<double>(k.k));
  double total = 0.0;
  for (double x : data) {
    double pure1 = k.k * log_pi + normal_log_pdf(x, psi.comp1) +
                   (k.k - 1) * normal_log_cdf(x, psi.comp1);
    double pure2 = k.k * log_1mpi + normal_log_pdf(x, psi.comp2) +
                   (k.k - 1) * normal_log_cdf(x, psi.comp2);
    total += log_k + log_sum_exp(pure1, pure2);
  }
  return total;
}

}  // namespace fscns
