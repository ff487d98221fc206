#pragma once

#include <span>

#include "fscns/dist.hpp"
#include "fscns/types.hpp"

namespace fscns {

double mixture_pdf(double x, const MixtureParams& psi);
double mixture_cdf(double x, const MixtureParams& psi);
double mixture_log_pdf(double x, const MixtureParams& psi);
double mixture_log_cdf(double x, const MixtureParams& psi);

// Density of the maximum of k iid mixture draws: k f(x) F(x)^(k-1).
double ns_density(double x, const MixtureParams& psi, SetSize k);
double ns_log_density(double x, const MixtureParams& psi, SetSize k);

// Correct NS log-likelihood: sum_i log g_k(x_i).
double log_ns_likelihood(std::span<const double> data, const MixtureParams& psi,
                         SetSize k);

// Marginal of the single-indicator augmentation, which keeps only the
// pure-component terms of the binomial expansion:
//   sum_i log[ pi^k f1 F1^(k-1) + (1-pi)^k f2 F2^(k-1) ] + n log k.
// The n log k constant makes it coincide with log_ns_likelihood at k = 1.
double log_improper_likelihood(std::span<const double> data,
                               const MixtureParams& psi, SetSize k);

}  // namespace fscns
