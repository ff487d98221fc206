#pragma once

#include "fscns/types.hpp"

namespace fscns {

// Standard normal density/cdf and their logs. log_normal_cdf stays finite
// and accurate far into the left tail, where (k-1)*log F terms live.

double std_normal_pdf(double z);
double std_normal_log_pdf(double z);
double std_normal_cdf(double z);
double std_normal_log_cdf(double z);

// Inverse of the standard normal cdf, used by the sampler.
double std_normal_quantile(double p);

double normal_pdf(double x, const ComponentParams& p);
double normal_log_pdf(double x, const ComponentParams& p);
double normal_cdf(double x, const ComponentParams& p);
double normal_log_cdf(double x, const ComponentParams& p);

// log(exp(a) + exp(b)) without overflow; handles -inf arguments.
double log_sum_exp(double a, double b);

}  // namespace fscns
