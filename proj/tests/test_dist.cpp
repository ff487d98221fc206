#include <doctest.h>

#include <cmath>
#include <limits>

#include "fscns/dist.hpp"
#include "oracles.hpp"

using namespace fscns;

TEST_CASE("normal pdf analytic values") {
  CHECK(normal_pdf(0.0, {0.0, 1.0}) ==
        doctest::Approx(0.39894228040143268).epsilon(1e-14));
  // Mode value 1/(sigma sqrt(2 pi)).
  CHECK(normal_pdf(3.5, {3.5, 1.2}) ==
        doctest::Approx(1.0 / (1.2 * std::sqrt(2.0 * M_PI))).epsilon(1e-14));
  CHECK(normal_pdf(-2.0, {-2.0, 0.5}) ==
        doctest::Approx(1.0 / (0.5 * std::sqrt(2.0 * M_PI))).epsilon(1e-14));
}

TEST_CASE("normal cdf basics and erf-series oracle") {
  CHECK(normal_cdf(0.0, {0.0, 1.0}) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(normal_cdf(1e9, {0.0, 1.0}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(normal_cdf(1.0, {0.0, 1.0}) ==
        doctest::Approx(oracle::normal_cdf_series(1.0)).epsilon(1e-13));
  CHECK(oracle::normal_cdf_series(1.0) ==
        doctest::Approx(0.8413447460685429).epsilon(1e-14));

  // Monotone in x.
  double prev = 0.0;
  for (double x = -8.0; x <= 8.0; x += 0.25) {
    const double c = normal_cdf(x, {0.3, 2.0});
    CHECK(c >= prev);
    prev = c;
  }
}

TEST_CASE("log normal cdf is tail stable") {
  // Values frozen from a 40-digit reference evaluation.
  CHECK(std_normal_log_cdf(1.0) ==
        doctest::Approx(-0.17275377902344989).epsilon(1e-13));
  CHECK(std_normal_log_cdf(-5.0) ==
        doctest::Approx(-15.064998393988726).epsilon(1e-13));
  CHECK(std_normal_log_cdf(-20.0) ==
        doctest::Approx(-203.91715537109726).epsilon(1e-13));
  CHECK(std_normal_log_cdf(-40.0) ==
        doctest::Approx(-804.60844201375379).epsilon(1e-13));

  // Both sides of the asymptotic-series switch.
  CHECK(std_normal_log_cdf(-35.7) ==
        doctest::Approx(-641.73987231639019).epsilon(1e-12));
  CHECK(std_normal_log_cdf(-35.9) ==
        doctest::Approx(-648.90545023889918).epsilon(1e-12));

  // Monotone and finite deep into the tail.
  double prev = std_normal_log_cdf(-300.0);
  CHECK(std::isfinite(prev));
  for (double z = -299.0; z <= 10.0; z += 0.5) {
    const double v = std_normal_log_cdf(z);
    CHECK(std::isfinite(v));
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("log_sum_exp handles extremes") {
  CHECK(log_sum_exp(0.0, 0.0) == doctest::Approx(std::log(2.0)));
  const double ninf = -std::numeric_limits<double>::infinity();
  CHECK(log_sum_exp(ninf, 2.5) == doctest::Approx(2.5));
  CHECK(log_sum_exp(ninf, ninf) == ninf);
  CHECK(log_sum_exp(1000.0, 999.0) ==
        doctest::Approx(1000.0 + std::log1p(std::exp(-1.0))).epsilon(1e-15));
}

TEST_CASE("quantile inverts the cdf") {
  for (double p : {1e-12, 1e-6, 0.01, 0.3, 0.5, 0.77, 0.999, 1.0 - 1e-9}) {
    CHECK(std_normal_cdf(std_normal_quantile(p)) ==
          doctest::Approx(p).epsilon(1e-10));
  }
}

TEST_CASE("component validation rejects collapsed sigma") {
  ComponentParams bad{0.0, 1e-9};
  CHECK_THROWS_AS(bad.validate(), DegenerateError);
  ComponentParams ok{0.0, 1e-5};
  CHECK_NOTHROW(ok.validate());
}
