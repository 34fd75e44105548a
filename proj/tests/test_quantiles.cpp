#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <cmath>

#include "alee/error.hpp"
#include "alee/quantiles.hpp"

using namespace alee;

namespace {

// Slow oracle: bisection on the erfc-based CDF.
double bisect_normal_quantile(double p) {
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (0.5 * std::erfc(-mid / std::sqrt(2.0)) < p) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("normal quantile examples") {
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959964).epsilon(1e-6));
  CHECK(normal_quantile(0.95) == doctest::Approx(1.644854).epsilon(1e-6));
  CHECK_THROWS_AS(normal_quantile(0.0), InvalidInput);
  CHECK_THROWS_AS(normal_quantile(1.0), InvalidInput);
  CHECK_THROWS_AS(normal_quantile(-0.1), InvalidInput);
}

TEST_CASE("normal quantile against bisection oracle") {
  for (double p : {1e-12, 1e-8, 1e-4, 0.01, 0.025, 0.1, 0.3, 0.5, 0.7, 0.9, 0.975, 0.999, 1 - 1e-9}) {
    CAPTURE(p);
    CHECK(std::abs(normal_quantile(p) - bisect_normal_quantile(p)) <= 1e-6);
  }
  for (int i = 1; i < 1000; ++i) {
    const double p = i / 1000.0;
    CHECK(std::abs(normal_quantile(p) - bisect_normal_quantile(p)) <= 1e-6);
    CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-9));
  }
}

TEST_CASE("normal quantile is antisymmetric and agrees with Boost") {
  const boost::math::normal_distribution<> n01;
  for (double p : {0.001, 0.05, 0.2, 0.45}) {
    CHECK(normal_quantile(p) == doctest::Approx(-normal_quantile(1 - p)).epsilon(1e-12));
    CHECK(normal_quantile(p) == doctest::Approx(boost::math::quantile(n01, p)).epsilon(1e-9));
  }
}

TEST_CASE("chi-square quantile examples") {
  for (double p : {0.5, 0.8, 0.9, 0.95, 0.99}) {
    const double z = normal_quantile(0.5 * (1 + p));
    CHECK(chi2_quantile(p, 1) == doctest::Approx(z * z).epsilon(1e-12));
  }
  CHECK(chi2_quantile(0.9, 2) == doctest::Approx(-2.0 * std::log(0.1)).epsilon(1e-12));
  CHECK(chi2_quantile(0.9, 2) == doctest::Approx(4.60517).epsilon(1e-5));
  CHECK(chi2_quantile(0.95, 3) == doctest::Approx(7.8147).epsilon(1e-4));
  CHECK_THROWS_AS(chi2_quantile(0.0, 2), InvalidInput);
  CHECK_THROWS_AS(chi2_quantile(1.0, 2), InvalidInput);
  CHECK_THROWS_AS(chi2_quantile(0.5, 0), InvalidInput);
}

TEST_CASE("chi-square quantile against Boost for d up to 8") {
  for (int d = 1; d <= 8; ++d) {
    const boost::math::chi_squared_distribution<> chi(d);
    for (double p : {0.001, 0.05, 0.5, 0.8, 0.85, 0.9, 0.95, 0.999}) {
      CAPTURE(d);
      CAPTURE(p);
      CHECK(chi2_quantile(p, d) == doctest::Approx(boost::math::quantile(chi, p)).epsilon(1e-4));
      CHECK(chi2_cdf(chi2_quantile(p, d), d) == doctest::Approx(p).epsilon(1e-8));
    }
  }
}

TEST_CASE("regularized gamma against Boost") {
  const boost::math::chi_squared_distribution<> chi(5);
  for (double x : {0.1, 1.0, 4.0, 11.0, 30.0}) {
    CHECK(chi2_cdf(x, 5) == doctest::Approx(boost::math::cdf(chi, x)).epsilon(1e-10));
  }
}
