#include "phasesim/stats.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "phasesim/phases.hpp"

using namespace phasesim;

// Reference quantiles from standard chi-square tables.
TEST_CASE("chi-square survival function against table values") {
  CHECK(stats::chi2_sf(3.841459, 1) == doctest::Approx(0.05).epsilon(1e-4));
  CHECK(stats::chi2_sf(5.991465, 2) == doctest::Approx(0.05).epsilon(1e-4));
  CHECK(stats::chi2_sf(18.307038, 10) == doctest::Approx(0.05).epsilon(1e-4));
  CHECK(stats::chi2_sf(6.634897, 1) == doctest::Approx(0.01).epsilon(1e-4));
  CHECK(stats::chi2_sf(29.588298, 10) == doctest::Approx(0.001).epsilon(1e-3));
  CHECK(stats::chi2_sf(0.0, 5) == 1.0);
}

TEST_CASE("chi-square critical value inverts the survival function") {
  for (double dof : {1.0, 10.0, 39.0, 99.0}) {
    for (double alpha : {0.05, 0.01, 0.001}) {
      const double crit = stats::chi2_critical(alpha, dof);
      CHECK(stats::chi2_sf(crit, dof) == doctest::Approx(alpha).epsilon(1e-6));
    }
  }
  // Wilson-Hilferty sanity for a large-dof quantile.
  const double crit = stats::chi2_critical(0.001, 99);
  CHECK(crit == doctest::Approx(148.23).epsilon(0.005));
}

TEST_CASE("Kolmogorov distribution against table values") {
  CHECK(stats::kolmogorov_q(1.35810) == doctest::Approx(0.05).epsilon(2e-3));
  CHECK(stats::kolmogorov_q(1.62762) == doctest::Approx(0.01).epsilon(2e-3));
  CHECK(stats::kolmogorov_q(0.0) == 1.0);
}

TEST_CASE("chi2_gof: exact match scores zero") {
  std::vector<double> observed{10, 20, 30};
  std::vector<double> expected{10, 20, 30};
  const auto result = stats::chi2_gof(observed, expected);
  CHECK(result.statistic == 0.0);
  CHECK(result.dof == 2);
  CHECK(result.p_value == doctest::Approx(1.0));
}

TEST_CASE("chi2_gof rejects invalid input") {
  CHECK_THROWS_AS(stats::chi2_gof({1.0}, {1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(stats::chi2_gof({1.0}, {0.0}), std::invalid_argument);
}

TEST_CASE("KS test accepts uniform samples and rejects skewed ones") {
  SeededStream stream(11, 0);
  std::vector<double> uniform(50'000);
  for (double& u : uniform) u = stream.next();
  CHECK(stats::ks_uniform_test(uniform, 0.0, 1.0).p_value > 0.01);

  std::vector<double> skewed(50'000);
  for (double& u : skewed) u = stream.next() * stream.next();
  CHECK(stats::ks_uniform_test(skewed, 0.0, 1.0).p_value < 1e-9);
}

TEST_CASE("histogram ignores out-of-range samples") {
  const std::vector<double> samples{-0.5, 0.1, 0.5, 0.9, 1.5};
  const auto counts = stats::histogram_counts(samples, 0.0, 1.0, 2);
  CHECK(counts[0] == 1);
  CHECK(counts[1] == 2);
}
