#include "phasesim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "phasesim/scenario.hpp"

using namespace phasesim;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("born test accepts inverse-CDF oracle samples in at least 98 of 100 runs") {
  const ScenarioConfig scenario = build_double_slit();
  const WavepacketField field = build_field(scenario).as_field();
  const auto marginal = testing::x_marginal(field);
  const testing::InverseCdfSampler sampler(marginal, field.norm_domain().x_min,
                                           field.norm_domain().x_max);
  int passed = 0;
  for (int run = 0; run < 100; ++run) {
    SeededStream stream(9000 + static_cast<std::uint64_t>(run), 1);
    std::vector<double> xs(2000);
    for (double& x : xs) x = sampler.sample(stream.next());
    const GofReport report = born_density_test(testing::spots_at(xs), field, 32);
    if (report.p_value > 0.01) ++passed;
  }
  CHECK(passed >= 98);
}

TEST_CASE("born test rejects uniform spots against fringe expectation") {
  const ScenarioConfig scenario = build_double_slit();
  const WavepacketField field = build_field(scenario).as_field();
  SeededStream stream(4, 4);
  std::vector<double> xs(2000);
  for (double& x : xs) {
    x = field.norm_domain().x_min + stream.next() * field.norm_domain().width();
  }
  // Bins must resolve the fringes (three per period) for the test to have power.
  const GofReport report = born_density_test(testing::spots_at(xs), field, 48);
  CHECK(report.p_value < 1e-6);
}

TEST_CASE("born test edge cases") {
  const ScenarioConfig scenario = build_double_slit();
  const WavepacketField field = build_field(scenario).as_field();
  const auto marginal = testing::x_marginal(field);
  const testing::InverseCdfSampler sampler(marginal, field.norm_domain().x_min,
                                           field.norm_domain().x_max);
  SeededStream stream(5, 5);
  std::vector<double> xs(600);
  for (double& x : xs) x = sampler.sample(stream.next());

  SUBCASE("single bin scores zero") {
    const GofReport report = born_density_test(testing::spots_at(xs), field, 1);
    CHECK(report.statistic == 0.0);
    CHECK(report.p_value == 1.0);
  }

  SUBCASE("too few spots is an error") {
    CHECK_THROWS_AS(born_density_test(testing::spots_at(xs), field, 100),
                    std::invalid_argument);
  }

  SUBCASE("identical reports for fields differing only in the phase constant") {
    const WavepacketField shifted = field.with_phase_constant(PhaseConstant(2.2));
    const GofReport a = born_density_test(testing::spots_at(xs), field, 24);
    const GofReport b = born_density_test(testing::spots_at(xs), shifted, 24);
    CHECK(a.statistic == b.statistic);
    CHECK(a.p_value == b.p_value);
    CHECK(a.dof == b.dof);
  }

  SUBCASE("sum of expected counts matches the number of spots") {
    const GofReport report = born_density_test(testing::spots_at(xs), field, 24);
    double observed_total = 0.0, expected_total = 0.0;
    for (const GofBin& bin : report.bins) {
      observed_total += bin.observed;
      expected_total += bin.expected;
    }
    CHECK(observed_total == doctest::Approx(static_cast<double>(xs.size())));
    CHECK(std::fabs(expected_total - static_cast<double>(xs.size())) /
              static_cast<double>(xs.size()) <
          1e-9);
  }
}

TEST_CASE("discrete region test") {
  const ScenarioConfig scenario = build_stern_gerlach(kPi / 3.0, 8.0e-5, 1.0e-5);
  const std::vector<Complex> coeffs = stern_gerlach_coefficients(kPi / 3.0);

  SUBCASE("single branch puts every spot in region 1") {
    std::vector<double> xs(500, 4.0e-5);
    const GofReport report = discrete_region_test(testing::spots_at(xs), scenario.regions,
                                                  stern_gerlach_coefficients(0.0));
    CHECK(report.bins[0].observed == 500.0);
    CHECK(report.bins[1].observed == 0.0);
    CHECK(report.outside_count == 0);
  }

  SUBCASE("binomial spots at 0.75 pass, and frequencies are reported") {
    SeededStream stream(6, 6);
    std::vector<double> xs(10'000);
    for (double& x : xs) x = stream.next() < 0.75 ? 4.0e-5 : -4.0e-5;
    const GofReport report = discrete_region_test(testing::spots_at(xs), scenario.regions, coeffs);
    const double freq = report.bins[0].observed / static_cast<double>(report.n_samples);
    CHECK(std::fabs(freq - 0.75) <= 0.013);
    CHECK(report.p_value > 0.001);
  }

  SUBCASE("spots outside every region are reported, not dropped") {
    std::vector<double> xs{4.0e-5, -4.0e-5, 1.0};  // the last lies outside the window
    const GofReport report = discrete_region_test(testing::spots_at(xs), scenario.regions, coeffs);
    CHECK(report.outside_count == 1);
    CHECK(report.n_samples == 2);
  }
}

TEST_CASE("continuous interval probability") {
  const auto cos2 = [](double theta) {
    const double c = std::cos(theta);
    return c * c / (kPi / 4.0);  // normalized over [0, pi/2]
  };
  CHECK(continuous_interval_probability(cos2, 0.0, kPi / 2.0, 0.0, kPi / 2.0) ==
        doctest::Approx(1.0).epsilon(1e-6));
  // Closed form (theta/2 + sin(2 theta)/4) / (pi/4) at pi/4: 1/2 + 1/pi.
  CHECK(continuous_interval_probability(cos2, 0.0, kPi / 2.0, 0.0, kPi / 4.0) ==
        doctest::Approx(0.5 + 1.0 / kPi).epsilon(1e-6));

  const auto uniform = [](double) { return 1.0; };
  CHECK(continuous_interval_probability(uniform, 0.0, 1.0, 0.25, 0.75) ==
        doctest::Approx(0.5).epsilon(1e-9));
  CHECK_THROWS_AS(continuous_interval_probability(uniform, 0.0, 1.0, 0.5, 1.5),
                  std::invalid_argument);
}

TEST_CASE("overlap fractions: exact and linear") {
  const Constants constants = Constants::rounded();

  CHECK(overlap_fraction_exact(0.0, constants) == 0.0);
  CHECK(overlap_fraction_exact(1.0e6, constants) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::fabs(overlap_fraction_exact(1.0, constants) - 1.0 / 861.0) / (1.0 / 861.0) < 1e-3);

  CHECK(overlap_fraction_linear(1.0, constants) == 1.0 / 861.0);
  CHECK(overlap_fraction_linear(0.0, constants) == 0.0);

  SUBCASE("exact is monotone, bounded, and below the same-constant linearization") {
    double prev = -1.0;
    for (int n = 0; n <= 2000; n += 7) {
      const double exact = overlap_fraction_exact(n, constants);
      CHECK(exact > prev);
      CHECK(exact <= 1.0);
      // 1 - e^{-x} <= x with x = c1 * n.
      CHECK(exact <= constants.c1() * n + 1e-15);
      prev = exact;
    }
  }

  SUBCASE("relative error of the linear form crosses 5% between n = 80 and 95") {
    int crossing = 0;
    for (int n = 1; n <= 200; ++n) {
      const double exact = overlap_fraction_exact(n, constants);
      const double linear = overlap_fraction_linear(n, constants);
      if ((linear - exact) / exact >= 0.05) {
        crossing = n;
        break;
      }
    }
    CHECK(crossing >= 80);
    CHECK(crossing <= 95);
  }
}

TEST_CASE("birthday oracle") {
  const SeededStream stream(123, 9);

  SUBCASE("one ball occupies exactly one section") {
    CHECK(birthday_oracle(365, 1, 5000, stream) == doctest::Approx(1.0 / 365.0));
  }

  SUBCASE("mean empty day count matches the closed form within 1% at 1e4 trials") {
    const double occupied = birthday_oracle(365, 50, 10'000, stream);
    const double mean_empty = 365.0 * (1.0 - occupied);
    const double expected = std::pow(364.0, 50.0) * std::pow(365.0, -49.0);
    CHECK(std::fabs(mean_empty - expected) / expected < 0.01);
  }

  SUBCASE("occupied fraction converges at the Monte-Carlo rate, checked at 3 sigma") {
    // Exact occupancy moments: with s sections and n balls the occupied count
    // has mean s(1 - r^n) and variance s(r^n - r^{2n}) + s(s-1)(t^n - r^{2n}),
    // where r = 1 - 1/s and t = 1 - 2/s.
    const int s = 861;
    const double r = 1.0 - 1.0 / s;
    const double t = 1.0 - 2.0 / s;
    const Constants constants = Constants::rounded();
    for (int n : {1, 10, 90, 500}) {
      const long trials = 20'000;
      const double empirical = birthday_oracle(s, n, trials, stream.fork(n));
      const double mean = s * (1.0 - std::pow(r, n));
      // Clamped: the formula cancels to a tiny negative at n = 1 (exactly zero).
      const double variance =
          std::max(0.0, s * (std::pow(r, n) - std::pow(r, 2.0 * n)) +
                            static_cast<double>(s) * (s - 1) *
                                (std::pow(t, n) - std::pow(r, 2.0 * n)));
      const double sigma_fraction = std::sqrt(variance / trials) / s;
      CHECK(std::fabs(empirical - mean / s) <= 3.0 * sigma_fraction + 1e-12);
      // The closed-form mean agrees with the section-overlap formula.
      CHECK(mean / s == doctest::Approx(overlap_fraction_exact(n, constants)).epsilon(1e-9));
    }
  }

  SUBCASE("input validation") {
    CHECK_THROWS_AS(birthday_oracle(0, 1, 10, stream), std::invalid_argument);
    CHECK_THROWS_AS(birthday_oracle(10, -1, 10, stream), std::invalid_argument);
    CHECK(birthday_oracle(10, 0, 10, stream) == 0.0);
  }
}

TEST_CASE("kinematics sanity numbers") {
  const KinematicsReport report = kinematics_checks();
  CHECK(std::fabs(report.sigma_over_lambda - 18.5) <= 0.1);
  CHECK(std::fabs(report.spreading_angle_deg - 0.25) <= 0.01);
  CHECK(std::fabs(report.dp_over_p - 0.009) <= 0.001);
}
