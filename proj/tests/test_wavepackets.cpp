#include "phasesim/wavepacket.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "phasesim/quadrature.hpp"
#include "phasesim/screen.hpp"

using namespace phasesim;

namespace {

double field_norm(const WavepacketField& field, const Rect& domain, int nx = 900, int nz = 900) {
  return integrate_2d([&](double x, double z) { return field.density(x, z); }, domain, nx, nz);
}

}  // namespace

TEST_CASE("gaussian packet: peak at centre, unit norm, width convention") {
  const double sigma = 1.0e-6;
  const WavepacketField packet = gaussian_packet(0.0, 0.0, sigma, 0.0);

  // Peak at the centre over a 5-sigma grid.
  double peak = 0.0;
  for (int i = -25; i <= 25; ++i) {
    for (int j = -25; j <= 25; ++j) {
      peak = std::max(peak, std::abs(packet.amplitude(i * sigma / 5.0, j * sigma / 5.0)));
    }
  }
  CHECK(std::abs(packet.amplitude(0.0, 0.0)) == doctest::Approx(peak));

  // Norm over the +-5 sigma box, via an independent quadrature grid.
  CHECK(field_norm(packet, packet.norm_domain()) == doctest::Approx(1.0).epsilon(1e-6));

  // Density convention exp(-x^2 / (2 sigma^2)): amplitude ratio e^{-1/4} at one sigma.
  const double ratio =
      std::abs(packet.amplitude(sigma, 0.0)) / std::abs(packet.amplitude(0.0, 0.0));
  CHECK(ratio == doctest::Approx(std::exp(-0.25)).epsilon(1e-9));

  CHECK_THROWS_AS(gaussian_packet(0.0, 0.0, -1.0, 0.0), std::invalid_argument);
}

TEST_CASE("superpose: identity, norm, disjoint supports") {
  const double sigma = 1.0e-6;
  const WavepacketField left = gaussian_packet(-6.0 * sigma, 0.0, sigma, 0.0);
  const WavepacketField right = gaussian_packet(6.0 * sigma, 0.0, sigma, 0.0);

  SUBCASE("single term equals e^{i alpha} psi_1 pointwise") {
    const PhaseConstant alpha(1.2345);
    const Superposition s = superpose({Complex(1.0, 0.0)}, {left}, alpha);
    for (double x : {-6.5e-6, -6.0e-6, -5.2e-6}) {
      const Complex expected = std::polar(1.0, alpha.value()) * left.amplitude(x, 2.0e-7);
      const Complex actual = s.amplitude(x, 2.0e-7);
      CHECK(std::abs(actual - expected) < 1e-12 * std::abs(expected) + 1e-30);
    }
  }

  SUBCASE("equal-weight pair has unit norm") {
    const double c = 1.0 / std::sqrt(2.0);
    const Superposition s = superpose({Complex(c, 0.0), Complex(c, 0.0)}, {left, right},
                                      PhaseConstant());
    const Rect domain{-12.0 * sigma, 12.0 * sigma, -6.0 * sigma, 6.0 * sigma};
    const double norm =
        integrate_2d([&](double x, double z) { return s.density(x, z); }, domain, 1200, 600);
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-6));
  }

  SUBCASE("coefficients select the respective disjoint supports") {
    const Superposition only_left =
        superpose({Complex(1.0, 0.0), Complex(0.0, 0.0)}, {left, right}, PhaseConstant());
    const Superposition only_right =
        superpose({Complex(0.0, 0.0), Complex(1.0, 0.0)}, {left, right}, PhaseConstant());
    CHECK(only_left.density(-6.0e-6, 0.0) > 1e6);
    CHECK(only_left.density(6.0e-6, 0.0) < 1e-6);
    CHECK(only_right.density(6.0e-6, 0.0) > 1e6);
    CHECK(only_right.density(-6.0e-6, 0.0) < 1e-6);
  }

  SUBCASE("errors: length mismatch and zero norm") {
    CHECK_THROWS_AS(superpose({Complex(1.0, 0.0)}, {left, right}, PhaseConstant()),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        superpose({Complex(0.0, 0.0), Complex(0.0, 0.0)}, {left, right}, PhaseConstant()),
        std::invalid_argument);
  }

  SUBCASE("overlapping packets are rejected unless flagged") {
    const WavepacketField near_left = gaussian_packet(-5.5 * sigma, 0.0, sigma, 0.0);
    CHECK_THROWS_AS(superpose({Complex(1.0, 0.0), Complex(1.0, 0.0)}, {left, near_left},
                              PhaseConstant()),
                    std::invalid_argument);
    CHECK_NOTHROW(superpose({Complex(1.0, 0.0), Complex(1.0, 0.0)}, {left, near_left},
                            PhaseConstant(), true));
  }
}

TEST_CASE("global phase irrelevance for densities") {
  const double sigma = 1.0e-6;
  const WavepacketField left = gaussian_packet(-6.0 * sigma, 0.0, sigma, 0.0);
  const WavepacketField right = gaussian_packet(6.0 * sigma, 0.0, sigma, 0.0);
  const std::vector<Complex> coeffs{Complex(0.6, 0.0), Complex(0.0, 0.8)};
  const Superposition a = superpose(coeffs, {left, right}, PhaseConstant(0.3));
  const Superposition b = superpose(coeffs, {left, right}, PhaseConstant(5.9));
  SeededStream stream(1, 1);
  for (int i = 0; i < 500; ++i) {
    const double x = (stream.next() - 0.5) * 24.0 * sigma;
    const double z = (stream.next() - 0.5) * 12.0 * sigma;
    CHECK(a.density(x, z) == b.density(x, z));
  }
}

TEST_CASE("project_coefficient recovers coefficients") {
  const double sigma = 1.0e-6;
  const WavepacketField left = gaussian_packet(-6.0 * sigma, 0.0, sigma, 0.0);
  const WavepacketField right = gaussian_packet(6.0 * sigma, 0.0, sigma, 0.0);
  const double c = 1.0 / std::sqrt(2.0);

  SUBCASE("orthonormal projection of a pure term") {
    const Superposition s =
        superpose({Complex(1.0, 0.0), Complex(0.0, 0.0)}, {left, right}, PhaseConstant());
    const Complex c1 = project_coefficient(left, s);
    CHECK(std::abs(c1 - Complex(1.0, 0.0)) < 1e-4);
  }

  SUBCASE("complex coefficient i/sqrt(2)") {
    const Superposition s =
        superpose({Complex(c, 0.0), Complex(0.0, c)}, {left, right}, PhaseConstant());
    const Complex c2 = project_coefficient(right, s);
    CHECK(std::abs(c2 - Complex(0.0, c)) < 1e-4);
  }

  SUBCASE("disjoint packet projects to zero") {
    const Superposition s =
        superpose({Complex(1.0, 0.0), Complex(0.0, 0.0)}, {left, right}, PhaseConstant());
    const WavepacketField far = gaussian_packet(40.0 * sigma, 0.0, sigma, 0.0);
    CHECK(std::abs(project_coefficient(far, s)) < 1e-4);
  }

  SUBCASE("round-trip for both coefficients") {
    const std::vector<Complex> coeffs{Complex(0.8, 0.0), Complex(0.0, 0.6)};
    const Superposition s = superpose(coeffs, {left, right}, PhaseConstant());
    CHECK(std::abs(project_coefficient(left, s) - coeffs[0]) < 1e-4);
    CHECK(std::abs(project_coefficient(right, s) - coeffs[1]) < 1e-4);
  }
}

TEST_CASE("contract: cut-out piece, unit norm, conserved phase constant") {
  const double sigma = 1.0e-6;
  const WavepacketField packet = gaussian_packet(0.0, 0.0, sigma, 0.0);
  const PhaseConstant alpha(2.71);
  const Superposition s = superpose({Complex(1.0, 0.0)}, {packet}, alpha);

  SUBCASE("envelope of a huge cluster leaves the packet unchanged pointwise") {
    Cluster big;
    big.x = 0.0;
    big.z = 0.0;
    big.sigma_cl = 100.0 * sigma;
    big.area = big.sigma_cl * big.sigma_cl;
    const WavepacketField contracted = contract(s, big);
    for (double x : {-2.0e-6, 0.0, 1.5e-6}) {
      const Complex before = s.amplitude(x, 0.5e-6);
      const Complex after = contracted.amplitude(x, 0.5e-6);
      CHECK(std::abs(after - before) < 2e-3 * std::abs(before) + 1e-30);
    }
  }

  SUBCASE("output norm is 1 and the phase constant is conserved exactly") {
    Cluster small;
    small.x = 0.4 * sigma;
    small.z = -0.2 * sigma;
    small.sigma_cl = 0.05 * sigma;
    small.area = small.sigma_cl * small.sigma_cl;
    const WavepacketField contracted = contract(s, small);
    CHECK(contracted.phase_constant().value() == alpha.value());
    CHECK(field_norm(contracted, contracted.norm_domain(), 700, 700) ==
          doctest::Approx(1.0).epsilon(1e-6));
  }

  SUBCASE("narrow cluster pulls the centroid to its centre") {
    Cluster small;
    small.x = 0.8 * sigma;
    small.z = 0.3 * sigma;
    small.sigma_cl = 0.05 * sigma;
    small.area = small.sigma_cl * small.sigma_cl;
    const WavepacketField contracted = contract(s, small);
    const Rect domain = contracted.norm_domain();
    const double cx = integrate_2d(
        [&](double x, double z) { return x * contracted.density(x, z); }, domain, 600, 600);
    const double cz = integrate_2d(
        [&](double x, double z) { return z * contracted.density(x, z); }, domain, 600, 600);
    CHECK(std::fabs(cx - small.x) < small.sigma_cl);
    CHECK(std::fabs(cz - small.z) < small.sigma_cl);
  }

  SUBCASE("zero overlap is an error") {
    Cluster far;
    far.x = 500.0 * sigma;
    far.z = 0.0;
    far.sigma_cl = 0.05 * sigma;
    far.area = far.sigma_cl * far.sigma_cl;
    CHECK_THROWS_AS(contract(s, far), std::domain_error);
  }
}

TEST_CASE("double-slit amplitude: symmetry, first null, fringe period") {
  const double d = 1.0e-6;
  const double a = 5.0e-8;
  const double lambda = 5.4e-12;
  const double L = 1.0;
  const double fringe = lambda * L / d;  // 5.4e-6
  const Rect window{-8.0 * fringe, 8.0 * fringe, -5.0e-6, 5.0e-6};
  const WavepacketField field = double_slit_amplitude(d, a, lambda, L, window);

  SUBCASE("mirror symmetry") {
    SeededStream stream(3, 3);
    for (int i = 0; i < 400; ++i) {
      const double x = (stream.next() - 0.5) * window.width();
      CHECK(std::abs(field.amplitude(x, 0.0) - field.amplitude(-x, 0.0)) < 1e-18);
    }
  }

  SUBCASE("first interference null at lambda L / (2 d)") {
    CHECK(field.density(0.5 * fringe, 0.0) < 1e-12 * field.density(0.0, 0.0));
  }

  SUBCASE("fringe period equals lambda L / d within grid resolution") {
    // Spacing between successive density maxima on a fine grid.
    const int n = 20000;
    const double h = window.width() / n;
    std::vector<double> peaks;
    double prev2 = field.density(window.x_min, 0.0);
    double prev1 = field.density(window.x_min + h, 0.0);
    for (int i = 2; i < n; ++i) {
      const double x = window.x_min + i * h;
      const double cur = field.density(x, 0.0);
      if (prev1 > prev2 && prev1 >= cur) peaks.push_back(x - h);
      prev2 = prev1;
      prev1 = cur;
    }
    REQUIRE(peaks.size() >= 3);
    for (std::size_t i = 1; i < peaks.size(); ++i) {
      CHECK(peaks[i] - peaks[i - 1] == doctest::Approx(fringe).epsilon(0.02));
    }
  }

  SUBCASE("parameter domain is validated") {
    CHECK_THROWS_AS(double_slit_amplitude(-d, a, lambda, L, window), std::invalid_argument);
    CHECK_THROWS_AS(double_slit_amplitude(d, a, lambda, 50.0 * d, window), std::invalid_argument);
  }
}
