#include "phasesim/phases.hpp"

#include <cmath>
#include <vector>

#include "doctest.h"
#include "phasesim/stats.hpp"

using namespace phasesim;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("phase constants reduce into [0, 2pi)") {
  CHECK(PhaseConstant(0.0).value() == 0.0);
  CHECK(PhaseConstant(kTwoPi).value() == 0.0);
  CHECK(PhaseConstant(-1.0).value() == doctest::Approx(kTwoPi - 1.0));
  CHECK(PhaseConstant(7.0 * kTwoPi + 0.25).value() == doctest::Approx(0.25));
  CHECK(PhaseConstant(-1e-18).value() >= 0.0);
  CHECK(PhaseConstant(-1e-18).value() < kTwoPi);

  SeededStream stream(99, 0);
  for (int i = 0; i < 2000; ++i) {
    const double raw = (stream.next() - 0.5) * 1e4;
    const double v = PhaseConstant(raw).value();
    CHECK(v >= 0.0);
    CHECK(v < kTwoPi);
  }
}

TEST_CASE("phase addition is modular") {
  CHECK((PhaseConstant(1.0) + PhaseConstant(2.0)).value() == doctest::Approx(3.0));
  CHECK((PhaseConstant(5.0) + PhaseConstant(4.0)).value() == doctest::Approx(9.0 - kTwoPi));
  SeededStream stream(7, 3);
  for (int i = 0; i < 2000; ++i) {
    const PhaseConstant a(kTwoPi * stream.next());
    const PhaseConstant b(kTwoPi * stream.next());
    CHECK((a + b).value() == doctest::Approx(wrap_two_pi(a.value() + b.value())));
  }
}

TEST_CASE("circular distance: identity, wraparound, antipodal") {
  CHECK(circular_distance(PhaseConstant(1.0), PhaseConstant(1.0)) == 0.0);
  CHECK(circular_distance(PhaseConstant(0.001), PhaseConstant(kTwoPi - 0.001)) ==
        doctest::Approx(0.002));
  CHECK(circular_distance(PhaseConstant(0.0), PhaseConstant(kPi)) == doctest::Approx(kPi));
}

TEST_CASE("circular distance is symmetric and bounded by pi") {
  SeededStream stream(42, 1);
  for (int i = 0; i < 5000; ++i) {
    const PhaseConstant a = draw_phase(stream);
    const PhaseConstant b = draw_phase(stream);
    const double d = circular_distance(a, b);
    CHECK(d == circular_distance(b, a));
    CHECK(d >= 0.0);
    CHECK(d <= kPi + 1e-15);
  }
}

TEST_CASE("draw_phase: identical (seed, stream_id, position) yields identical values") {
  SeededStream a(123, 5);
  SeededStream b(123, 5);
  for (int i = 0; i < 100; ++i) {
    CHECK(draw_phase(a).value() == draw_phase(b).value());
  }
  SeededStream from_position(123, 5, 50);
  SeededStream replay(123, 5, 50);
  CHECK(draw_phase(from_position).value() == draw_phase(replay).value());
}

TEST_CASE("random access equals sequential replay") {
  SeededStream seq(2024, 9);
  std::vector<double> sequential;
  for (int i = 0; i < 64; ++i) sequential.push_back(seq.next());
  const SeededStream random_access(2024, 9);
  for (int i = 0; i < 64; ++i) {
    CHECK(random_access.at(static_cast<std::uint64_t>(i)) ==
          sequential[static_cast<std::size_t>(i)]);
    CHECK(phase_at(random_access, static_cast<std::uint64_t>(i)).value() ==
          PhaseConstant(kTwoPi * sequential[static_cast<std::size_t>(i)]).value());
  }
}

TEST_CASE("distinct stream ids decorrelate") {
  SeededStream a(5, 1);
  SeededStream b(5, 2);
  int equal = 0;
  for (int i = 0; i < 1000; ++i) {
    if (a.next() == b.next()) ++equal;
  }
  CHECK(equal == 0);
}

TEST_CASE("uniformity: KS and sample mean over 1e6 draws") {
  SeededStream stream(31415, 2);
  std::vector<double> phases(1'000'000);
  double sum = 0.0;
  for (double& p : phases) {
    p = draw_phase(stream).value();
    sum += p;
  }
  const auto ks = stats::ks_uniform_test(phases, 0.0, kTwoPi);
  CHECK(ks.p_value > 0.01);
  const double mean = sum / static_cast<double>(phases.size());
  CHECK(std::fabs(mean - kPi) < 0.01);
}

TEST_CASE("uniformity: chi-square over 100 bins passes at significance 0.001") {
  SeededStream stream(777, 4);
  std::vector<double> phases(200'000);
  for (double& p : phases) p = draw_phase(stream).value();
  const auto counts = stats::histogram_counts(phases, 0.0, kTwoPi, 100);
  std::vector<double> observed, expected;
  for (long c : counts) {
    observed.push_back(static_cast<double>(c));
    expected.push_back(static_cast<double>(phases.size()) / 100.0);
  }
  const auto gof = stats::chi2_gof(observed, expected);
  CHECK(gof.p_value > 0.001);
}

TEST_CASE("forked substreams are reproducible and distinct") {
  const SeededStream parent(9001, 3);
  SeededStream f1 = parent.fork(17);
  SeededStream f2 = parent.fork(17);
  SeededStream other = parent.fork(18);
  CHECK(f1.next() == f2.next());
  CHECK(f1.next() != other.next());
}
