#include "phasesim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "phasesim/quadrature.hpp"

namespace phasesim {

namespace {

constexpr double kPi = 3.14159265358979323846;

/// Merge histogram bins left to right until every expected count reaches 5;
/// a trailing undersized bin is folded into its predecessor.
std::vector<GofBin> merge_small_bins(const std::vector<GofBin>& bins, double min_expected) {
  std::vector<GofBin> merged;
  GofBin current{};
  bool open = false;
  for (const GofBin& bin : bins) {
    if (!open) {
      current = bin;
      open = true;
    } else {
      current.hi = bin.hi;
      current.observed += bin.observed;
      current.expected += bin.expected;
    }
    if (current.expected >= min_expected) {
      merged.push_back(current);
      open = false;
    }
  }
  if (open) {
    if (merged.empty()) {
      merged.push_back(current);
    } else {
      merged.back().hi = current.hi;
      merged.back().observed += current.observed;
      merged.back().expected += current.expected;
    }
  }
  return merged;
}

}  // namespace

GofReport born_density_test(const std::vector<SpotRecord>& spots, const WavepacketField& field,
                            int n_bins) {
  if (n_bins < 1) throw std::invalid_argument("born_density_test: n_bins must be positive");
  std::vector<double> xs;
  xs.reserve(spots.size());
  for (const SpotRecord& spot : spots) {
    if (spot.registered) xs.push_back(spot.x);
  }
  if (static_cast<long>(xs.size()) < 10L * n_bins) {
    throw std::invalid_argument("born_density_test: too few registered spots for the binning");
  }

  const Rect& window = field.norm_domain();
  const double lo = window.x_min;
  const double hi = window.x_max;

  // x-marginal of |psi|^2 on a fine sub-grid aligned with the bins.
  const int sub = 64;
  const int fine = n_bins * sub;
  const double dx = (hi - lo) / fine;
  std::vector<double> marginal(static_cast<std::size_t>(fine));
  double total = 0.0;
  for (int i = 0; i < fine; ++i) {
    const double x = lo + (i + 0.5) * dx;
    const double m = integrate_1d([&](double z) { return field.density(x, z); }, window.z_min,
                                  window.z_max, 96);
    marginal[static_cast<std::size_t>(i)] = m;
    total += m;
  }
  if (!(total > 0.0)) throw std::invalid_argument("born_density_test: field density vanishes");

  const std::vector<long> counts = stats::histogram_counts(xs, lo, hi, n_bins);
  const double n_spots = static_cast<double>(xs.size());
  std::vector<GofBin> bins(static_cast<std::size_t>(n_bins));
  for (int b = 0; b < n_bins; ++b) {
    GofBin& bin = bins[static_cast<std::size_t>(b)];
    bin.lo = lo + b * (hi - lo) / n_bins;
    bin.hi = lo + (b + 1) * (hi - lo) / n_bins;
    bin.observed = static_cast<double>(counts[static_cast<std::size_t>(b)]);
    double share = 0.0;
    for (int s = 0; s < sub; ++s) share += marginal[static_cast<std::size_t>(b * sub + s)];
    bin.expected = n_spots * share / total;
  }

  GofReport report;
  report.n_samples = static_cast<long>(xs.size());
  report.bins = merge_small_bins(bins, 5.0);
  std::vector<double> observed, expected;
  observed.reserve(report.bins.size());
  expected.reserve(report.bins.size());
  for (const GofBin& bin : report.bins) {
    observed.push_back(bin.observed);
    expected.push_back(bin.expected);
  }
  const stats::Chi2Result chi2 = stats::chi2_gof(observed, expected);
  report.statistic = chi2.statistic;
  report.dof = chi2.dof;
  report.p_value = chi2.p_value;
  return report;
}

GofReport discrete_region_test(const std::vector<SpotRecord>& spots,
                               const std::vector<RegionSpec>& regions,
                               const std::vector<Complex>& coefficients) {
  if (regions.empty()) throw std::invalid_argument("discrete_region_test: region_map is empty");
  if (regions.size() != coefficients.size()) {
    throw std::invalid_argument("discrete_region_test: region/coefficient count mismatch");
  }
  double coeff_norm = 0.0;
  for (const Complex& c : coefficients) coeff_norm += std::norm(c);
  if (!(coeff_norm > 0.0)) {
    throw std::invalid_argument("discrete_region_test: zero coefficient norm");
  }

  GofReport report;
  std::vector<double> observed(regions.size(), 0.0);
  for (const SpotRecord& spot : spots) {
    if (!spot.registered) continue;
    bool assigned = false;
    for (std::size_t i = 0; i < regions.size(); ++i) {
      if (regions[i].region.contains(spot.x, spot.z)) {
        observed[i] += 1.0;
        assigned = true;
        break;
      }
    }
    if (assigned) {
      ++report.n_samples;
    } else {
      ++report.outside_count;
    }
  }
  if (report.n_samples == 0) {
    throw std::invalid_argument("discrete_region_test: no registered spots inside regions");
  }

  report.bins.resize(regions.size());
  std::vector<double> observed_positive, expected_positive;
  bool impossible = false;
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const double expected =
        static_cast<double>(report.n_samples) * std::norm(coefficients[i]) / coeff_norm;
    report.labels.push_back(regions[i].label);
    report.bins[i].observed = observed[i];
    report.bins[i].expected = expected;
    if (expected > 0.0) {
      observed_positive.push_back(observed[i]);
      expected_positive.push_back(expected);
    } else if (observed[i] > 0.0) {
      impossible = true;  // a spot in a region of coefficient zero
    }
  }
  // Regions with zero expected weight carry no degrees of freedom; a spot
  // landing in one is flatly inconsistent with the coefficients.
  const stats::Chi2Result chi2 = stats::chi2_gof(observed_positive, expected_positive);
  report.statistic = chi2.statistic;
  report.dof = chi2.dof;
  report.p_value = impossible ? 0.0 : chi2.p_value;
  return report;
}

double continuous_interval_probability(const std::function<double(double)>& density,
                                       double range_lo, double range_hi, double lo, double hi) {
  if (!(range_hi > range_lo)) {
    throw std::invalid_argument("continuous_interval_probability: empty range");
  }
  if (lo < range_lo - 1e-12 || hi > range_hi + 1e-12 || hi < lo) {
    throw std::invalid_argument("continuous_interval_probability: interval outside range");
  }
  if (hi == lo) return 0.0;
  const int n = std::max(64, static_cast<int>(8192 * (hi - lo) / (range_hi - range_lo)));
  return integrate_1d(density, lo, hi, n);
}

double overlap_fraction_exact(double n, const Constants& constants) {
  if (n < 0.0) throw std::invalid_argument("overlap_fraction_exact: n must be non-negative");
  return -std::expm1(-constants.c1() * n);
}

double overlap_fraction_linear(double n, const Constants& constants,
                               LinearConvention convention) {
  if (n < 0.0) throw std::invalid_argument("overlap_fraction_linear: n must be non-negative");
  if (convention == LinearConvention::kRounded) {
    return n / static_cast<double>(constants.sections());
  }
  return n * constants.alpha_s / kTwoPi;
}

double birthday_oracle(int sections, int n, long trials, const SeededStream& stream) {
  if (sections < 1) throw std::invalid_argument("birthday_oracle: sections must be positive");
  if (trials < 1) throw std::invalid_argument("birthday_oracle: trials must be positive");
  if (n < 0) throw std::invalid_argument("birthday_oracle: n must be non-negative");
  if (n == 0) return 0.0;

  std::vector<long> stamp(static_cast<std::size_t>(sections), -1);
  const long chunk_size = 4096;
  double total = 0.0;
  double chunk_sum = 0.0;
  for (long t = 0; t < trials; ++t) {
    long occupied = 0;
    const std::uint64_t offset = static_cast<std::uint64_t>(t) * static_cast<std::uint64_t>(n);
    for (int b = 0; b < n; ++b) {
      auto box = static_cast<std::size_t>(stream.at(offset + static_cast<std::uint64_t>(b)) *
                                          sections);
      if (box >= static_cast<std::size_t>(sections)) box = static_cast<std::size_t>(sections) - 1;
      if (stamp[box] != t) {
        stamp[box] = t;
        ++occupied;
      }
    }
    chunk_sum += static_cast<double>(occupied) / static_cast<double>(sections);
    if ((t + 1) % chunk_size == 0) {
      total += chunk_sum;
      chunk_sum = 0.0;
    }
  }
  total += chunk_sum;
  return total / static_cast<double>(trials);
}

KinematicsReport kinematics_checks() {
  KinematicsReport report;
  report.sigma_over_lambda = report.sigma / report.lambda0;
  report.spreading_angle_deg = report.lambda0 / (4.0 * kPi * report.sigma) * 180.0 / kPi;

  // Relativistic momentum p = sqrt(2 m E + (E/c)^2 c^2...) expressed via pc:
  // (pc)^2 = 2 (m c^2) E + E^2 with E and m c^2 in keV.
  const double me_c2_keV = 510.999;
  const double keV = 1.602176634e-16;  // J
  const double c = 2.99792458e8;       // m/s
  const double pc_keV =
      std::sqrt(2.0 * me_c2_keV * report.electron_energy_keV +
                report.electron_energy_keV * report.electron_energy_keV);
  report.momentum_kg_m_s = pc_keV * keV / c;
  report.dp_over_p = report.delta_p / report.momentum_kg_m_s;
  return report;
}

}  // namespace phasesim
