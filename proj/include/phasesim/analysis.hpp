#pragma once

#include <functional>
#include <string>
#include <vector>

#include "phasesim/collapse.hpp"
#include "phasesim/scenario.hpp"
#include "phasesim/stats.hpp"
#include "phasesim/wavepacket.hpp"

namespace phasesim {

struct GofBin {
  double lo = 0.0;
  double hi = 0.0;
  double observed = 0.0;
  double expected = 0.0;
};

/// Goodness-of-fit report: histogram, expected density table, statistic.
struct GofReport {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
  std::vector<GofBin> bins;
  std::vector<std::string> labels;  // used by the region report
  long n_samples = 0;               // registered spots that entered the test
  long outside_count = 0;           // spots outside every region (region report)
  std::string method = "chi2";
};

/// Chi-square GOF of registered spot x positions against the field's |psi|^2
/// x-marginal over the field's normalization window. Bins whose expected count
/// falls below 5 are merged with their right neighbour. Requires at least
/// 10 * n_bins registered spots.
GofReport born_density_test(const std::vector<SpotRecord>& spots, const WavepacketField& field,
                            int n_bins);

/// Compares empirical region frequencies of registered spots with |c_n|^2.
/// Spots outside every region are counted and reported, not dropped silently.
GofReport discrete_region_test(const std::vector<SpotRecord>& spots,
                               const std::vector<RegionSpec>& regions,
                               const std::vector<Complex>& coefficients);

/// Quadrature of a 1-D density over [lo, hi]; the density is expected to be
/// normalized over [range_lo, range_hi].
double continuous_interval_probability(const std::function<double(double)>& density,
                                       double range_lo, double range_hi, double lo, double hi);

/// Mean fraction of occupied phase sections for n clusters: 1 - exp(-c1 * n).
double overlap_fraction_exact(double n, const Constants& constants);

enum class LinearConvention { kRounded, kCodata };

/// Linearized fraction: n / sections (rounded convention) or n * alpha_s / 2*pi.
double overlap_fraction_linear(double n, const Constants& constants,
                               LinearConvention convention = LinearConvention::kRounded);

/// Monte-Carlo occupancy: drop n balls uniformly into `sections` boxes and
/// average the occupied fraction over `trials`. Ball b of trial t draws at
/// stream position t*n + b, so the estimate is independent of evaluation order;
/// partial sums are reduced in fixed chunks for bit-reproducibility.
double birthday_oracle(int sections, int n, long trials, const SeededStream& stream);

/// The four closed-form kinematics numbers recomputed from stated inputs.
struct KinematicsReport {
  double sigma = 1.0e-10;               // packet width (m)
  double lambda0 = 5.4e-12;             // de Broglie wavelength at 50 keV (m)
  double sigma_over_lambda = 0.0;       // ~18.5
  double spreading_angle_deg = 0.0;     // lambda0 / (4 pi sigma), ~0.25 deg
  double electron_energy_keV = 50.0;
  double momentum_kg_m_s = 0.0;         // relativistic momentum at 50 keV
  double delta_p = 1.0e-24;             // contraction momentum spread (kg m/s)
  double dp_over_p = 0.0;               // ~0.009
};

KinematicsReport kinematics_checks();

}  // namespace phasesim
