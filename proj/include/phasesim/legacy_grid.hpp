#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "phasesim/phases.hpp"
#include "phasesim/wavepacket.hpp"

namespace phasesim {

/// Grid for the four-step reference simulation: the screen is a grid of equal
/// areas over [0,1]^2 and every quantity lives at area centres.
struct GridConfig {
  WavepacketField field;           // normalized over [0,1]^2
  int nx = 256;
  int nz = 256;
  double eta = 1.0;
  long max_points = 10000;
  long max_draws = 200'000'000;    // attempt budget; exceeding it stops the run
};

/// Acceptance rule: a point is set iff eta * ratio >= R, boundary inclusive.
inline bool legacy_decision(double psi_sq_ratio, double eta, double r) {
  return eta * psi_sq_ratio >= r;
}

/// Cumulative snapshot: the first prefix_len accepted points.
struct LegacyFrame {
  long milestone = 0;
  std::size_t prefix_len = 0;
};

struct LegacyResult {
  std::vector<std::pair<double, double>> points;  // accepted area centres, in order
  std::vector<LegacyFrame> frames;                // at milestones 10, 100, 1000, ...
  std::vector<long> grid_counts;                  // per-area occupancy, row-major in z
  long attempts = 0;                              // (X, Z, R) triples consumed
  bool completed = true;                          // false when the draw budget ran out
  double max_density = 0.0;                       // |psi|^2 max over area centres
  double mean_ratio = 0.0;                        // grid mean of |psi|^2 / max
};

/// Event-by-event buildup: draws X, Z, R from the stream, maps X and Z to an
/// area centre and applies legacy_decision with the precomputed density ratio.
/// Emits cumulative frames at logarithmic milestones and at the final count.
LegacyResult legacy_buildup(const GridConfig& config, SeededStream stream, long n_points_target,
                            const std::function<void(long points, long attempts)>& progress = {});

/// The default fringe field for the legacy grid: eight cosine fringes with a mild
/// single-slit envelope, symmetric about x = 1/2, uniform in z, normalized over
/// [0,1]^2.
WavepacketField legacy_fringe_field();

/// Uniform density field over [0,1]^2.
WavepacketField legacy_uniform_field();

}  // namespace phasesim
