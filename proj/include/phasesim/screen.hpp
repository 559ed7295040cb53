#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "phasesim/geometry.hpp"
#include "phasesim/phases.hpp"

namespace phasesim {

class WavepacketField;

/// A small sensitive region of the screen: a tightly bound subsystem carrying its
/// own pseudorandom phase constant. The locus of contraction.
struct Cluster {
  int index = 0;
  double x = 0.0;        // centre position (m)
  double z = 0.0;
  double sigma_cl = 0.0; // linear size (m)
  double area = 0.0;     // 2-D stand-in for the cluster volume, sigma_cl^2
  PhaseConstant alpha2;
  bool sensitive = true;
};

/// Width of the Gaussian cluster envelope. The envelope peaks at 1 and is scaled
/// in width so that its integral equals the cluster area sigma_cl^2; with that
/// convention the coverage integral reduces to area * density at the centre for
/// clusters much smaller than the packet, and tends to 1 when the packet lies
/// entirely inside the cluster.
inline double cluster_envelope_sigma(const Cluster& cluster) {
  return cluster.sigma_cl / std::sqrt(kTwoPi);
}

/// Peak-1 Gaussian envelope |psi_cl|^2 of the cluster at (x, z).
inline double cluster_envelope(const Cluster& cluster, double x, double z) {
  const double s = cluster_envelope_sigma(cluster);
  const double dx = x - cluster.x;
  const double dz = z - cluster.z;
  return std::exp(-(dx * dx + dz * dz) / (2.0 * s * s));
}

/// Uniform aggregate of clusters over a rectangular window.
struct Screen {
  Rect window;
  std::vector<Cluster> clusters;
  double density = 0.0;             // clusters per m^2
  double eta = 1.0;                 // sensitivity efficiency in [0, 1]
  std::uint64_t generation_seed = 0;
  double tilt_x = 0.0;              // depth gradient for arrival ordering
  double tilt_z = 0.0;
  bool overpacked = false;          // total cluster area exceeded the packing bound
};

/// Fraction of the window the clusters may jointly cover before generate_screen
/// flags the screen as overpacked (a warning, not a failure).
inline constexpr double kPackingBound = 0.25;

/// Sub-stream labels used when splitting the generation stream.
inline constexpr std::uint64_t kSubstreamPositions = 1;
inline constexpr std::uint64_t kSubstreamPhases = 2;
inline constexpr std::uint64_t kSubstreamFlags = 3;

/// Deterministic screen for the given stream: round(rho * area) clusters with
/// uniform positions, uniform phases and Bernoulli(eta) sensitivity flags, each
/// drawn from an independent sub-stream.
Screen generate_screen(Rect window, double rho, double sigma_cl, double eta,
                       const SeededStream& stream);

/// Same geometry and sensitivity flags, all phase constants redrawn from `stream`
/// (consuming one draw per cluster, in index order).
Screen refresh_phases(const Screen& screen, SeededStream& stream);

/// Deterministic scan order: ascending depth along the tilt axis, ties broken by
/// ascending index. A flat screen (zero tilt) therefore scans by index.
std::vector<int> arrival_order(const Screen& screen, const WavepacketField& packet);

/// Full cluster table as CSV: index, x, z, alpha2, sensitive.
void write_cluster_csv(const Screen& screen, std::ostream& out);

}  // namespace phasesim
