#include "phasesim/screen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "phasesim/io.hpp"

namespace phasesim {

Screen generate_screen(Rect window, double rho, double sigma_cl, double eta,
                       const SeededStream& stream) {
  if (window.area() <= 0.0) {
    throw std::invalid_argument("generate_screen: zero-area window");
  }
  if (!(rho > 0.0)) {
    throw std::invalid_argument("generate_screen: cluster density must be positive");
  }
  if (!(sigma_cl > 0.0)) {
    throw std::invalid_argument("generate_screen: cluster size must be positive");
  }
  if (eta < 0.0 || eta > 1.0) {
    throw std::invalid_argument("generate_screen: eta must lie in [0, 1]");
  }

  const auto count = static_cast<std::size_t>(std::llround(rho * window.area()));
  Screen screen;
  screen.window = window;
  screen.density = rho;
  screen.eta = eta;
  screen.generation_seed = stream.seed;
  screen.clusters.reserve(count);

  SeededStream positions = stream.fork(kSubstreamPositions);
  SeededStream phases = stream.fork(kSubstreamPhases);
  SeededStream flags = stream.fork(kSubstreamFlags);

  for (std::size_t i = 0; i < count; ++i) {
    Cluster cluster;
    cluster.index = static_cast<int>(i);
    cluster.x = window.x_min + positions.next() * window.width();
    cluster.z = window.z_min + positions.next() * window.height();
    cluster.sigma_cl = sigma_cl;
    cluster.area = sigma_cl * sigma_cl;
    cluster.alpha2 = draw_phase(phases);
    cluster.sensitive = flags.next() < eta;
    screen.clusters.push_back(cluster);
  }

  screen.overpacked = static_cast<double>(count) * sigma_cl * sigma_cl >
                      kPackingBound * window.area();
  return screen;
}

Screen refresh_phases(const Screen& screen, SeededStream& stream) {
  Screen out = screen;
  for (Cluster& cluster : out.clusters) {
    cluster.alpha2 = draw_phase(stream);
  }
  return out;
}

std::vector<int> arrival_order(const Screen& screen, const WavepacketField& /*packet*/) {
  std::vector<int> order(screen.clusters.size());
  std::iota(order.begin(), order.end(), 0);
  if (screen.tilt_x != 0.0 || screen.tilt_z != 0.0) {
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      const Cluster& ca = screen.clusters[static_cast<std::size_t>(a)];
      const Cluster& cb = screen.clusters[static_cast<std::size_t>(b)];
      const double da = ca.x * screen.tilt_x + ca.z * screen.tilt_z;
      const double db = cb.x * screen.tilt_x + cb.z * screen.tilt_z;
      if (da != db) return da < db;
      return a < b;
    });
  }
  return order;
}

void write_cluster_csv(const Screen& screen, std::ostream& out) {
  out << "index,x,z,alpha2,sensitive\n";
  for (const Cluster& cluster : screen.clusters) {
    out << cluster.index << ',' << format_double(cluster.x) << ',' << format_double(cluster.z)
        << ',' << format_double(cluster.alpha2.value()) << ',' << (cluster.sensitive ? 1 : 0)
        << '\n';
  }
}

}  // namespace phasesim
