#include "phasesim/legacy_grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace phasesim {

LegacyResult legacy_buildup(const GridConfig& config, SeededStream stream, long n_points_target,
                            const std::function<void(long, long)>& progress) {
  if (n_points_target < 1) {
    throw std::invalid_argument("legacy_buildup: n_points_target must be at least 1");
  }
  if (config.nx < 1 || config.nz < 1) {
    throw std::invalid_argument("legacy_buildup: grid must have at least one area per axis");
  }
  if (config.eta < 0.0 || config.eta > 1.0) {
    throw std::invalid_argument("legacy_buildup: eta must lie in [0, 1]");
  }

  const int nx = config.nx;
  const int nz = config.nz;
  const std::size_t n_areas = static_cast<std::size_t>(nx) * nz;

  // |psi|^2 at area centres; the maximum is taken over the same grid.
  std::vector<double> density(n_areas);
  double max_density = 0.0;
  double density_sum = 0.0;
  for (int j = 0; j < nz; ++j) {
    const double z = (j + 0.5) / nz;
    for (int i = 0; i < nx; ++i) {
      const double x = (i + 0.5) / nx;
      const double d = config.field.density(x, z);
      density[static_cast<std::size_t>(j) * nx + i] = d;
      max_density = std::max(max_density, d);
      density_sum += d;
    }
  }
  if (!(max_density > 0.0)) {
    throw std::invalid_argument("legacy_buildup: field density vanishes on the grid");
  }

  LegacyResult result;
  result.max_density = max_density;
  result.mean_ratio = density_sum / (static_cast<double>(n_areas) * max_density);
  result.grid_counts.assign(n_areas, 0);

  long next_milestone = 10;
  const auto record_frames_up_to = [&](long points) {
    while (next_milestone <= points) {
      result.frames.push_back({next_milestone, static_cast<std::size_t>(next_milestone)});
      next_milestone *= 10;
    }
  };

  long points = 0;
  while (points < n_points_target) {
    if (result.attempts >= config.max_draws) {
      result.completed = false;
      return result;
    }
    const double xd = stream.next();
    const double zd = stream.next();
    const double r = stream.next();
    ++result.attempts;
    if (progress && result.attempts % 1'000'000 == 0) progress(points, result.attempts);

    const int i = std::min(nx - 1, static_cast<int>(xd * nx));
    const int j = std::min(nz - 1, static_cast<int>(zd * nz));
    const std::size_t area = static_cast<std::size_t>(j) * nx + i;
    if (!legacy_decision(density[area] / max_density, config.eta, r)) continue;

    result.points.emplace_back((i + 0.5) / nx, (j + 0.5) / nz);
    ++result.grid_counts[area];
    ++points;
    record_frames_up_to(points);
  }
  if (result.frames.empty() || result.frames.back().milestone != n_points_target) {
    result.frames.push_back({n_points_target, static_cast<std::size_t>(n_points_target)});
  }
  return result;
}

WavepacketField legacy_fringe_field() {
  constexpr double kPi = 3.14159265358979323846;
  const Rect unit{0.0, 1.0, 0.0, 1.0};
  return WavepacketField(
      [](double x, double /*z*/) {
        const double u = x - 0.5;
        const double s = 2.0 * kPi * u;
        const double envelope = s == 0.0 ? 1.0 : std::sin(s) / s;
        return Complex(std::cos(8.0 * kPi * u) * envelope, 0.0);
      },
      PhaseConstant(), unit, unit);
}

WavepacketField legacy_uniform_field() {
  const Rect unit{0.0, 1.0, 0.0, 1.0};
  return WavepacketField([](double, double) { return Complex(1.0, 0.0); }, PhaseConstant(), unit,
                         unit);
}

}  // namespace phasesim
