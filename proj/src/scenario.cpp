#include "phasesim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace phasesim {

namespace {

Rect default_double_slit_window(const DoubleSlitParams& p) {
  // Twenty fringe periods across x; z is a thin uniform strip.
  const double fringe = p.wavelength * p.screen_distance / p.slit_separation;
  return Rect{-10.0 * fringe, 10.0 * fringe, -5.0e-6, 5.0e-6};
}

}  // namespace

ScenarioConfig build_double_slit(const DoubleSlitParams& params) {
  ScenarioConfig scenario;
  scenario.name = "double_slit";
  scenario.model = FieldModel::kDoubleSlit;
  scenario.double_slit = params;
  const Rect window = default_double_slit_window(params);
  scenario.screen.window = window;
  // 500 clusters per trial screen; the cluster area sets the mean coverage and
  // with it the contraction rate (~0.35% of trials).
  scenario.screen.rho = 500.0 / window.area();
  scenario.screen.sigma_cl = std::sqrt(0.007938 * window.area());
  scenario.screen.eta = 1.0;
  return scenario;
}

ScenarioConfig build_stern_gerlach(double theta, double separation, double packet_width) {
  if (!(packet_width > 0.0)) {
    throw std::invalid_argument("build_stern_gerlach: packet_width must be positive");
  }
  if (!(separation > 4.0 * packet_width)) {
    throw std::invalid_argument(
        "build_stern_gerlach: separation must exceed 4 * packet_width for resolvable branches");
  }
  ScenarioConfig scenario;
  scenario.name = "stern_gerlach";
  scenario.model = FieldModel::kSternGerlach;
  scenario.stern_gerlach = {theta, separation, packet_width};
  const double half_x = 0.5 * separation + 5.0 * packet_width;
  const double half_z = 5.0 * packet_width;
  scenario.screen.window = Rect{-half_x, half_x, -half_z, half_z};
  scenario.screen.rho = 500.0 / scenario.screen.window.area();
  // Coverage peaks at ~0.72 for the stronger branch: safely under the clamp.
  scenario.screen.sigma_cl = std::sqrt(0.0333 * scenario.screen.window.area());
  scenario.screen.eta = 1.0;
  scenario.regions.push_back({"+1/2", Rect{0.0, half_x, -half_z, half_z}});
  scenario.regions.push_back({"-1/2", Rect{-half_x, 0.0, -half_z, half_z}});
  return scenario;
}

ScenarioConfig build_scattering_shell(std::function<Complex(double)> angular_amplitude,
                                      double theta_min, double theta_max,
                                      const std::string& profile_name) {
  if (!(theta_max > theta_min)) {
    throw std::invalid_argument("build_scattering_shell: empty angular range");
  }
  if (!angular_amplitude) {
    throw std::invalid_argument("build_scattering_shell: missing angular amplitude");
  }
  ScenarioConfig scenario;
  scenario.name = "scattering_shell";
  scenario.model = FieldModel::kAngularRing;
  scenario.ring.profile = profile_name;
  scenario.ring.theta_min = theta_min;
  scenario.ring.theta_max = theta_max;
  scenario.ring.amplitude = std::move(angular_amplitude);
  scenario.screen.window = Rect{theta_min, theta_max, 0.0, 1.0};
  scenario.screen.rho = 500.0 / scenario.screen.window.area();
  scenario.screen.sigma_cl = std::sqrt(0.02 * scenario.screen.window.area());
  scenario.screen.eta = 1.0;
  return scenario;
}

std::function<Complex(double)> ring_profile(const std::string& name) {
  if (name == "isotropic") {
    return [](double) { return Complex(1.0, 0.0); };
  }
  if (name == "cos") {
    return [](double theta) { return Complex(std::cos(theta), 0.0); };
  }
  throw std::runtime_error("unknown ring profile: " + name);
}

std::vector<Complex> stern_gerlach_coefficients(double theta) {
  return {Complex(std::cos(0.5 * theta), 0.0), Complex(std::sin(0.5 * theta), 0.0)};
}

Superposition build_field(const ScenarioConfig& scenario) {
  switch (scenario.model) {
    case FieldModel::kDoubleSlit: {
      const DoubleSlitParams& p = scenario.double_slit;
      WavepacketField field = double_slit_amplitude(p.slit_separation, p.slit_width, p.wavelength,
                                                    p.screen_distance, scenario.screen.window);
      return superpose({Complex(1.0, 0.0)}, {field}, PhaseConstant());
    }
    case FieldModel::kSternGerlach: {
      const SternGerlachParams& p = scenario.stern_gerlach;
      if (!(p.separation > 4.0 * p.packet_width)) {
        throw std::invalid_argument("stern_gerlach field: separation too small for packet_width");
      }
      WavepacketField up = gaussian_packet(0.5 * p.separation, 0.0, p.packet_width, 0.0);
      WavepacketField down = gaussian_packet(-0.5 * p.separation, 0.0, p.packet_width, 0.0);
      return superpose(stern_gerlach_coefficients(p.theta), {up, down}, PhaseConstant());
    }
    case FieldModel::kAngularRing: {
      const AngularRingParams& p = scenario.ring;
      auto amplitude = p.amplitude ? p.amplitude : ring_profile(p.profile);
      WavepacketField field = ring_amplitude(amplitude, scenario.screen.window);
      return superpose({Complex(1.0, 0.0)}, {field}, PhaseConstant());
    }
    case FieldModel::kWignerChain:
      throw std::invalid_argument("wigner_chain scenarios run via run_wigner_chain");
  }
  throw std::invalid_argument("build_field: unknown field model");
}

void validate_scenario(const ScenarioConfig& scenario) {
  if (scenario.model != FieldModel::kWignerChain) {
    if (scenario.screen.window.area() <= 0.0) {
      throw std::invalid_argument("scenario screen.window: degenerate window");
    }
    if (!(scenario.screen.rho > 0.0)) {
      throw std::invalid_argument("scenario screen.rho: must be positive");
    }
    if (!(scenario.screen.sigma_cl > 0.0)) {
      throw std::invalid_argument("scenario screen.sigma_cl: must be positive");
    }
    if (scenario.screen.eta < 0.0 || scenario.screen.eta > 1.0) {
      throw std::invalid_argument("scenario screen.eta: must lie in [0, 1]");
    }
  }
  if (!(scenario.constants.alpha_s > 0.0) || scenario.constants.alpha_s >= 1.0) {
    throw std::invalid_argument("scenario constants.alpha_s: must lie in (0, 1)");
  }
  for (std::size_t i = 0; i < scenario.regions.size(); ++i) {
    for (std::size_t j = i + 1; j < scenario.regions.size(); ++j) {
      const Rect& a = scenario.regions[i].region;
      const Rect& b = scenario.regions[j].region;
      const double ox = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
      const double oz = std::min(a.z_max, b.z_max) - std::max(a.z_min, b.z_min);
      if (ox > 0.0 && oz > 0.0) {
        throw std::invalid_argument("scenario regions: region_map entries must be disjoint");
      }
    }
  }
}

// --- serialization -----------------------------------------------------------

namespace {

using nlohmann::json;

json rect_to_json(const Rect& r) {
  return json{{"x_min", r.x_min}, {"x_max", r.x_max}, {"z_min", r.z_min}, {"z_max", r.z_max}};
}

Rect rect_from_json(const json& j) {
  Rect r;
  r.x_min = j.at("x_min").get<double>();
  r.x_max = j.at("x_max").get<double>();
  r.z_min = j.at("z_min").get<double>();
  r.z_max = j.at("z_max").get<double>();
  return r;
}

std::string model_name(FieldModel model) {
  switch (model) {
    case FieldModel::kDoubleSlit: return "double_slit";
    case FieldModel::kSternGerlach: return "stern_gerlach";
    case FieldModel::kAngularRing: return "angular_ring";
    case FieldModel::kWignerChain: return "wigner_chain";
  }
  return "unknown";
}

FieldModel model_from_name(const std::string& name) {
  if (name == "double_slit") return FieldModel::kDoubleSlit;
  if (name == "stern_gerlach") return FieldModel::kSternGerlach;
  if (name == "angular_ring") return FieldModel::kAngularRing;
  if (name == "wigner_chain") return FieldModel::kWignerChain;
  throw std::runtime_error("scenario model: unknown model '" + name + "'");
}

}  // namespace

ScenarioConfig parse_scenario_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("scenario parse: ") + e.what());
  }
  ScenarioConfig scenario;
  try {
    scenario.name = j.at("name").get<std::string>();
    scenario.model = model_from_name(j.at("model").get<std::string>());
    const json& field = j.at("field");
    switch (scenario.model) {
      case FieldModel::kDoubleSlit:
        scenario.double_slit.slit_separation = field.at("slit_separation").get<double>();
        scenario.double_slit.slit_width = field.at("slit_width").get<double>();
        scenario.double_slit.wavelength = field.at("wavelength").get<double>();
        scenario.double_slit.screen_distance = field.at("screen_distance").get<double>();
        break;
      case FieldModel::kSternGerlach:
        scenario.stern_gerlach.theta = field.at("theta").get<double>();
        scenario.stern_gerlach.separation = field.at("separation").get<double>();
        scenario.stern_gerlach.packet_width = field.at("packet_width").get<double>();
        break;
      case FieldModel::kAngularRing:
        scenario.ring.profile = field.at("profile").get<std::string>();
        scenario.ring.theta_min = field.at("theta_min").get<double>();
        scenario.ring.theta_max = field.at("theta_max").get<double>();
        scenario.ring.amplitude = ring_profile(scenario.ring.profile);
        break;
      case FieldModel::kWignerChain:
        scenario.wigner.stages = field.at("stages").get<int>();
        scenario.wigner.theta = field.at("theta").get<double>();
        scenario.wigner.separation = field.at("separation").get<double>();
        scenario.wigner.packet_width = field.at("packet_width").get<double>();
        scenario.wigner.sigma_cl = field.at("sigma_cl").get<double>();
        scenario.wigner.clusters_per_stage = field.at("clusters_per_stage").get<int>();
        break;
    }
    if (scenario.model != FieldModel::kWignerChain) {
      const json& screen = j.at("screen");
      scenario.screen.window = rect_from_json(screen.at("window"));
      scenario.screen.rho = screen.at("rho").get<double>();
      scenario.screen.sigma_cl = screen.at("sigma_cl").get<double>();
      scenario.screen.eta = screen.at("eta").get<double>();
      scenario.screen.tilt_x = screen.value("tilt_x", 0.0);
      scenario.screen.tilt_z = screen.value("tilt_z", 0.0);
    }
    if (j.contains("constants")) {
      const json& constants = j.at("constants");
      const json& alpha = constants.at("alpha_s");
      if (alpha.is_string()) {
        const std::string mode = alpha.get<std::string>();
        if (mode == "rounded") {
          scenario.constants = Constants::rounded();
        } else if (mode == "codata") {
          scenario.constants = Constants::codata();
        } else {
          throw std::runtime_error("scenario constants.alpha_s: unknown mode '" + mode + "'");
        }
      } else {
        scenario.constants.alpha_s = alpha.get<double>();
      }
    }
    if (j.contains("regions")) {
      for (const json& region : j.at("regions")) {
        scenario.regions.push_back(
            {region.at("label").get<std::string>(), rect_from_json(region.at("window"))});
      }
    }
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("scenario parse: ") + e.what());
  }
  validate_scenario(scenario);
  return scenario;
}

std::string canonical_scenario_json(const ScenarioConfig& scenario) {
  json j;
  j["name"] = scenario.name;
  j["model"] = model_name(scenario.model);
  json field;
  switch (scenario.model) {
    case FieldModel::kDoubleSlit:
      field["slit_separation"] = scenario.double_slit.slit_separation;
      field["slit_width"] = scenario.double_slit.slit_width;
      field["wavelength"] = scenario.double_slit.wavelength;
      field["screen_distance"] = scenario.double_slit.screen_distance;
      break;
    case FieldModel::kSternGerlach:
      field["theta"] = scenario.stern_gerlach.theta;
      field["separation"] = scenario.stern_gerlach.separation;
      field["packet_width"] = scenario.stern_gerlach.packet_width;
      break;
    case FieldModel::kAngularRing:
      field["profile"] = scenario.ring.profile;
      field["theta_min"] = scenario.ring.theta_min;
      field["theta_max"] = scenario.ring.theta_max;
      break;
    case FieldModel::kWignerChain:
      field["stages"] = scenario.wigner.stages;
      field["theta"] = scenario.wigner.theta;
      field["separation"] = scenario.wigner.separation;
      field["packet_width"] = scenario.wigner.packet_width;
      field["sigma_cl"] = scenario.wigner.sigma_cl;
      field["clusters_per_stage"] = scenario.wigner.clusters_per_stage;
      break;
  }
  j["field"] = field;
  if (scenario.model != FieldModel::kWignerChain) {
    json screen;
    screen["window"] = rect_to_json(scenario.screen.window);
    screen["rho"] = scenario.screen.rho;
    screen["sigma_cl"] = scenario.screen.sigma_cl;
    screen["eta"] = scenario.screen.eta;
    screen["tilt_x"] = scenario.screen.tilt_x;
    screen["tilt_z"] = scenario.screen.tilt_z;
    j["screen"] = screen;
  }
  if (scenario.constants.alpha_s == Constants::rounded().alpha_s) {
    j["constants"] = json{{"alpha_s", "rounded"}};
  } else if (scenario.constants.alpha_s == Constants::codata().alpha_s) {
    j["constants"] = json{{"alpha_s", "codata"}};
  } else {
    j["constants"] = json{{"alpha_s", scenario.constants.alpha_s}};
  }
  json regions = json::array();
  for (const RegionSpec& region : scenario.regions) {
    regions.push_back(json{{"label", region.label}, {"window", rect_to_json(region.region)}});
  }
  j["regions"] = regions;
  return j.dump();
}

// --- Wigner chain -------------------------------------------------------------

namespace {

/// Closed-form branch-pair density at the stage screen: two Gaussian branches at
/// x = +-separation/2 with real amplitude weights (coherent sum; the branches are
/// far enough apart that the cross term is negligible).
struct StagePacket {
  double c_plus = 1.0;
  double c_minus = 0.0;
  double half_separation = 0.0;
  double width = 1.0;

  double density(double x, double z) const {
    const double inv4s2 = 1.0 / (4.0 * width * width);
    const double prefactor = 1.0 / std::sqrt(kTwoPi * width * width);
    const double dxp = x - half_separation;
    const double dxm = x + half_separation;
    const double amp = c_plus * prefactor * std::exp(-(dxp * dxp + z * z) * inv4s2) +
                       c_minus * prefactor * std::exp(-(dxm * dxm + z * z) * inv4s2);
    return amp * amp;
  }
};

}  // namespace

WignerChainResult run_wigner_chain(int n_stages, std::uint64_t master_seed, long trials,
                                   const WignerChainParams& params, const Constants& constants) {
  if (n_stages < 2) throw std::invalid_argument("run_wigner_chain: n_stages must be >= 2");
  if (n_stages > 60) throw std::invalid_argument("run_wigner_chain: n_stages must be <= 60");
  if (trials < 1) throw std::invalid_argument("run_wigner_chain: trials must be >= 1");
  if (params.clusters_per_stage < 2) {
    throw std::invalid_argument("run_wigner_chain: need at least 2 clusters per stage");
  }
  if (!(params.separation > 4.0 * params.packet_width)) {
    throw std::invalid_argument("run_wigner_chain: separation too small for packet_width");
  }

  const double sp = params.packet_width;
  const Rect window{-(0.5 * params.separation + 2.5 * sp), 0.5 * params.separation + 2.5 * sp,
                    -2.5 * sp, 2.5 * sp};
  const double a_cl = params.sigma_cl * params.sigma_cl;
  const double half_phase_window = 0.5 * constants.alpha_s;
  const int n = params.clusters_per_stage;

  const SeededStream packet_stream(master_seed, kStreamChainPacket);
  const SeededStream geometry_base(master_seed, kStreamChainGeometry);
  const SeededStream phase_base(master_seed, kStreamChainPhases);

  WignerChainResult result;
  result.plus_counts.assign(static_cast<std::size_t>(n_stages), 0);
  result.plus_frequency.assign(static_cast<std::size_t>(n_stages), 0.0);

  std::vector<double> xs(static_cast<std::size_t>(n));
  std::vector<double> ks(static_cast<std::size_t>(n));

  const long max_attempts = params.max_attempt_factor * trials;
  while (result.completed < trials) {
    if (result.attempted >= max_attempts) {
      throw std::runtime_error("run_wigner_chain: chain completion rate too low");
    }
    const std::uint64_t attempt = static_cast<std::uint64_t>(result.attempted);
    ++result.attempted;

    // One packet phase per chain, conserved through every contraction.
    const double alpha1 = kTwoPi * packet_stream.at(attempt);
    std::vector<signed char> outcomes;
    outcomes.reserve(static_cast<std::size_t>(n_stages));
    bool abandoned = false;

    for (int stage = 0; stage < n_stages && !abandoned; ++stage) {
      const std::uint64_t label = attempt * 64 + static_cast<std::uint64_t>(stage);
      StagePacket packet;
      packet.half_separation = 0.5 * params.separation;
      packet.width = sp;
      if (stage == 0) {
        packet.c_plus = std::cos(0.5 * params.theta);
        packet.c_minus = std::sin(0.5 * params.theta);
      } else {
        // Re-preparation after the axis change: equal branch weights.
        packet.c_plus = 1.0 / std::sqrt(2.0);
        packet.c_minus = 1.0 / std::sqrt(2.0);
      }

      SeededStream geometry = geometry_base.fork(label);
      double max_k = 0.0;
      for (int jdx = 0; jdx < n; ++jdx) {
        const double x = window.x_min + geometry.next() * window.width();
        const double z = window.z_min + geometry.next() * window.height();
        xs[static_cast<std::size_t>(jdx)] = x;
        const double k = std::min(1.0, a_cl * packet.density(x, z));
        ks[static_cast<std::size_t>(jdx)] = k;
        max_k = std::max(max_k, k);
      }

      // Smallest matching alpha2 reachable for this alpha1; below it no cluster
      // can satisfy the overlap condition on any refresh.
      double min_alpha2 = alpha1 - half_phase_window;
      if (min_alpha2 < 0.0 || alpha1 + half_phase_window >= kTwoPi) min_alpha2 = 0.0;
      if (max_k < min_alpha2 / kTwoPi) {
        abandoned = true;
        break;
      }

      const SeededStream phases = phase_base.fork(label);
      const std::uint64_t phase_word_base = phases.base();
      bool fired = false;
      for (long round = 0; round < params.max_refresh_rounds && !fired; ++round) {
        const std::uint64_t offset = static_cast<std::uint64_t>(round) * n;
        for (int jdx = 0; jdx < n; ++jdx) {
          const std::uint64_t word = detail::mix64(
              phase_word_base + (offset + static_cast<std::uint64_t>(jdx) + 1) * detail::kGoldenGamma);
          const double a2 = kTwoPi * (static_cast<double>(word >> 11) * 0x1.0p-53);
          double dist = alpha1 > a2 ? alpha1 - a2 : a2 - alpha1;
          if (dist > kTwoPi - dist) dist = kTwoPi - dist;
          if (dist > half_phase_window) continue;
          if (ks[static_cast<std::size_t>(jdx)] >= a2 / kTwoPi) {
            outcomes.push_back(xs[static_cast<std::size_t>(jdx)] >= 0.0 ? 1 : -1);
            fired = true;
            break;
          }
        }
      }
      if (!fired) abandoned = true;
    }

    if (abandoned) continue;
    for (int stage = 0; stage < n_stages; ++stage) {
      if (outcomes[static_cast<std::size_t>(stage)] > 0) {
        ++result.plus_counts[static_cast<std::size_t>(stage)];
      }
    }
    result.outcomes.push_back(std::move(outcomes));
    ++result.completed;
  }

  for (int stage = 0; stage < n_stages; ++stage) {
    result.plus_frequency[static_cast<std::size_t>(stage)] =
        static_cast<double>(result.plus_counts[static_cast<std::size_t>(stage)]) /
        static_cast<double>(result.completed);
  }
  return result;
}

}  // namespace phasesim
