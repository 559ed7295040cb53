#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "phasesim/collapse.hpp"
#include "phasesim/geometry.hpp"
#include "phasesim/wavepacket.hpp"

namespace phasesim {

/// Labelled spatial region; a spot inside it counts as the associated eigenvalue.
struct RegionSpec {
  std::string label;
  Rect region;
};

enum class FieldModel { kDoubleSlit, kSternGerlach, kAngularRing, kWignerChain };

struct DoubleSlitParams {
  double slit_separation = 1.0e-6;
  double slit_width = 5.0e-8;
  double wavelength = 5.4e-12;  // 50 keV electrons
  double screen_distance = 1.0;
};

struct SternGerlachParams {
  double theta = 0.0;  // preparation angle; weights are cos^2, sin^2 of theta/2
  double separation = 8.0e-5;
  double packet_width = 1.0e-5;
};

struct AngularRingParams {
  std::string profile = "isotropic";  // isotropic | cos
  double theta_min = 0.0;
  double theta_max = kTwoPi;
  std::function<Complex(double)> amplitude;  // optional custom profile
};

struct WignerChainParams {
  int stages = 10;
  double theta = 0.0;  // stage-1 preparation angle
  double separation = 8.0e-6;
  double packet_width = 1.0e-6;
  double sigma_cl = 3.0e-6;
  int clusters_per_stage = 64;
  long max_refresh_rounds = 5'000'000;
  long max_attempt_factor = 1000;  // abort if attempts exceed factor * trials
};

struct ScreenSpec {
  Rect window;
  double rho = 0.0;       // clusters per m^2
  double sigma_cl = 1e-9; // cluster linear size
  double eta = 1.0;
  double tilt_x = 0.0;
  double tilt_z = 0.0;
};

/// Full declarative description of one experiment.
struct ScenarioConfig {
  std::string name;
  FieldModel model = FieldModel::kDoubleSlit;
  DoubleSlitParams double_slit;
  SternGerlachParams stern_gerlach;
  AngularRingParams ring;
  WignerChainParams wigner;
  ScreenSpec screen;
  Constants constants;
  std::vector<RegionSpec> regions;  // pairwise disjoint
};

/// Double-slit scenario: fringe field over a flat screen, no region map.
ScenarioConfig build_double_slit(const DoubleSlitParams& params = {});

/// Stern-Gerlach scenario: two disjoint Gaussian branches with weights
/// cos^2(theta/2) and sin^2(theta/2); half-plane regions labelled +1/2 and -1/2.
/// Requires separation > 4 * packet_width.
ScenarioConfig build_stern_gerlach(double theta, double separation, double packet_width);

/// Scattering shell reduced to a 1-D angular ring: the screen x coordinate is
/// the polar angle and |f(theta)|^2 plays the role of the packet density.
ScenarioConfig build_scattering_shell(std::function<Complex(double)> angular_amplitude,
                                      double theta_min, double theta_max,
                                      const std::string& profile_name = "custom");

/// Named ring profile used by config files ("isotropic" or "cos").
std::function<Complex(double)> ring_profile(const std::string& name);

/// Materializes the scenario's field as a superposition with zero phase constant.
Superposition build_field(const ScenarioConfig& scenario);

/// Branch coefficients of a Stern-Gerlach preparation (cos(theta/2), sin(theta/2)).
std::vector<Complex> stern_gerlach_coefficients(double theta);

/// Validates cross-field invariants (disjoint regions, positive geometry).
/// Throws std::invalid_argument naming the offending field.
void validate_scenario(const ScenarioConfig& scenario);

// --- serialization -----------------------------------------------------------

/// Parses a scenario from JSON text. Throws std::runtime_error on malformed
/// JSON or schema violations (a config parse error, distinct from precondition
/// violations raised by the builders).
ScenarioConfig parse_scenario_json(const std::string& text);

/// Canonical JSON encoding: sorted keys, no whitespace. Equal configurations
/// produce equal bytes, which is what the run manifest digests.
std::string canonical_scenario_json(const ScenarioConfig& scenario);

// --- Wigner chain -------------------------------------------------------------

inline constexpr std::uint64_t kStreamChainPacket = 21;
inline constexpr std::uint64_t kStreamChainGeometry = 22;
inline constexpr std::uint64_t kStreamChainPhases = 23;

struct WignerChainResult {
  long completed = 0;                        // chains with an outcome at every stage
  long attempted = 0;                        // chains started
  std::vector<long> plus_counts;             // per stage, over completed chains
  std::vector<double> plus_frequency;        // per stage
  std::vector<std::vector<signed char>> outcomes;  // per chain: +1/-1 per stage
};

/// Runs Stern-Gerlach apparatuses in series with axes alternating between z and
/// x. The packet's phase constant is drawn once per chain and conserved through
/// every contraction; each stage sees a fresh screen (fresh geometry and fresh
/// pseudorandom cluster phases), which is what keeps outcomes random from stage
/// to stage. A stage with no reachable cluster abandons the chain; `trials`
/// counts completed chains.
WignerChainResult run_wigner_chain(int n_stages, std::uint64_t master_seed, long trials,
                                   const WignerChainParams& params = {},
                                   const Constants& constants = {});

}  // namespace phasesim
