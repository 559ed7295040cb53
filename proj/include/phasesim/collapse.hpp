#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "phasesim/phases.hpp"
#include "phasesim/screen.hpp"
#include "phasesim/wavepacket.hpp"

namespace phasesim {

struct ScenarioConfig;

/// Fixed constants of the contraction criterion. The phase-matching window is
/// the fine-structure constant; sections and c1 are derived from it.
struct Constants {
  double alpha_s = 0.0072973525693;  // CODATA 2018 fine-structure constant

  /// Number of phase sections of size alpha_s in the full circle, round(2*pi/alpha_s).
  int sections() const { return static_cast<int>(std::llround(kTwoPi / alpha_s)); }

  /// Occupancy rate constant -ln(1 - 1/sections), about 1/860.5 for 861 sections.
  double c1() const { return -std::log1p(-1.0 / sections()); }

  static Constants codata() { return Constants{}; }

  /// Rounded value quoted alongside 1/137; yields the same 861 sections.
  static Constants rounded() { return Constants{0.00730}; }
};

enum class ScanPolicy {
  kContinue,          // a failed overlap test lets the scan move on to later clusters
  kStopAtFirstMatch,  // a failed overlap test ends the trial without a contraction
};

enum class CoverageMode { kPointwise, kExact };

struct TrialOptions {
  ScanPolicy scan_policy = ScanPolicy::kContinue;
  CoverageMode coverage = CoverageMode::kPointwise;
};

/// Outcome of one trial: the witnesses of the two criterion conditions at the
/// cluster where the contraction occurred.
struct SpotRecord {
  long trial_id = 0;
  int cluster_index = -1;
  double x = 0.0;
  double z = 0.0;
  PhaseConstant alpha1;
  PhaseConstant alpha2;
  double coverage_k = 0.0;
  bool registered = false;  // spot formed, i.e. the cluster was sensitive
  int scan_length = 0;      // clusters examined up to and including the match
};

/// Phase-matching condition: |alpha1 - alpha2| <= alpha_s / 2 modulo 2*pi,
/// boundary inclusive.
inline bool phase_matches(PhaseConstant alpha1, PhaseConstant alpha2, const Constants& constants) {
  return circular_distance(alpha1, alpha2) <= 0.5 * constants.alpha_s;
}

/// Degree of coverage of the cluster by the packet density, clamped to [0, 1].
/// Pointwise mode uses area * density at the cluster centre (mean-value
/// approximation); exact mode integrates density against the cluster envelope.
double coverage_k(const Superposition& psi_s, const Cluster& cluster, CoverageMode mode);

/// Overlap condition: K >= alpha2 / 2*pi, boundary inclusive.
inline bool overlap_condition(double coverage, PhaseConstant alpha2) {
  return coverage >= alpha2.value() / kTwoPi;
}

/// Scans clusters in arrival order and applies the two-condition criterion.
/// At most one contraction per trial; absence is a valid outcome. The packet's
/// phase constant (alpha1) is taken from the superposition.
std::optional<SpotRecord> run_trial(const Superposition& psi_s, const Screen& screen,
                                    const Constants& constants, long trial_id,
                                    const TrialOptions& options = {});

struct EnsembleOptions {
  TrialOptions trial;
  int threads = 1;
  int histogram_bins = 32;
};

struct EnsembleSummary {
  long n_trials = 0;
  long n_contractions = 0;
  long n_registered = 0;
  double contraction_fraction = 0.0;
  double registered_fraction = 0.0;
  double mean_coverage = 0.0;      // over contractions
  double mean_scan_length = 0.0;   // over all trials
  double sensitive_fraction = 0.0; // of the generated screen
  double zeta = 0.0;               // rho * a_cl * (alpha_s / 2*pi) * eta
  bool screen_overpacked = false;
  long cluster_count = 0;
  int histogram_bins = 0;
  std::vector<long> x_histogram;   // registered spots over the window
};

struct EnsembleResult {
  std::vector<SpotRecord> records;  // in trial order
  EnsembleSummary summary;
};

/// Stream ids used to derive every random quantity of an ensemble from the
/// master seed. Trial t draws a fresh packet phase and sees a fresh screen
/// generated from the geometry stream's fork(t).
inline constexpr std::uint64_t kStreamScreenGeometry = 11;
inline constexpr std::uint64_t kStreamPacketPhase = 12;

/// Screen seen by trial t of an ensemble: a full regeneration (positions,
/// phases, sensitivity flags) from the per-trial sub-stream. The screen is
/// different for every incoming packet; a screen frozen between trials would
/// confine spots to the few clusters earliest in arrival order and distort the
/// spot statistics away from the packet density.
Screen ensemble_trial_screen(const ScenarioConfig& scenario, std::uint64_t master_seed,
                             long trial_id);

/// Runs n_trials independent trials of the scenario. The result is a pure
/// function of (scenario, n_trials, master_seed); the thread count changes
/// nothing. Trial t uses the packet phase at stream position t and the screen
/// ensemble_trial_screen(scenario, master_seed, t).
EnsembleResult ensemble_run(const ScenarioConfig& scenario, long n_trials,
                            std::uint64_t master_seed, const EnsembleOptions& options = {});

}  // namespace phasesim
