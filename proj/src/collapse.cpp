#include "phasesim/collapse.hpp"

#include <algorithm>
#include <atomic>
#include <future>
#include <stdexcept>

#include "phasesim/quadrature.hpp"
#include "phasesim/scenario.hpp"

namespace phasesim {

double coverage_k(const Superposition& psi_s, const Cluster& cluster, CoverageMode mode) {
  double k = 0.0;
  if (mode == CoverageMode::kPointwise) {
    k = cluster.area * psi_s.density(cluster.x, cluster.z);
  } else {
    const double sigma = cluster_envelope_sigma(cluster);
    Rect box{cluster.x - 8.0 * sigma, cluster.x + 8.0 * sigma, cluster.z - 8.0 * sigma,
             cluster.z + 8.0 * sigma};
    const Rect& domain = psi_s.norm_domain();
    box.x_min = std::max(box.x_min, domain.x_min);
    box.x_max = std::min(box.x_max, domain.x_max);
    box.z_min = std::max(box.z_min, domain.z_min);
    box.z_max = std::min(box.z_max, domain.z_max);
    if (box.width() <= 0.0 || box.height() <= 0.0) return 0.0;
    k = integrate_2d(
        [&](double x, double z) { return psi_s.density(x, z) * cluster_envelope(cluster, x, z); },
        box, 384, 384);
  }
  return std::clamp(k, 0.0, 1.0);
}

std::optional<SpotRecord> run_trial(const Superposition& psi_s, const Screen& screen,
                                    const Constants& constants, long trial_id,
                                    const TrialOptions& options) {
  const PhaseConstant alpha1 = psi_s.phase_constant();
  int scanned = 0;
  const bool flat = screen.tilt_x == 0.0 && screen.tilt_z == 0.0;
  std::vector<int> order;
  if (!flat) order = arrival_order(screen, psi_s.as_field());
  const std::size_t n = screen.clusters.size();
  for (std::size_t pos = 0; pos < n; ++pos) {
    const Cluster& cluster = screen.clusters[flat ? pos : static_cast<std::size_t>(order[pos])];
    ++scanned;
    if (!phase_matches(alpha1, cluster.alpha2, constants)) continue;
    const double k = coverage_k(psi_s, cluster, options.coverage);
    if (overlap_condition(k, cluster.alpha2)) {
      SpotRecord record;
      record.trial_id = trial_id;
      record.cluster_index = cluster.index;
      record.x = cluster.x;
      record.z = cluster.z;
      record.alpha1 = alpha1;
      record.alpha2 = cluster.alpha2;
      record.coverage_k = k;
      record.registered = cluster.sensitive;
      record.scan_length = scanned;
      return record;
    }
    if (options.scan_policy == ScanPolicy::kStopAtFirstMatch) return std::nullopt;
  }
  return std::nullopt;
}

namespace {

struct BlockStats {
  std::vector<SpotRecord> records;
  long scan_length_sum = 0;
};

}  // namespace

Screen ensemble_trial_screen(const ScenarioConfig& scenario, std::uint64_t master_seed,
                             long trial_id) {
  Screen screen = generate_screen(
      scenario.screen.window, scenario.screen.rho, scenario.screen.sigma_cl, scenario.screen.eta,
      SeededStream(master_seed, kStreamScreenGeometry).fork(static_cast<std::uint64_t>(trial_id)));
  screen.tilt_x = scenario.screen.tilt_x;
  screen.tilt_z = scenario.screen.tilt_z;
  return screen;
}

EnsembleResult ensemble_run(const ScenarioConfig& scenario, long n_trials,
                            std::uint64_t master_seed, const EnsembleOptions& options) {
  if (n_trials < 1) {
    throw std::invalid_argument("ensemble_run: n_trials must be at least 1");
  }

  const Superposition psi = build_field(scenario);
  const Constants constants = scenario.constants;
  const Rect& window = scenario.screen.window;
  const auto n_clusters =
      static_cast<std::size_t>(std::llround(scenario.screen.rho * window.area()));
  if (n_clusters == 0) {
    throw std::invalid_argument("ensemble_run: scenario screen has no clusters");
  }
  const double sigma_cl = scenario.screen.sigma_cl;
  const double a_cl = sigma_cl * sigma_cl;
  const double eta = scenario.screen.eta;
  const bool flat = scenario.screen.tilt_x == 0.0 && scenario.screen.tilt_z == 0.0;
  const bool pointwise = options.trial.coverage == CoverageMode::kPointwise;

  const SeededStream packet_stream(master_seed, kStreamPacketPhase);
  const SeededStream geometry_stream(master_seed, kStreamScreenGeometry);
  const double half_window = 0.5 * constants.alpha_s;
  const ScanPolicy policy = options.trial.scan_policy;

  const long block_size = 4096;
  const long n_blocks = (n_trials + block_size - 1) / block_size;
  std::vector<BlockStats> blocks(static_cast<std::size_t>(n_blocks));

  // Streaming equivalent of generate_screen + run_trial for flat screens:
  // the counter-based stream lets the scan read exactly the draws it needs
  // (every cluster's phase; position and flag only at a matching cluster).
  auto run_trial_streaming = [&](long t, BlockStats& stats) {
    const double a1 = kTwoPi * packet_stream.at(static_cast<std::uint64_t>(t));
    const SeededStream trial_stream = geometry_stream.fork(static_cast<std::uint64_t>(t));
    const SeededStream positions = trial_stream.fork(kSubstreamPositions);
    const std::uint64_t phase_base = trial_stream.fork(kSubstreamPhases).base();
    const SeededStream flags = trial_stream.fork(kSubstreamFlags);
    int scanned = 0;
    for (std::size_t j = 0; j < n_clusters; ++j) {
      ++scanned;
      const std::uint64_t word = detail::mix64(phase_base + (j + 1) * detail::kGoldenGamma);
      const double a2 = kTwoPi * (static_cast<double>(word >> 11) * 0x1.0p-53);
      double dist = a1 > a2 ? a1 - a2 : a2 - a1;
      if (dist > kTwoPi - dist) dist = kTwoPi - dist;
      if (dist > half_window) continue;

      const double x = window.x_min + positions.at(2 * j) * window.width();
      const double z = window.z_min + positions.at(2 * j + 1) * window.height();
      double k;
      if (pointwise) {
        k = std::clamp(a_cl * psi.density(x, z), 0.0, 1.0);
      } else {
        Cluster cluster;
        cluster.index = static_cast<int>(j);
        cluster.x = x;
        cluster.z = z;
        cluster.sigma_cl = sigma_cl;
        cluster.area = a_cl;
        k = coverage_k(psi, cluster, CoverageMode::kExact);
      }
      if (k >= a2 / kTwoPi) {
        SpotRecord record;
        record.trial_id = t;
        record.cluster_index = static_cast<int>(j);
        record.x = x;
        record.z = z;
        record.alpha1 = PhaseConstant(a1);
        record.alpha2 = PhaseConstant(a2);
        record.coverage_k = k;
        record.registered = flags.at(j) < eta;
        record.scan_length = scanned;
        stats.records.push_back(record);
        break;
      }
      if (policy == ScanPolicy::kStopAtFirstMatch) break;
    }
    stats.scan_length_sum += scanned;
  };

  // Tilted screens need the full arrival ordering; materialize those.
  auto run_trial_materialized = [&](long t, BlockStats& stats) {
    const Superposition psi_t = psi.with_phase_constant(
        PhaseConstant(kTwoPi * packet_stream.at(static_cast<std::uint64_t>(t))));
    const Screen screen = ensemble_trial_screen(scenario, master_seed, t);
    const auto record = run_trial(psi_t, screen, constants, t, options.trial);
    if (record.has_value()) {
      stats.records.push_back(*record);
      stats.scan_length_sum += record->scan_length;
    } else {
      stats.scan_length_sum += static_cast<long>(screen.clusters.size());
    }
  };

  auto run_block = [&](long block) {
    BlockStats& stats = blocks[static_cast<std::size_t>(block)];
    const long t_begin = block * block_size;
    const long t_end = std::min(n_trials, t_begin + block_size);
    for (long t = t_begin; t < t_end; ++t) {
      if (flat) {
        run_trial_streaming(t, stats);
      } else {
        run_trial_materialized(t, stats);
      }
    }
  };

  const int threads = std::max(1, options.threads);
  if (threads == 1) {
    for (long block = 0; block < n_blocks; ++block) run_block(block);
  } else {
    std::atomic<long> next_block{0};
    auto worker = [&]() {
      for (;;) {
        const long block = next_block.fetch_add(1);
        if (block >= n_blocks) return;
        run_block(block);
      }
    };
    std::vector<std::future<void>> futures;
    futures.reserve(static_cast<std::size_t>(threads));
    for (int i = 0; i < threads; ++i) {
      futures.push_back(std::async(std::launch::async, worker));
    }
    for (auto& f : futures) f.get();
  }

  EnsembleResult result;
  long scan_sum = 0;
  for (const BlockStats& stats : blocks) {
    result.records.insert(result.records.end(), stats.records.begin(), stats.records.end());
    scan_sum += stats.scan_length_sum;
  }

  EnsembleSummary& summary = result.summary;
  summary.n_trials = n_trials;
  summary.n_contractions = static_cast<long>(result.records.size());
  summary.histogram_bins = options.histogram_bins;
  summary.x_histogram.assign(static_cast<std::size_t>(options.histogram_bins), 0);
  summary.cluster_count = static_cast<long>(n_clusters);
  summary.screen_overpacked =
      static_cast<double>(n_clusters) * a_cl > kPackingBound * window.area();

  {
    const Screen first = ensemble_trial_screen(scenario, master_seed, 0);
    long sensitive = 0;
    for (const Cluster& cluster : first.clusters) sensitive += cluster.sensitive ? 1 : 0;
    summary.sensitive_fraction =
        static_cast<double>(sensitive) / static_cast<double>(first.clusters.size());
  }

  double coverage_sum = 0.0;
  for (const SpotRecord& record : result.records) {
    coverage_sum += record.coverage_k;
    if (!record.registered) continue;
    ++summary.n_registered;
    auto bin = static_cast<long>((record.x - window.x_min) / window.width() *
                                 options.histogram_bins);
    bin = std::clamp(bin, 0L, static_cast<long>(options.histogram_bins) - 1);
    ++summary.x_histogram[static_cast<std::size_t>(bin)];
  }
  summary.contraction_fraction =
      static_cast<double>(summary.n_contractions) / static_cast<double>(n_trials);
  summary.registered_fraction =
      static_cast<double>(summary.n_registered) / static_cast<double>(n_trials);
  summary.mean_coverage =
      summary.n_contractions > 0 ? coverage_sum / static_cast<double>(summary.n_contractions) : 0.0;
  summary.mean_scan_length = static_cast<double>(scan_sum) / static_cast<double>(n_trials);
  summary.zeta = scenario.screen.rho * scenario.screen.sigma_cl * scenario.screen.sigma_cl *
                 (constants.alpha_s / kTwoPi) * scenario.screen.eta;
  return result;
}

}  // namespace phasesim
