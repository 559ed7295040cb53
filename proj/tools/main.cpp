#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "phasesim/analysis.hpp"
#include "phasesim/collapse.hpp"
#include "phasesim/io.hpp"
#include "phasesim/legacy_grid.hpp"
#include "phasesim/scenario.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace phasesim;

constexpr const char* kToolVersion = "0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitPrecondition = 3;
constexpr int kExitBudget = 4;

struct ParseFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseFailure("cannot read file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  out << content;
}

void write_manifest(const fs::path& out_dir, const std::string& command,
                    const std::string& config_digest, std::uint64_t seed, const json& flags,
                    const std::vector<std::string>& outputs) {
  json manifest;
  manifest["command"] = command;
  manifest["config_digest"] = config_digest;
  manifest["master_seed"] = seed;
  manifest["tool_version"] = kToolVersion;
  manifest["created_utc"] = iso8601_utc_now();
  manifest["flags"] = flags;
  manifest["outputs"] = outputs;
  write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
}

std::string spots_csv_text(const std::vector<SpotRecord>& records) {
  std::ostringstream out;
  out << "trial_id,cluster_index,x,z,alpha1,alpha2,K,registered,scan_length\n";
  for (const SpotRecord& r : records) {
    out << r.trial_id << ',' << r.cluster_index << ',' << format_double(r.x) << ','
        << format_double(r.z) << ',' << format_double(r.alpha1.value()) << ','
        << format_double(r.alpha2.value()) << ',' << format_double(r.coverage_k) << ','
        << (r.registered ? 1 : 0) << ',' << r.scan_length << '\n';
  }
  return out.str();
}

std::vector<SpotRecord> read_spots_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseFailure("cannot read spots file: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ParseFailure("spots file is empty: " + path.string());
  std::vector<SpotRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    SpotRecord r;
    double a1 = 0.0, a2 = 0.0;
    int registered = 0;
    if (!(row >> r.trial_id >> r.cluster_index >> r.x >> r.z >> a1 >> a2 >> r.coverage_k >>
          registered >> r.scan_length)) {
      throw ParseFailure("malformed spots row: " + line);
    }
    r.alpha1 = PhaseConstant(a1);
    r.alpha2 = PhaseConstant(a2);
    r.registered = registered != 0;
    records.push_back(r);
  }
  return records;
}

json summary_json(const EnsembleSummary& summary) {
  json j;
  j["n_trials"] = summary.n_trials;
  j["n_contractions"] = summary.n_contractions;
  j["n_registered"] = summary.n_registered;
  j["contraction_fraction"] = summary.contraction_fraction;
  j["registered_fraction"] = summary.registered_fraction;
  j["mean_coverage"] = summary.mean_coverage;
  j["mean_scan_length"] = summary.mean_scan_length;
  j["sensitive_fraction"] = summary.sensitive_fraction;
  j["zeta"] = summary.zeta;
  j["cluster_count"] = summary.cluster_count;
  j["screen_overpacked"] = summary.screen_overpacked;
  j["histogram_bins"] = summary.histogram_bins;
  j["x_histogram"] = summary.x_histogram;
  return j;
}

std::string gof_report_csv(const GofReport& report) {
  std::ostringstream out;
  out << "bin_lo,bin_hi,observed,expected\n";
  for (const GofBin& bin : report.bins) {
    out << format_double(bin.lo) << ',' << format_double(bin.hi) << ','
        << format_double(bin.observed) << ',' << format_double(bin.expected) << '\n';
  }
  return out.str();
}

json gof_report_json(const GofReport& report) {
  json j;
  j["method"] = report.method;
  j["statistic"] = report.statistic;
  j["dof"] = report.dof;
  j["p_value"] = report.p_value;
  j["n_samples"] = report.n_samples;
  j["outside_count"] = report.outside_count;
  if (!report.labels.empty()) {
    json freq = json::object();
    for (std::size_t i = 0; i < report.labels.size(); ++i) {
      freq[report.labels[i]] =
          report.bins[i].observed / static_cast<double>(report.n_samples);
    }
    j["frequencies"] = freq;
  }
  return j;
}

int cmd_run(const std::string& scenario_path, long trials, std::uint64_t seed,
            const std::string& out, const std::string& scan_policy, const std::string& coverage,
            int threads, int bins, bool export_clusters) {
  const std::string text = read_file(scenario_path);
  const ScenarioConfig scenario = parse_scenario_json(text);
  const std::string canonical = canonical_scenario_json(scenario);
  const std::string digest = hex_digest(fnv1a64(canonical));

  const fs::path out_dir(out);
  // Options that determine the data outputs; worker threads are not one of them.
  json semantic_flags;
  semantic_flags["trials"] = trials;
  semantic_flags["scan_policy"] = scan_policy;
  semantic_flags["coverage"] = coverage;
  semantic_flags["histogram_bins"] = bins;
  json flags = semantic_flags;
  flags["threads"] = threads;

  if (scenario.model == FieldModel::kWignerChain) {
    const WignerChainResult chain =
        run_wigner_chain(scenario.wigner.stages, seed, trials, scenario.wigner,
                         scenario.constants);
    std::ostringstream csv;
    csv << "chain_id,stage,outcome\n";
    for (std::size_t c = 0; c < chain.outcomes.size(); ++c) {
      for (std::size_t s = 0; s < chain.outcomes[c].size(); ++s) {
        csv << c << ',' << s << ',' << static_cast<int>(chain.outcomes[c][s]) << '\n';
      }
    }
    json summary;
    summary["completed"] = chain.completed;
    summary["attempted"] = chain.attempted;
    summary["plus_counts"] = chain.plus_counts;
    summary["plus_frequency"] = chain.plus_frequency;
    summary["scenario"] = json::parse(canonical);

    fs::create_directories(out_dir);
    write_file(out_dir / "chain.csv", csv.str());
    write_file(out_dir / "summary.json", summary.dump(2) + "\n");
    write_manifest(out_dir, "run", digest, seed, flags, {"chain.csv", "summary.json"});
    return kExitOk;
  }

  EnsembleOptions options;
  options.trial.scan_policy =
      scan_policy == "stop" ? ScanPolicy::kStopAtFirstMatch : ScanPolicy::kContinue;
  options.trial.coverage = coverage == "exact" ? CoverageMode::kExact : CoverageMode::kPointwise;
  options.threads = threads;
  options.histogram_bins = bins;

  const EnsembleResult result = ensemble_run(scenario, trials, seed, options);

  json summary = summary_json(result.summary);
  summary["scenario"] = json::parse(canonical);
  summary["options"] = semantic_flags;

  std::vector<std::string> outputs = {"spots.csv", "summary.json"};
  fs::create_directories(out_dir);
  write_file(out_dir / "spots.csv", spots_csv_text(result.records));
  write_file(out_dir / "summary.json", summary.dump(2) + "\n");
  if (export_clusters) {
    // The cluster table of the first trial's screen.
    const Screen screen = ensemble_trial_screen(scenario, seed, 0);
    std::ostringstream cluster_csv;
    write_cluster_csv(screen, cluster_csv);
    write_file(out_dir / "clusters.csv", cluster_csv.str());
    outputs.push_back("clusters.csv");
    if (screen.overpacked) {
      std::cerr << "warning: clusters jointly cover more than the packing bound of the window\n";
    }
  }
  write_manifest(out_dir, "run", digest, seed, flags, outputs);
  return kExitOk;
}

int cmd_legacy(int nx, int nz, double eta, long points, std::uint64_t seed,
               const std::string& out, const std::string& field_name, long max_draws) {
  GridConfig config{field_name == "uniform" ? legacy_uniform_field() : legacy_fringe_field()};
  config.nx = nx;
  config.nz = nz;
  config.eta = eta;
  config.max_points = points;
  config.max_draws = max_draws;

  const LegacyResult result =
      legacy_buildup(config, SeededStream(seed, 1), points, [](long pts, long attempts) {
        std::cerr << "legacy: " << pts << " points after " << attempts << " draws\n";
      });
  if (!result.completed) {
    std::cerr << "error: draw budget of " << max_draws << " exhausted after "
              << result.points.size() << " points; no output written (eta too small?)\n";
    return kExitBudget;
  }

  const fs::path out_dir(out);
  fs::create_directories(out_dir);
  std::vector<std::string> outputs;
  for (const LegacyFrame& frame : result.frames) {
    std::ostringstream csv;
    csv << "x,z\n";
    for (std::size_t i = 0; i < frame.prefix_len; ++i) {
      csv << format_double(result.points[i].first) << ','
          << format_double(result.points[i].second) << '\n';
    }
    std::ostringstream name;
    name << "frame_" << frame.milestone;
    write_file(out_dir / (name.str() + ".csv"), csv.str());

    std::vector<long> counts(static_cast<std::size_t>(nx) * nz, 0);
    for (std::size_t i = 0; i < frame.prefix_len; ++i) {
      const int ci = std::min(nx - 1, static_cast<int>(result.points[i].first * nx));
      const int cj = std::min(nz - 1, static_cast<int>(result.points[i].second * nz));
      ++counts[static_cast<std::size_t>(cj) * nx + ci];
    }
    std::ostringstream pgm;
    write_pgm(pgm, counts, nx, nz);
    write_file(out_dir / (name.str() + ".pgm"), pgm.str());
    outputs.push_back(name.str() + ".csv");
    outputs.push_back(name.str() + ".pgm");
  }

  json summary;
  summary["points"] = result.points.size();
  summary["attempts"] = result.attempts;
  summary["acceptance_rate"] =
      static_cast<double>(result.points.size()) / static_cast<double>(result.attempts);
  summary["mean_ratio"] = result.mean_ratio;
  summary["eta"] = eta;
  summary["nx"] = nx;
  summary["nz"] = nz;
  summary["field"] = field_name;
  write_file(out_dir / "summary.json", summary.dump(2) + "\n");
  outputs.push_back("summary.json");

  json flags;
  flags["nx"] = nx;
  flags["nz"] = nz;
  flags["eta"] = eta;
  flags["points"] = points;
  flags["field"] = field_name;
  flags["max_draws"] = max_draws;
  write_manifest(out_dir, "legacy", "-", seed, flags, outputs);
  return kExitOk;
}

int cmd_analyze(const std::string& spots_path, const std::string& scenario_path,
                const std::string& report_kind, const std::string& out, int bins) {
  const std::vector<SpotRecord> spots = read_spots_csv(spots_path);
  const ScenarioConfig scenario = parse_scenario_json(read_file(scenario_path));
  const fs::path out_dir(out);

  GofReport report;
  if (report_kind == "born" || report_kind == "angular") {
    const WavepacketField field = build_field(scenario).as_field();
    report = born_density_test(spots, field, bins);
  } else if (report_kind == "regions") {
    if (scenario.regions.empty()) {
      throw std::invalid_argument("scenario has no region_map; the regions report requires one");
    }
    if (scenario.model != FieldModel::kSternGerlach) {
      throw std::invalid_argument("regions report requires a stern_gerlach scenario");
    }
    report = discrete_region_test(spots, scenario.regions,
                                  stern_gerlach_coefficients(scenario.stern_gerlach.theta));
  } else {
    throw ParseFailure("unknown report kind: " + report_kind);
  }

  fs::create_directories(out_dir);
  write_file(out_dir / (report_kind + "_report.json"), gof_report_json(report).dump(2) + "\n");
  write_file(out_dir / (report_kind + "_histogram.csv"), gof_report_csv(report));
  json flags;
  flags["report"] = report_kind;
  flags["bins"] = bins;
  write_manifest(out_dir, "analyze", hex_digest(fnv1a64(canonical_scenario_json(scenario))), 0,
                 flags, {report_kind + "_report.json", report_kind + "_histogram.csv"});
  std::cout << report_kind << " report: statistic=" << report.statistic << " dof=" << report.dof
            << " p_value=" << report.p_value << "\n";
  return kExitOk;
}

int cmd_appendix(const std::string& n_list, long trials, std::uint64_t seed,
                 const std::string& out, const std::string& alpha_mode) {
  Constants constants = alpha_mode == "codata" ? Constants::codata() : Constants::rounded();
  std::vector<int> ns;
  std::stringstream list(n_list);
  std::string item;
  while (std::getline(list, item, ',')) {
    if (item.empty()) continue;
    ns.push_back(std::stoi(item));
  }
  if (ns.empty()) throw ParseFailure("appendix: empty n list");

  const SeededStream stream(seed, 7);
  std::ostringstream csv;
  csv << "n,exact,linear,empirical,rel_err\n";
  std::cout << "n\texact\tlinear\tempirical\trel_err\n";
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const int n = ns[i];
    if (n < 0) throw std::invalid_argument("appendix: n must be non-negative");
    const double exact = overlap_fraction_exact(n, constants);
    const double linear = overlap_fraction_linear(n, constants, LinearConvention::kRounded);
    const double empirical =
        n == 0 ? 0.0
               : birthday_oracle(constants.sections(), n, trials, stream.fork(i));
    const double rel_err = exact > 0.0 ? std::fabs(empirical - exact) / exact : 0.0;
    csv << n << ',' << format_double(exact) << ',' << format_double(linear) << ','
        << format_double(empirical) << ',' << format_double(rel_err) << '\n';
    std::cout << n << '\t' << exact << '\t' << linear << '\t' << empirical << '\t' << rel_err
              << "\n";
  }

  const fs::path out_dir(out);
  fs::create_directories(out_dir);
  write_file(out_dir / "appendix.csv", csv.str());
  json flags;
  flags["n_list"] = n_list;
  flags["trials"] = trials;
  flags["alpha_s"] = alpha_mode;
  write_manifest(out_dir, "appendix", "-", seed, flags, {"appendix.csv"});
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"phasesim: deterministic phase-constant collapse simulator"};
  app.require_subcommand(1);

  std::string scenario_path, out = "out", scan_policy = "continue", coverage = "pointwise";
  std::string report_kind = "born", field_name = "fringes", n_list = "1,10,90,500";
  std::string alpha_mode = "rounded", spots_path;
  long trials = 1000, points = 10000, max_draws = 200'000'000;
  std::uint64_t seed = 0;
  int threads = 1, bins = 48, nx = 256, nz = 256;
  double eta = 1.0;
  bool export_clusters = false;

  CLI::App* run = app.add_subcommand("run", "run a scenario ensemble");
  run->add_option("scenario", scenario_path, "scenario JSON file")->required();
  run->add_option("--trials", trials, "number of trials")->required();
  run->add_option("--seed", seed, "master seed (decimal or 0x-hex)")->required();
  run->add_option("--out", out, "output directory")->required();
  run->add_option("--scan-policy", scan_policy, "continue|stop")
      ->check(CLI::IsMember({"continue", "stop"}));
  run->add_option("--coverage", coverage, "pointwise|exact")
      ->check(CLI::IsMember({"pointwise", "exact"}));
  run->add_option("--threads", threads, "worker threads (does not change outputs)");
  run->add_option("--bins", bins, "summary histogram bins");
  run->add_flag("--export-clusters", export_clusters, "also write the cluster table CSV");

  CLI::App* legacy = app.add_subcommand("legacy", "run the grid reference simulation");
  legacy->add_option("--nx", nx, "areas along x")->required();
  legacy->add_option("--nz", nz, "areas along z")->required();
  legacy->add_option("--eta", eta, "sensitivity factor in [0,1]")->required();
  legacy->add_option("--points", points, "points to accumulate")->required();
  legacy->add_option("--seed", seed, "stream seed")->required();
  legacy->add_option("--out", out, "output directory")->required();
  legacy->add_option("--field", field_name, "fringes|uniform")
      ->check(CLI::IsMember({"fringes", "uniform"}));
  legacy->add_option("--max-draws", max_draws, "draw budget before giving up");

  CLI::App* analyze = app.add_subcommand("analyze", "statistical reports over spot files");
  analyze->add_option("spots", spots_path, "spots.csv from a run")->required();
  analyze->add_option("scenario", scenario_path, "scenario JSON file")->required();
  analyze->add_option("--report", report_kind, "born|regions|angular")
      ->check(CLI::IsMember({"born", "regions", "angular"}));
  analyze->add_option("--out", out, "output directory")->required();
  analyze->add_option("--bins", bins, "histogram bins");

  CLI::App* appendix = app.add_subcommand("appendix", "occupancy formulas and oracle table");
  appendix->add_option("--n-list", n_list, "comma-separated cluster counts");
  appendix->add_option("--trials", trials, "Monte-Carlo trials");
  appendix->add_option("--seed", seed, "stream seed")->required();
  appendix->add_option("--out", out, "output directory")->required();
  appendix->add_option("--alpha-s", alpha_mode, "rounded|codata")
      ->check(CLI::IsMember({"rounded", "codata"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kExitOk : kExitParse;
  }

  try {
    if (run->parsed()) {
      return cmd_run(scenario_path, trials, seed, out, scan_policy, coverage, threads, bins,
                     export_clusters);
    }
    if (legacy->parsed()) {
      return cmd_legacy(nx, nz, eta, points, seed, out, field_name, max_draws);
    }
    if (analyze->parsed()) {
      return cmd_analyze(spots_path, scenario_path, report_kind, out, bins);
    }
    if (appendix->parsed()) {
      return cmd_appendix(n_list, trials, seed, out, alpha_mode);
    }
  } catch (const ParseFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPrecondition;
  }
  return kExitOk;
}
