// edgefed: command-line front end for the Edge federation simulator.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 runtime fault.

#include <cstdio>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "edgefed/csv.hpp"
#include "edgefed/error.hpp"
#include "edgefed/runner.hpp"
#include "edgefed/scenario.hpp"

namespace {

using namespace edgefed;

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

void print_summary(const RunSummary& s) {
  const auto& f = s.federation;
  std::cout << "policy," << s.policy << '\n'
            << "seed," << s.seed << '\n'
            << "scenario_hash," << s.scenario_hash << '\n'
            << "it_energy_kwh," << csv::num(f.it_energy_kwh) << '\n'
            << "cooling_energy_kwh," << csv::num(f.cooling_energy_kwh) << '\n'
            << "grid_energy_kwh," << csv::num(f.grid_energy_kwh) << '\n'
            << "cost_eur," << csv::num(f.cost_eur) << '\n'
            << "mean_pue," << (f.mean_pue ? csv::num(*f.mean_pue) : "") << '\n'
            << "sessions_served," << f.sessions_served << '\n'
            << "sessions_blocked," << f.sessions_blocked << '\n';
}

int cmd_simulate(const std::string& config_path, const std::string& out, std::optional<std::uint64_t> seed,
                 std::optional<std::string> policy) {
  auto cfg = load_config(config_path);
  if (seed) cfg.kernel.seed = *seed;
  if (policy) cfg.policy = parse_policy(*policy);
  for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << '\n';
  print_summary(run_experiment(cfg, out));
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out, std::uint64_t first_seed, std::size_t count,
              std::optional<std::string> policy) {
  auto cfg = load_config(config_path);
  if (policy) cfg.policy = parse_policy(*policy);
  std::vector<std::uint64_t> seeds(count);
  std::iota(seeds.begin(), seeds.end(), first_seed);
  const auto summaries = run_sweep(cfg, seeds, out);
  std::cout << "seed,total_energy_kwh,cost_eur,sessions_served,sessions_blocked\n";
  for (const auto& s : summaries) {
    std::cout << s.seed << ',' << csv::num(s.federation.total_energy_kwh()) << ',' << csv::num(s.federation.cost_eur)
              << ',' << s.federation.sessions_served << ',' << s.federation.sessions_blocked << '\n';
  }
  return 0;
}

int cmd_compare(const std::string& baseline, const std::string& candidate) {
  const auto r = compare(read_summary(baseline), read_summary(candidate));
  std::cout << "metric,value\n"
            << "baseline_energy_kwh," << csv::num(r.baseline_energy_kwh) << '\n'
            << "candidate_energy_kwh," << csv::num(r.candidate_energy_kwh) << '\n'
            << "energy_saving," << csv::num(r.energy_saving) << '\n'
            << "baseline_cost_eur," << csv::num(r.baseline_cost_eur) << '\n'
            << "candidate_cost_eur," << csv::num(r.candidate_cost_eur) << '\n'
            << "cost_saving," << csv::num(r.cost_saving) << '\n'
            << "mean_delay_delta_ms," << csv::num(r.mean_delay_delta_ms) << '\n'
            << "p95_delay_delta_ms," << csv::num(r.p95_delay_delta_ms) << '\n'
            << "blocked_delta," << r.blocked_delta << '\n';
  return 0;
}

int cmd_scenario_generate(const std::string& config_path, const std::string& out, std::optional<double> rate) {
  auto cfg = scenario::load_scenario_config(config_path);
  if (rate) {
    cfg.dataset.anomaly_rate = *rate;
    cfg.validate();
  }
  const auto m = scenario::generate_dataset(cfg, out);
  std::cout << "real_windows," << m.real_windows << '\n'
            << "synthetic_windows," << m.synthetic_windows << '\n'
            << "anomalous_windows," << m.anomalous_windows << '\n'
            << "frames," << m.frames << '\n'
            << "clamp_events," << m.clamp_events << '\n';
  return 0;
}

int cmd_scenario_eval(const std::string& train_dir, const std::string& test_dir) {
  namespace fs = std::filesystem;
  const auto train_m = scenario::read_manifest(fs::path(train_dir) / "manifest.json");
  const auto test_m = scenario::read_manifest(fs::path(test_dir) / "manifest.json");
  const auto train = scenario::read_windows(fs::path(train_dir) / "windows.csv", train_m.window_length, train_m.step_s);
  const auto test = scenario::read_windows(fs::path(test_dir) / "windows.csv", test_m.window_length, test_m.step_s);
  const auto predictor = scenario::train_predictor(train, train_m.lag, train_m.ridge);
  const auto mse = scenario::evaluate(predictor, test);
  std::cout << "temp_mse,hum_mse\n" << csv::num(mse.temperature) << ',' << csv::num(mse.humidity) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy- and cost-aware Edge data center federation simulator"};
  app.require_subcommand(1);

  std::string config, out;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> policy;
  auto* simulate = app.add_subcommand("simulate", "Run one federation experiment");
  simulate->add_option("--config", config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  simulate->add_option("--out", out, "Output directory")->required();
  simulate->add_option("--seed", seed, "Override the run seed");
  simulate->add_option("--policy", policy, "nearest | energy | cost");

  std::uint64_t first_seed = 1;
  std::size_t seed_count = 10;
  auto* sweep = app.add_subcommand("sweep", "Run one experiment per seed in parallel");
  sweep->add_option("--config", config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  sweep->add_option("--out", out, "Output directory (one seed_<N> subdirectory per run)")->required();
  sweep->add_option("--first-seed", first_seed, "First seed");
  sweep->add_option("--seeds", seed_count, "Number of consecutive seeds");
  sweep->add_option("--policy", policy, "nearest | energy | cost");

  std::string baseline, candidate;
  auto* cmp = app.add_subcommand("compare", "Compare two summary.csv files");
  cmp->add_option("baseline", baseline)->required()->check(CLI::ExistingFile);
  cmp->add_option("candidate", candidate)->required()->check(CLI::ExistingFile);

  auto* scen = app.add_subcommand("scenario", "Synthetic sensor scenarios");
  scen->require_subcommand(1);
  std::optional<double> anomaly_rate;
  auto* gen = scen->add_subcommand("generate", "Generate a training dataset");
  gen->add_option("--config", config, "Scenario config (JSON)")->required()->check(CLI::ExistingFile);
  gen->add_option("--out", out, "Output directory")->required();
  gen->add_option("--anomaly-rate", anomaly_rate, "Fraction of synthetic windows with an anomaly");
  std::string train_dir, test_dir;
  auto* eval = scen->add_subcommand("eval", "Train on one dataset, report MSE on another");
  eval->add_option("--train", train_dir)->required()->check(CLI::ExistingDirectory);
  eval->add_option("--test", test_dir)->required()->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*simulate) return cmd_simulate(config, out, seed, policy);
    if (*sweep) return cmd_sweep(config, out, first_seed, seed_count, policy);
    if (*cmp) return cmd_compare(baseline, candidate);
    if (*gen) return cmd_scenario_generate(config, out, anomaly_rate);
    if (*eval) return cmd_scenario_eval(train_dir, test_dir);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UnknownKey& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidConfig& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const MismatchedScenarios& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "fault: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
