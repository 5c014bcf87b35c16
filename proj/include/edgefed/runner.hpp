#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "edgefed/alloc.hpp"
#include "edgefed/demand.hpp"
#include "edgefed/edc.hpp"
#include "edgefed/grid.hpp"
#include "edgefed/kernel.hpp"

namespace edgefed {

struct EdcSite {
  EdcSpec spec;
  GridSite grid;
  double initial_soc_wh = 0.0;
};

/// Either a synthetic demand profile or a pair of trace files to replay.
struct WorkloadSource {
  std::optional<DemandProfile> profile;
  std::filesystem::path sessions_trace;
  std::filesystem::path vehicles_trace;
};

struct ExperimentConfig {
  KernelConfig kernel;
  std::vector<AccessPoint> access_points;
  std::vector<EdcSite> edcs;
  WorkloadSource demand;
  PolicyKind policy = PolicyKind::Nearest;
  DelayModel delay_model;
  double max_delay_ms = 1000.0;
  /// Non-fatal cross-checks (e.g. an EDC no AP reaches within max_delay).
  std::vector<std::string> warnings;

  /// Throws ValidationError naming the broken invariant; refreshes warnings.
  void validate();

  /// Fully resolved config as sorted-key JSON text.
  std::string canonical_json() const;
  /// Hash of the resolved config with the policy removed; equal hashes mean
  /// two runs differ at most in policy.
  std::string scenario_hash() const;
};

/// Parses a JSON config (schema in README), fills defaults, validates.
/// ParseError for malformed text or wrong value types (location = byte
/// offset or key path), UnknownKey for keys outside the schema,
/// ValidationError for broken invariants.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});

struct SiteTotals {
  std::string scope;  ///< EDC id or "federation"
  double it_energy_kwh = 0.0;
  double cooling_energy_kwh = 0.0;
  double grid_energy_kwh = 0.0;
  double solar_energy_kwh = 0.0;
  double curtailed_kwh = 0.0;
  double battery_in_kwh = 0.0;
  double battery_out_kwh = 0.0;
  double peak_grid_kwh = 0.0;  ///< grid energy drawn outside off-peak tiers
  double cost_eur = 0.0;
  std::optional<double> mean_pue;  ///< energy-weighted; empty without IT energy
  std::size_t sessions_served = 0;
  std::size_t sessions_blocked = 0;
  double mean_delay_ms = 0.0;
  double p95_delay_ms = 0.0;

  double total_energy_kwh() const { return it_energy_kwh + cooling_energy_kwh; }
};

struct RunSummary {
  std::string scenario_hash;
  std::string policy;
  std::uint64_t seed = 0;
  std::size_t sessions_generated = 0;
  std::vector<SiteTotals> edcs;
  SiteTotals federation;
};

struct PowerRow {
  double t_s = 0.0;
  std::uint32_t edc_id = 0;
  double utilization = 0.0;
  PowerBreakdown power;
};

struct GridRow {
  std::uint32_t edc_id = 0;
  GridStep step;
  double soc_wh = 0.0;
};

struct SessionRow {
  std::uint64_t session_id = 0;
  std::uint64_t vehicle_id = 0;
  double start_s = 0.0;
  double end_s = 0.0;
  std::optional<std::uint32_t> edc_id;
  std::optional<double> delay_ms;
  bool blocked = false;
};

struct RunResult {
  RunSummary summary;
  std::vector<PowerRow> power;
  std::vector<GridRow> grid;
  std::vector<SessionRow> sessions;
  /// Battery state at the horizon, per EDC in config order.
  std::vector<double> final_soc_wh;
  RunTrace trace;
};

/// Runs one experiment in memory. Deterministic per config (including seed).
RunResult simulate(const ExperimentConfig& config);

/// simulate() plus power.csv, grid.csv, sessions.csv and summary.csv in out_dir.
RunSummary run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir);

void write_outputs(const RunResult& result, const std::filesystem::path& out_dir);

/// Runs `config` once per seed; each run writes to out_dir/seed_<N> when
/// out_dir is non-empty. Runs execute in parallel and are independent.
std::vector<RunSummary> run_sweep(const ExperimentConfig& config, std::span<const std::uint64_t> seeds,
                                  const std::filesystem::path& out_dir = {});
std::vector<RunSummary> run_sweep_serial(const ExperimentConfig& config, std::span<const std::uint64_t> seeds,
                                         const std::filesystem::path& out_dir = {});

inline constexpr const char* kPowerCsvHeader = "t_s,edc_id,utilization,p_it_w,p_cool_w,p_total_w,pue";
inline constexpr const char* kGridCsvHeader =
    "t_s,edc_id,p_solar_w,p_charge_w,p_cons_w,p_surplus_w,soc_wh,price_eur_kwh,cost_eur";
inline constexpr const char* kSessionsCsvHeader = "session_id,vehicle_id,start_s,end_s,edc_id,delay_ms,blocked";
inline constexpr const char* kSummaryCsvHeader =
    "scope,scenario_hash,policy,seed,sessions_generated,it_energy_kwh,cooling_energy_kwh,grid_energy_kwh,"
    "solar_energy_kwh,curtailed_kwh,battery_in_kwh,battery_out_kwh,peak_grid_kwh,cost_eur,mean_pue,"
    "sessions_served,sessions_blocked,mean_delay_ms,p95_delay_ms";

void write_summary(const RunSummary& summary, const std::filesystem::path& path);
/// Reads a summary.csv written by write_summary.
RunSummary read_summary(const std::filesystem::path& path);

struct ComparisonReport {
  double energy_saving = 0.0;  ///< 1 - candidate/baseline federation energy
  double cost_saving = 0.0;
  double baseline_energy_kwh = 0.0;
  double candidate_energy_kwh = 0.0;
  double baseline_cost_eur = 0.0;
  double candidate_cost_eur = 0.0;
  double mean_delay_delta_ms = 0.0;  ///< candidate - baseline
  double p95_delay_delta_ms = 0.0;
  long long blocked_delta = 0;
};

/// Throws MismatchedScenarios unless both summaries share a scenario hash.
ComparisonReport compare(const RunSummary& baseline, const RunSummary& candidate);

}  // namespace edgefed
