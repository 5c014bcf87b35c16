#pragma once

// Shared experiment fixtures for the runner tests and the acceptance suite.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "edgefed/random.hpp"
#include "edgefed/runner.hpp"
#include "oracles.hpp"

namespace edgefed::fixtures {

inline std::filesystem::path source_dir() { return EDGEFED_SOURCE_DIR; }

inline ExperimentConfig reference_config() { return load_config(source_dir() / "configs" / "reference.json"); }

/// The reference scenario with every battery removed and solar zeroed.
inline ExperimentConfig without_storage(ExperimentConfig cfg) {
  for (auto& site : cfg.edcs) {
    site.grid.battery.reset();
    site.grid.solar.peak_power = 0.0;
    site.initial_soc_wh = 0.0;
  }
  cfg.validate();
  return cfg;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("edgefed_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Randomized but valid federation: 1-5 EDCs of either cooling type, random
/// tariffs, solar and optional batteries, a short horizon and a synthetic profile.
inline ExperimentConfig random_config(std::uint64_t seed) {
  Rng rng(derive_seed(seed, "fixtures/random-config"));
  auto pick = [&](int n) { return static_cast<int>(rng.uniform() * n); };
  ExperimentConfig cfg;
  cfg.kernel.seed = seed;
  cfg.kernel.sample_step = rng.uniform() < 0.5 ? 60.0 : 300.0;
  cfg.kernel.horizon = SimTime{3600.0 * (6 + pick(42))};
  const int n_aps = 1 + pick(4);
  for (int a = 0; a < n_aps; ++a) {
    cfg.access_points.push_back({static_cast<std::uint32_t>(a), {rng.uniform(0, 5000), rng.uniform(0, 5000)},
                                 rng.uniform(1500, 4000)});
  }
  const int n_edcs = 1 + pick(5);
  for (int i = 0; i < n_edcs; ++i) {
    EdcSite site;
    site.spec.id = static_cast<std::uint32_t>(i * 7 + 1);
    site.spec.position = {rng.uniform(0, 5000), rng.uniform(0, 5000)};
    site.spec.slots = 2 + pick(20);
    site.spec.it_model = {rng.uniform(5000, 60000), rng.uniform() < 0.5 ? 0.0 : rng.uniform(0.0, 0.7)};
    if (rng.uniform() < 0.5) {
      ImmersionCoolingSpec imm;
      imm.pump_power = rng.uniform(200, 2000);
      imm.standby_power = rng.uniform() < 0.5 ? 0.0 : rng.uniform(0, 100);
      imm.capacity = site.spec.it_model.p_max * rng.uniform(1.0, 1.5);
      site.spec.cooling = imm;
    } else {
      AirCoolingSpec air;
      air.kappa0 = rng.uniform(0.2, 0.8);
      site.spec.cooling = air;
    }
    site.spec.ambient = {rng.uniform(5, 35), rng.uniform(0, 10), rng.uniform(0, 24)};
    const double split = 1.0 + pick(22);
    site.grid.tariff = PriceSchedule({{0.0, split, rng.uniform(0.05, 0.15)}, {split, 24.0, rng.uniform(0.16, 0.4)}});
    site.grid.solar = {rng.uniform() < 0.3 ? 0.0 : rng.uniform(0, 50000), rng.uniform(5, 8), rng.uniform(17, 21)};
    if (rng.uniform() < 0.7) {
      BatterySpec bat{rng.uniform(1000, 100000), rng.uniform(1000, 20000), rng.uniform(1000, 20000),
                      rng.uniform(0.6, 1.0)};
      site.initial_soc_wh = rng.uniform(0, bat.capacity);
      site.grid.battery = bat;
    }
    cfg.edcs.push_back(site);
  }
  DemandProfile p;
  p.base_rate = rng.uniform(0, 200);
  p.diurnal_amplitude = rng.uniform(0, 0.9);
  p.peak_hour = rng.uniform(0, 24);
  p.session_duration_s = rng.uniform(60, 3600);
  p.session_demand = rng.uniform(0.5, 2.0);
  cfg.demand.profile = p;
  cfg.policy = static_cast<PolicyKind>(pick(3));
  cfg.max_delay_ms = rng.uniform() < 0.3 ? rng.uniform(5, 30) : 1000.0;
  cfg.validate();
  return cfg;
}

struct BalanceReport {
  double worst_step = 0.0;    ///< max per-step relative residual
  double federation = 0.0;    ///< relative residual of the whole-run energy ledger
  double storage = 0.0;       ///< relative residual of battery energy vs state of charge
  double integration = 0.0;   ///< kernel-integrated energy vs IT + cooling totals
};

/// Checks every conservation relation a run must satisfy.
inline BalanceReport check_balance(const ExperimentConfig& cfg, const RunResult& r) {
  BalanceReport b;
  for (const auto& row : r.grid) b.worst_step = std::max(b.worst_step, oracle::balance_residual(row.step));

  const auto& f = r.summary.federation;
  const double supply = f.solar_energy_kwh + f.grid_energy_kwh + f.battery_out_kwh;
  const double use = f.total_energy_kwh() + f.battery_in_kwh + f.curtailed_kwh;
  b.federation = oracle::rel_diff(supply, use);

  for (std::size_t i = 0; i < cfg.edcs.size(); ++i) {
    const auto& site = cfg.edcs[i];
    const auto& t = r.summary.edcs[i];
    const double eff = site.grid.battery ? site.grid.battery->round_trip_efficiency : 1.0;
    const double delta_kwh = (r.final_soc_wh[i] - site.initial_soc_wh) / 1000.0;
    const double expected = eff * t.battery_in_kwh - t.battery_out_kwh;
    b.storage = std::max(b.storage, oracle::rel_diff(delta_kwh, expected));

    const double kernel = r.trace.energy_kwh.at("edc/" + std::to_string(site.spec.id));
    b.integration = std::max(b.integration, oracle::rel_diff(kernel, t.total_energy_kwh()));
  }
  return b;
}

}  // namespace edgefed::fixtures
