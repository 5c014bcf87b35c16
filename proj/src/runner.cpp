#include "edgefed/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <unordered_map>

#include "edgefed/csv.hpp"
#include "edgefed/error.hpp"

namespace edgefed {

namespace {

struct ActiveSession {
  std::size_t row = 0;
  std::size_t edc = 0;
  int slots = 0;
  std::size_t vehicle = 0;
};

// Mutable federation state shared by the dispatcher and the EDC components.
// Owned by one simulate() call; all access happens on the kernel's thread.
struct Federation {
  const ExperimentConfig& cfg;
  Workload workload;
  std::unique_ptr<AllocationPolicy> policy;
  std::vector<std::vector<double>> distance_m;
  std::unordered_map<std::uint64_t, std::size_t> vehicle_index;
  std::unordered_map<std::uint64_t, std::size_t> session_row;

  std::vector<int> occupied;
  std::vector<BatteryState> battery;
  std::vector<ActiveSession> active;

  std::vector<PowerRow> power;
  std::vector<GridRow> grid;
  std::vector<SessionRow> sessions;
  std::vector<SiteTotals> totals;

  explicit Federation(const ExperimentConfig& c) : cfg(c) {}

  FederationView view(SimTime t) const {
    FederationView v;
    v.t = t;
    v.distance_m = distance_m;
    for (const auto& ap : cfg.access_points) v.ap_ids.push_back(ap.id);
    v.edcs.reserve(cfg.edcs.size());
    for (std::size_t i = 0; i < cfg.edcs.size(); ++i) {
      const auto& site = cfg.edcs[i];
      EdcSnapshot s;
      s.spec = &site.spec;
      s.occupied = occupied[i];
      s.t_amb = site.spec.ambient.at(t);
      s.power = edc_power(site.spec, s.occupied, s.t_amb);
      s.price = site.grid.tariff.price_at(t);
      s.p_solar = solar_power(t, site.grid.solar);
      s.soc_wh = battery[i].soc;
      s.free_power_w = free_power_headroom(t, s.power.p_total, battery[i], site.grid, cfg.kernel.sample_step);
      v.edcs.push_back(s);
    }
    return v;
  }

  void release(std::size_t active_index, double end_s, bool dropped) {
    const ActiveSession a = active[active_index];
    occupied[a.edc] -= a.slots;
    auto& row = sessions[a.row];
    row.end_s = end_s;
    row.blocked = dropped;
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(active_index));
  }
};

class Dispatcher final : public Component {
 public:
  explicit Dispatcher(Federation& fed) : fed_(fed) {}

  const std::string& id() const override { return id_; }
  bool continuous() const override { return true; }

  void initialize(Scheduler& out, std::uint64_t) override {
    for (const auto& s : fed_.workload.sessions) {
      if (s.start < fed_.cfg.kernel.horizon) out.schedule(s.start, id_, SessionStart{s.id});
    }
  }

  void transition(const Event& ev, Scheduler& out) override {
    if (const auto* start = std::get_if<SessionStart>(&ev.payload)) {
      on_start(start->session_id, ev.time, out);
    } else if (const auto* end = std::get_if<SessionEnd>(&ev.payload)) {
      on_end(end->session_id, ev.time);
    } else if (std::holds_alternative<SamplerTick>(ev.payload)) {
      on_tick(ev.time);
    }
  }

 private:
  void on_start(std::uint64_t session_id, SimTime t, Scheduler& out) {
    const std::size_t row_index = fed_.session_row.at(session_id);
    const SessionRequest& req = fed_.workload.sessions[row_index];
    SessionRow& row = fed_.sessions[row_index];
    const std::size_t vehicle = fed_.vehicle_index.at(req.vehicle_id);
    const auto ap = serving_ap(fed_.workload.vehicles[vehicle].position_at(t), fed_.cfg.access_points);
    row.end_s = t.seconds;
    row.blocked = true;
    if (!ap) return;

    PlacementRequest pr{session_id, *ap, demand_slots(req.demand)};
    const auto decision = fed_.policy->decide(pr, fed_.view(t));
    if (decision.blocked()) return;

    std::size_t edc = 0;
    while (fed_.cfg.edcs[edc].spec.id != *decision.edc_id) ++edc;
    const auto admitted = admit(fed_.cfg.edcs[edc].spec, fed_.occupied[edc], pr.slots);
    if (!admitted) throw ComponentFault(id_, t.seconds, "policy chose an EDC without capacity");
    fed_.occupied[edc] = *admitted;
    row.edc_id = decision.edc_id;
    row.delay_ms = decision.est_delay_ms;
    row.blocked = false;
    row.end_s = t.seconds + req.duration_s;
    fed_.active.push_back({row_index, edc, pr.slots, vehicle});
    out.schedule(t + req.duration_s, id_, SessionEnd{session_id});
  }

  void on_end(std::uint64_t session_id, SimTime t) {
    const std::size_t row_index = fed_.session_row.at(session_id);
    for (std::size_t i = 0; i < fed_.active.size(); ++i) {
      if (fed_.active[i].row == row_index) {
        fed_.release(i, t.seconds, false);
        return;
      }
    }
  }

  // Handover: a session follows its vehicle across APs; it is dropped when
  // the vehicle is outside every coverage circle.
  void on_tick(SimTime t) {
    for (std::size_t i = 0; i < fed_.active.size();) {
      const auto& trace = fed_.workload.vehicles[fed_.active[i].vehicle];
      if (!serving_ap(trace.position_at(t), fed_.cfg.access_points)) {
        fed_.release(i, t.seconds, true);
      } else {
        ++i;
      }
    }
  }

  Federation& fed_;
  std::string id_ = "dispatcher";
};

class EdcComponent final : public Component {
 public:
  EdcComponent(Federation& fed, std::size_t index)
      : fed_(fed), index_(index), id_("edc/" + std::to_string(fed.cfg.edcs[index].spec.id)) {}

  const std::string& id() const override { return id_; }
  bool continuous() const override { return true; }

  void transition(const Event& ev, Scheduler&) override {
    if (!std::holds_alternative<SamplerTick>(ev.payload)) return;
    const auto& site = fed_.cfg.edcs[index_];
    const double dt = fed_.cfg.kernel.sample_step;
    const int occ = fed_.occupied[index_];
    const double t_amb = site.spec.ambient.at(ev.time);
    last_ = edc_power(site.spec, occ, t_amb);
    fed_.power.push_back({ev.time.seconds, site.spec.id, static_cast<double>(occ) / site.spec.slots, last_});

    const auto result = controller_step(ev.time, last_.p_total, fed_.battery[index_], site.grid, dt);
    fed_.battery[index_] = result.battery;
    fed_.grid.push_back({site.spec.id, result.step, result.battery.soc});

    auto& tot = fed_.totals[index_];
    const double to_kwh = dt / 3.6e6;
    const auto& g = result.step;
    tot.it_energy_kwh += last_.p_it * to_kwh;
    tot.cooling_energy_kwh += last_.p_cool * to_kwh;
    tot.grid_energy_kwh += g.p_cons * to_kwh;
    tot.solar_energy_kwh += g.p_solar * to_kwh;
    tot.curtailed_kwh += g.p_surplus * to_kwh;
    tot.battery_in_kwh += g.charge() * to_kwh;
    tot.battery_out_kwh += g.discharge() * to_kwh;
    if (!g.off_peak) tot.peak_grid_kwh += g.p_cons * to_kwh;
    tot.cost_eur += g.cost;
  }

  Observation observe(SimTime) const override { return {last_.p_total, {}}; }

 private:
  Federation& fed_;
  std::size_t index_;
  std::string id_;
  PowerBreakdown last_;
};

double percentile95(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(v.size())));
  return v[std::max<std::size_t>(rank, 1) - 1];
}

void finish_delay_stats(SiteTotals& tot, const std::vector<double>& delays) {
  if (delays.empty()) return;
  double sum = 0.0;
  for (double d : delays) sum += d;
  tot.mean_delay_ms = sum / static_cast<double>(delays.size());
  tot.p95_delay_ms = percentile95(delays);
}

void finish_pue(SiteTotals& tot) {
  if (tot.it_energy_kwh > 0.0) tot.mean_pue = (tot.it_energy_kwh + tot.cooling_energy_kwh) / tot.it_energy_kwh;
}

}  // namespace

RunResult simulate(const ExperimentConfig& config) {
  Federation fed(config);
  if (config.demand.profile) {
    fed.workload = generate_workload(*config.demand.profile, config.access_points, config.kernel.horizon,
                                     derive_seed(config.kernel.seed, "workload"));
  } else {
    fed.workload = load_workload_trace(config.demand.sessions_trace, config.demand.vehicles_trace);
  }
  fed.policy = make_policy(config.policy, config.delay_model, config.max_delay_ms);
  for (const auto& ap : config.access_points) {
    std::vector<double> row;
    for (const auto& site : config.edcs) row.push_back(distance(ap.position, site.spec.position));
    fed.distance_m.push_back(std::move(row));
  }
  for (std::size_t i = 0; i < fed.workload.vehicles.size(); ++i) fed.vehicle_index[fed.workload.vehicles[i].id] = i;
  std::size_t generated = 0;
  for (std::size_t i = 0; i < fed.workload.sessions.size(); ++i) {
    const auto& s = fed.workload.sessions[i];
    fed.session_row[s.id] = i;
    SessionRow row;
    row.session_id = s.id;
    row.vehicle_id = s.vehicle_id;
    row.start_s = s.start.seconds;
    row.end_s = s.start.seconds;
    row.blocked = true;
    fed.sessions.push_back(row);
    if (s.start < config.kernel.horizon) ++generated;
  }
  fed.occupied.assign(config.edcs.size(), 0);
  for (const auto& site : config.edcs) {
    fed.battery.push_back(BatteryState{site.initial_soc_wh});
    SiteTotals t;
    t.scope = std::to_string(site.spec.id);
    fed.totals.push_back(t);
  }
  const std::size_t ticks = config.kernel.tick_count();
  fed.power.reserve(ticks * config.edcs.size());
  fed.grid.reserve(ticks * config.edcs.size());

  Dispatcher dispatcher(fed);
  std::vector<std::unique_ptr<EdcComponent>> edcs;
  std::vector<Component*> components{&dispatcher};
  for (std::size_t i = 0; i < config.edcs.size(); ++i) {
    edcs.push_back(std::make_unique<EdcComponent>(fed, i));
    components.push_back(edcs.back().get());
  }

  RunResult result;
  result.trace = run(config.kernel, components);
  // The dispatcher sees every event; keep the trace to session and EDC events.
  std::erase_if(result.trace.samples, [](const SampleRecord& s) { return s.component == "dispatcher"; });
  result.trace.energy_kwh.erase("dispatcher");

  // Sessions never reached (start beyond the horizon) are not part of the run.
  std::vector<SessionRow> rows;
  for (const auto& row : fed.sessions) {
    if (row.start_s < config.kernel.horizon.seconds) rows.push_back(row);
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.session_id < b.session_id; });

  auto& summary = result.summary;
  summary.scenario_hash = config.scenario_hash();
  summary.policy = std::string(policy_name(config.policy));
  summary.seed = config.kernel.seed;
  summary.sessions_generated = generated;

  SiteTotals fedtot;
  fedtot.scope = "federation";
  std::vector<std::vector<double>> delays(config.edcs.size());
  std::vector<double> all_delays;
  for (const auto& row : rows) {
    std::size_t edc = config.edcs.size();
    if (row.edc_id) {
      for (std::size_t i = 0; i < config.edcs.size(); ++i) {
        if (config.edcs[i].spec.id == *row.edc_id) edc = i;
      }
    }
    if (row.blocked) {
      ++fedtot.sessions_blocked;
      if (edc < config.edcs.size()) ++fed.totals[edc].sessions_blocked;
    } else {
      ++fedtot.sessions_served;
      ++fed.totals[edc].sessions_served;
      delays[edc].push_back(*row.delay_ms);
      all_delays.push_back(*row.delay_ms);
    }
  }
  for (std::size_t i = 0; i < config.edcs.size(); ++i) {
    auto& t = fed.totals[i];
    finish_delay_stats(t, delays[i]);
    finish_pue(t);
    fedtot.it_energy_kwh += t.it_energy_kwh;
    fedtot.cooling_energy_kwh += t.cooling_energy_kwh;
    fedtot.grid_energy_kwh += t.grid_energy_kwh;
    fedtot.solar_energy_kwh += t.solar_energy_kwh;
    fedtot.curtailed_kwh += t.curtailed_kwh;
    fedtot.battery_in_kwh += t.battery_in_kwh;
    fedtot.battery_out_kwh += t.battery_out_kwh;
    fedtot.peak_grid_kwh += t.peak_grid_kwh;
    fedtot.cost_eur += t.cost_eur;
  }
  finish_delay_stats(fedtot, all_delays);
  finish_pue(fedtot);
  summary.edcs = fed.totals;
  summary.federation = fedtot;

  result.power = std::move(fed.power);
  result.grid = std::move(fed.grid);
  result.sessions = std::move(rows);
  for (const auto& b : fed.battery) result.final_soc_wh.push_back(b.soc);
  return result;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

void write_outputs(const RunResult& result, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create '" + out_dir.string() + "': " + ec.message());

  {
    auto out = open_out(out_dir / "power.csv");
    out << kPowerCsvHeader << '\n';
    for (const auto& r : result.power) {
      out << csv::num(r.t_s) << ',' << r.edc_id << ',' << csv::num(r.utilization) << ',' << csv::num(r.power.p_it)
          << ',' << csv::num(r.power.p_cool) << ',' << csv::num(r.power.p_total) << ',';
      if (r.power.p_it > 0.0) out << csv::num(pue(r.power.p_it, r.power.p_cool));
      out << '\n';
    }
    if (!out) throw IoError("failed writing power.csv");
  }
  {
    auto out = open_out(out_dir / "grid.csv");
    out << kGridCsvHeader << '\n';
    for (const auto& r : result.grid) {
      const auto& g = r.step;
      out << csv::num(g.t.seconds) << ',' << r.edc_id << ',' << csv::num(g.p_solar) << ',' << csv::num(g.p_charge)
          << ',' << csv::num(g.p_cons) << ',' << csv::num(g.p_surplus) << ',' << csv::num(r.soc_wh) << ','
          << csv::num(g.price) << ',' << csv::num(g.cost) << '\n';
    }
    if (!out) throw IoError("failed writing grid.csv");
  }
  {
    auto out = open_out(out_dir / "sessions.csv");
    out << kSessionsCsvHeader << '\n';
    for (const auto& r : result.sessions) {
      out << r.session_id << ',' << r.vehicle_id << ',' << csv::num(r.start_s) << ',' << csv::num(r.end_s) << ',';
      if (r.edc_id) out << *r.edc_id;
      out << ',';
      if (r.delay_ms) out << csv::num(*r.delay_ms);
      out << ',' << (r.blocked ? 1 : 0) << '\n';
    }
    if (!out) throw IoError("failed writing sessions.csv");
  }
  write_summary(result.summary, out_dir / "summary.csv");
}

RunSummary run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  const auto result = simulate(config);
  write_outputs(result, out_dir);
  return result.summary;
}

namespace {

RunSummary sweep_one(const ExperimentConfig& config, std::uint64_t seed, const std::filesystem::path& out_dir) {
  ExperimentConfig c = config;
  c.kernel.seed = seed;
  if (out_dir.empty()) return simulate(c).summary;
  return run_experiment(c, out_dir / ("seed_" + std::to_string(seed)));
}

}  // namespace

std::vector<RunSummary> run_sweep(const ExperimentConfig& config, std::span<const std::uint64_t> seeds,
                                  const std::filesystem::path& out_dir) {
  std::vector<RunSummary> out(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
  const auto n = static_cast<std::int64_t>(seeds.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      out[k] = sweep_one(config, seeds[k], out_dir);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::vector<RunSummary> run_sweep_serial(const ExperimentConfig& config, std::span<const std::uint64_t> seeds,
                                         const std::filesystem::path& out_dir) {
  std::vector<RunSummary> out;
  for (auto seed : seeds) out.push_back(sweep_one(config, seed, out_dir));
  return out;
}

}  // namespace edgefed
