#include <cmath>
#include <fstream>

#include "edgefed/csv.hpp"
#include "edgefed/error.hpp"
#include "edgefed/runner.hpp"

namespace edgefed {

namespace {

void write_row(std::ostream& out, const RunSummary& s, const SiteTotals& t) {
  out << t.scope << ',' << s.scenario_hash << ',' << s.policy << ',' << s.seed << ',' << s.sessions_generated << ','
      << csv::num(t.it_energy_kwh) << ',' << csv::num(t.cooling_energy_kwh) << ',' << csv::num(t.grid_energy_kwh)
      << ',' << csv::num(t.solar_energy_kwh) << ',' << csv::num(t.curtailed_kwh) << ','
      << csv::num(t.battery_in_kwh) << ',' << csv::num(t.battery_out_kwh) << ',' << csv::num(t.peak_grid_kwh) << ','
      << csv::num(t.cost_eur) << ',';
  if (t.mean_pue) out << csv::num(*t.mean_pue);
  out << ',' << t.sessions_served << ',' << t.sessions_blocked << ',' << csv::num(t.mean_delay_ms) << ','
      << csv::num(t.p95_delay_ms) << '\n';
}

SiteTotals parse_totals(const csv::Row& row) {
  const auto& f = row.fields;
  auto d = [&](std::size_t i, const char* name) { return csv::to_double(f[i], row.line, name); };
  SiteTotals t;
  t.scope = f[0];
  t.it_energy_kwh = d(5, "it_energy_kwh");
  t.cooling_energy_kwh = d(6, "cooling_energy_kwh");
  t.grid_energy_kwh = d(7, "grid_energy_kwh");
  t.solar_energy_kwh = d(8, "solar_energy_kwh");
  t.curtailed_kwh = d(9, "curtailed_kwh");
  t.battery_in_kwh = d(10, "battery_in_kwh");
  t.battery_out_kwh = d(11, "battery_out_kwh");
  t.peak_grid_kwh = d(12, "peak_grid_kwh");
  t.cost_eur = d(13, "cost_eur");
  if (!f[14].empty()) t.mean_pue = d(14, "mean_pue");
  t.sessions_served = csv::to_u64(f[15], row.line, "sessions_served");
  t.sessions_blocked = csv::to_u64(f[16], row.line, "sessions_blocked");
  t.mean_delay_ms = d(17, "mean_delay_ms");
  t.p95_delay_ms = d(18, "p95_delay_ms");
  return t;
}

double saving(double baseline, double candidate) {
  if (baseline == 0.0) return candidate == 0.0 ? 0.0 : -INFINITY;
  return 1.0 - candidate / baseline;
}

}  // namespace

void write_summary(const RunSummary& summary, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << kSummaryCsvHeader << '\n';
  for (const auto& t : summary.edcs) write_row(out, summary, t);
  write_row(out, summary, summary.federation);
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

RunSummary read_summary(const std::filesystem::path& path) {
  const auto rows = csv::read(path, kSummaryCsvHeader);
  RunSummary s;
  bool have_federation = false;
  for (const auto& row : rows) {
    if (have_federation) throw ValidationError("federation row is last", path.string(), row.line);
    const auto& f = row.fields;
    s.scenario_hash = f[1];
    s.policy = f[2];
    s.seed = csv::to_u64(f[3], row.line, "seed");
    s.sessions_generated = csv::to_u64(f[4], row.line, "sessions_generated");
    auto totals = parse_totals(row);
    if (totals.scope == "federation") {
      s.federation = totals;
      have_federation = true;
    } else {
      s.edcs.push_back(totals);
    }
  }
  if (!have_federation) throw ValidationError("summary has a federation row", path.string());
  return s;
}

ComparisonReport compare(const RunSummary& baseline, const RunSummary& candidate) {
  if (baseline.scenario_hash != candidate.scenario_hash) {
    throw MismatchedScenarios("scenario hashes differ: " + baseline.scenario_hash + " vs " +
                              candidate.scenario_hash);
  }
  const auto& b = baseline.federation;
  const auto& c = candidate.federation;
  ComparisonReport r;
  r.baseline_energy_kwh = b.total_energy_kwh();
  r.candidate_energy_kwh = c.total_energy_kwh();
  r.baseline_cost_eur = b.cost_eur;
  r.candidate_cost_eur = c.cost_eur;
  r.energy_saving = saving(r.baseline_energy_kwh, r.candidate_energy_kwh);
  r.cost_saving = saving(b.cost_eur, c.cost_eur);
  r.mean_delay_delta_ms = c.mean_delay_ms - b.mean_delay_ms;
  r.p95_delay_delta_ms = c.p95_delay_ms - b.p95_delay_ms;
  r.blocked_delta = static_cast<long long>(c.sessions_blocked) - static_cast<long long>(b.sessions_blocked);
  return r;
}

}  // namespace edgefed
