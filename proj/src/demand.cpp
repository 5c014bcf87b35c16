#include "edgefed/demand.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <string>

#include "edgefed/csv.hpp"
#include "edgefed/error.hpp"

namespace edgefed {

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

Point VehicleTrace::position_at(SimTime t) const {
  if (waypoints.empty()) return {};
  if (t <= waypoints.front().t) return waypoints.front().position;
  if (t >= waypoints.back().t) return waypoints.back().position;
  auto hi = std::upper_bound(waypoints.begin(), waypoints.end(), t,
                             [](SimTime value, const Waypoint& w) { return value < w.t; });
  auto lo = hi - 1;
  const double f = (t.seconds - lo->t.seconds) / (hi->t.seconds - lo->t.seconds);
  return {lo->position.x + f * (hi->position.x - lo->position.x),
          lo->position.y + f * (hi->position.y - lo->position.y)};
}

void DemandProfile::validate() const {
  if (!(base_rate >= 0.0) || !std::isfinite(base_rate)) throw InvalidProfile("base_rate must be >= 0");
  if (!(diurnal_amplitude >= 0.0 && diurnal_amplitude < 1.0)) {
    throw InvalidProfile("diurnal_amplitude must lie in [0, 1); the rate would go negative");
  }
  if (!(peak_hour >= 0.0 && peak_hour < 24.0)) throw InvalidProfile("peak_hour must lie in [0, 24)");
  for (double w : weekly_factor) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidProfile("weekly_factor entries must be >= 0");
  }
  if (!(session_duration_s > 0.0)) throw InvalidProfile("session duration must be > 0");
  if (!(session_demand > 0.0)) throw InvalidProfile("session demand must be > 0");
  if (!(min_speed_mps > 0.0 && max_speed_mps >= min_speed_mps)) {
    throw InvalidProfile("vehicle speeds must satisfy 0 < min <= max");
  }
}

double DemandProfile::rate_at(SimTime t) const {
  const double day_s = 86400.0;
  const auto day = static_cast<std::size_t>(std::floor(t.seconds / day_s)) % 7;
  const double hour = std::fmod(t.seconds, day_s) / 3600.0;
  return base_rate * weekly_factor[day] *
         (1.0 + diurnal_amplitude * std::cos(2.0 * std::numbers::pi * (hour - peak_hour) / 24.0));
}

double DemandProfile::max_rate() const {
  return base_rate * *std::max_element(weekly_factor.begin(), weekly_factor.end()) * (1.0 + diurnal_amplitude);
}

std::vector<double> sample_arrivals(const DemandProfile& profile, SimTime horizon, Rng& rng) {
  profile.validate();
  std::vector<double> starts;
  const double peak = profile.max_rate();
  if (peak <= 0.0) return starts;
  const double peak_per_s = peak / 3600.0;
  double t = 0.0;
  while (true) {
    t += rng.exponential(peak_per_s);
    if (t >= horizon.seconds) break;
    if (rng.uniform() * peak < profile.rate_at(SimTime{t})) starts.push_back(t);
  }
  return starts;
}

void validate_access_points(std::span<const AccessPoint> aps) {
  if (aps.empty()) throw InvalidConfig("at least one access point is required");
  std::set<std::uint32_t> ids;
  for (const auto& ap : aps) {
    if (!(ap.coverage_radius > 0.0)) throw InvalidConfig("access point coverage_radius must be > 0");
    if (!ids.insert(ap.id).second) throw InvalidConfig("duplicate access point id " + std::to_string(ap.id));
  }
}

Workload generate_workload(const DemandProfile& profile, std::span<const AccessPoint> aps, SimTime horizon,
                           std::uint64_t seed) {
  profile.validate();
  validate_access_points(aps);
  if (!(horizon.seconds > 0.0)) throw InvalidConfig("horizon must be > 0");

  Point lo{aps.front().position}, hi{aps.front().position};
  for (const auto& ap : aps) {
    lo.x = std::min(lo.x, ap.position.x);
    lo.y = std::min(lo.y, ap.position.y);
    hi.x = std::max(hi.x, ap.position.x);
    hi.y = std::max(hi.y, ap.position.y);
  }

  Rng arrivals_rng(derive_seed(seed, "demand/arrivals"));
  const auto starts = sample_arrivals(profile, horizon, arrivals_rng);
  const std::uint64_t mobility_seed = derive_seed(seed, "demand/mobility");

  Workload out;
  out.sessions.reserve(starts.size());
  out.vehicles.reserve(starts.size());
  for (std::size_t i = 0; i < starts.size(); ++i) {
    Rng rng(derive_seed(mobility_seed, static_cast<std::uint64_t>(i)));
    SessionRequest s;
    s.id = i;
    s.vehicle_id = i;
    s.start = SimTime{starts[i]};
    s.duration_s = profile.session_duration_s;
    s.demand = profile.session_demand;

    VehicleTrace v;
    v.id = i;
    double t = starts[i];
    Point p{rng.uniform(lo.x, hi.x), rng.uniform(lo.y, hi.y)};
    v.waypoints.push_back({SimTime{t}, p});
    const double end = starts[i] + s.duration_s;
    while (t < end) {
      const Point next{rng.uniform(lo.x, hi.x), rng.uniform(lo.y, hi.y)};
      const double speed = rng.uniform(profile.min_speed_mps, profile.max_speed_mps);
      t += std::max(1.0, distance(p, next) / speed);
      p = next;
      v.waypoints.push_back({SimTime{t}, p});
    }
    out.sessions.push_back(s);
    out.vehicles.push_back(std::move(v));
  }
  return out;
}

std::optional<std::uint32_t> serving_ap(Point position, std::span<const AccessPoint> aps) {
  std::optional<std::uint32_t> best;
  double best_d = 0.0;
  for (const auto& ap : aps) {
    const double d = distance(position, ap.position);
    if (d > ap.coverage_radius) continue;
    if (!best || d < best_d || (d == best_d && ap.id < *best)) {
      best = ap.id;
      best_d = d;
    }
  }
  return best;
}

void write_workload(const Workload& workload, const std::filesystem::path& sessions_csv,
                    const std::filesystem::path& vehicles_csv) {
  std::ofstream s(sessions_csv, std::ios::binary);
  if (!s) throw IoError("cannot write '" + sessions_csv.string() + "'");
  s << kSessionTraceHeader << '\n';
  for (const auto& r : workload.sessions) {
    s << r.id << ',' << r.vehicle_id << ',' << csv::exact(r.start.seconds) << ',' << csv::exact(r.duration_s) << ','
      << csv::exact(r.demand) << '\n';
  }
  std::ofstream v(vehicles_csv, std::ios::binary);
  if (!v) throw IoError("cannot write '" + vehicles_csv.string() + "'");
  v << kVehicleTraceHeader << '\n';
  for (const auto& tr : workload.vehicles) {
    for (const auto& w : tr.waypoints) {
      v << tr.id << ',' << csv::exact(w.t.seconds) << ',' << csv::exact(w.position.x) << ','
        << csv::exact(w.position.y) << '\n';
    }
  }
  if (!s || !v) throw IoError("failed writing workload trace");
}

Workload load_workload_trace(const std::filesystem::path& sessions_csv, const std::filesystem::path& vehicles_csv) {
  Workload out;
  std::map<std::uint64_t, std::size_t> vehicle_index;
  std::map<std::uint64_t, std::size_t> vehicle_line;
  for (const auto& row : csv::read(vehicles_csv, kVehicleTraceHeader)) {
    const auto id = csv::to_u64(row.fields[0], row.line, "vehicle_id");
    Waypoint w{SimTime{csv::to_double(row.fields[1], row.line, "t_s")},
               {csv::to_double(row.fields[2], row.line, "x_m"), csv::to_double(row.fields[3], row.line, "y_m")}};
    auto [it, inserted] = vehicle_index.try_emplace(id, out.vehicles.size());
    if (inserted) {
      out.vehicles.push_back(VehicleTrace{id, {}});
    } else if (vehicle_line[id] + 1 != row.line) {
      throw ValidationError("vehicle rows contiguous", "vehicle " + std::to_string(id), row.line);
    }
    vehicle_line[id] = row.line;
    auto& trace = out.vehicles[it->second];
    if (!trace.waypoints.empty() && !(w.t > trace.waypoints.back().t)) {
      throw ValidationError("waypoint times strictly increasing", "vehicle " + std::to_string(id), row.line);
    }
    trace.waypoints.push_back(w);
  }

  std::set<std::uint64_t> session_ids;
  for (const auto& row : csv::read(sessions_csv, kSessionTraceHeader)) {
    SessionRequest s;
    s.id = csv::to_u64(row.fields[0], row.line, "session_id");
    s.vehicle_id = csv::to_u64(row.fields[1], row.line, "vehicle_id");
    s.start = SimTime{csv::to_double(row.fields[2], row.line, "start_s")};
    s.duration_s = csv::to_double(row.fields[3], row.line, "duration_s");
    s.demand = csv::to_double(row.fields[4], row.line, "demand_units");
    if (!session_ids.insert(s.id).second) throw ValidationError("session ids unique", "", row.line);
    if (s.start.seconds < 0.0) throw ValidationError("start_s >= 0", "", row.line);
    if (!(s.duration_s > 0.0)) throw ValidationError("duration > 0", "", row.line);
    if (!(s.demand > 0.0)) throw ValidationError("demand > 0", "", row.line);
    auto vit = vehicle_index.find(s.vehicle_id);
    if (vit == vehicle_index.end()) {
      throw ValidationError("session vehicle has a trace", "vehicle " + std::to_string(s.vehicle_id), row.line);
    }
    out.sessions.push_back(s);
  }
  return out;
}

}  // namespace edgefed
