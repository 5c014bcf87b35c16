#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "edgefed/kernel.hpp"
#include "edgefed/random.hpp"

namespace edgefed {

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

double distance(Point a, Point b);

struct AccessPoint {
  std::uint32_t id = 0;
  Point position;
  double coverage_radius = 1.0;
};

struct Waypoint {
  SimTime t;
  Point position;
  bool operator==(const Waypoint&) const = default;
};

struct VehicleTrace {
  std::uint64_t id = 0;
  std::vector<Waypoint> waypoints;

  /// Linear interpolation; clamps to the first/last waypoint outside the span.
  Point position_at(SimTime t) const;
  bool operator==(const VehicleTrace&) const = default;
};

struct SessionRequest {
  std::uint64_t id = 0;
  std::uint64_t vehicle_id = 0;
  SimTime start;
  double duration_s = 600.0;
  double demand = 1.0;  ///< GPU-slot units
  bool operator==(const SessionRequest&) const = default;
};

struct DemandProfile {
  double base_rate = 60.0;  ///< sessions per hour
  double diurnal_amplitude = 0.0;
  double peak_hour = 18.0;
  std::array<double, 7> weekly_factor{1, 1, 1, 1, 1, 1, 1};

  /// Session parameters the model leaves open; defaults are assumptions.
  double session_duration_s = 600.0;
  double session_demand = 1.0;
  double min_speed_mps = 8.0;
  double max_speed_mps = 20.0;

  /// Throws InvalidProfile if the rate can go negative or parameters are out of range.
  void validate() const;

  /// Instantaneous arrival rate in sessions per hour.
  double rate_at(SimTime t) const;
  double max_rate() const;
};

struct Workload {
  std::vector<VehicleTrace> vehicles;
  std::vector<SessionRequest> sessions;
  bool operator==(const Workload&) const = default;
};

/// Session start times of a nonhomogeneous Poisson process on [0, horizon),
/// sampled by thinning against the profile's peak rate.
std::vector<double> sample_arrivals(const DemandProfile& profile, SimTime horizon, Rng& rng);

Workload generate_workload(const DemandProfile& profile, std::span<const AccessPoint> aps, SimTime horizon,
                           std::uint64_t seed);

/// Nearest access point covering `position`; ties go to the lower id.
std::optional<std::uint32_t> serving_ap(Point position, std::span<const AccessPoint> aps);

void validate_access_points(std::span<const AccessPoint> aps);

/// Session and vehicle trace CSVs (schemas in README). Numbers are written
/// with 17 significant digits so a write/load cycle is lossless.
void write_workload(const Workload& workload, const std::filesystem::path& sessions_csv,
                    const std::filesystem::path& vehicles_csv);
Workload load_workload_trace(const std::filesystem::path& sessions_csv, const std::filesystem::path& vehicles_csv);

inline constexpr const char* kSessionTraceHeader = "session_id,vehicle_id,start_s,duration_s,demand_units";
inline constexpr const char* kVehicleTraceHeader = "vehicle_id,t_s,x_m,y_m";

}  // namespace edgefed
