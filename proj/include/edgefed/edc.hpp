#pragma once

#include <cstdint>
#include <optional>
#include <variant>

#include "edgefed/demand.hpp"
#include "edgefed/kernel.hpp"

namespace edgefed {

/// Utilization-driven IT power: p_max * (idle_fraction + (1 - idle_fraction) * u).
struct ItPowerModel {
  double p_max = 50000.0;
  double idle_fraction = 0.0;
  void validate() const;
};

/// Two-phase immersion tank with a dry cooler. The pump runs at its minimum
/// flow whenever there is IT load, so cooling power is a constant.
struct ImmersionCoolingSpec {
  double pump_power = 1300.0;
  double standby_power = 0.0;
  double capacity = 50000.0;  ///< extractable IT heat, W
  double dt1_max = 20.0;
  double dt2_max = 8.0;
  double boiling_point = 61.0;
  void validate() const;
};

/// Air cooling overhead kappa(T) * p_it with kappa(T) = kappa0 * (1 + alpha * (T - t_ref)).
struct AirCoolingSpec {
  double kappa0 = 0.55;
  double alpha = 0.01;
  double t_ref = 20.0;
  void validate() const;
  double kappa(double t_amb) const { return kappa0 * (1.0 + alpha * (t_amb - t_ref)); }
};

using CoolingSpec = std::variant<AirCoolingSpec, ImmersionCoolingSpec>;

struct CoolingState {
  double t_amb = 0.0;
  double t_in = 0.0;
  double t_out = 0.0;
  double dt1() const { return t_in - t_amb; }
  double dt2() const { return t_in - t_out; }
};

/// Outdoor temperature: mean + amplitude * cos(2 pi (hour - peak_hour) / 24).
struct AmbientProfile {
  double mean_c = 20.0;
  double amplitude_c = 0.0;
  double peak_hour = 15.0;
  double at(SimTime t) const;
};

struct EdcSpec {
  std::uint32_t id = 0;
  Point position;
  int slots = 18;
  ItPowerModel it_model;
  CoolingSpec cooling = ImmersionCoolingSpec{};
  AmbientProfile ambient;
  void validate() const;
  bool immersion() const { return std::holds_alternative<ImmersionCoolingSpec>(cooling); }
};

struct PowerBreakdown {
  double p_it = 0.0;
  double p_cool = 0.0;
  double p_total = 0.0;
  bool operator==(const PowerBreakdown&) const = default;
};

double it_power(double utilization, const ItPowerModel& model);
CoolingState immersion_thermal_state(double t_amb, const ImmersionCoolingSpec& spec);
double cooling_power(double p_it, double t_amb, const CoolingSpec& cooling);
double pue(double p_it, double p_cool);
PowerBreakdown edc_power(const EdcSpec& spec, int occupied_slots, double t_amb);

/// Whole slots needed for a demand in GPU-slot units (ceiling).
int demand_slots(double demand);

/// New occupancy if the demand fits, otherwise nullopt (a rejection, not an error).
std::optional<int> admit(const EdcSpec& spec, int current_occupied, int demand);

}  // namespace edgefed
