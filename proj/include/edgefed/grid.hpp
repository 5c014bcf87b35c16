#pragma once

#include <optional>
#include <vector>

#include "edgefed/kernel.hpp"

namespace edgefed {

struct PriceTier {
  double start_hour = 0.0;
  double end_hour = 24.0;
  double price = 0.1;  ///< EUR per kWh
};

/// Time-of-use tariff. Tiers tile [0, 24) exactly; the cheapest tiers are off-peak.
class PriceSchedule {
 public:
  PriceSchedule() : PriceSchedule(std::vector<PriceTier>{{0.0, 24.0, 0.1}}) {}
  /// Throws InvalidConfig on gaps, overlaps or non-positive prices.
  explicit PriceSchedule(std::vector<PriceTier> tiers);

  double price_at(SimTime t) const;
  bool off_peak_at(SimTime t) const;
  double min_price() const { return min_price_; }
  const std::vector<PriceTier>& tiers() const { return tiers_; }

 private:
  const PriceTier& tier_at(SimTime t) const;
  std::vector<PriceTier> tiers_;
  double min_price_ = 0.0;
};

double price_at(SimTime t, const PriceSchedule& schedule);

struct SolarSpec {
  double peak_power = 0.0;
  double sunrise_hour = 7.0;
  double sunset_hour = 19.0;
  void validate() const;
};

/// Half-sine day profile between sunrise and sunset.
double solar_power(SimTime t, const SolarSpec& spec);

struct BatterySpec {
  double capacity = 50000.0;  ///< Wh
  double max_charge = 10000.0;
  double max_discharge = 10000.0;
  double round_trip_efficiency = 1.0;  ///< applied on charge
  void validate() const;
};

struct BatteryState {
  double soc = 0.0;  ///< Wh
};

/// One controller step of power-flow accounting. p_charge > 0 is charging.
struct GridStep {
  SimTime t;
  double p_edc = 0.0;
  double p_solar = 0.0;
  double p_charge = 0.0;
  double p_cons = 0.0;
  double p_surplus = 0.0;
  double price = 0.0;
  double cost = 0.0;
  bool off_peak = false;

  double discharge() const { return p_charge < 0.0 ? -p_charge : 0.0; }
  double charge() const { return p_charge > 0.0 ? p_charge : 0.0; }
};

struct GridSite {
  PriceSchedule tariff;
  SolarSpec solar;
  std::optional<BatterySpec> battery;
};

struct ControllerResult {
  GridStep step;
  BatteryState battery;
};

/// Price-aware storage controller. Solar serves the load first; surplus
/// charges the battery and the rest is curtailed. Off-peak deficits are drawn
/// from the grid while the battery also charges from the grid; other
/// deficits are covered by discharging before drawing from the grid.
ControllerResult controller_step(SimTime t, double p_edc, BatteryState battery, const GridSite& site, double dt);

double step_cost(double p_cons, double dt, double price);

/// Largest extra load the site can absorb at zero grid cost right now: free
/// solar surplus plus, outside off-peak, unused battery discharge rate.
double free_power_headroom(SimTime t, double p_edc, BatteryState battery, const GridSite& site, double dt);

}  // namespace edgefed
