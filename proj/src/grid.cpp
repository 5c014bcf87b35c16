#include "edgefed/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "edgefed/error.hpp"

namespace edgefed {

namespace {
double hour_of_day(SimTime t) {
  double h = std::fmod(t.seconds, 86400.0) / 3600.0;
  if (h < 0.0) h += 24.0;
  return h;
}
}  // namespace

PriceSchedule::PriceSchedule(std::vector<PriceTier> tiers) : tiers_(std::move(tiers)) {
  if (tiers_.empty()) throw InvalidConfig("price schedule needs at least one tier");
  std::sort(tiers_.begin(), tiers_.end(), [](const PriceTier& a, const PriceTier& b) { return a.start_hour < b.start_hour; });
  double expected = 0.0;
  for (const auto& tier : tiers_) {
    if (tier.start_hour != expected) throw InvalidConfig("price tiers must cover [0, 24) without gaps or overlaps");
    if (!(tier.end_hour > tier.start_hour)) throw InvalidConfig("price tier must have end_hour > start_hour");
    if (!(tier.price > 0.0)) throw InvalidConfig("price tiers must have price > 0");
    expected = tier.end_hour;
  }
  if (expected != 24.0) throw InvalidConfig("price tiers must cover [0, 24) without gaps or overlaps");
  min_price_ = std::min_element(tiers_.begin(), tiers_.end(), [](const auto& a, const auto& b) {
                 return a.price < b.price;
               })->price;
}

const PriceTier& PriceSchedule::tier_at(SimTime t) const {
  const double h = hour_of_day(t);
  for (const auto& tier : tiers_) {
    if (h >= tier.start_hour && h < tier.end_hour) return tier;
  }
  return tiers_.back();
}

double PriceSchedule::price_at(SimTime t) const { return tier_at(t).price; }

bool PriceSchedule::off_peak_at(SimTime t) const { return tier_at(t).price == min_price_; }

double price_at(SimTime t, const PriceSchedule& schedule) { return schedule.price_at(t); }

void SolarSpec::validate() const {
  if (!(peak_power >= 0.0)) throw InvalidConfig("solar peak_power must be >= 0");
  if (!(sunrise_hour >= 0.0 && sunrise_hour < sunset_hour && sunset_hour <= 24.0)) {
    throw InvalidConfig("solar needs 0 <= sunrise < sunset <= 24");
  }
}

double solar_power(SimTime t, const SolarSpec& spec) {
  const double h = hour_of_day(t);
  if (h <= spec.sunrise_hour || h >= spec.sunset_hour) return 0.0;
  const double p =
      spec.peak_power * std::sin(std::numbers::pi * (h - spec.sunrise_hour) / (spec.sunset_hour - spec.sunrise_hour));
  return std::max(0.0, p);
}

void BatterySpec::validate() const {
  if (!(capacity > 0.0)) throw InvalidConfig("capacity > 0");
  if (!(max_charge > 0.0)) throw InvalidConfig("max_charge > 0");
  if (!(max_discharge > 0.0)) throw InvalidConfig("max_discharge > 0");
  if (!(round_trip_efficiency > 0.0 && round_trip_efficiency <= 1.0)) {
    throw InvalidConfig("round_trip_efficiency in (0, 1]");
  }
}

double step_cost(double p_cons, double dt, double price) { return p_cons * dt / 3600.0 / 1000.0 * price; }

ControllerResult controller_step(SimTime t, double p_edc, BatteryState battery, const GridSite& site, double dt) {
  if (!(p_edc >= 0.0)) throw DomainError("p_edc must be >= 0");
  if (!(dt > 0.0)) throw DomainError("dt must be > 0");

  GridStep g;
  g.t = t;
  g.p_edc = p_edc;
  g.p_solar = solar_power(t, site.solar);
  g.price = site.tariff.price_at(t);
  g.off_peak = site.tariff.off_peak_at(t);

  const BatterySpec* bat = site.battery ? &*site.battery : nullptr;
  const double headroom_w = bat ? std::max(0.0, bat->capacity - battery.soc) * 3600.0 / dt : 0.0;
  const double stored_w = bat ? std::max(0.0, battery.soc) * 3600.0 / dt : 0.0;

  if (g.p_solar > p_edc) {
    const double excess = g.p_solar - p_edc;
    g.p_charge = bat ? std::min({excess, bat->max_charge, headroom_w}) : 0.0;
    g.p_surplus = excess - g.p_charge;
    g.p_cons = 0.0;
  } else {
    const double deficit = p_edc - g.p_solar;
    if (!g.off_peak) {
      const double discharge = bat ? std::min({deficit, bat->max_discharge, stored_w}) : 0.0;
      g.p_charge = -discharge;
      g.p_cons = deficit - discharge;
    } else {
      g.p_charge = bat ? std::min(bat->max_charge, headroom_w) : 0.0;
      g.p_cons = deficit + g.p_charge;
    }
  }

  BatteryState next = battery;
  if (bat) {
    const double energy_wh = g.p_charge * dt / 3600.0;
    next.soc += energy_wh > 0.0 ? energy_wh * bat->round_trip_efficiency : energy_wh;
    next.soc = std::clamp(next.soc, 0.0, bat->capacity);
  }
  g.cost = step_cost(g.p_cons, dt, g.price);
  return {g, next};
}

double free_power_headroom(SimTime t, double p_edc, BatteryState battery, const GridSite& site, double dt) {
  const double solar = solar_power(t, site.solar);
  double free = std::max(0.0, solar - p_edc);
  if (site.battery && !site.tariff.off_peak_at(t)) {
    const double rate = std::min(site.battery->max_discharge, std::max(0.0, battery.soc) * 3600.0 / dt);
    const double used = std::max(0.0, p_edc - solar);
    free += std::max(0.0, rate - used);
  }
  return free;
}

}  // namespace edgefed
