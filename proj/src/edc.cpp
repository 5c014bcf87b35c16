#include "edgefed/edc.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "edgefed/error.hpp"

namespace edgefed {

void ItPowerModel::validate() const {
  if (!(p_max > 0.0)) throw InvalidConfig("it_model.p_max must be > 0");
  if (!(idle_fraction >= 0.0 && idle_fraction <= 1.0)) throw InvalidConfig("it_model.idle_fraction must lie in [0, 1]");
}

void ImmersionCoolingSpec::validate() const {
  if (!(pump_power > 0.0)) throw InvalidConfig("pump_power must be > 0");
  if (!(standby_power >= 0.0)) throw InvalidConfig("standby_power must be >= 0");
  if (!(capacity > 0.0)) throw InvalidConfig("cooling capacity must be > 0");
  if (!(dt2_max > 0.0 && dt2_max <= dt1_max)) throw InvalidConfig("need 0 < dt2_max <= dt1_max");
}

void AirCoolingSpec::validate() const {
  if (!(kappa0 > 0.0)) throw InvalidConfig("kappa0 must be > 0");
  if (!std::isfinite(alpha) || !std::isfinite(t_ref)) throw InvalidConfig("alpha and t_ref must be finite");
}

double AmbientProfile::at(SimTime t) const {
  const double hour = std::fmod(t.seconds, 86400.0) / 3600.0;
  return mean_c + amplitude_c * std::cos(2.0 * std::numbers::pi * (hour - peak_hour) / 24.0);
}

void EdcSpec::validate() const {
  if (slots < 1) throw InvalidConfig("EDC " + std::to_string(id) + ": slots must be >= 1");
  it_model.validate();
  if (const auto* imm = std::get_if<ImmersionCoolingSpec>(&cooling)) {
    imm->validate();
    if (it_model.p_max > imm->capacity) {
      throw InvalidConfig("EDC " + std::to_string(id) + ": p_max exceeds immersion cooling capacity");
    }
  } else {
    const auto& air = std::get<AirCoolingSpec>(cooling);
    air.validate();
    const double lo = ambient.mean_c - std::abs(ambient.amplitude_c);
    const double hi = ambient.mean_c + std::abs(ambient.amplitude_c);
    if (!(air.kappa(lo) > 0.0 && air.kappa(hi) > 0.0)) {
      throw InvalidConfig("EDC " + std::to_string(id) + ": kappa must stay > 0 over the ambient range");
    }
  }
}

double it_power(double utilization, const ItPowerModel& model) {
  if (!(utilization >= 0.0 && utilization <= 1.0)) {
    throw DomainError("utilization " + std::to_string(utilization) + " outside [0, 1]");
  }
  return model.p_max * (model.idle_fraction + (1.0 - model.idle_fraction) * utilization);
}

CoolingState immersion_thermal_state(double t_amb, const ImmersionCoolingSpec& spec) {
  // Dry cooler runs at the top of both supported temperature differences.
  CoolingState s;
  s.t_amb = t_amb;
  s.t_in = t_amb + spec.dt1_max;
  s.t_out = s.t_in - spec.dt2_max;
  return s;
}

double cooling_power(double p_it, double t_amb, const CoolingSpec& cooling) {
  if (!(p_it >= 0.0)) throw DomainError("p_it must be >= 0");
  if (const auto* imm = std::get_if<ImmersionCoolingSpec>(&cooling)) {
    if (p_it > imm->capacity) {
      throw CapacityExceeded("IT heat " + std::to_string(p_it) + " W exceeds immersion capacity " +
                             std::to_string(imm->capacity) + " W");
    }
    return p_it > 0.0 ? imm->pump_power : imm->standby_power;
  }
  return std::get<AirCoolingSpec>(cooling).kappa(t_amb) * p_it;
}

double pue(double p_it, double p_cool) {
  if (!(p_it > 0.0)) throw UndefinedPue("PUE is undefined without IT power");
  return (p_it + p_cool) / p_it;
}

PowerBreakdown edc_power(const EdcSpec& spec, int occupied_slots, double t_amb) {
  if (occupied_slots < 0 || occupied_slots > spec.slots) {
    throw DomainError("occupied slots " + std::to_string(occupied_slots) + " outside [0, " +
                      std::to_string(spec.slots) + "]");
  }
  PowerBreakdown p;
  p.p_it = it_power(static_cast<double>(occupied_slots) / spec.slots, spec.it_model);
  p.p_cool = cooling_power(p.p_it, t_amb, spec.cooling);
  p.p_total = p.p_it + p.p_cool;
  return p;
}

int demand_slots(double demand) {
  if (!(demand > 0.0)) throw DomainError("demand must be > 0");
  return static_cast<int>(std::ceil(demand));
}

std::optional<int> admit(const EdcSpec& spec, int current_occupied, int demand) {
  if (demand < 1) throw DomainError("demand must be >= 1 slot");
  if (current_occupied + demand > spec.slots) return std::nullopt;
  return current_occupied + demand;
}

}  // namespace edgefed
