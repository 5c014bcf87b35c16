#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "edgefed/error.hpp"
#include "edgefed/random.hpp"
#include "edgefed/runner.hpp"
#include "json.hpp"
#include "json_reader.hpp"

namespace edgefed {

using nlohmann::json;
using detail::check;
using detail::index_path;
using detail::ObjectReader;
using detail::require_array;

namespace {

EdcSite parse_edc(const json& v, const std::string& path) {
  ObjectReader r(v, path);
  EdcSite site;
  auto& spec = site.spec;
  const auto id = r.integer("id");
  if (id < 0 || id > 0xffffffffLL) throw ValidationError("EDC id in [0, 2^32)", r.sub("id"));
  spec.id = static_cast<std::uint32_t>(id);
  spec.position = {r.number("x_m"), r.number("y_m")};
  const auto slots = r.integer("slots", 18);
  if (slots < 1 || slots > 1000000) throw ValidationError("slots >= 1", r.sub("slots"));
  spec.slots = static_cast<int>(slots);

  {
    ObjectReader it(r.require("it_model"), r.sub("it_model"));
    spec.it_model.p_max = it.number("p_max_w");
    spec.it_model.idle_fraction = it.number("idle_fraction", 0.0);
    it.finish();
  }
  {
    ObjectReader c(r.require("cooling"), r.sub("cooling"));
    const auto type = c.string("type");
    if (type == "immersion") {
      ImmersionCoolingSpec imm;
      imm.pump_power = c.number("pump_power_w", imm.pump_power);
      imm.standby_power = c.number("standby_power_w", imm.standby_power);
      imm.capacity = c.number("capacity_w", imm.capacity);
      imm.dt1_max = c.number("dt1_max_k", imm.dt1_max);
      imm.dt2_max = c.number("dt2_max_k", imm.dt2_max);
      imm.boiling_point = c.number("boiling_point_c", imm.boiling_point);
      spec.cooling = imm;
    } else if (type == "air") {
      AirCoolingSpec air;
      air.kappa0 = c.number("kappa0", air.kappa0);
      air.alpha = c.number("alpha_per_k", air.alpha);
      air.t_ref = c.number("t_ref_c", air.t_ref);
      spec.cooling = air;
    } else {
      throw ValidationError("cooling.type is air or immersion", c.sub("type"));
    }
    c.finish();
  }
  if (const json* amb = r.find("ambient")) {
    ObjectReader a(*amb, r.sub("ambient"));
    spec.ambient.mean_c = a.number("mean_c", spec.ambient.mean_c);
    spec.ambient.amplitude_c = a.number("amplitude_c", spec.ambient.amplitude_c);
    spec.ambient.peak_hour = a.number("peak_hour", spec.ambient.peak_hour);
    a.finish();
  }
  if (const json* tariff = r.find("tariff")) {
    std::vector<PriceTier> tiers;
    const auto& arr = require_array(*tariff, r.sub("tariff"));
    for (std::size_t i = 0; i < arr.size(); ++i) {
      ObjectReader t(arr[i], index_path(r.sub("tariff"), i));
      tiers.push_back({t.number("start_hour"), t.number("end_hour"), t.number("price_eur_kwh")});
      t.finish();
    }
    check(r.sub("tariff"), [&] { site.grid.tariff = PriceSchedule(tiers); });
  }
  if (const json* solar = r.find("solar")) {
    ObjectReader s(*solar, r.sub("solar"));
    site.grid.solar.peak_power = s.number("peak_power_w", 0.0);
    site.grid.solar.sunrise_hour = s.number("sunrise_hour", site.grid.solar.sunrise_hour);
    site.grid.solar.sunset_hour = s.number("sunset_hour", site.grid.solar.sunset_hour);
    s.finish();
  }
  if (const json* bat = r.find("battery")) {
    ObjectReader b(*bat, r.sub("battery"));
    BatterySpec spec_b;
    spec_b.capacity = b.number("capacity_wh");
    spec_b.max_charge = b.number("max_charge_w");
    spec_b.max_discharge = b.number("max_discharge_w");
    spec_b.round_trip_efficiency = b.number("round_trip_efficiency", 1.0);
    site.initial_soc_wh = b.number("initial_soc_wh", 0.0);
    b.finish();
    site.grid.battery = spec_b;
  }
  r.finish();
  return site;
}

DemandProfile parse_profile(ObjectReader& r) {
  DemandProfile p;
  p.base_rate = r.number("base_rate_per_h");
  p.diurnal_amplitude = r.number("diurnal_amplitude", p.diurnal_amplitude);
  p.peak_hour = r.number("peak_hour", p.peak_hour);
  if (const json* w = r.find("weekly_factor")) {
    const auto& arr = require_array(*w, r.sub("weekly_factor"));
    if (arr.size() != 7) throw ValidationError("weekly_factor has 7 entries", r.sub("weekly_factor"));
    for (std::size_t i = 0; i < 7; ++i) {
      if (!arr[i].is_number()) throw ParseError(index_path(r.sub("weekly_factor"), i), "expected a number");
      p.weekly_factor[i] = arr[i].get<double>();
    }
  }
  p.session_duration_s = r.number("session_duration_s", p.session_duration_s);
  p.session_demand = r.number("session_demand_units", p.session_demand);
  p.min_speed_mps = r.number("min_speed_mps", p.min_speed_mps);
  p.max_speed_mps = r.number("max_speed_mps", p.max_speed_mps);
  return p;
}

ExperimentConfig parse_root(const json& root, const std::filesystem::path& base_dir) {
  ObjectReader r(root, "");
  ExperimentConfig cfg;
  const auto version = r.integer("config_version");
  if (version != 1) throw ValidationError("config_version == 1", "config_version");

  if (const json* k = r.find("kernel")) {
    ObjectReader kr(*k, "kernel");
    cfg.kernel.horizon = SimTime{kr.number("horizon_s", cfg.kernel.horizon.seconds)};
    cfg.kernel.sample_step = kr.number("sample_step_s", cfg.kernel.sample_step);
    cfg.kernel.seed = kr.unsigned_integer("seed", cfg.kernel.seed);
    kr.finish();
  }

  const auto& aps = require_array(r.require("access_points"), "access_points");
  for (std::size_t i = 0; i < aps.size(); ++i) {
    ObjectReader a(aps[i], index_path("access_points", i));
    AccessPoint ap;
    const auto id = a.integer("id");
    if (id < 0 || id > 0xffffffffLL) throw ValidationError("AP id in [0, 2^32)", a.sub("id"));
    ap.id = static_cast<std::uint32_t>(id);
    ap.position = {a.number("x_m"), a.number("y_m")};
    ap.coverage_radius = a.number("coverage_radius_m");
    a.finish();
    cfg.access_points.push_back(ap);
  }

  const auto& edcs = require_array(r.require("edcs"), "edcs");
  for (std::size_t i = 0; i < edcs.size(); ++i) cfg.edcs.push_back(parse_edc(edcs[i], index_path("edcs", i)));

  {
    ObjectReader d(r.require("demand"), "demand");
    if (const json* trace = d.find("trace")) {
      ObjectReader t(*trace, "demand.trace");
      auto resolve = [&](std::string p) {
        std::filesystem::path path(p);
        return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
      };
      cfg.demand.sessions_trace = resolve(t.string("sessions"));
      cfg.demand.vehicles_trace = resolve(t.string("vehicles"));
      t.finish();
    } else {
      cfg.demand.profile = parse_profile(d);
    }
    d.finish();
  }

  check("policy", [&] { cfg.policy = parse_policy(r.string("policy", "nearest")); });
  if (const json* dm = r.find("delay_model")) {
    ObjectReader m(*dm, "delay_model");
    cfg.delay_model.base_latency_ms = m.number("base_latency_ms", cfg.delay_model.base_latency_ms);
    cfg.delay_model.per_meter_latency_ms = m.number("per_meter_latency_ms", cfg.delay_model.per_meter_latency_ms);
    m.finish();
  }
  cfg.max_delay_ms = r.number("max_delay_ms", cfg.max_delay_ms);
  r.finish();
  cfg.validate();
  return cfg;
}

json site_json(const EdcSite& site) {
  const auto& s = site.spec;
  json j;
  j["id"] = s.id;
  j["x_m"] = s.position.x;
  j["y_m"] = s.position.y;
  j["slots"] = s.slots;
  j["it_model"] = {{"p_max_w", s.it_model.p_max}, {"idle_fraction", s.it_model.idle_fraction}};
  if (const auto* imm = std::get_if<ImmersionCoolingSpec>(&s.cooling)) {
    j["cooling"] = {{"type", "immersion"},         {"pump_power_w", imm->pump_power},
                    {"standby_power_w", imm->standby_power}, {"capacity_w", imm->capacity},
                    {"dt1_max_k", imm->dt1_max},     {"dt2_max_k", imm->dt2_max},
                    {"boiling_point_c", imm->boiling_point}};
  } else {
    const auto& air = std::get<AirCoolingSpec>(s.cooling);
    j["cooling"] = {{"type", "air"}, {"kappa0", air.kappa0}, {"alpha_per_k", air.alpha}, {"t_ref_c", air.t_ref}};
  }
  j["ambient"] = {{"mean_c", s.ambient.mean_c}, {"amplitude_c", s.ambient.amplitude_c}, {"peak_hour", s.ambient.peak_hour}};
  json tiers = json::array();
  for (const auto& t : site.grid.tariff.tiers()) {
    tiers.push_back({{"start_hour", t.start_hour}, {"end_hour", t.end_hour}, {"price_eur_kwh", t.price}});
  }
  j["tariff"] = tiers;
  j["solar"] = {{"peak_power_w", site.grid.solar.peak_power},
                {"sunrise_hour", site.grid.solar.sunrise_hour},
                {"sunset_hour", site.grid.solar.sunset_hour}};
  if (site.grid.battery) {
    const auto& b = *site.grid.battery;
    j["battery"] = {{"capacity_wh", b.capacity},
                    {"max_charge_w", b.max_charge},
                    {"max_discharge_w", b.max_discharge},
                    {"round_trip_efficiency", b.round_trip_efficiency},
                    {"initial_soc_wh", site.initial_soc_wh}};
  } else {
    j["battery"] = nullptr;
  }
  return j;
}

json config_json(const ExperimentConfig& cfg, bool with_policy) {
  json j;
  j["config_version"] = 1;
  j["kernel"] = {{"horizon_s", cfg.kernel.horizon.seconds},
                 {"sample_step_s", cfg.kernel.sample_step},
                 {"seed", cfg.kernel.seed}};
  json aps = json::array();
  for (const auto& ap : cfg.access_points) {
    aps.push_back({{"id", ap.id}, {"x_m", ap.position.x}, {"y_m", ap.position.y}, {"coverage_radius_m", ap.coverage_radius}});
  }
  j["access_points"] = aps;
  json edcs = json::array();
  for (const auto& site : cfg.edcs) edcs.push_back(site_json(site));
  j["edcs"] = edcs;
  if (cfg.demand.profile) {
    const auto& p = *cfg.demand.profile;
    j["demand"] = {{"base_rate_per_h", p.base_rate},
                   {"diurnal_amplitude", p.diurnal_amplitude},
                   {"peak_hour", p.peak_hour},
                   {"weekly_factor", p.weekly_factor},
                   {"session_duration_s", p.session_duration_s},
                   {"session_demand_units", p.session_demand},
                   {"min_speed_mps", p.min_speed_mps},
                   {"max_speed_mps", p.max_speed_mps}};
  } else {
    j["demand"] = {{"trace",
                    {{"sessions", cfg.demand.sessions_trace.generic_string()},
                     {"vehicles", cfg.demand.vehicles_trace.generic_string()}}}};
  }
  if (with_policy) j["policy"] = std::string(policy_name(cfg.policy));
  j["delay_model"] = {{"base_latency_ms", cfg.delay_model.base_latency_ms},
                      {"per_meter_latency_ms", cfg.delay_model.per_meter_latency_ms}};
  j["max_delay_ms"] = cfg.max_delay_ms;
  return j;
}

}  // namespace

void ExperimentConfig::validate() {
  warnings.clear();
  check("kernel", [&] { kernel.validate(); });
  if (access_points.empty()) throw ValidationError("at least one access point", "access_points");
  if (edcs.empty()) throw ValidationError("at least one EDC", "edcs");
  check("access_points", [&] { validate_access_points(access_points); });
  std::set<std::uint32_t> ids;
  for (std::size_t i = 0; i < edcs.size(); ++i) {
    const auto path = index_path("edcs", i);
    auto& site = edcs[i];
    if (!ids.insert(site.spec.id).second) throw ValidationError("EDC ids unique", path);
    check(path, [&] { site.spec.validate(); });
    check(path + ".solar", [&] { site.grid.solar.validate(); });
    if (site.grid.battery) {
      check(path + ".battery", [&] { site.grid.battery->validate(); });
      if (!(site.initial_soc_wh >= 0.0 && site.initial_soc_wh <= site.grid.battery->capacity)) {
        throw ValidationError("0 <= initial_soc_wh <= capacity", path + ".battery");
      }
    } else if (site.initial_soc_wh != 0.0) {
      throw ValidationError("initial_soc_wh requires a battery", path);
    }
  }
  if (demand.profile) check("demand", [&] { demand.profile->validate(); });
  check("delay_model", [&] { delay_model.validate(); });
  if (!(max_delay_ms > 0.0)) throw ValidationError("max_delay_ms > 0", "max_delay_ms");

  for (const auto& site : edcs) {
    bool reachable = false;
    for (const auto& ap : access_points) {
      if (delay_model.delay_ms(distance(ap.position, site.spec.position)) <= max_delay_ms) reachable = true;
    }
    if (!reachable) {
      warnings.push_back("EDC " + std::to_string(site.spec.id) + " is not reachable from any AP within max_delay");
    }
  }
}

std::string ExperimentConfig::canonical_json() const { return config_json(*this, true).dump(2) + "\n"; }

std::string ExperimentConfig::scenario_hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(config_json(*this, false).dump())));
  return buf;
}

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("byte " + std::to_string(e.byte), e.what());
  }
  return parse_root(root, base_dir);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

}  // namespace edgefed
