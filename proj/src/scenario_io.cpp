#include <cstdio>
#include <fstream>
#include <sstream>

#include "edgefed/error.hpp"
#include "edgefed/random.hpp"
#include "edgefed/scenario.hpp"
#include "json.hpp"
#include "json_reader.hpp"

namespace edgefed::scenario {

using nlohmann::json;
using detail::check;
using detail::ObjectReader;

void ScenarioConfig::validate() const {
  check("generator", [&] { generator.validate(); });
  check("anomaly", [&] { dataset.anomaly.validate(generator.window_length); });
  if (!(dataset.anomaly_rate >= 0.0 && dataset.anomaly_rate <= 1.0)) {
    throw ValidationError("0 <= anomaly_rate <= 1", "dataset.anomaly_rate");
  }
  if (dataset.real_windows == 0) throw ValidationError("real_windows >= 1", "dataset.real_windows");
  if (lag == 0 || lag >= generator.window_length) throw ValidationError("1 <= lag < window_length", "predictor.lag");
  if (!(ridge >= 0.0)) throw ValidationError("ridge >= 0", "predictor.ridge");
}

std::string ScenarioConfig::canonical_json() const {
  const auto& g = generator;
  const auto& a = dataset.anomaly;
  json j;
  j["config_version"] = 1;
  j["seed"] = seed;
  j["generator"] = {{"n_sensors", g.n_sensors},     {"window_length", g.window_length}, {"step_s", g.step_s},
                    {"start_epoch_s", g.start_epoch_s}, {"temp_mean_c", g.temp_mean},   {"temp_std_c", g.temp_std},
                    {"hum_mean_pct", g.hum_mean},   {"hum_std_pct", g.hum_std},         {"ar_coeff", g.ar_coeff},
                    {"th_correlation", g.th_correlation}};
  j["anomaly"] = {{"step_index", a.step_index},
                  {"temp_spike_c", a.temp_spike},
                  {"hum_drop_pct", a.hum_drop},
                  {"decay", a.decay}};
  j["dataset"] = {{"real_windows", dataset.real_windows},
                  {"synthetic_ratio", dataset.synthetic_ratio},
                  {"anomaly_rate", dataset.anomaly_rate}};
  j["predictor"] = {{"lag", lag}, {"ridge", ridge}};
  return j.dump(2) + "\n";
}

std::string ScenarioConfig::config_hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical_json())));
  return buf;
}

ScenarioConfig parse_scenario_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("byte " + std::to_string(e.byte), e.what());
  }
  ObjectReader r(root, "");
  if (r.integer("config_version") != 1) throw ValidationError("config_version == 1", "config_version");
  ScenarioConfig c;
  c.seed = r.unsigned_integer("seed", c.seed);
  if (const json* gj = r.find("generator")) {
    ObjectReader g(*gj, "generator");
    auto& gen = c.generator;
    gen.n_sensors = static_cast<std::uint32_t>(g.unsigned_integer("n_sensors", gen.n_sensors));
    gen.window_length = g.unsigned_integer("window_length", gen.window_length);
    gen.step_s = g.number("step_s", gen.step_s);
    gen.start_epoch_s = g.integer("start_epoch_s", gen.start_epoch_s);
    gen.temp_mean = g.number("temp_mean_c", gen.temp_mean);
    gen.temp_std = g.number("temp_std_c", gen.temp_std);
    gen.hum_mean = g.number("hum_mean_pct", gen.hum_mean);
    gen.hum_std = g.number("hum_std_pct", gen.hum_std);
    gen.ar_coeff = g.number("ar_coeff", gen.ar_coeff);
    gen.th_correlation = g.number("th_correlation", gen.th_correlation);
    g.finish();
  }
  if (const json* aj = r.find("anomaly")) {
    ObjectReader a(*aj, "anomaly");
    auto& an = c.dataset.anomaly;
    an.step_index = a.unsigned_integer("step_index", an.step_index);
    an.temp_spike = a.number("temp_spike_c", an.temp_spike);
    an.hum_drop = a.number("hum_drop_pct", an.hum_drop);
    an.decay = a.number("decay", an.decay);
    a.finish();
  }
  if (const json* dj = r.find("dataset")) {
    ObjectReader d(*dj, "dataset");
    c.dataset.real_windows = d.unsigned_integer("real_windows", c.dataset.real_windows);
    c.dataset.synthetic_ratio = d.unsigned_integer("synthetic_ratio", c.dataset.synthetic_ratio);
    c.dataset.anomaly_rate = d.number("anomaly_rate", c.dataset.anomaly_rate);
    d.finish();
  }
  if (const json* pj = r.find("predictor")) {
    ObjectReader p(*pj, "predictor");
    c.lag = p.unsigned_integer("lag", c.lag);
    c.ridge = p.number("ridge", c.ridge);
    p.finish();
  }
  r.finish();
  c.validate();
  return c;
}

ScenarioConfig load_scenario_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario_config(ss.str());
}

void write_manifest(const Manifest& m, const std::filesystem::path& path) {
  json j;
  j["seed"] = m.seed;
  j["config_hash"] = m.config_hash;
  j["window_length"] = m.window_length;
  j["step_s"] = m.step_s;
  j["lag"] = m.lag;
  j["ridge"] = m.ridge;
  j["counts"] = {{"real_windows", m.real_windows},
                 {"synthetic_windows", m.synthetic_windows},
                 {"anomalous_windows", m.anomalous_windows},
                 {"frames", m.frames},
                 {"clamp_events", m.clamp_events}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open manifest '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("byte " + std::to_string(e.byte), e.what());
  }
  ObjectReader r(j, "");
  Manifest m;
  m.seed = r.unsigned_integer("seed");
  m.config_hash = r.string("config_hash");
  m.window_length = r.unsigned_integer("window_length");
  m.step_s = r.number("step_s");
  m.lag = r.unsigned_integer("lag");
  m.ridge = r.number("ridge");
  ObjectReader c(r.require("counts"), "counts");
  m.real_windows = c.unsigned_integer("real_windows");
  m.synthetic_windows = c.unsigned_integer("synthetic_windows");
  m.anomalous_windows = c.unsigned_integer("anomalous_windows");
  m.frames = c.unsigned_integer("frames");
  m.clamp_events = c.unsigned_integer("clamp_events");
  c.finish();
  r.finish();
  return m;
}

Manifest generate_dataset(const ScenarioConfig& config, const std::filesystem::path& out_dir) {
  config.validate();
  const auto ds = build_dataset(config.generator, config.dataset, config.seed);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create '" + out_dir.string() + "': " + ec.message());
  write_windows(ds.windows, out_dir / "windows.csv");
  Manifest m;
  m.seed = config.seed;
  m.config_hash = config.config_hash();
  m.window_length = config.generator.window_length;
  m.step_s = config.generator.step_s;
  m.lag = config.lag;
  m.ridge = config.ridge;
  m.real_windows = ds.real;
  m.synthetic_windows = ds.synthetic;
  m.anomalous_windows = ds.anomalous;
  m.frames = ds.windows.size() * config.generator.window_length;
  m.clamp_events = ds.clamp_events;
  write_manifest(m, out_dir / "manifest.json");
  return m;
}

}  // namespace edgefed::scenario
