#include "edgefed/scenario.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <ctime>
#include <fstream>
#include <numeric>

#include "edgefed/csv.hpp"
#include "edgefed/error.hpp"
#include "edgefed/random.hpp"

namespace edgefed::scenario {

bool SensorWindow::frame_anomalous(std::size_t k) const {
  return anomalous && k >= anomaly_step && k < anomaly_end;
}

void GeneratorConfig::validate() const {
  if (n_sensors == 0) throw InvalidConfig("n_sensors must be >= 1");
  if (window_length < 2) throw InvalidConfig("window_length must be >= 2");
  if (!(step_s > 0.0)) throw InvalidConfig("step_s must be > 0");
  if (!(temp_std >= 0.0) || !(hum_std >= 0.0)) throw InvalidConfig("standard deviations must be >= 0");
  if (!(ar_coeff > 0.0 && ar_coeff < 1.0)) throw InvalidConfig("ar_coeff must lie in (0, 1)");
  if (!(th_correlation >= -1.0 && th_correlation < 0.0)) throw InvalidConfig("th_correlation must lie in [-1, 0)");
  if (!(temp_mean >= kTempMin && temp_mean <= kTempMax)) throw InvalidConfig("temp_mean outside physical range");
  if (!(hum_mean >= kHumMin && hum_mean <= kHumMax)) throw InvalidConfig("hum_mean outside physical range");
}

void AnomalySpec::validate(std::size_t window_length) const {
  if (step_index >= window_length) throw InvalidConfig("anomaly step_index must be < window length");
  if (!(temp_spike > 0.0) || !(hum_drop > 0.0)) throw InvalidConfig("anomaly magnitudes must be > 0");
  if (!(decay > 0.0 && decay <= 1.0)) throw InvalidConfig("anomaly decay must lie in (0, 1]");
}

namespace {

struct Clamped {
  Frame frame;
  std::size_t events = 0;
};

Clamped clamp_frame(Frame f) {
  Clamped c{f, 0};
  const double t = std::clamp(f.temperature, kTempMin, kTempMax);
  const double h = std::clamp(f.humidity, kHumMin, kHumMax);
  c.events = (t != f.temperature) + (h != f.humidity);
  c.frame = {t, h};
  return c;
}

SensorWindow generate_window(const GeneratorConfig& config, std::size_t index, std::uint64_t seed) {
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(index)));
  SensorWindow w;
  w.sensor_id = static_cast<std::uint32_t>(index % config.n_sensors);
  const auto round = static_cast<std::int64_t>(index / config.n_sensors);
  w.step_s = config.step_s;
  w.start_epoch_s =
      config.start_epoch_s + round * static_cast<std::int64_t>(std::llround(config.window_length * config.step_s));
  w.frames.reserve(config.window_length);

  const double a = config.ar_coeff;
  const double rho = config.th_correlation;
  const double innov_scale = std::sqrt(1.0 - a * a);
  const double ortho = std::sqrt(1.0 - rho * rho);
  auto correlated = [&] {
    const double z1 = rng.normal();
    const double z2 = rng.normal();
    return std::pair{z1, rho * z1 + ortho * z2};
  };

  // Start from the stationary distribution.
  auto [s1, s2] = correlated();
  double dt = config.temp_std * s1;
  double dh = config.hum_std * s2;
  for (std::size_t k = 0; k < config.window_length; ++k) {
    if (k > 0) {
      auto [e1, e2] = correlated();
      dt = a * dt + config.temp_std * innov_scale * e1;
      dh = a * dh + config.hum_std * innov_scale * e2;
    }
    auto c = clamp_frame({config.temp_mean + dt, config.hum_mean + dh});
    w.clamp_events += c.events;
    w.frames.push_back(c.frame);
  }
  return w;
}

}  // namespace

std::vector<SensorWindow> generate_clean(const GeneratorConfig& config, std::size_t n_windows, std::uint64_t seed) {
  config.validate();
  std::vector<SensorWindow> out(n_windows);
  const auto n = static_cast<std::int64_t>(n_windows);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = generate_window(config, static_cast<std::size_t>(i), seed);
  }
  return out;
}

std::vector<SensorWindow> generate_clean_serial(const GeneratorConfig& config, std::size_t n_windows,
                                                std::uint64_t seed) {
  config.validate();
  std::vector<SensorWindow> out;
  out.reserve(n_windows);
  for (std::size_t i = 0; i < n_windows; ++i) out.push_back(generate_window(config, i, seed));
  return out;
}

SensorWindow inject_anomaly(const SensorWindow& window, const AnomalySpec& spec) {
  spec.validate(window.frames.size());
  SensorWindow out = window;
  out.anomalous = true;
  out.anomaly_step = spec.step_index;
  out.anomaly_end = spec.decay >= 1.0 ? spec.step_index + 1 : window.frames.size();
  double scale = 1.0;
  for (std::size_t k = spec.step_index; k < out.anomaly_end; ++k) {
    const Frame& clean = window.frames[k];
    auto c = clamp_frame({clean.temperature + spec.temp_spike * scale, clean.humidity - spec.hum_drop * scale});
    out.clamp_events += c.events;
    out.frames[k] = c.frame;
    scale *= 1.0 - spec.decay;
  }
  return out;
}

Predictor::Predictor(std::size_t lag, double ridge, std::vector<double> coefficients)
    : lag_(lag), ridge_(ridge), coef_(std::move(coefficients)) {
  if (coef_.size() != 2 * (2 * lag_ + 1)) throw DomainError("predictor coefficient count mismatch");
}

Frame Predictor::predict(std::span<const Frame> history) const {
  if (history.size() < lag_) throw DomainError("history shorter than predictor lag");
  const std::size_t dim = 2 * lag_ + 1;
  const auto recent = history.subspan(history.size() - lag_);
  double out[2];
  for (std::size_t r = 0; r < 2; ++r) {
    const double* w = coef_.data() + r * dim;
    double acc = w[dim - 1];
    for (std::size_t j = 0; j < lag_; ++j) acc += w[2 * j] * recent[j].temperature + w[2 * j + 1] * recent[j].humidity;
    out[r] = acc;
  }
  return {out[0], out[1]};
}

namespace {

void check_windows(std::span<const SensorWindow> windows, std::size_t lag) {
  if (lag == 0) throw PreconditionError("lag must be >= 1");
  for (const auto& w : windows) {
    if (w.frames.size() <= lag) throw PreconditionError("every window must be longer than the lag");
  }
}

void fill_features(const std::vector<Frame>& frames, std::size_t end, std::size_t lag, double* x) {
  for (std::size_t j = 0; j < lag; ++j) {
    const Frame& f = frames[end - lag + j];
    x[2 * j] = f.temperature;
    x[2 * j + 1] = f.humidity;
  }
  x[2 * lag] = 1.0;
}

// Sums over one window's pairs, added into eq.
void accumulate_window(const SensorWindow& w, std::size_t lag, NormalEquations& eq) {
  std::vector<double> x(eq.dim);
  for (std::size_t t = lag; t < w.frames.size(); ++t) {
    fill_features(w.frames, t, lag, x.data());
    const double y[2] = {w.frames[t].temperature, w.frames[t].humidity};
    for (std::size_t i = 0; i < eq.dim; ++i) {
      for (std::size_t j = 0; j < eq.dim; ++j) eq.xtx[i * eq.dim + j] += x[i] * x[j];
      eq.xty[i * 2] += x[i] * y[0];
      eq.xty[i * 2 + 1] += x[i] * y[1];
    }
    ++eq.pairs;
  }
}

NormalEquations empty_equations(std::size_t lag) {
  NormalEquations eq;
  eq.dim = 2 * lag + 1;
  eq.xtx.assign(eq.dim * eq.dim, 0.0);
  eq.xty.assign(eq.dim * 2, 0.0);
  return eq;
}

}  // namespace

NormalEquations accumulate_normal_equations(std::span<const SensorWindow> windows, std::size_t lag) {
  check_windows(windows, lag);
  // Partials over fixed blocks of windows in parallel, then a fixed-order
  // reduction, so the result is identical for any thread count.
  constexpr std::size_t kBlock = 64;
  const std::size_t blocks = (windows.size() + kBlock - 1) / kBlock;
  std::vector<NormalEquations> partial(blocks, empty_equations(lag));
  const auto n = static_cast<std::int64_t>(blocks);
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < n; ++b) {
    const auto first = static_cast<std::size_t>(b) * kBlock;
    const auto last = std::min(first + kBlock, windows.size());
    for (std::size_t i = first; i < last; ++i) accumulate_window(windows[i], lag, partial[static_cast<std::size_t>(b)]);
  }
  NormalEquations eq = empty_equations(lag);
  for (const auto& p : partial) {
    for (std::size_t k = 0; k < eq.xtx.size(); ++k) eq.xtx[k] += p.xtx[k];
    for (std::size_t k = 0; k < eq.xty.size(); ++k) eq.xty[k] += p.xty[k];
    eq.pairs += p.pairs;
  }
  return eq;
}

NormalEquations accumulate_normal_equations_serial(std::span<const SensorWindow> windows, std::size_t lag) {
  check_windows(windows, lag);
  NormalEquations eq = empty_equations(lag);
  for (const auto& w : windows) accumulate_window(w, lag, eq);
  return eq;
}

Predictor solve_predictor(const NormalEquations& eq, std::size_t lag, double ridge) {
  if (!(ridge >= 0.0)) throw PreconditionError("ridge penalty must be >= 0");
  if (eq.pairs < 2 * lag + 2) throw PreconditionError("need at least 2*lag + 2 training pairs");
  const auto dim = static_cast<Eigen::Index>(eq.dim);
  Eigen::MatrixXd a = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      eq.xtx.data(), dim, dim);
  Eigen::MatrixXd b =
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::RowMajor>>(eq.xty.data(), dim, 2);
  // Intercept (last row/column) is not penalized.
  for (Eigen::Index i = 0; i + 1 < dim; ++i) a(i, i) += ridge;
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-14)) {
    throw SingularSystem("regularized normal matrix is not invertible");
  }
  const Eigen::MatrixXd w = llt.solve(b);  // dim x 2
  if (!w.allFinite()) throw SingularSystem("non-finite predictor coefficients");
  std::vector<double> coef(2 * eq.dim);
  for (Eigen::Index r = 0; r < 2; ++r) {
    for (Eigen::Index j = 0; j < dim; ++j) coef[static_cast<std::size_t>(r * dim + j)] = w(j, r);
  }
  return Predictor(lag, ridge, std::move(coef));
}

Predictor train_predictor(std::span<const SensorWindow> windows, std::size_t lag, double ridge) {
  return solve_predictor(accumulate_normal_equations(windows, lag), lag, ridge);
}

Mse evaluate(const Predictor& predictor, std::span<const SensorWindow> windows) {
  check_windows(windows, predictor.lag());
  double se_t = 0.0, se_h = 0.0;
  std::size_t n = 0;
  for (const auto& w : windows) {
    for (std::size_t t = predictor.lag(); t < w.frames.size(); ++t) {
      const Frame p = predictor.predict(std::span<const Frame>(w.frames.data(), t));
      const double et = p.temperature - w.frames[t].temperature;
      const double eh = p.humidity - w.frames[t].humidity;
      se_t += et * et;
      se_h += eh * eh;
      ++n;
    }
  }
  if (n == 0) return {};
  return {se_t / static_cast<double>(n), se_h / static_cast<double>(n)};
}

Dataset build_dataset(const GeneratorConfig& config, const DatasetRecipe& recipe, std::uint64_t seed) {
  config.validate();
  recipe.anomaly.validate(config.window_length);
  if (!(recipe.anomaly_rate >= 0.0 && recipe.anomaly_rate <= 1.0)) throw InvalidConfig("anomaly_rate in [0, 1]");
  Dataset ds;
  ds.real = recipe.real_windows;
  ds.synthetic = recipe.real_windows * recipe.synthetic_ratio;
  ds.anomalous = static_cast<std::size_t>(std::llround(recipe.anomaly_rate * static_cast<double>(ds.synthetic)));

  auto real = generate_clean(config, ds.real, derive_seed(seed, "scenario/real"));
  auto synth = generate_clean(config, ds.synthetic, derive_seed(seed, "scenario/synthetic"));

  // Partial Fisher-Yates picks which synthetic windows carry an anomaly.
  std::vector<std::size_t> order(ds.synthetic);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng pick(derive_seed(seed, "scenario/anomaly-pick"));
  for (std::size_t i = 0; i < ds.anomalous; ++i) {
    const auto j = i + static_cast<std::size_t>(pick.uniform() * static_cast<double>(ds.synthetic - i));
    std::swap(order[i], order[std::min(j, ds.synthetic - 1)]);
  }
  for (std::size_t i = 0; i < ds.anomalous; ++i) synth[order[i]] = inject_anomaly(synth[order[i]], recipe.anomaly);

  ds.windows = std::move(real);
  ds.windows.insert(ds.windows.end(), std::make_move_iterator(synth.begin()), std::make_move_iterator(synth.end()));
  for (const auto& w : ds.windows) ds.clamp_events += w.clamp_events;
  return ds;
}

std::vector<SensorWindow> anomaly_test_set(const GeneratorConfig& config, const AnomalySpec& anomaly,
                                           std::size_t n_windows, std::uint64_t seed) {
  auto windows = generate_clean(config, n_windows, derive_seed(seed, "scenario/test"));
  for (auto& w : windows) w = inject_anomaly(w, anomaly);
  return windows;
}

AugmentationResult augmentation_experiment(const GeneratorConfig& config, const DatasetRecipe& recipe,
                                           std::size_t test_windows, std::size_t lag, double ridge,
                                           std::uint64_t seed) {
  DatasetRecipe clean_recipe = recipe;
  clean_recipe.anomaly_rate = 0.0;
  const auto clean = build_dataset(config, clean_recipe, seed);
  const auto augmented = build_dataset(config, recipe, seed);
  const auto test = anomaly_test_set(config, recipe.anomaly, test_windows, seed);
  AugmentationResult r;
  r.clean_trained = evaluate(train_predictor(clean.windows, lag, ridge), test);
  r.augmented_trained = evaluate(train_predictor(augmented.windows, lag, ridge), test);
  return r;
}

std::string iso8601(std::int64_t epoch_s) {
  const auto t = static_cast<std::time_t>(epoch_s);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::int64_t parse_iso8601(const std::string& text) {
  std::tm tm{};
  int consumed = 0;
  if (std::sscanf(text.c_str(), "%4d-%2d-%2dT%2d:%2d:%2dZ%n", &tm.tm_year, &tm.tm_mon, &tm.tm_mday, &tm.tm_hour,
                  &tm.tm_min, &tm.tm_sec, &consumed) != 6 ||
      static_cast<std::size_t>(consumed) != text.size()) {
    throw ParseError("timestamp", "expected YYYY-MM-DDTHH:MM:SSZ, got '" + text + "'");
  }
  tm.tm_year -= 1900;
  tm.tm_mon -= 1;
  return static_cast<std::int64_t>(timegm(&tm));
}

void write_windows(std::span<const SensorWindow> windows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << kWindowCsvHeader << '\n';
  for (const auto& w : windows) {
    for (std::size_t k = 0; k < w.frames.size(); ++k) {
      const auto t = w.start_epoch_s + static_cast<std::int64_t>(std::llround(static_cast<double>(k) * w.step_s));
      out << w.sensor_id << ',' << iso8601(t) << ',' << csv::exact(w.frames[k].temperature) << ','
          << csv::exact(w.frames[k].humidity) << ',' << (w.frame_anomalous(k) ? 1 : 0) << '\n';
    }
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::vector<SensorWindow> read_windows(const std::filesystem::path& path, std::size_t window_length, double step_s) {
  if (window_length == 0) throw InvalidConfig("window_length must be >= 1");
  const auto rows = csv::read(path, kWindowCsvHeader);
  if (rows.size() % window_length != 0) {
    throw ValidationError("row count is a multiple of the window length", path.string());
  }
  std::vector<SensorWindow> out;
  const auto step = static_cast<std::int64_t>(std::llround(step_s));
  for (std::size_t base = 0; base < rows.size(); base += window_length) {
    SensorWindow w;
    w.step_s = step_s;
    for (std::size_t k = 0; k < window_length; ++k) {
      const auto& row = rows[base + k];
      const auto sensor = static_cast<std::uint32_t>(csv::to_u64(row.fields[0], row.line, "sensor_id"));
      std::int64_t t = 0;
      try {
        t = parse_iso8601(row.fields[1]);
      } catch (const ParseError& e) {
        throw ParseError("line " + std::to_string(row.line), e.what());
      }
      const Frame f{csv::to_double(row.fields[2], row.line, "temperature_c"),
                    csv::to_double(row.fields[3], row.line, "humidity_pct")};
      const auto flag = csv::to_u64(row.fields[4], row.line, "is_anomalous");
      if (flag > 1) throw ValidationError("is_anomalous is 0 or 1", "", row.line);
      if (k == 0) {
        w.sensor_id = sensor;
        w.start_epoch_s = t;
      } else if (sensor != w.sensor_id || t != w.start_epoch_s + static_cast<std::int64_t>(k) * step) {
        throw ValidationError("window rows share a sensor and advance by one step", "", row.line);
      }
      if (f.temperature < kTempMin || f.temperature > kTempMax || f.humidity < kHumMin || f.humidity > kHumMax) {
        throw ValidationError("frame within physical ranges", "", row.line);
      }
      if (flag == 1) {
        if (!w.anomalous) {
          w.anomalous = true;
          w.anomaly_step = k;
        }
        w.anomaly_end = k + 1;
      }
      w.frames.push_back(f);
    }
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace edgefed::scenario
