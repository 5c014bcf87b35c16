#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace edgefed::scenario {

struct Frame {
  double temperature = 0.0;  ///< deg C
  double humidity = 0.0;     ///< %RH
  bool operator==(const Frame&) const = default;
};

inline constexpr double kTempMin = 10.0;
inline constexpr double kTempMax = 60.0;
inline constexpr double kHumMin = 5.0;
inline constexpr double kHumMax = 95.0;

struct SensorWindow {
  std::uint32_t sensor_id = 0;
  std::int64_t start_epoch_s = 0;  ///< UTC
  double step_s = 600.0;
  std::vector<Frame> frames;
  bool anomalous = false;
  std::size_t anomaly_step = 0;  ///< first perturbed frame
  std::size_t anomaly_end = 0;   ///< one past the last perturbed frame
  std::size_t clamp_events = 0;

  /// True for frames carrying an injected perturbation.
  bool frame_anomalous(std::size_t k) const;
  bool operator==(const SensorWindow&) const = default;
};

struct GeneratorConfig {
  std::uint32_t n_sensors = 35;
  std::size_t window_length = 24;
  double step_s = 600.0;
  std::int64_t start_epoch_s = 1704067200;  // 2024-01-01T00:00:00Z
  double temp_mean = 24.0;
  double temp_std = 1.5;
  double hum_mean = 45.0;
  double hum_std = 4.0;
  double ar_coeff = 0.6;
  double th_correlation = -0.7;

  /// Throws InvalidConfig.
  void validate() const;
};

struct AnomalySpec {
  std::size_t step_index = 10;
  double temp_spike = 8.0;
  double hum_drop = 15.0;
  double decay = 0.05;

  void validate(std::size_t window_length) const;
};

/// Bivariate AR(1) windows with correlated innovations, clamped to the
/// physical ranges. Windows are generated in parallel; window i depends only
/// on (seed, i), so the result does not depend on the thread count.
std::vector<SensorWindow> generate_clean(const GeneratorConfig& config, std::size_t n_windows, std::uint64_t seed);

/// Single-threaded reference for generate_clean.
std::vector<SensorWindow> generate_clean_serial(const GeneratorConfig& config, std::size_t n_windows,
                                                std::uint64_t seed);

/// Temperature spike with a coincident humidity drop at spec.step_index,
/// relaxing geometrically by (1 - decay) per step afterwards.
SensorWindow inject_anomaly(const SensorWindow& window, const AnomalySpec& spec);

/// Ridge-regularized linear autoregressive one-step predictor.
/// Input: the last `lag` frames flattened as (T, H) pairs plus an intercept.
class Predictor {
 public:
  Predictor(std::size_t lag, double ridge, std::vector<double> coefficients);

  std::size_t lag() const { return lag_; }
  double ridge() const { return ridge_; }
  /// Row-major 2 x (2*lag + 1); last column is the intercept.
  const std::vector<double>& coefficients() const { return coef_; }

  /// `history` must hold at least `lag` frames; the last `lag` are used.
  Frame predict(std::span<const Frame> history) const;

 private:
  std::size_t lag_;
  double ridge_;
  std::vector<double> coef_;
};

/// Normal-equation sums over all sliding (history, next) pairs.
struct NormalEquations {
  std::size_t dim = 0;
  std::vector<double> xtx;  ///< dim x dim, row-major
  std::vector<double> xty;  ///< dim x 2, row-major
  std::size_t pairs = 0;
};

NormalEquations accumulate_normal_equations(std::span<const SensorWindow> windows, std::size_t lag);
NormalEquations accumulate_normal_equations_serial(std::span<const SensorWindow> windows, std::size_t lag);

/// Throws PreconditionError if a window is not longer than `lag` or there are
/// fewer than 2*lag + 2 pairs; SingularSystem if the regularized system cannot be solved.
Predictor train_predictor(std::span<const SensorWindow> windows, std::size_t lag, double ridge);
Predictor solve_predictor(const NormalEquations& eq, std::size_t lag, double ridge);

struct Mse {
  double temperature = 0.0;
  double humidity = 0.0;
};

Mse evaluate(const Predictor& predictor, std::span<const SensorWindow> windows);

/// Training-set composition: real stand-in windows plus synthetic windows at
/// `synthetic_ratio` times that count, of which `anomaly_rate` carry an anomaly.
struct DatasetRecipe {
  std::size_t real_windows = 60;
  std::size_t synthetic_ratio = 10;
  double anomaly_rate = 0.05;
  AnomalySpec anomaly;
};

struct Dataset {
  std::vector<SensorWindow> windows;
  std::size_t real = 0;
  std::size_t synthetic = 0;
  std::size_t anomalous = 0;
  std::size_t clamp_events = 0;
};

Dataset build_dataset(const GeneratorConfig& config, const DatasetRecipe& recipe, std::uint64_t seed);

/// Windows that all carry an anomaly, drawn from an independent stream.
std::vector<SensorWindow> anomaly_test_set(const GeneratorConfig& config, const AnomalySpec& anomaly,
                                           std::size_t n_windows, std::uint64_t seed);

struct AugmentationResult {
  Mse clean_trained;
  Mse augmented_trained;
  double temp_improvement() const { return 1.0 - augmented_trained.temperature / clean_trained.temperature; }
};

/// Trains one predictor on real + clean synthetic windows and one on real +
/// synthetic windows with anomalies, then scores both on anomalous test windows.
AugmentationResult augmentation_experiment(const GeneratorConfig& config, const DatasetRecipe& recipe,
                                           std::size_t test_windows, std::size_t lag, double ridge,
                                           std::uint64_t seed);

inline constexpr const char* kWindowCsvHeader = "sensor_id,t_iso8601,temperature_c,humidity_pct,is_anomalous";

std::string iso8601(std::int64_t epoch_s);
std::int64_t parse_iso8601(const std::string& text);

void write_windows(std::span<const SensorWindow> windows, const std::filesystem::path& path);
/// Splits rows into windows of `window_length` consecutive frames.
std::vector<SensorWindow> read_windows(const std::filesystem::path& path, std::size_t window_length, double step_s);

/// Everything `scenario generate` needs; loaded from a strict JSON document.
struct ScenarioConfig {
  std::uint64_t seed = 1;
  GeneratorConfig generator;
  DatasetRecipe dataset;
  std::size_t lag = 6;
  double ridge = 0.01;

  void validate() const;
  std::string canonical_json() const;
  std::string config_hash() const;
};

ScenarioConfig load_scenario_config(const std::filesystem::path& path);
ScenarioConfig parse_scenario_config(const std::string& text);

/// Dataset description written next to windows.csv.
struct Manifest {
  std::uint64_t seed = 0;
  std::string config_hash;
  std::size_t window_length = 24;
  double step_s = 600.0;
  std::size_t lag = 6;
  double ridge = 0.01;
  std::size_t real_windows = 0;
  std::size_t synthetic_windows = 0;
  std::size_t anomalous_windows = 0;
  std::size_t frames = 0;
  std::size_t clamp_events = 0;
};

void write_manifest(const Manifest& manifest, const std::filesystem::path& path);
Manifest read_manifest(const std::filesystem::path& path);

/// windows.csv + manifest.json in out_dir; returns the manifest.
Manifest generate_dataset(const ScenarioConfig& config, const std::filesystem::path& out_dir);

}  // namespace edgefed::scenario
