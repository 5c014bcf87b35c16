#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "edgefed/error.hpp"
#include "edgefed/random.hpp"
#include "edgefed/scenario.hpp"
#include "oracles.hpp"

using namespace edgefed;
using namespace edgefed::scenario;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("edgefed_scenario_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

SensorWindow constant_window(double t, double h, std::size_t n = 24) {
  SensorWindow w;
  w.frames.assign(n, Frame{t, h});
  return w;
}

}  // namespace

TEST(Generator, ZeroNoiseIsTheMean) {
  GeneratorConfig c;
  c.temp_std = 0.0;
  c.hum_std = 0.0;
  for (const auto& w : generate_clean(c, 20, 3)) {
    ASSERT_EQ(w.frames.size(), c.window_length);
    for (const auto& f : w.frames) {
      EXPECT_EQ(f.temperature, c.temp_mean);
      EXPECT_EQ(f.humidity, c.hum_mean);
    }
  }
}

TEST(Generator, InnovationCorrelationMatchesConfig) {
  const GeneratorConfig c;
  const auto windows = generate_clean(c, 500, 11);
  EXPECT_NEAR(oracle::innovation_correlation(windows, c), c.th_correlation, 0.1);
  GeneratorConfig weak = c;
  weak.th_correlation = -0.2;
  EXPECT_NEAR(oracle::innovation_correlation(generate_clean(weak, 500, 11), weak), -0.2, 0.1);
}

TEST(Generator, MarginalSpreadMatchesConfig) {
  const GeneratorConfig c;
  double s = 0, ss = 0, n = 0;
  for (const auto& w : generate_clean(c, 2000, 5)) {
    for (const auto& f : w.frames) {
      s += f.temperature;
      ss += f.temperature * f.temperature;
      n += 1;
    }
  }
  const double mean = s / n;
  EXPECT_NEAR(mean, c.temp_mean, 0.1);
  EXPECT_NEAR(std::sqrt(ss / n - mean * mean), c.temp_std, 0.1);
}

TEST(Generator, DeterministicAndThreadIndependent) {
  const GeneratorConfig c;
  const auto a = generate_clean(c, 300, 42);
  EXPECT_EQ(a, generate_clean(c, 300, 42));
  EXPECT_EQ(a, generate_clean_serial(c, 300, 42));
  EXPECT_NE(a, generate_clean(c, 300, 43));
}

TEST(Generator, FramesStayInPhysicalRange) {
  GeneratorConfig c;
  c.temp_mean = 12.0;
  c.temp_std = 6.0;
  c.hum_mean = 90.0;
  c.hum_std = 10.0;
  std::size_t clamps = 0;
  for (const auto& w : generate_clean(c, 200, 1)) {
    clamps += w.clamp_events;
    for (const auto& f : w.frames) {
      ASSERT_GE(f.temperature, kTempMin);
      ASSERT_LE(f.temperature, kTempMax);
      ASSERT_GE(f.humidity, kHumMin);
      ASSERT_LE(f.humidity, kHumMax);
    }
  }
  EXPECT_GT(clamps, 0u);
}

TEST(Generator, WindowsRotateOverSensors) {
  GeneratorConfig c;
  c.n_sensors = 3;
  const auto w = generate_clean(c, 7, 1);
  EXPECT_EQ(w[4].sensor_id, 1u);
  EXPECT_EQ(w[4].start_epoch_s, c.start_epoch_s + 24 * 600);
}

TEST(Anomaly, SpikeAndDropAtStep) {
  const auto clean = generate_clean(GeneratorConfig{}, 1, 9)[0];
  AnomalySpec spec;
  const auto a = inject_anomaly(clean, spec);
  EXPECT_DOUBLE_EQ(a.frames[10].temperature, clean.frames[10].temperature + 8.0);
  EXPECT_DOUBLE_EQ(a.frames[10].humidity, clean.frames[10].humidity - 15.0);
  for (std::size_t k = 0; k < 10; ++k) EXPECT_EQ(a.frames[k], clean.frames[k]);
  EXPECT_FALSE(a.frame_anomalous(9));
  EXPECT_TRUE(a.frame_anomalous(10));
}

TEST(Anomaly, FullDecayTouchesOneFrame) {
  const auto clean = generate_clean(GeneratorConfig{}, 1, 9)[0];
  AnomalySpec spec;
  spec.decay = 1.0;
  const auto a = inject_anomaly(clean, spec);
  for (std::size_t k = 0; k < clean.frames.size(); ++k) {
    if (k == 10) continue;
    EXPECT_EQ(a.frames[k], clean.frames[k]) << k;
  }
  EXPECT_FALSE(a.frame_anomalous(11));
}

TEST(Anomaly, GeometricResidual) {
  const auto clean = constant_window(24.0, 45.0);
  AnomalySpec spec;
  spec.decay = 0.5;
  const auto a = inject_anomaly(clean, spec);
  EXPECT_DOUBLE_EQ(a.frames[12].temperature - 24.0, 2.0);
  EXPECT_DOUBLE_EQ(a.frames[12].humidity - 45.0, -15.0 / 4.0);
}

TEST(Anomaly, RejectsStepOutsideWindow) {
  AnomalySpec spec;
  spec.step_index = 24;
  EXPECT_THROW(inject_anomaly(constant_window(24, 45), spec), InvalidConfig);
}

TEST(Predictor, ConstantFixedPoint) {
  std::vector<SensorWindow> windows{constant_window(25.0, 50.0), constant_window(25.0, 50.0)};
  const auto p = train_predictor(windows, 3, 0.01);
  const std::vector<Frame> history(3, Frame{25.0, 50.0});
  const auto f = p.predict(history);
  EXPECT_LT(std::abs(f.temperature - 25.0), 1e-6);
  EXPECT_LT(std::abs(f.humidity - 50.0), 1e-6);
  const auto mse = evaluate(p, windows);
  EXPECT_LT(mse.temperature, 1e-12);
  EXPECT_LT(mse.humidity, 1e-12);
}

TEST(Predictor, RecoversNoiselessAr1) {
  // x_k = m + a (x_{k-1} - m), independent random starts per window.
  const double a = 0.7;
  const double mt = 24.0, mh = 45.0;
  Rng rng(77);
  std::vector<SensorWindow> windows;
  for (int i = 0; i < 40; ++i) {
    SensorWindow w;
    double t = mt + rng.uniform(-5, 5);
    double h = mh + rng.uniform(-10, 10);
    for (int k = 0; k < 24; ++k) {
      w.frames.push_back({t, h});
      t = mt + a * (t - mt);
      h = mh + a * (h - mh);
    }
    windows.push_back(w);
  }
  const auto p = train_predictor(windows, 1, 1e-9);
  const auto mse = evaluate(p, windows);
  EXPECT_LT(mse.temperature, 1e-10);
  EXPECT_LT(mse.humidity, 1e-10);
  const auto& c = p.coefficients();
  EXPECT_NEAR(c[0], a, 1e-6);
  EXPECT_NEAR(c[2], (1 - a) * mt, 1e-5);
}

TEST(Predictor, Preconditions) {
  std::vector<SensorWindow> one{constant_window(25.0, 50.0, 8)};
  // lag 3 gives 5 pairs, fewer than 2*3 + 2.
  EXPECT_THROW(train_predictor(one, 3, 0.01), PreconditionError);
  EXPECT_THROW(train_predictor(one, 8, 0.01), PreconditionError);
  std::vector<SensorWindow> flat{constant_window(25.0, 50.0), constant_window(25.0, 50.0)};
  EXPECT_THROW(train_predictor(flat, 2, 0.0), SingularSystem);
}

TEST(Predictor, MeanPredictorOnMeanWindows) {
  const std::size_t lag = 2;
  std::vector<double> coef(2 * (2 * lag + 1), 0.0);
  coef[2 * lag] = 24.0;
  coef[2 * (2 * lag + 1) - 1] = 45.0;
  const Predictor p(lag, 0.0, coef);
  GeneratorConfig c;
  c.temp_std = 0.0;
  c.hum_std = 0.0;
  const auto mse = evaluate(p, generate_clean(c, 10, 1));
  EXPECT_EQ(mse.temperature, 0.0);
  EXPECT_EQ(mse.humidity, 0.0);
}

TEST(NormalEquations, ParallelMatchesSerial) {
  const auto windows = generate_clean(GeneratorConfig{}, 400, 8);
  const auto par = accumulate_normal_equations(windows, 4);
  const auto ser = accumulate_normal_equations_serial(windows, 4);
  EXPECT_EQ(par.pairs, 400u * 20u);
  ASSERT_EQ(par.xtx.size(), ser.xtx.size());
  for (std::size_t k = 0; k < par.xtx.size(); ++k) EXPECT_NEAR(par.xtx[k], ser.xtx[k], 1e-12 * std::abs(ser.xtx[k]));
  for (std::size_t k = 0; k < par.xty.size(); ++k) EXPECT_NEAR(par.xty[k], ser.xty[k], 1e-12 * std::abs(ser.xty[k]));
  // The parallel path is bitwise reproducible.
  const auto again = accumulate_normal_equations(windows, 4);
  EXPECT_EQ(par.xtx, again.xtx);
  EXPECT_EQ(par.xty, again.xty);
}

TEST(Dataset, CompositionFollowsRecipe) {
  const auto ds = build_dataset(GeneratorConfig{}, DatasetRecipe{}, 4);
  EXPECT_EQ(ds.real, 60u);
  EXPECT_EQ(ds.synthetic, 600u);
  EXPECT_EQ(ds.anomalous, 30u);
  EXPECT_EQ(ds.windows.size(), 660u);
  std::size_t flagged = 0;
  for (std::size_t i = 0; i < ds.windows.size(); ++i) {
    if (ds.windows[i].anomalous) {
      EXPECT_GE(i, 60u);
      ++flagged;
    }
  }
  EXPECT_EQ(flagged, 30u);
}

TEST(Dataset, EveryAnomalyHasOppositeSignDeltasAtStep) {
  const GeneratorConfig c;
  const AnomalySpec spec;
  const auto clean = generate_clean(c, 100, 3);
  for (const auto& w : clean) {
    const auto a = inject_anomaly(w, spec);
    EXPECT_GT(a.frames[10].temperature - w.frames[10].temperature, 0.0);
    EXPECT_LT(a.frames[10].humidity - w.frames[10].humidity, 0.0);
  }
}

TEST(WindowCsv, RoundTripKeepsFramesAndFlags) {
  auto ds = build_dataset(GeneratorConfig{}, DatasetRecipe{6, 10, 0.2, AnomalySpec{}}, 2);
  const auto dir = temp_dir("roundtrip");
  write_windows(ds.windows, dir / "w.csv");
  const auto back = read_windows(dir / "w.csv", 24, 600.0);
  ASSERT_EQ(back.size(), ds.windows.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].frames, ds.windows[i].frames);
    EXPECT_EQ(back[i].sensor_id, ds.windows[i].sensor_id);
    EXPECT_EQ(back[i].start_epoch_s, ds.windows[i].start_epoch_s);
    EXPECT_EQ(back[i].anomalous, ds.windows[i].anomalous);
    for (std::size_t k = 0; k < 24; ++k) EXPECT_EQ(back[i].frame_anomalous(k), ds.windows[i].frame_anomalous(k));
  }
}

TEST(WindowCsv, Iso8601) {
  EXPECT_EQ(iso8601(1704067200), "2024-01-01T00:00:00Z");
  EXPECT_EQ(parse_iso8601("2024-01-01T00:10:00Z"), 1704067800);
  EXPECT_THROW(parse_iso8601("2024-01-01 00:10"), ParseError);
}

TEST(WindowCsv, OutOfRangeFrameIsRejected) {
  const auto dir = temp_dir("range");
  std::ofstream(dir / "w.csv") << kWindowCsvHeader << "\n"
                               << "0,2024-01-01T00:00:00Z,24,45,0\n"
                               << "0,2024-01-01T00:10:00Z,70,45,0\n";
  try {
    read_windows(dir / "w.csv", 2, 600.0);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(ScenarioConfig, StrictKeysAndHash) {
  const auto base = parse_scenario_config(R"({"config_version": 1, "seed": 3})");
  EXPECT_EQ(base.seed, 3u);
  EXPECT_EQ(base.generator.window_length, 24u);
  EXPECT_THROW(parse_scenario_config(R"({"config_version": 1, "seed": 3, "sead": 4})"), UnknownKey);
  EXPECT_EQ(base.config_hash(), parse_scenario_config(R"({"config_version": 1, "seed": 3})").config_hash());
  EXPECT_NE(base.config_hash(), parse_scenario_config(R"({"config_version": 1, "seed": 4})").config_hash());
}

TEST(ScenarioDataset, GenerateWritesManifest) {
  auto cfg = parse_scenario_config(R"({"config_version": 1, "seed": 5, "dataset": {"real_windows": 4, "synthetic_ratio": 10, "anomaly_rate": 0.25}})");
  const auto dir = temp_dir("generate");
  const auto m = generate_dataset(cfg, dir);
  EXPECT_EQ(m.real_windows, 4u);
  EXPECT_EQ(m.synthetic_windows, 40u);
  EXPECT_EQ(m.anomalous_windows, 10u);
  EXPECT_EQ(m.frames, 44u * 24u);
  const auto back = read_manifest(dir / "manifest.json");
  EXPECT_EQ(back.config_hash, m.config_hash);
  EXPECT_EQ(read_windows(dir / "windows.csv", back.window_length, back.step_s).size(), 44u);
}

TEST(Augmentation, AnomalyTrainingHelpsOnAnomalies) {
  int wins = 0;
  for (std::uint64_t seed = 100; seed < 105; ++seed) {
    const auto r = augmentation_experiment(GeneratorConfig{}, DatasetRecipe{}, 100, 6, 0.01, seed);
    wins += r.augmented_trained.temperature < r.clean_trained.temperature;
  }
  EXPECT_GE(wins, 4);
}
