#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "pgnnff/plant.hpp"
#include "pgnnff/training.hpp"
#include "pgnnff/types.hpp"

namespace pgnnff {

/// Minimal TOML value: string, number, boolean, or a flat array of these.
struct TomlValue {
  enum class Type { String, Number, Boolean, Array };
  Type type = Type::Number;
  std::string str;
  double num = 0.0;
  bool boolean = false;
  std::vector<TomlValue> array;
};

/// Flattened "section.key" -> value map. Supports the subset used by the
/// experiment files: [section] tables, strings, numbers, booleans, and
/// single-line arrays, with # comments. Errors carry line numbers.
std::map<std::string, TomlValue> parse_toml(const std::string& text,
                                            const std::string& source);

/// One declarative experiment: plant, data generation, identification,
/// training, and reproduction axes, with defaults matching the shipped
/// default.toml. Unknown keys are rejected so typos fail loudly.
struct ExperimentConfig {
  std::uint64_t root_seed = 1;
  std::string out_dir;
  int threads = 1;

  PlantConfig plant;  // evaluation plant (encoder quantization on)
  RegressorSpec spec{0, 2, 0, 1e-4};
  std::string basis = "clm";

  // data generation (training records): dither on, quantization off by
  // default; the double-differenced encoder staircase at 10 kHz would
  // otherwise dominate the acceleration regressor.
  std::string data_reference = "r1";
  int data_strokes = 4;
  double data_dwell = 0.2;
  bool data_dither = true;
  double data_encoder_resolution = 0.0;

  // tanh_net g parameters, kept so the config echo round-trips
  std::uint64_t g_seed = 7;
  int g_neurons = 16;
  double g_scale = 1.5;

  double train_lambda = 0.01;
  TrainingConfig training;

  std::vector<std::string> table_modes = {"regularized", "unregularized",
                                          "sequential", "pinn_baseline"};
  std::vector<int> table_nl = {16, 8};
  int table_seeds = 3;
  std::vector<double> sweep_lambdas = {0.0, 1e-4, 1e-2, 1.0};
  int sweep_seeds = 1;

  static ExperimentConfig from_toml_text(const std::string& text,
                                         const std::string& source);
  static ExperimentConfig load(const std::filesystem::path& path);

  /// Full echo of the resolved configuration, parseable by load().
  std::string echo_toml() const;

  /// Effective plant for training-data generation.
  PlantConfig data_plant() const;
};

}  // namespace pgnnff
