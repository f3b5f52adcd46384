#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>

#include "mgtune/runner.hpp"

namespace mgtune {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class TuneMode { one_d, two_d };

/// Everything the command-line tool can configure. Defaults reproduce the
/// reference single-inverter experiments.
struct CliConfig {
  EnvConfig env;
  double kp_min = 0.0, kp_max = 0.03;    // 1/A
  double ki_min = 0.0, ki_max = 300.0;   // 1/(A s)
  int grid_points_1d = 1000;
  int grid_points_kp = 100;
  int grid_points_ki = 100;
  PiGains seed{0.005, 10.0};
  int episodes_1d = 15;
  int episodes_2d = 50;
  KernelSpec kernel;
  double beta = 2.0;
  std::uint64_t rng_seed = 0;
  int snapshot_stride = 0;

  /// 1d pins kp at the seed value and searches ki only.
  ExperimentConfig experiment(TuneMode mode) const;
};

/// Parses flat `key = value` text. '#' starts a comment. Unknown or repeated
/// keys and malformed values throw ConfigError. Unset keys keep defaults.
CliConfig parse_config(const std::string& text);
CliConfig load_config(const std::filesystem::path& path);

/// Serializes every key; parse_config(format_config(c)) reproduces c.
std::string format_config(const CliConfig& c);

/// Key -> unit/description.
const std::map<std::string, std::string>& config_key_docs();

}  // namespace mgtune
