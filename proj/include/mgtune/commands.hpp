#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "mgtune/config.hpp"

namespace mgtune {

/// Process exit codes of the mgtune tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,     // bad arguments, config or paths
  kExitRuntime = 2,   // numerical or I/O failure while running
  kExitSafeSetEmpty = 3,
};

struct EpisodeArgs {
  std::optional<std::filesystem::path> config;
  std::optional<double> kp, ki;  // default: seed gains
  std::filesystem::path out;
};

struct TuneArgs {
  std::optional<std::filesystem::path> config;
  TuneMode mode = TuneMode::one_d;
  std::filesystem::path out_dir;
  std::optional<std::string> name;  // file stem; default tune<mode>_<UTC timestamp>
  std::optional<std::uint64_t> seed;
};

struct LandscapeArgs {
  std::optional<std::filesystem::path> config;
  int kp_points = 60;
  int ki_points = 60;
  std::filesystem::path out;
};

struct GpDumpArgs {
  std::optional<std::filesystem::path> config;
  std::filesystem::path history;
  TuneMode mode = TuneMode::one_d;
  int episode_index = 0;
  std::filesystem::path out;
};

int cmd_episode(const EpisodeArgs& a, std::ostream& out, std::ostream& err);
int cmd_tune(const TuneArgs& a, std::ostream& out, std::ostream& err);
int cmd_landscape(const LandscapeArgs& a, std::ostream& out, std::ostream& err);
int cmd_gp_dump(const GpDumpArgs& a, std::ostream& out, std::ostream& err);

/// Parses "NxM" (kp x ki) or a single "N" for both axes.
std::pair<int, int> parse_resolution(const std::string& s);

/// Column names of the free parameters in `mode`.
std::vector<std::string> free_param_names(TuneMode mode);

}  // namespace mgtune
