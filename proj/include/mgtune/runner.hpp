#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "mgtune/control.hpp"
#include "mgtune/env.hpp"
#include "mgtune/gp.hpp"
#include "mgtune/safeopt.hpp"

namespace mgtune {

/// Index of each gain in a (kp, ki) parameter vector.
inline constexpr std::size_t kKp = 0;
inline constexpr std::size_t kKi = 1;

/// Kernel settings that may depend on the measured seed performance.
/// Unset signal/noise std default to |J_init| and 0.01 |J_init|.
struct KernelSpec {
  double lengthscale = 0.05;
  std::optional<double> signal_std;
  std::optional<double> noise_std;

  KernelParams resolve(std::size_t dim, double j_init) const;
};

struct ExperimentConfig {
  EnvConfig env;
  /// Bounds and grid over (kp, ki).
  ParamBounds bounds{{0.0, 0.0}, {0.03, 300.0}, {100, 100}};
  /// Pinned gains are removed from the search space.
  std::array<std::optional<double>, 2> fixed;
  PiGains seed{0.005, 10.0};
  int n_episodes = 50;
  KernelSpec kernel;
  double beta = 2.0;
  std::uint64_t rng_seed = 0;
  /// 0 selects every episode up to 20 episodes, every 5th beyond.
  int snapshot_stride = 0;

  void validate() const;
  /// Indices of the gains SafeOpt searches over.
  std::vector<std::size_t> free_dims() const;
  /// Bounds restricted to free_dims().
  ParamBounds search_bounds() const;
};

struct HistoryEntry {
  int episode = 0;
  PiGains gains;
  double j = 0.0;
  bool aborted = false;
  SetTag tag = SetTag::seed;
  Eigen::Index safe_set_size = 0;  // after the update with this entry
};

struct GpSnapshot {
  int episode = 0;
  GpModel gp;
};

struct TuningHistory {
  std::vector<HistoryEntry> entries;
  std::vector<GpSnapshot> snapshots;
  std::optional<SafeOpt> final_state;
  double j_init = 0.0;
  double j_min = 0.0;
  PiGains best_gains;
  double best_j = 0.0;
  bool terminal = false;  // stopped because the safe set emptied
};

/// One blackstart episode of the PI agent on a fresh environment.
EpisodeRecord run_episode(const EnvConfig& env, const PiGains& gains);

/// Measures the seed, then propose -> run -> update for n_episodes - 1 rounds.
TuningHistory run_tuning(const ExperimentConfig& cfg);

/// Builds a SafeOpt state from already measured history entries, replaying
/// the same update sequence as run_tuning. `count` entries are used.
SafeOpt replay_safeopt(const ExperimentConfig& cfg, const std::vector<HistoryEntry>& entries, std::size_t count);

/// Evenly spaced values on [low, high]; a single point yields `pin`.
std::vector<double> axis_values(double low, double high, int count, double pin);

struct Landscape {
  std::vector<double> kp;
  std::vector<double> ki;
  std::vector<double> j;  // kp-major: j[a * ki.size() + b]

  double at(std::size_t a, std::size_t b) const { return j[a * ki.size() + b]; }
};

/// Brute-force J over a kp x ki grid (OpenMP).
Landscape landscape_sweep(const EnvConfig& env, const std::vector<double>& kp, const std::vector<double>& ki);
Landscape landscape_sweep_serial(const EnvConfig& env, const std::vector<double>& kp, const std::vector<double>& ki);

}  // namespace mgtune
