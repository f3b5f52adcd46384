#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <vector>

#include "mgtune/control.hpp"
#include "mgtune/frames.hpp"
#include "mgtune/plant.hpp"

namespace mgtune {

enum class Backend { zoh, rk4 };

struct EnvConfig {
  GridParams grid;
  double i_nom = 20.0;     // A
  double i_limit = 30.0;   // A
  Dq0 i_ref_dq0{15.0, 0.0, 0.0};
  double dt = 50e-6;       // s
  int n_steps = 300;
  double mu = 2.0;         // barrier weight
  Backend backend = Backend::zoh;
  int rk4_substeps = 20;
  LinkMapping mapping = LinkMapping::full;
  bool anti_windup = false;

  void validate() const;
  double v_link() const { return link_voltage(mapping, grid.v_dc); }
};

struct Observation {
  ThreePhase i_f;
  ThreePhase v_c;
  double t = 0.0;
  Angle theta;
};

struct StepResult {
  Observation obs;
  double reward = 0.0;
  bool done = false;
  bool aborted = false;
};

struct TraceRow {
  double t = 0.0;                 // time at the end of the step
  std::array<double, 9> state{};  // i_f_abc, v_c_abc, i_l_abc
  ThreePhase m;
  double reward = 0.0;
};

struct EpisodeRecord {
  std::vector<TraceRow> trace;
  double j = 0.0;
  bool aborted = false;
  std::optional<int> abort_step;
};

/// Barrier log argument floor.
inline constexpr double kBarrierEps = 1e-6;

/// Per-step reward: root tracking error plus log barrier above i_nom,
/// summed over phases and negated.
double reward(const ThreePhase& i_abc, const ThreePhase& i_ref_abc, const EnvConfig& cfg);

/// Mean reward over n_steps slots. When the rewards stop early (abort), the
/// last reward fills the missing slots.
double episode_performance(std::span<const double> rewards, int n_steps);
double episode_performance(const EpisodeRecord& rec, const EnvConfig& cfg);

/// Gym-style episodic wrapper around the LC plant. One instance per episode
/// at a time; not thread-safe.
class Environment {
 public:
  explicit Environment(EnvConfig cfg);

  /// Blackstart: zero state, t = 0, theta = 0.
  Observation reset();

  /// Applies modulation indices for one dt. Throws std::logic_error when the
  /// episode is already done.
  StepResult step(const ThreePhase& m_abc);

  const EnvConfig& config() const { return cfg_; }
  const EpisodeRecord& record() const { return record_; }
  bool done() const { return done_; }
  int steps_taken() const { return steps_; }
  const PlantState& plant_state() const { return state_; }

 private:
  Observation observe() const;

  EnvConfig cfg_;
  PlantModel model_;
  DiscretePlant discrete_;
  PlantState state_;
  EpisodeRecord record_;
  std::vector<double> rewards_;
  int steps_ = 0;
  bool done_ = false;
};

}  // namespace mgtune
