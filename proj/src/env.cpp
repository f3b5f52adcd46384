#include "mgtune/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mgtune {

void EnvConfig::validate() const {
  grid.validate();
  if (!(i_nom > 0.0 && i_nom < i_limit)) throw std::invalid_argument("need 0 < i_nom < i_limit");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
  if (!(mu >= 0.0)) throw std::invalid_argument("mu must be >= 0");
  if (backend == Backend::rk4 && rk4_substeps < 1) throw std::invalid_argument("rk4_substeps must be >= 1");
}

double reward(const ThreePhase& i_abc, const ThreePhase& i_ref_abc, const EnvConfig& cfg) {
  const double band = cfg.i_limit - cfg.i_nom;
  auto phase_cost = [&](double i, double ref) {
    const double tracking = std::sqrt(std::abs(ref - i) / cfg.i_limit);
    const double overshoot = std::max(std::abs(i) - cfg.i_nom, 0.0);
    const double barrier = cfg.mu * std::log(std::max(1.0 - overshoot / band, kBarrierEps));
    return tracking - barrier;
  };
  return -(phase_cost(i_abc.a, i_ref_abc.a) + phase_cost(i_abc.b, i_ref_abc.b) +
           phase_cost(i_abc.c, i_ref_abc.c));
}

double episode_performance(std::span<const double> rewards, int n_steps) {
  if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
  if (rewards.empty()) return 0.0;
  const auto used = std::min<std::size_t>(rewards.size(), static_cast<std::size_t>(n_steps));
  double sum = 0.0;
  for (std::size_t k = 0; k < used; ++k) sum += rewards[k];
  sum += static_cast<double>(n_steps - static_cast<int>(used)) * rewards[used - 1];
  return sum / n_steps;
}

double episode_performance(const EpisodeRecord& rec, const EnvConfig& cfg) {
  std::vector<double> r;
  r.reserve(rec.trace.size());
  for (const auto& row : rec.trace) r.push_back(row.reward);
  return episode_performance(r, cfg.n_steps);
}

Environment::Environment(EnvConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  model_ = build_lc_plant(cfg_.grid);
  discrete_ = zoh_discretize(model_, cfg_.dt);
  reset();
}

Observation Environment::reset() {
  state_ = PlantState{Eigen::VectorXd::Zero(model_.n_states()), 0.0};
  record_ = EpisodeRecord{};
  record_.trace.reserve(static_cast<std::size_t>(cfg_.n_steps));
  rewards_.clear();
  steps_ = 0;
  done_ = false;
  return observe();
}

Observation Environment::observe() const {
  const auto& x = state_.x;
  return {{x(kFilterCurrent), x(kFilterCurrent + 1), x(kFilterCurrent + 2)},
          {x(kCapVoltage), x(kCapVoltage + 1), x(kCapVoltage + 2)},
          state_.t,
          grid_angle(state_.t, cfg_.grid.f_grid)};
}

StepResult Environment::step(const ThreePhase& m_abc) {
  if (done_) throw std::logic_error("step called on a finished episode");

  // Reference is taken at the angle the action was computed for.
  const Angle theta = grid_angle(state_.t, cfg_.grid.f_grid);
  const ThreePhase i_ref = inverse_park(cfg_.i_ref_dq0, theta);

  const double v_link = cfg_.v_link();
  Eigen::VectorXd u(3);
  u << m_abc.a * v_link, m_abc.b * v_link, m_abc.c * v_link;
  if (cfg_.backend == Backend::zoh)
    state_ = step_zoh(discrete_, state_, u);
  else
    state_ = step_rk4(model_, state_, u, cfg_.dt, cfg_.rk4_substeps);
  ++steps_;

  StepResult res;
  res.obs = observe();
  res.reward = reward(res.obs.i_f, i_ref, cfg_);
  const auto& i = res.obs.i_f;
  res.aborted = std::abs(i.a) > cfg_.i_limit || std::abs(i.b) > cfg_.i_limit || std::abs(i.c) > cfg_.i_limit;
  res.done = res.aborted || steps_ >= cfg_.n_steps;

  TraceRow row;
  row.t = state_.t;
  for (int k = 0; k < 9; ++k) row.state[static_cast<std::size_t>(k)] = state_.x(k);
  row.m = m_abc;
  row.reward = res.reward;
  record_.trace.push_back(row);
  rewards_.push_back(res.reward);

  if (res.aborted) {
    record_.aborted = true;
    record_.abort_step = steps_ - 1;
  }
  if (res.done) {
    done_ = true;
    record_.j = episode_performance(rewards_, cfg_.n_steps);
  }
  return res;
}

}  // namespace mgtune
