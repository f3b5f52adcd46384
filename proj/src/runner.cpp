#include "mgtune/runner.hpp"

#include <cmath>
#include <stdexcept>

#include "mgtune/kernels.hpp"

namespace mgtune {

KernelParams KernelSpec::resolve(std::size_t dim, double j_init) const {
  const double scale = std::max(std::abs(j_init), 1e-6);
  KernelParams k;
  k.lengthscales.assign(dim, lengthscale);
  k.signal_std = signal_std.value_or(scale);
  k.noise_std = noise_std.value_or(0.01 * scale);
  k.validate(static_cast<Eigen::Index>(dim));
  return k;
}

void ExperimentConfig::validate() const {
  env.validate();
  if (bounds.dim() != 2) throw std::invalid_argument("experiment: bounds must cover (kp, ki)");
  bounds.validate();
  if (n_episodes < 1) throw std::invalid_argument("experiment: n_episodes must be >= 1");
  if (!(beta > 0.0)) throw std::invalid_argument("experiment: beta must be > 0");
  if (snapshot_stride < 0) throw std::invalid_argument("experiment: snapshot_stride must be >= 0");
  const double seed_vals[2] = {seed.kp, seed.ki};
  for (std::size_t d = 0; d < 2; ++d) {
    if (seed_vals[d] < bounds.low[d] || seed_vals[d] > bounds.high[d])
      throw std::invalid_argument("experiment: seed gains outside bounds");
    if (fixed[d] && !std::isfinite(*fixed[d])) throw std::invalid_argument("experiment: non-finite pinned gain");
  }
  if (free_dims().empty()) throw std::invalid_argument("experiment: every gain is pinned");
}

std::vector<std::size_t> ExperimentConfig::free_dims() const {
  std::vector<std::size_t> dims;
  for (std::size_t d = 0; d < 2; ++d)
    if (!fixed[d]) dims.push_back(d);
  return dims;
}

ParamBounds ExperimentConfig::search_bounds() const {
  ParamBounds b;
  for (std::size_t d : free_dims()) {
    b.low.push_back(bounds.low[d]);
    b.high.push_back(bounds.high[d]);
    b.grid_points.push_back(bounds.grid_points[d]);
  }
  return b;
}

EpisodeRecord run_episode(const EnvConfig& env_cfg, const PiGains& gains) {
  Environment env(env_cfg);
  Observation obs = env.reset();
  PiState pi = pi_reset(PiState{});
  const PiOptions opts{env_cfg.anti_windup};
  const double v_link = env_cfg.v_link();
  while (!env.done()) {
    const PiStepResult ctl = pi_step(gains, pi, obs.i_f, env_cfg.i_ref_dq0, obs.theta, env_cfg.dt, v_link, opts);
    pi = ctl.state;
    obs = env.step(ctl.output.m_abc).obs;
  }
  return env.record();
}

namespace {

PiGains to_gains(const ExperimentConfig& cfg, const Eigen::VectorXd& free) {
  double g[2] = {cfg.seed.kp, cfg.seed.ki};
  for (std::size_t d = 0; d < 2; ++d)
    if (cfg.fixed[d]) g[d] = *cfg.fixed[d];
  const auto dims = cfg.free_dims();
  for (std::size_t k = 0; k < dims.size(); ++k) g[dims[k]] = free(static_cast<Eigen::Index>(k));
  return {g[kKp], g[kKi]};
}

Eigen::VectorXd to_free(const ExperimentConfig& cfg, const PiGains& gains) {
  const double g[2] = {gains.kp, gains.ki};
  const auto dims = cfg.free_dims();
  Eigen::VectorXd v(static_cast<Eigen::Index>(dims.size()));
  for (std::size_t k = 0; k < dims.size(); ++k) v(static_cast<Eigen::Index>(k)) = g[dims[k]];
  return v;
}

PiGains seed_gains(const ExperimentConfig& cfg) {
  PiGains g = cfg.seed;
  if (cfg.fixed[kKp]) g.kp = *cfg.fixed[kKp];
  if (cfg.fixed[kKi]) g.ki = *cfg.fixed[kKi];
  return g;
}

SafeOpt make_safeopt(const ExperimentConfig& cfg, const PiGains& seed, double j_init) {
  const auto dims = cfg.free_dims();
  return SafeOpt(cfg.search_bounds(), to_free(cfg, seed), j_init, 2.0 * j_init,
                 cfg.kernel.resolve(dims.size(), j_init), cfg.beta);
}

bool take_snapshot(const ExperimentConfig& cfg, int episode) {
  int stride = cfg.snapshot_stride;
  if (stride == 0) stride = cfg.n_episodes <= 20 ? 1 : 5;
  return episode % stride == 0 || episode == cfg.n_episodes - 1;
}

}  // namespace

TuningHistory run_tuning(const ExperimentConfig& cfg) {
  cfg.validate();
  TuningHistory h;

  const PiGains seed = seed_gains(cfg);
  const EpisodeRecord seed_rec = run_episode(cfg.env, seed);
  h.j_init = seed_rec.j;
  h.j_min = 2.0 * seed_rec.j;
  SafeOpt opt = make_safeopt(cfg, seed, seed_rec.j);
  h.entries.push_back({0, seed, seed_rec.j, seed_rec.aborted, SetTag::seed, opt.safe_count()});
  if (take_snapshot(cfg, 0)) h.snapshots.push_back({0, opt.gp()});

  for (int ep = 1; ep < cfg.n_episodes; ++ep) {
    if (opt.safe_set_empty()) {
      h.terminal = true;
      break;
    }
    const Proposal p = opt.propose_next();
    const PiGains gains = to_gains(cfg, p.params);
    const EpisodeRecord rec = run_episode(cfg.env, gains);
    opt.add_measurement(p.params, rec.j, rec.aborted);
    h.entries.push_back({ep, gains, rec.j, rec.aborted, p.tag, opt.safe_count()});
    if (take_snapshot(cfg, ep)) h.snapshots.push_back({ep, opt.gp()});
  }

  const HistoryEntry* best = &h.entries.front();
  for (const auto& e : h.entries)
    if (e.j > best->j) best = &e;
  h.best_gains = best->gains;
  h.best_j = best->j;
  h.final_state.emplace(std::move(opt));
  return h;
}

SafeOpt replay_safeopt(const ExperimentConfig& cfg, const std::vector<HistoryEntry>& entries, std::size_t count) {
  if (entries.empty() || count < 1 || count > entries.size())
    throw std::out_of_range("replay: episode index out of range");
  SafeOpt opt = make_safeopt(cfg, entries.front().gains, entries.front().j);
  for (std::size_t k = 1; k < count; ++k) opt.add_measurement(to_free(cfg, entries[k].gains), entries[k].j, entries[k].aborted);
  return opt;
}

std::vector<double> axis_values(double low, double high, int count, double pin) {
  if (count < 1) throw std::invalid_argument("axis: count must be >= 1");
  if (count == 1) return {pin};
  std::vector<double> v(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) v[static_cast<std::size_t>(k)] = low + (high - low) * k / (count - 1);
  return v;
}

namespace {

std::vector<PiGains> cartesian(const std::vector<double>& kp, const std::vector<double>& ki) {
  std::vector<PiGains> g;
  g.reserve(kp.size() * ki.size());
  for (double p : kp)
    for (double i : ki) g.push_back({p, i});
  return g;
}

}  // namespace

Landscape landscape_sweep(const EnvConfig& env, const std::vector<double>& kp, const std::vector<double>& ki) {
  const auto gains = cartesian(kp, ki);
  return {kp, ki, sweep_performance(env, gains)};
}

Landscape landscape_sweep_serial(const EnvConfig& env, const std::vector<double>& kp, const std::vector<double>& ki) {
  const auto gains = cartesian(kp, ki);
  return {kp, ki, sweep_performance_serial(env, gains)};
}

}  // namespace mgtune
