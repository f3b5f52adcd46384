#include "mgtune/safeopt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mgtune {

void ParamBounds::validate() const {
  if (low.empty()) throw std::invalid_argument("bounds: at least one dimension required");
  if (high.size() != low.size() || grid_points.size() != low.size())
    throw std::invalid_argument("bounds: low/high/grid_points size mismatch");
  for (std::size_t i = 0; i < low.size(); ++i) {
    if (!(low[i] < high[i]) || !std::isfinite(low[i]) || !std::isfinite(high[i]))
      throw std::invalid_argument("bounds: need low < high");
    if (grid_points[i] < 2) throw std::invalid_argument("bounds: grid_points must be >= 2");
  }
}

std::string_view to_string(SetTag tag) {
  switch (tag) {
    case SetTag::seed: return "seed";
    case SetTag::expander: return "expander";
    case SetTag::maximizer: return "maximizer";
    case SetTag::exploit_fallback: return "exploit-fallback";
  }
  return "?";
}

std::optional<SetTag> parse_set_tag(std::string_view s) {
  for (SetTag t : {SetTag::seed, SetTag::expander, SetTag::maximizer, SetTag::exploit_fallback})
    if (to_string(t) == s) return t;
  return std::nullopt;
}

namespace {

struct Grid {
  Eigen::MatrixXd phys;
  Eigen::MatrixXd norm;
};

// Row-major over dimensions: the last dimension varies fastest.
Grid build_grid(const ParamBounds& b) {
  b.validate();
  const Eigen::Index dim = b.dim();
  Eigen::Index total = 1;
  for (int n : b.grid_points) total *= n;
  Grid g{Eigen::MatrixXd(total, dim), Eigen::MatrixXd(total, dim)};
  for (Eigen::Index r = 0; r < total; ++r) {
    Eigen::Index rest = r;
    for (Eigen::Index d = dim - 1; d >= 0; --d) {
      const auto ud = static_cast<std::size_t>(d);
      const int n = b.grid_points[ud];
      const Eigen::Index k = rest % n;
      rest /= n;
      const double u = static_cast<double>(k) / (n - 1);
      g.norm(r, d) = u;
      g.phys(r, d) = b.low[ud] + (b.high[ud] - b.low[ud]) * u;
    }
  }
  return g;
}

Eigen::Index nearest_on_grid(const ParamBounds& b, const Eigen::VectorXd& params, bool require_exact) {
  if (params.size() != b.dim()) throw std::invalid_argument("safeopt: parameter dimension mismatch");
  Eigen::Index index = 0;
  for (Eigen::Index d = 0; d < b.dim(); ++d) {
    const auto ud = static_cast<std::size_t>(d);
    const int n = b.grid_points[ud];
    const double span = b.high[ud] - b.low[ud];
    const double pos = (params(d) - b.low[ud]) / span * (n - 1);
    const double k = std::clamp(std::round(pos), 0.0, static_cast<double>(n - 1));
    if (require_exact && std::abs(pos - k) > 1e-6)
      throw std::invalid_argument("safeopt: parameters are not on the grid");
    index = index * n + static_cast<Eigen::Index>(k);
  }
  return index;
}

}  // namespace

SafeOpt::SafeOpt(ParamBounds bounds, const Eigen::VectorXd& seed_params, double seed_j, double j_min,
                 KernelParams kernel, double beta, std::optional<double> prior_offset)
    : bounds_(std::move(bounds)),
      gp_([&] {
        if (!(beta > 0.0)) throw std::invalid_argument("safeopt: beta must be > 0");
        if (!(seed_j >= j_min)) throw std::invalid_argument("safeopt: seed performance is below j_min");
        Grid g = build_grid(bounds_);
        grid_phys_ = std::move(g.phys);
        grid_norm_ = std::move(g.norm);
        const Eigen::Index idx = nearest_on_grid(bounds_, seed_params, false);
        return GpModel::fit(grid_norm_.row(idx), Eigen::VectorXd::Constant(1, seed_j), std::move(kernel),
                            prior_offset.value_or(seed_j));
      }()),
      j_min_(j_min),
      beta_(beta) {
  const Eigen::Index idx = nearest_on_grid(bounds_, seed_params, false);
  observations_.push_back({idx, grid_phys_.row(idx).transpose(), seed_j, false});
  compute_sets();
}

Eigen::Index SafeOpt::snap(const Eigen::VectorXd& params, bool require_exact) const {
  return nearest_on_grid(bounds_, params, require_exact);
}

Eigen::Index SafeOpt::nearest_index(const Eigen::VectorXd& params) const { return snap(params, false); }

Eigen::VectorXd SafeOpt::normalize(const Eigen::VectorXd& params) const {
  Eigen::VectorXd u(params.size());
  for (Eigen::Index d = 0; d < params.size(); ++d) {
    const auto ud = static_cast<std::size_t>(d);
    u(d) = (params(d) - bounds_.low[ud]) / (bounds_.high[ud] - bounds_.low[ud]);
  }
  return u;
}

void SafeOpt::add_measurement(const Eigen::VectorXd& params, double j, bool aborted) {
  const Eigen::Index idx = snap(params, true);
  gp_ = gp_.add_observation(grid_norm_.row(idx).transpose(), j);
  observations_.push_back({idx, grid_phys_.row(idx).transpose(), j, aborted});
  compute_sets();
}

void SafeOpt::compute_sets() {
  const Eigen::Index n_grid = grid_size();
  const auto un = static_cast<std::size_t>(n_grid);
  posteriors_.assign(un, Posterior{});
  lower_.assign(un, 0.0);
  upper_.assign(un, 0.0);
  whitened_.resize(gp_.size(), n_grid);

  const double prior_var = gp_.kernel().signal_std * gp_.kernel().signal_std;
  const auto chol = gp_.chol().triangularView<Eigen::Lower>();
  const long n = static_cast<long>(n_grid);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    const Eigen::VectorXd k = gp_.cross_covariance(grid_norm_.row(i).transpose());
    const Eigen::VectorXd v = chol.solve(k);
    whitened_.col(i) = v;
    const Posterior p{k.dot(gp_.alpha()) + gp_.prior_offset(), std::max(prior_var - v.squaredNorm(), 0.0)};
    const ConfidenceInterval ci = confidence_bounds(p, beta_);
    const auto ui = static_cast<std::size_t>(i);
    posteriors_[ui] = p;
    lower_[ui] = ci.lower;
    upper_[ui] = ci.upper;
  }

  safe_.assign(un, false);
  maximizer_.assign(un, false);
  safe_count_ = 0;
  double best_lower = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < un; ++i) {
    if (lower_[i] >= j_min_) {
      safe_[i] = true;
      ++safe_count_;
      best_lower = std::max(best_lower, lower_[i]);
    }
  }
  for (std::size_t i = 0; i < un; ++i) maximizer_[i] = safe_[i] && upper_[i] >= best_lower;
}

bool SafeOpt::is_expander(Eigen::Index i) const {
  const auto ui = static_cast<std::size_t>(i);
  if (!safe_[ui]) return false;
  const KernelParams& kp = gp_.kernel();
  const double obs_var = posteriors_[ui].variance + kp.noise_std * kp.noise_std + gp_.jitter();
  if (!(obs_var > 0.0)) return false;
  // Optimistic fictitious observation y = upper(x_i): the mean shifts by
  // cov * (upper - mean) / obs_var, the variance drops by cov^2 / obs_var.
  const double innovation = upper_[ui] - posteriors_[ui].mean;
  const Eigen::VectorXd xi = grid_norm_.row(i).transpose();
  const auto wi = whitened_.col(i);
  for (Eigen::Index j = 0; j < grid_size(); ++j) {
    const auto uj = static_cast<std::size_t>(j);
    if (safe_[uj]) continue;
    const double cov = matern32(kp, xi, grid_norm_.row(j).transpose()) - wi.dot(whitened_.col(j));
    const double mean = posteriors_[uj].mean + cov * innovation / obs_var;
    const double var = std::max(posteriors_[uj].variance - cov * cov / obs_var, 0.0);
    if (mean - beta_ * std::sqrt(var) >= j_min_) return true;
  }
  return false;
}

std::vector<bool> SafeOpt::expander_mask() const {
  std::vector<bool> mask(static_cast<std::size_t>(grid_size()), false);
  for (Eigen::Index i = 0; i < grid_size(); ++i) mask[static_cast<std::size_t>(i)] = is_expander(i);
  return mask;
}

Proposal SafeOpt::propose_next() const {
  if (safe_set_empty()) throw SafeSetEmpty();
  std::vector<Eigen::Index> order;
  order.reserve(static_cast<std::size_t>(safe_count_));
  for (Eigen::Index i = 0; i < grid_size(); ++i)
    if (safe_[static_cast<std::size_t>(i)]) order.push_back(i);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return upper_[static_cast<std::size_t>(a)] - lower_[static_cast<std::size_t>(a)] >
           upper_[static_cast<std::size_t>(b)] - lower_[static_cast<std::size_t>(b)];
  });

  auto make = [&](Eigen::Index i, SetTag tag) {
    const auto ui = static_cast<std::size_t>(i);
    return Proposal{grid_phys_.row(i).transpose(), i, upper_[ui] - lower_[ui], tag};
  };
  for (Eigen::Index i : order) {
    if (maximizer_[static_cast<std::size_t>(i)]) return make(i, SetTag::maximizer);
    if (is_expander(i)) return make(i, SetTag::expander);
  }
  return make(order.front(), SetTag::exploit_fallback);
}

std::pair<Eigen::VectorXd, double> SafeOpt::best_observed() const {
  const Measurement* best = &observations_.front();
  for (const auto& m : observations_)
    if (m.j > best->j) best = &m;
  return {best->params, best->j};
}

}  // namespace mgtune
