#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

#include "mgtune/gp.hpp"

namespace mgtune {

/// Box of tunable parameters in physical units plus the grid resolution.
struct ParamBounds {
  std::vector<double> low;
  std::vector<double> high;
  std::vector<int> grid_points;

  Eigen::Index dim() const { return static_cast<Eigen::Index>(low.size()); }
  void validate() const;
};

/// Which candidate set a proposal (or history entry) came from.
enum class SetTag { seed, expander, maximizer, exploit_fallback };

std::string_view to_string(SetTag tag);
std::optional<SetTag> parse_set_tag(std::string_view s);

struct Proposal {
  Eigen::VectorXd params;  // physical units
  Eigen::Index index = 0;  // grid index
  double width = 0.0;
  SetTag tag = SetTag::maximizer;
};

struct Measurement {
  Eigen::Index index = 0;
  Eigen::VectorXd params;
  double j = 0.0;
  bool aborted = false;
};

/// Raised when no grid point clears the safety threshold.
class SafeSetEmpty : public std::runtime_error {
 public:
  SafeSetEmpty() : std::runtime_error("safe set is empty") {}
};

/// GP-based SafeOpt over a uniform grid (no Lipschitz constant).
///
/// A grid point is safe when its lower confidence bound is at least j_min.
/// Potential maximizers are safe points whose upper bound reaches the best
/// safe lower bound. Expanders are safe points where a fictitious
/// observation at their upper bound would lift the lower bound of some
/// currently unsafe point to j_min. The next proposal is the widest point of
/// the union of both sets.
class SafeOpt {
 public:
  /// Builds the grid, snaps the seed to its nearest grid point and fits the
  /// GP on it. prior_offset defaults to seed_j. Throws std::invalid_argument
  /// when seed_j < j_min.
  SafeOpt(ParamBounds bounds, const Eigen::VectorXd& seed_params, double seed_j, double j_min,
          KernelParams kernel, double beta, std::optional<double> prior_offset = std::nullopt);

  /// Params must lie on the grid.
  void add_measurement(const Eigen::VectorXd& params, double j, bool aborted);

  /// Throws SafeSetEmpty when nothing is safe.
  Proposal propose_next() const;

  /// Recomputes bounds, safe and maximizer masks from the current GP.
  void compute_sets();

  /// Exact expander test for one grid point (false for unsafe points).
  bool is_expander(Eigen::Index i) const;
  /// Expander flag for every grid point. O(safe * unsafe) kernel evaluations.
  std::vector<bool> expander_mask() const;

  /// Highest measured J, earliest on ties.
  std::pair<Eigen::VectorXd, double> best_observed() const;

  Eigen::Index nearest_index(const Eigen::VectorXd& params) const;
  Eigen::VectorXd normalize(const Eigen::VectorXd& params) const;

  const ParamBounds& bounds() const { return bounds_; }
  Eigen::Index grid_size() const { return grid_phys_.rows(); }
  const Eigen::MatrixXd& grid_physical() const { return grid_phys_; }
  const Eigen::MatrixXd& grid_normalized() const { return grid_norm_; }
  const GpModel& gp() const { return gp_; }
  double j_min() const { return j_min_; }
  double beta() const { return beta_; }
  const std::vector<Measurement>& observations() const { return observations_; }
  const std::vector<Posterior>& posteriors() const { return posteriors_; }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  const std::vector<bool>& safe_mask() const { return safe_; }
  const std::vector<bool>& maximizer_mask() const { return maximizer_; }
  Eigen::Index safe_count() const { return safe_count_; }
  bool safe_set_empty() const { return safe_count_ == 0; }

 private:
  Eigen::Index snap(const Eigen::VectorXd& params, bool require_exact) const;

  ParamBounds bounds_;
  Eigen::MatrixXd grid_phys_;
  Eigen::MatrixXd grid_norm_;
  GpModel gp_;
  double j_min_;
  double beta_;
  std::vector<Measurement> observations_;

  std::vector<Posterior> posteriors_;
  std::vector<double> lower_, upper_;
  std::vector<bool> safe_, maximizer_;
  Eigen::Index safe_count_ = 0;
  Eigen::MatrixXd whitened_;  // L^{-1} k(X, grid), one column per grid point
};

}  // namespace mgtune
