#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mgtune/env.hpp"
#include "mgtune/runner.hpp"
#include "mgtune/safeopt.hpp"

namespace mgtune {

/// Shortest decimal text that parses back to the same double.
std::string format_number(double v);

inline constexpr const char* kEpisodeHeader =
    "t,i_f_a,i_f_b,i_f_c,v_c_a,v_c_b,v_c_c,i_l_a,i_l_b,i_l_c,m_a,m_b,m_c,reward";
inline constexpr const char* kHistoryHeader = "iteration,kp,ki,J,aborted,set_tag,safe_set_size";
inline constexpr const char* kLandscapeHeader = "kp,ki,J";

void write_episode_csv(std::ostream& os, const EpisodeRecord& rec);
void write_history_csv(std::ostream& os, const TuningHistory& h);
void write_landscape_csv(std::ostream& os, const Landscape& l);

/// One row per grid point: param columns, mean, lower, upper, safe.
void write_posterior_csv(std::ostream& os, const std::vector<std::string>& param_names, const SafeOpt& opt);

/// Grid posterior of an arbitrary GP: param columns, mean, lower, upper, and
/// a safe column (lower >= j_min) when j_min is given.
void write_gp_posterior_csv(std::ostream& os, const std::vector<std::string>& param_names, const GpModel& gp,
                            const Eigen::MatrixXd& physical, const Eigen::MatrixXd& normalized, double beta,
                            std::optional<double> j_min = std::nullopt);

std::vector<HistoryEntry> read_history_csv(std::istream& is);

/// Writes via a temporary file and renames, so failed runs leave no partial
/// output. Throws std::runtime_error on I/O failure.
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace mgtune
