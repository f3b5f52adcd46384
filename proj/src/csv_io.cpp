#include "mgtune/csv_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "mgtune/kernels.hpp"

namespace mgtune {

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("format_number failed");
  return std::string(buf, ptr);
}

void write_episode_csv(std::ostream& os, const EpisodeRecord& rec) {
  os << kEpisodeHeader << "\n";
  for (const auto& row : rec.trace) {
    os << format_number(row.t);
    for (double x : row.state) os << ',' << format_number(x);
    os << ',' << format_number(row.m.a) << ',' << format_number(row.m.b) << ',' << format_number(row.m.c) << ','
       << format_number(row.reward) << "\n";
  }
}

void write_history_csv(std::ostream& os, const TuningHistory& h) {
  os << kHistoryHeader << "\n";
  for (const auto& e : h.entries) {
    os << e.episode << ',' << format_number(e.gains.kp) << ',' << format_number(e.gains.ki) << ','
       << format_number(e.j) << ',' << (e.aborted ? 1 : 0) << ',' << to_string(e.tag) << ',' << e.safe_set_size
       << "\n";
  }
}

void write_landscape_csv(std::ostream& os, const Landscape& l) {
  os << kLandscapeHeader << "\n";
  for (std::size_t a = 0; a < l.kp.size(); ++a)
    for (std::size_t b = 0; b < l.ki.size(); ++b)
      os << format_number(l.kp[a]) << ',' << format_number(l.ki[b]) << ',' << format_number(l.at(a, b)) << "\n";
}

namespace {

void write_header(std::ostream& os, const std::vector<std::string>& names, bool with_safe) {
  for (const auto& n : names) os << n << ',';
  os << "mean,lower,upper" << (with_safe ? ",safe" : "") << "\n";
}

}  // namespace

void write_posterior_csv(std::ostream& os, const std::vector<std::string>& param_names, const SafeOpt& opt) {
  if (static_cast<Eigen::Index>(param_names.size()) != opt.grid_physical().cols())
    throw std::invalid_argument("posterior csv: one name per parameter required");
  write_header(os, param_names, true);
  const auto& grid = opt.grid_physical();
  for (Eigen::Index i = 0; i < grid.rows(); ++i) {
    const auto ui = static_cast<std::size_t>(i);
    for (Eigen::Index d = 0; d < grid.cols(); ++d) os << format_number(grid(i, d)) << ',';
    os << format_number(opt.posteriors()[ui].mean) << ',' << format_number(opt.lower()[ui]) << ','
       << format_number(opt.upper()[ui]) << ',' << (opt.safe_mask()[ui] ? 1 : 0) << "\n";
  }
}

void write_gp_posterior_csv(std::ostream& os, const std::vector<std::string>& param_names, const GpModel& gp,
                            const Eigen::MatrixXd& physical, const Eigen::MatrixXd& normalized, double beta,
                            std::optional<double> j_min) {
  if (static_cast<Eigen::Index>(param_names.size()) != physical.cols() || physical.rows() != normalized.rows())
    throw std::invalid_argument("gp csv: shape mismatch");
  write_header(os, param_names, j_min.has_value());
  const auto post = posterior_batch(gp, normalized);
  for (Eigen::Index i = 0; i < physical.rows(); ++i) {
    const auto& p = post[static_cast<std::size_t>(i)];
    const auto ci = confidence_bounds(p, beta);
    for (Eigen::Index d = 0; d < physical.cols(); ++d) os << format_number(physical(i, d)) << ',';
    os << format_number(p.mean) << ',' << format_number(ci.lower) << ',' << format_number(ci.upper);
    if (j_min) os << ',' << (ci.lower >= *j_min ? 1 : 0);
    os << "\n";
  }
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw std::runtime_error("history csv: bad number '" + s + "'");
  return v;
}

long parse_long(const std::string& s) {
  long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw std::runtime_error("history csv: bad integer '" + s + "'");
  return v;
}

}  // namespace

std::vector<HistoryEntry> read_history_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kHistoryHeader) throw std::runtime_error("history csv: unexpected header");
  std::vector<HistoryEntry> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != 7) throw std::runtime_error("history csv: expected 7 columns");
    HistoryEntry e;
    e.episode = static_cast<int>(parse_long(cells[0]));
    e.gains = {parse_double(cells[1]), parse_double(cells[2])};
    e.j = parse_double(cells[3]);
    e.aborted = parse_long(cells[4]) != 0;
    const auto tag = parse_set_tag(cells[5]);
    if (!tag) throw std::runtime_error("history csv: unknown set tag '" + cells[5] + "'");
    e.tag = *tag;
    e.safe_set_size = parse_long(cells[6]);
    out.push_back(e);
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp);
      throw std::runtime_error("write failed for '" + path.string() + "'");
    }
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace mgtune
