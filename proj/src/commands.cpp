#include "mgtune/commands.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <ctime>
#include <ostream>
#include <sstream>

#include "mgtune/csv_io.hpp"
#include "mgtune/runner.hpp"

namespace mgtune {

namespace {

CliConfig config_or_defaults(const std::optional<std::filesystem::path>& path) {
  return path ? load_config(*path) : CliConfig{};
}

std::string utc_stamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SafeSetEmpty& e) {
    err << "error: " << e.what() << "\n";
    return kExitSafeSetEmpty;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

template <typename Writer>
std::string render(Writer&& w) {
  std::ostringstream ss;
  w(ss);
  return ss.str();
}

}  // namespace

std::vector<std::string> free_param_names(TuneMode mode) {
  if (mode == TuneMode::one_d) return {"ki"};
  return {"kp", "ki"};
}

std::pair<int, int> parse_resolution(const std::string& s) {
  auto to_count = [&](const std::string& part) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(part, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != part.size() || part.empty() || v < 1)
      throw std::invalid_argument("resolution must look like NxM with positive counts, got '" + s + "'");
    return v;
  };
  const auto x = s.find('x');
  if (x == std::string::npos) {
    const int n = to_count(s);
    return {n, n};
  }
  return {to_count(s.substr(0, x)), to_count(s.substr(x + 1))};
}

int cmd_episode(const EpisodeArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const CliConfig cfg = config_or_defaults(a.config);
    const PiGains gains{a.kp.value_or(cfg.seed.kp), a.ki.value_or(cfg.seed.ki)};
    if (!(gains.kp >= 0.0) || !(gains.ki >= 0.0)) throw std::invalid_argument("gains must be >= 0");
    const EpisodeRecord rec = run_episode(cfg.env, gains);
    write_file(a.out, render([&](std::ostream& os) { write_episode_csv(os, rec); }));
    out << "J = " << fixed4(rec.j) << (rec.aborted ? " (aborted)" : "") << "\n";
    return static_cast<int>(kExitOk);
  });
}

int cmd_tune(const TuneArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    CliConfig cfg = config_or_defaults(a.config);
    if (a.seed) cfg.rng_seed = *a.seed;
    const ExperimentConfig exp = cfg.experiment(a.mode);
    const std::string mode_name = a.mode == TuneMode::one_d ? "1d" : "2d";
    const std::string stem = a.name.value_or("tune" + mode_name + "_" + utc_stamp());

    const TuningHistory h = run_tuning(exp);

    std::filesystem::create_directories(a.out_dir);
    write_file(a.out_dir / (stem + "_history.csv"), render([&](std::ostream& os) { write_history_csv(os, h); }));
    const auto names = free_param_names(a.mode);
    const SafeOpt& final_state = *h.final_state;
    for (const auto& snap : h.snapshots) {
      const std::string file = stem + "_gp_" + std::to_string(snap.episode) + ".csv";
      write_file(a.out_dir / file, render([&](std::ostream& os) {
                   write_gp_posterior_csv(os, names, snap.gp, final_state.grid_physical(),
                                          final_state.grid_normalized(), exp.beta, h.j_min);
                 }));
    }
    write_file(a.out_dir / (stem + "_gp_final.csv"),
               render([&](std::ostream& os) { write_posterior_csv(os, names, final_state); }));

    out << "episodes " << h.entries.size() << "\n"
        << "J_init " << fixed4(h.j_init) << "  J_min " << fixed4(h.j_min) << "\n"
        << "best kp=" << format_number(h.best_gains.kp) << " ki=" << format_number(h.best_gains.ki)
        << " J=" << fixed4(h.best_j) << "\n";
    if (h.terminal) {
      err << "safe set became empty after " << h.entries.size() << " episodes\n";
      return static_cast<int>(kExitSafeSetEmpty);
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_landscape(const LandscapeArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const CliConfig cfg = config_or_defaults(a.config);
    if (a.kp_points < 1 || a.ki_points < 1) throw std::invalid_argument("resolution must be positive");
    const auto kp = axis_values(cfg.kp_min, cfg.kp_max, a.kp_points, cfg.seed.kp);
    const auto ki = axis_values(cfg.ki_min, cfg.ki_max, a.ki_points, cfg.seed.ki);
    const Landscape l = landscape_sweep(cfg.env, kp, ki);
    write_file(a.out, render([&](std::ostream& os) { write_landscape_csv(os, l); }));
    std::size_t best = 0;
    for (std::size_t k = 1; k < l.j.size(); ++k)
      if (l.j[k] > l.j[best]) best = k;
    out << "points " << l.j.size() << "\n"
        << "best kp=" << format_number(l.kp[best / ki.size()]) << " ki=" << format_number(l.ki[best % ki.size()])
        << " J=" << fixed4(l.j[best]) << "\n";
    return static_cast<int>(kExitOk);
  });
}

int cmd_gp_dump(const GpDumpArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const CliConfig cfg = config_or_defaults(a.config);
    std::ifstream in(a.history);
    if (!in) throw std::invalid_argument("cannot open history file '" + a.history.string() + "'");
    const auto entries = read_history_csv(in);
    if (a.episode_index < 0 || static_cast<std::size_t>(a.episode_index) >= entries.size())
      throw std::out_of_range("episode index " + std::to_string(a.episode_index) + " outside history of " +
                              std::to_string(entries.size()) + " entries");
    const ExperimentConfig exp = cfg.experiment(a.mode);
    const SafeOpt opt = replay_safeopt(exp, entries, static_cast<std::size_t>(a.episode_index) + 1);
    write_file(a.out, render([&](std::ostream& os) { write_posterior_csv(os, free_param_names(a.mode), opt); }));
    out << "grid points " << opt.grid_size() << ", safe " << opt.safe_count() << "\n";
    return static_cast<int>(kExitOk);
  });
}

}  // namespace mgtune
