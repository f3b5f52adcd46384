#include "mgtune/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <vector>

#include "mgtune/csv_io.hpp"

namespace mgtune {

ExperimentConfig CliConfig::experiment(TuneMode mode) const {
  ExperimentConfig e;
  e.env = env;
  e.seed = seed;
  e.kernel = kernel;
  e.beta = beta;
  e.rng_seed = rng_seed;
  e.snapshot_stride = snapshot_stride;
  if (mode == TuneMode::one_d) {
    e.bounds = ParamBounds{{kp_min, ki_min}, {kp_max, ki_max}, {2, grid_points_1d}};
    e.fixed[kKp] = seed.kp;
    e.n_episodes = episodes_1d;
  } else {
    e.bounds = ParamBounds{{kp_min, ki_min}, {kp_max, ki_max}, {grid_points_kp, grid_points_ki}};
    e.n_episodes = episodes_2d;
  }
  return e;
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out))
    throw ConfigError("config: '" + key + "' expects a number, got '" + v + "'");
  return out;
}

template <typename Int>
Int to_int(const std::string& key, const std::string& v) {
  Int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    throw ConfigError("config: '" + key + "' expects an integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config: '" + key + "' expects true|false, got '" + v + "'");
}

std::optional<double> to_auto(const std::string& key, const std::string& v) {
  if (v == "auto") return std::nullopt;
  return to_double(key, v);
}

struct Key {
  std::string name;
  std::string doc;
  std::function<void(CliConfig&, const std::string&)> set;
  std::function<std::string(const CliConfig&)> get;
};

#define MG_NUM(name, doc, field)                                                            \
  Key{name, doc, [](CliConfig& c, const std::string& v) { c.field = to_double(name, v); }, \
      [](const CliConfig& c) { return format_number(c.field); }}
#define MG_INT(name, doc, field, type)                                                         \
  Key{name, doc, [](CliConfig& c, const std::string& v) { c.field = to_int<type>(name, v); }, \
      [](const CliConfig& c) { return std::to_string(c.field); }}

const std::vector<Key>& keys() {
  static const std::vector<Key> k = {
      MG_NUM("v_dc", "DC link voltage [V]", env.grid.v_dc),
      MG_NUM("f_grid", "grid frequency [Hz]", env.grid.f_grid),
      MG_NUM("l_filt", "filter inductance [H]", env.grid.l_filt),
      MG_NUM("c_filt", "filter capacitance [F]", env.grid.c_filt),
      MG_NUM("r_filt", "filter series resistance [Ohm]", env.grid.r_filt),
      MG_NUM("r_load", "load resistance [Ohm]", env.grid.r_load),
      MG_NUM("l_load", "load inductance [H]", env.grid.l_load),
      MG_NUM("i_nom", "nominal current [A]", env.i_nom),
      MG_NUM("i_limit", "current limit, episode aborts above it [A]", env.i_limit),
      MG_NUM("i_ref_d", "d-axis current setpoint [A]", env.i_ref_dq0.d),
      MG_NUM("i_ref_q", "q-axis current setpoint [A]", env.i_ref_dq0.q),
      MG_NUM("i_ref_0", "zero-sequence current setpoint [A]", env.i_ref_dq0.zero),
      MG_NUM("dt", "control and simulation step [s]", env.dt),
      MG_INT("n_steps", "steps per episode", env.n_steps, int),
      MG_NUM("mu", "barrier weight", env.mu),
      Key{"backend", "plant stepping: zoh | rk4",
          [](CliConfig& c, const std::string& v) {
            if (v == "zoh") c.env.backend = Backend::zoh;
            else if (v == "rk4") c.env.backend = Backend::rk4;
            else throw ConfigError("config: 'backend' expects zoh|rk4, got '" + v + "'");
          },
          [](const CliConfig& c) { return std::string(c.env.backend == Backend::zoh ? "zoh" : "rk4"); }},
      MG_INT("rk4_substeps", "RK4 substeps per dt", env.rk4_substeps, int),
      Key{"link_mapping", "modulation to voltage: full (m*v_dc) | half (m*v_dc/2)",
          [](CliConfig& c, const std::string& v) {
            if (v == "full") c.env.mapping = LinkMapping::full;
            else if (v == "half") c.env.mapping = LinkMapping::half;
            else throw ConfigError("config: 'link_mapping' expects full|half, got '" + v + "'");
          },
          [](const CliConfig& c) { return std::string(c.env.mapping == LinkMapping::full ? "full" : "half"); }},
      Key{"anti_windup", "conditional integration on saturation: true | false",
          [](CliConfig& c, const std::string& v) { c.env.anti_windup = to_bool("anti_windup", v); },
          [](const CliConfig& c) { return std::string(c.env.anti_windup ? "true" : "false"); }},
      MG_NUM("kp_min", "lower kp bound [1/A]", kp_min),
      MG_NUM("kp_max", "upper kp bound [1/A]", kp_max),
      MG_NUM("ki_min", "lower ki bound [1/(A s)]", ki_min),
      MG_NUM("ki_max", "upper ki bound [1/(A s)]", ki_max),
      MG_INT("grid_points_1d", "ki grid size in 1d mode", grid_points_1d, int),
      MG_INT("grid_points_kp", "kp grid size in 2d mode", grid_points_kp, int),
      MG_INT("grid_points_ki", "ki grid size in 2d mode", grid_points_ki, int),
      MG_NUM("seed_kp", "initial safe kp [1/A]; pinned in 1d mode", seed.kp),
      MG_NUM("seed_ki", "initial safe ki [1/(A s)]", seed.ki),
      MG_INT("episodes_1d", "episodes in 1d mode, seed included", episodes_1d, int),
      MG_INT("episodes_2d", "episodes in 2d mode, seed included", episodes_2d, int),
      MG_NUM("lengthscale", "Matern lengthscale, fraction of each bound range", kernel.lengthscale),
      Key{"signal_std", "kernel signal std [J units] or auto (= |J_init|)",
          [](CliConfig& c, const std::string& v) { c.kernel.signal_std = to_auto("signal_std", v); },
          [](const CliConfig& c) { return c.kernel.signal_std ? format_number(*c.kernel.signal_std) : "auto"; }},
      Key{"noise_std", "observation noise std [J units] or auto (= 0.01 |J_init|)",
          [](CliConfig& c, const std::string& v) { c.kernel.noise_std = to_auto("noise_std", v); },
          [](const CliConfig& c) { return c.kernel.noise_std ? format_number(*c.kernel.noise_std) : "auto"; }},
      MG_NUM("beta", "confidence multiplier", beta),
      MG_INT("rng_seed", "run stamp; the loop itself is deterministic", rng_seed, std::uint64_t),
      MG_INT("snapshot_stride", "GP dump stride in episodes, 0 = auto", snapshot_stride, int),
  };
  return k;
}

#undef MG_NUM
#undef MG_INT

}  // namespace

CliConfig parse_config(const std::string& text) {
  CliConfig c;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    const auto& ks = keys();
    const auto it = std::find_if(ks.begin(), ks.end(), [&](const Key& k) { return k.name == key; });
    if (it == ks.end()) throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (!seen.insert(key).second)
      throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    it->set(c, value);
  }
  try {
    c.env.validate();
    c.experiment(TuneMode::one_d).validate();
    c.experiment(TuneMode::two_d).validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

CliConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const CliConfig& c) {
  std::ostringstream out;
  for (const auto& k : keys()) out << "# " << k.doc << "\n" << k.name << " = " << k.get(c) << "\n";
  return out.str();
}

const std::map<std::string, std::string>& config_key_docs() {
  static const std::map<std::string, std::string> docs = [] {
    std::map<std::string, std::string> m;
    for (const auto& k : keys()) m[k.name] = k.doc;
    return m;
  }();
  return docs;
}

}  // namespace mgtune
