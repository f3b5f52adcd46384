#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mgtune/commands.hpp"
#include "mgtune/config.hpp"
#include "mgtune/csv_io.hpp"

using namespace mgtune;
namespace fs = std::filesystem;

namespace {

const std::string kCli = MGTUNE_CLI;
const fs::path kDefaults = fs::path(MGTUNE_SOURCE_DIR) / "config" / "defaults.conf";

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args, const fs::path& dir) {
  const fs::path log = dir / "stdout.txt";
  const std::string cmd = "\"" + kCli + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

std::vector<std::string> fields(const std::string& row) {
  std::vector<std::string> out;
  std::istringstream is(row);
  for (std::string f; std::getline(is, f, ',');) out.push_back(f);
  return out;
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("mgtune_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("config parsing") {
  const CliConfig c = parse_config("# comment\nv_dc = 800\n  ki_max=250 # trailing\nbackend = rk4\nsignal_std = 0.3\n");
  CHECK(c.env.grid.v_dc == 800.0);
  CHECK(c.ki_max == 250.0);
  CHECK(c.env.backend == Backend::rk4);
  CHECK(c.kernel.signal_std == 0.3);
  CHECK(!c.kernel.noise_std);
  CHECK(c.env.grid.f_grid == 50.0);

  CHECK_THROWS_AS(parse_config("bogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("v_dc = 1\nv_dc = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("v_dc = abc\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("v_dc\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("link_mapping = quarter\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("i_nom = 40\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("seed_ki = 400\n"), ConfigError);
}

TEST_CASE("config format round-trips and every key is documented") {
  CliConfig c;
  c.env.dt = 1.0 / 30000.0;
  c.kernel.noise_std = 0.001;
  c.env.mapping = LinkMapping::half;
  const std::string text = format_config(c);
  CHECK(format_config(parse_config(text)) == text);
  const CliConfig back = parse_config(text);
  CHECK(back.env.dt == c.env.dt);
  CHECK(back.env.mapping == LinkMapping::half);
  for (const auto& [key, doc] : config_key_docs()) {
    CHECK(!doc.empty());
    CHECK(text.find("\n" + key + " = ") != std::string::npos);
  }
}

TEST_CASE("shipped defaults file equals the built-in defaults") {
  const CliConfig file = load_config(kDefaults);
  CHECK(format_config(file) == format_config(CliConfig{}));
  CHECK(file.env.mapping == LinkMapping::full);
}

TEST_CASE("experiment modes") {
  const CliConfig c;
  const ExperimentConfig e1 = c.experiment(TuneMode::one_d);
  CHECK(e1.n_episodes == 15);
  CHECK(e1.fixed[kKp] == 0.005);
  CHECK(e1.free_dims() == std::vector<std::size_t>{kKi});
  const ExperimentConfig e2 = c.experiment(TuneMode::two_d);
  CHECK(e2.n_episodes == 50);
  CHECK(e2.free_dims().size() == 2);
}

TEST_CASE("csv helpers") {
  for (double v : {0.1, -1.0 / 3.0, 1e-300, 12345.678})
    CHECK(std::stod(format_number(v)) == v);
  CHECK(parse_resolution("60x40") == std::pair{60, 40});
  CHECK(parse_resolution("7") == std::pair{7, 7});
  CHECK_THROWS(parse_resolution("0x3"));
  CHECK_THROWS(parse_resolution("ax3"));

  TuningHistory h = run_tuning(CliConfig{}.experiment(TuneMode::one_d));
  std::ostringstream os;
  write_history_csv(os, h);
  std::istringstream is(os.str());
  const auto back = read_history_csv(is);
  REQUIRE(back.size() == h.entries.size());
  for (std::size_t k = 0; k < back.size(); ++k) {
    CHECK(back[k].j == h.entries[k].j);
    CHECK(back[k].gains.ki == h.entries[k].gains.ki);
    CHECK(back[k].tag == h.entries[k].tag);
    CHECK(back[k].safe_set_size == h.entries[k].safe_set_size);
  }
}

TEST_CASE("cli: usage errors") {
  const fs::path d = scratch("usage");
  CHECK(run("episode --config " + (d / "missing.conf").string() + " --kp 0 --ki 0 --out " + (d / "e.csv").string(), d).code == 1);
  CHECK(!fs::exists(d / "e.csv"));
  CHECK(run("nonsense", d).code == 1);

  std::ofstream(d / "bad.conf") << "v_dc = 1000\nwhat = 2\n";
  const Run bad = run("episode --config " + (d / "bad.conf").string() + " --kp 0 --ki 0 --out " + (d / "e.csv").string(), d);
  CHECK(bad.code == 1);
  CHECK(bad.out.find("what") != std::string::npos);
  CHECK(!fs::exists(d / "e.csv"));
}

TEST_CASE("cli: episode") {
  const fs::path d = scratch("episode");
  const Run r = run("episode --config " + kDefaults.string() + " --kp 0.005 --ki 10 --out " + (d / "ep.csv").string(), d);
  REQUIRE(r.code == 0);
  const EpisodeRecord rec = run_episode(EnvConfig{}, {0.005, 10.0});
  char expect[64];
  std::snprintf(expect, sizeof expect, "J = %.4f", rec.j);
  CHECK(r.out.find(expect) != std::string::npos);
  const auto rows = lines(slurp(d / "ep.csv"));
  REQUIRE(rows.size() == 301);
  CHECK(rows[0] == kEpisodeHeader);
  CHECK(rows[300].substr(rows[300].rfind(',') + 1) == format_number(rec.trace.back().reward));
}

TEST_CASE("cli: tune, determinism and gp-dump replay") {
  const fs::path d = scratch("tune");
  const std::string base = "tune --config " + kDefaults.string() + " --mode 1d --out " + d.string();
  const Run a = run(base + " --name a", d);
  REQUIRE(a.code == 0);
  CHECK(a.out.find("episodes 15") != std::string::npos);
  REQUIRE(run(base + " --name b", d).code == 0);
  const std::string hist = slurp(d / "a_history.csv");
  CHECK(hist == slurp(d / "b_history.csv"));
  const auto rows = lines(hist);
  REQUIRE(rows.size() == 16);
  CHECK(rows[0] == kHistoryHeader);

  const std::string dump = "gp-dump --config " + kDefaults.string() + " --mode 1d --history " + (d / "a_history.csv").string();
  REQUIRE(run(dump + " --episode-index 14 --out " + (d / "final.csv").string(), d).code == 0);
  CHECK(slurp(d / "final.csv") == slurp(d / "a_gp_final.csv"));
  CHECK(slurp(d / "a_gp_14.csv") == slurp(d / "a_gp_final.csv"));

  REQUIRE(run(dump + " --episode-index 0 --out " + (d / "first.csv").string(), d).code == 0);
  CHECK(slurp(d / "first.csv") == slurp(d / "a_gp_0.csv"));
  const auto first = lines(slurp(d / "first.csv"));
  REQUIRE(first.size() == 1001);
  CHECK(first[0] == "ki,mean,lower,upper,safe");
  const double j_min = 2.0 * std::stod(fields(rows[1])[3]);
  int safe_rows = 0;
  for (std::size_t k = 1; k < first.size(); ++k) {
    const auto f = fields(first[k]);
    REQUIRE(f.size() == 5);
    CHECK((std::stod(f[2]) >= j_min) == (f[4] == "1"));
    safe_rows += f[4] == "1";
  }
  CHECK(safe_rows >= 1);

  const Run oob = run(dump + " --episode-index 15 --out " + (d / "oob.csv").string(), d);
  CHECK(oob.code == 1);
  CHECK(!fs::exists(d / "oob.csv"));
}

TEST_CASE("cli: landscape") {
  const fs::path d = scratch("landscape");
  REQUIRE(run("landscape --config " + kDefaults.string() + " --resolution 3x4 --out " + (d / "l.csv").string(), d).code == 0);
  const auto rows = lines(slurp(d / "l.csv"));
  CHECK(rows.size() == 1 + 12);
  CHECK(rows[0] == kLandscapeHeader);

  REQUIRE(run("landscape --config " + kDefaults.string() + " --resolution 1x1 --out " + (d / "one.csv").string(), d).code == 0);
  const auto one = lines(slurp(d / "one.csv"));
  REQUIRE(one.size() == 2);
  CHECK(one[1] == "0.005,10," + format_number(run_episode(EnvConfig{}, {0.005, 10.0}).j));
}

TEST_CASE("cli: empty safe set exits with its own code") {
  const fs::path d = scratch("terminal");
  // observation noise swamps the seed measurement, so no grid point is certified safe
  std::ofstream(d / "t.conf") << "signal_std = 1\nnoise_std = 100\n";
  const Run r = run("tune --config " + (d / "t.conf").string() + " --mode 1d --out " + d.string() + " --name t", d);
  INFO(r.out);
  CHECK(r.code == 3);
  const auto rows = lines(slurp(d / "t_history.csv"));
  CHECK(rows.size() == 2);
}

TEST_CASE("cli: gp-dump of the seed in the zero-noise limit") {
  const fs::path d = scratch("zero_noise");
  std::ofstream(d / "z.conf") << "noise_std = 1e-9\nepisodes_1d = 2\n";
  const std::string conf = (d / "z.conf").string();
  REQUIRE(run("tune --config " + conf + " --mode 1d --out " + d.string() + " --name z", d).code == 0);
  REQUIRE(run("gp-dump --config " + conf + " --mode 1d --history " + (d / "z_history.csv").string() +
                  " --episode-index 0 --out " + (d / "g.csv").string(), d).code == 0);
  const auto rows = lines(slurp(d / "g.csv"));
  // seed ki = 10 snaps to grid index 33
  const auto f = fields(rows[1 + 33]);
  CHECK(std::stod(f[2]) == doctest::Approx(std::stod(f[3])).epsilon(1e-6));
  CHECK(std::stod(f[1]) == doctest::Approx(run_episode(EnvConfig{}, {0.005, 10.0}).j).epsilon(1e-6));
}
