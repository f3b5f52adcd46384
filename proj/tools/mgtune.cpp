// mgtune: run episodes, SafeOpt tuning, landscape sweeps and GP dumps for the
// single-inverter current-control workbench.

#include <CLI11.hpp>
#include <iostream>

#include "mgtune/commands.hpp"

namespace {

mgtune::TuneMode parse_mode(const std::string& s) {
  if (s == "1d") return mgtune::TuneMode::one_d;
  if (s == "2d") return mgtune::TuneMode::two_d;
  throw CLI::ValidationError("--mode", "expected 1d or 2d");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Safe Bayesian tuning of inverter PI current controllers"};
  app.require_subcommand(1);

  std::string config;
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config, "flat key = value config file (defaults if omitted)")
        ->check(CLI::ExistingFile);
  };

  mgtune::EpisodeArgs ep;
  double kp = 0.0, ki = 0.0;
  std::string ep_out;
  auto* episode = app.add_subcommand("episode", "run one episode and write its waveform CSV");
  add_config(episode);
  auto* kp_opt = episode->add_option("--kp", kp, "proportional gain [1/A]");
  auto* ki_opt = episode->add_option("--ki", ki, "integral gain [1/(A s)]");
  episode->add_option("--out", ep_out, "waveform CSV path")->required();

  mgtune::TuneArgs tune;
  std::string tune_mode = "1d", tune_out, tune_name;
  std::uint64_t tune_seed = 0;
  auto* tune_cmd = app.add_subcommand("tune", "run a SafeOpt tuning experiment");
  add_config(tune_cmd);
  tune_cmd->add_option("--mode", tune_mode, "1d (ki only, kp pinned at seed) or 2d")->check(CLI::IsMember({"1d", "2d"}));
  tune_cmd->add_option("--out", tune_out, "output directory")->required();
  auto* name_opt = tune_cmd->add_option("--name", tune_name, "file stem (default tune<mode>_<UTC timestamp>)");
  auto* seed_opt = tune_cmd->add_option("--seed", tune_seed, "run stamp, overrides rng_seed");

  mgtune::LandscapeArgs land;
  std::string resolution = "60x60", land_out;
  auto* landscape = app.add_subcommand("landscape", "brute-force J over the kp x ki bounds");
  add_config(landscape);
  landscape->add_option("--resolution", resolution, "NxM points (kp x ki); 1 pins an axis at the seed");
  landscape->add_option("--out", land_out, "landscape CSV path")->required();

  mgtune::GpDumpArgs dump;
  std::string dump_mode = "1d", dump_history, dump_out;
  auto* gp_dump = app.add_subcommand("gp-dump", "rebuild the GP after a history episode and dump it over the grid");
  add_config(gp_dump);
  gp_dump->add_option("--history", dump_history, "history CSV written by tune")->required();
  gp_dump->add_option("--mode", dump_mode, "mode the history was produced with")->check(CLI::IsMember({"1d", "2d"}));
  gp_dump->add_option("--episode-index", dump.episode_index, "0-based history row")->required();
  gp_dump->add_option("--out", dump_out, "posterior CSV path")->required();

  auto* defaults = app.add_subcommand("defaults", "print the default configuration file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? mgtune::kExitOk : mgtune::kExitUsage;
  }

  const std::optional<std::filesystem::path> cfg_path =
      config.empty() ? std::nullopt : std::optional<std::filesystem::path>(config);

  if (*episode) {
    ep.config = cfg_path;
    if (*kp_opt) ep.kp = kp;
    if (*ki_opt) ep.ki = ki;
    ep.out = ep_out;
    return mgtune::cmd_episode(ep, std::cout, std::cerr);
  }
  if (*tune_cmd) {
    tune.config = cfg_path;
    tune.mode = parse_mode(tune_mode);
    tune.out_dir = tune_out;
    if (*name_opt) tune.name = tune_name;
    if (*seed_opt) tune.seed = tune_seed;
    return mgtune::cmd_tune(tune, std::cout, std::cerr);
  }
  if (*landscape) {
    land.config = cfg_path;
    try {
      std::tie(land.kp_points, land.ki_points) = mgtune::parse_resolution(resolution);
    } catch (const std::invalid_argument& e) {
      std::cerr << "error: " << e.what() << "\n";
      return mgtune::kExitUsage;
    }
    land.out = land_out;
    return mgtune::cmd_landscape(land, std::cout, std::cerr);
  }
  if (*gp_dump) {
    dump.config = cfg_path;
    dump.mode = parse_mode(dump_mode);
    dump.history = dump_history;
    dump.out = dump_out;
    return mgtune::cmd_gp_dump(dump, std::cout, std::cerr);
  }
  if (*defaults) {
    std::cout << mgtune::format_config(mgtune::CliConfig{});
    return mgtune::kExitOk;
  }
  return mgtune::kExitUsage;
}
