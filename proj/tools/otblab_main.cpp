// otblab: replay the online-to-batch prediction game on finite-state chains
// and check the resulting generalization bounds against simulation.
//
// Subcommands:
//   run       play the full experiment sweep from a config, write CSV/JSON
//   mixing    tabulate phi/beta mixing coefficients of the config's chain
//   plotdata  aggregate a summary.csv into per-n plotting columns
//
// Exit codes: 0 success, 1 invalid input, 2 a runtime identity check failed,
// 3 I/O failure.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "otb/errors.hpp"
#include "otb/experiment.hpp"
#include "otb/mixing.hpp"

namespace {

// --out wins over the OTBLAB_OUT_DIR environment variable, which wins over
// whatever the config file says.
std::string resolve_out_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("OTBLAB_OUT_DIR")) return env;
  return "";
}

int run_command(const std::string& config_path, const std::string& out_flag, int replications,
                std::optional<std::uint64_t> seed, bool check_only, int threads) {
  const otb::ExperimentConfig config = otb::load_config(config_path);
  otb::RunOptions opts;
  opts.out_dir = resolve_out_dir(out_flag);
  opts.replications = replications;
  opts.seed0 = seed;
  opts.check_only = check_only;
  opts.threads = threads;
  opts.log = &std::cerr;

  const otb::ExperimentResult result = otb::run_experiment(config, opts);
  if (!check_only) {
    std::cerr << "wrote " << (result.out_dir / "summary.csv").string() << ", coverage.csv, "
              << "mixing.csv, manifest.json\n";
  }
  for (const std::string& failure : result.failures) {
    std::cerr << "trace check failed: " << failure << "\n";
  }
  return result.exit_code;
}

int mixing_command(const std::string& config_path, int kmax, int horizon,
                   const std::string& out_path) {
  const otb::ExperimentConfig config = otb::load_config(config_path);
  if (horizon <= 0) horizon = 4 * kmax;
  const otb::MixingProfile profile = otb::mixing_profile(*config.chain, kmax, horizon);
  if (out_path.empty() || out_path == "-") {
    otb::write_mixing_csv(profile, std::cout);
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw otb::IoError("cannot open " + out_path + " for writing");
    otb::write_mixing_csv(profile, out);
  }
  std::cerr << "fit: phi(k) <~ " << profile.fit.K << " * exp(-k^" << profile.fit.r << ")\n";
  return 0;
}

int plotdata_command(const std::string& summary_path, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    otb::emit_plot_data(summary_path, std::cout);
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw otb::IoError("cannot open " + out_path + " for writing");
    otb::emit_plot_data(summary_path, out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"online-to-batch generalization lab for mixing data sources"};
  app.require_subcommand(1);

  std::string config_path, out_flag, summary_path;
  int replications = -1, kmax = 20, horizon = 0, threads = 0;
  std::optional<std::uint64_t> seed;
  bool check_only = false;

  CLI::App* run = app.add_subcommand("run", "play the experiment sweep from a config file");
  run->add_option("config", config_path, "experiment config (JSON)")->required();
  run->add_option("--out", out_flag, "output directory (default: $OTBLAB_OUT_DIR, then config)");
  run->add_option("--replications", replications, "override the config's replication count");
  std::uint64_t seed_value = 0;
  CLI::Option* seed_opt = run->add_option("--seed", seed_value, "override the config's base seed");
  run->add_flag("--check-only", check_only, "validate the config and print a summary, run nothing");
  run->add_option("--threads", threads, "worker threads (default: hardware concurrency)");

  CLI::App* mixing = app.add_subcommand("mixing", "tabulate the chain's mixing coefficients");
  mixing->add_option("config", config_path, "experiment config (JSON)")->required();
  mixing->add_option("--kmax", kmax, "largest gap k to tabulate")->required();
  mixing->add_option("--horizon", horizon, "time horizon for beta's sup over t (default 4*kmax)");
  mixing->add_option("--out", out_flag, "output file (default stdout)");

  CLI::App* plotdata = app.add_subcommand("plotdata", "aggregate a summary.csv for plotting");
  plotdata->add_option("summary", summary_path, "summary.csv from a run")->required();
  plotdata->add_option("--out", out_flag, "output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      if (seed_opt->count() > 0) seed = seed_value;
      return run_command(config_path, out_flag, replications, seed, check_only, threads);
    }
    if (*mixing) {
      return mixing_command(config_path, kmax, horizon, out_flag);
    }
    return plotdata_command(summary_path, out_flag);
  } catch (const otb::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const otb::InvariantViolation& e) {
    std::cerr << "identity check failed: " << e.what() << "\n";
    return 2;
  } catch (const otb::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
