#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "otb/errors.hpp"
#include "otb/experiment.hpp"
#include "otb/serialize.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json two_state_chain_json() {
  return json::parse(R"({
    "space": {"labels": ["z0", "z1"], "dist": [[0.0, 1.0], [1.0, 0.0]]},
    "transition": [[0.7, 0.3], [0.1, 0.9]],
    "initial": [0.25, 0.75]
  })");
}

json pair_shift_chain_json() {
  return json::parse(R"({
    "space": {"labels": ["z00", "z01", "z10", "z11"],
              "dist": [[0.0, 0.5, 0.5, 1.0], [0.5, 0.0, 1.0, 0.5],
                       [0.5, 1.0, 0.0, 0.5], [1.0, 0.5, 0.5, 0.0]]},
    "transition": [[0.5, 0.5, 0.0, 0.0], [0.0, 0.0, 0.5, 0.5],
                   [0.5, 0.5, 0.0, 0.0], [0.0, 0.0, 0.5, 0.5]],
    "initial": [1.0, 0.0, 0.0, 0.0]
  })");
}

json mini_config_json() {
  json j;
  j["name"] = "mini";
  j["chain"] = two_state_chain_json();
  j["loss"] = json::parse(R"({
    "h_space": {"labels": ["h0", "h1"], "dist": [[0.0, 1.0], [1.0, 0.0]]},
    "values": [[0.0, 1.0], [1.0, 0.0]]
  })");
  j["eta"] = "auto";
  j["n"] = {4, 8};
  j["delta"] = 0.1;
  j["tau"] = "auto";
  j["offline"] = "erm";
  j["replications"] = 4;
  j["seed0"] = 7;
  j["mixing_kmax"] = 6;
  return j;
}

std::string validation_message(const json& j) {
  try {
    otb::config_from_json(j);
  } catch (const otb::ValidationError& e) {
    return e.what();
  }
  return "";
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("otblab_test_" + tag);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int line_count(const std::string& s) {
  int n = 0;
  for (char c : s) {
    if (c == '\n') ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("config parsing resolves the sweep rules") {
  const otb::ExperimentConfig cfg = otb::config_from_json(mini_config_json());
  CHECK(cfg.name == "mini");
  CHECK(cfg.n_values == std::vector<int>{4, 8});
  CHECK(cfg.replications == 4);
  CHECK(cfg.seed0 == 7);
  CHECK(!cfg.certificate.has_value());
  CHECK(cfg.prior_mass.isApprox(Eigen::VectorXd::Constant(2, 0.5), 0.0));
  // z-space defaults to the chain's state space
  CHECK(cfg.loss->z_space()->same_as(*cfg.chain->space()));

  SUBCASE("tau follows max(1, ceil(ln n) - 1)") {
    CHECK(cfg.tau_for(2) == 1);
    CHECK(cfg.tau_for(3) == 1);
    CHECK(cfg.tau_for(8) == 2);
    CHECK(cfg.tau_for(32) == 3);
    CHECK(cfg.tau_for(64) == 4);
    CHECK(cfg.tau_for(128) == 4);
    CHECK(cfg.tau_for(256) == 5);
  }
  SUBCASE("auto eta is 1/sqrt(n)") {
    CHECK(cfg.eta_for(4) == 0.5);
    CHECK(cfg.eta_for(64) == 0.125);
  }
  SUBCASE("explicit eta and tau override the rules") {
    json j = mini_config_json();
    j["eta"] = 0.25;
    j["tau"] = 2;
    const otb::ExperimentConfig fixed = otb::config_from_json(j);
    CHECK(fixed.eta_for(4) == 0.25);
    CHECK(fixed.eta_for(4096) == 0.25);
    CHECK(fixed.tau_for(4) == 2);
    CHECK(fixed.tau_for(4096) == 2);
  }
}

TEST_CASE("config errors are collected into one report") {
  json j = mini_config_json();
  j["n"] = {8, 8};    // not strictly increasing
  j["delta"] = 1.5;   // outside (0, 1)
  j["eta"] = -0.1;    // not positive and not "auto"
  const std::string msg = validation_message(j);
  CHECK(msg.find("config validation failed") != std::string::npos);
  CHECK(msg.find("n") != std::string::npos);
  CHECK(msg.find("delta") != std::string::npos);
  CHECK(msg.find("eta") != std::string::npos);

  SUBCASE("unknown top-level keys are rejected") {
    json k = mini_config_json();
    k["surprise"] = 1;
    CHECK(validation_message(k).find("surprise") != std::string::npos);
  }
}

TEST_CASE("geometric certificates are verified against the chain") {
  SUBCASE("K defaults to the smallest constant covering the measured head") {
    json j = mini_config_json();
    j["chain"] = pair_shift_chain_json();
    j["chain"]["geometric_certificate"] = {{"r", 2.0}};
    j["loss"]["z_space"] =
        j["chain"]["space"];  // two-column loss no longer matches the 4-state chain
    j["loss"]["values"] = {{0.0, 1.0, 1.0, 0.0}, {1.0, 0.0, 0.0, 1.0}};
    const otb::ExperimentConfig cfg = otb::config_from_json(j);
    REQUIRE(cfg.certificate.has_value());
    // phi(1) = 1 and phi(k >= 2) = 0, so min K with phi(k) <= K e^{-k^2} is e.
    CHECK(cfg.certificate->K == std::exp(1.0));
    CHECK(cfg.certificate->r == 2.0);
  }
  SUBCASE("a chain that never hits zero cannot carry a finite-window certificate") {
    json j = mini_config_json();
    j["chain"]["geometric_certificate"] = {{"K", 10.0}, {"r", 2.0}};
    const std::string msg = validation_message(j);
    CHECK(msg.find("geometric_certificate") != std::string::npos);
    CHECK(msg.find("stays positive") != std::string::npos);
  }
  SUBCASE("rates at or below 1 are rejected") {
    json j = mini_config_json();
    j["chain"] = pair_shift_chain_json();
    j["chain"]["geometric_certificate"] = {{"r", 1.0}};
    j["loss"]["z_space"] = j["chain"]["space"];
    j["loss"]["values"] = {{0.0, 1.0, 1.0, 0.0}, {1.0, 0.0, 0.0, 1.0}};
    CHECK(validation_message(j).find("must be > 1") != std::string::npos);
  }
}

TEST_CASE("load_config separates I/O failures from bad content") {
  CHECK_THROWS_AS(otb::load_config("/nonexistent/nowhere.json"), otb::IoError);

  const fs::path bad = fs::temp_directory_path() / "otblab_test_bad.json";
  {
    std::ofstream out(bad);
    out << "{ not json";
  }
  CHECK_THROWS_AS(otb::load_config(bad), otb::ValidationError);

  const fs::path good = fs::temp_directory_path() / "otblab_test_good.json";
  {
    std::ofstream out(good);
    out << mini_config_json().dump(2) << "\n";
  }
  const otb::ExperimentConfig cfg = otb::load_config(good);
  CHECK(cfg.name == "mini");
  CHECK(cfg.config_hash == otb::json_fingerprint(mini_config_json()));
  fs::remove(bad);
  fs::remove(good);
}

TEST_CASE("a single replication reports internally consistent fields") {
  const otb::ExperimentConfig cfg = otb::config_from_json(mini_config_json());
  const otb::ReplicationRow row = otb::run_replication(cfg, 8, 3, 1234);
  CHECK(row.n == 8);
  CHECK(row.replication == 3);
  CHECK(row.seed == 1234);
  CHECK(row.eta == cfg.eta_for(8));
  CHECK(row.tau == cfg.tau_for(8));
  CHECK(std::isfinite(row.gen_bar));
  CHECK(row.kappa_max <= row.kappa_sum + 1e-15);
  CHECK(row.kl_comparator >= 0.0);
  CHECK(row.invariants_ok);
  CHECK(row.issues.empty());
  CHECK(row.covered_highprob == (row.gen_bar <= row.highprob.total + 1e-12));
  CHECK(!row.fixedrate_applicable);  // no certificate in the mini config

  SUBCASE("rows without a certificate serialize the fixed-rate columns as nan") {
    const std::string line = otb::summary_csv_row(row);
    const std::string header = otb::summary_csv_header();
    CHECK(line.find("nan") != std::string::npos);
    // column count must always match the header
    CHECK(std::count(line.begin(), line.end(), ',') ==
          std::count(header.begin(), header.end(), ','));
  }
  SUBCASE("the same seed reproduces the row exactly") {
    const otb::ReplicationRow again = otb::run_replication(cfg, 8, 3, 1234);
    CHECK(again.gen_bar == row.gen_bar);
    CHECK(again.regret_value == row.regret_value);
    CHECK(again.kappa_sum == row.kappa_sum);
    CHECK(otb::summary_csv_row(again) == otb::summary_csv_row(row));
  }
}

TEST_CASE("run_experiment writes the full artifact set deterministically") {
  const otb::ExperimentConfig cfg = otb::config_from_json(mini_config_json());
  otb::RunOptions opts;
  opts.threads = 2;

  const fs::path dir_a = fresh_dir("run_a");
  opts.out_dir = dir_a.string();
  const otb::ExperimentResult res = otb::run_experiment(cfg, opts);
  CHECK(res.exit_code == 0);
  CHECK(res.failures.empty());
  CHECK(res.rows.size() == 8);   // 2 cells x 4 replications
  CHECK(res.cells.size() == 2);

  const std::string summary = slurp(dir_a / "summary.csv");
  const std::string coverage = slurp(dir_a / "coverage.csv");
  const std::string mixing = slurp(dir_a / "mixing.csv");
  CHECK(line_count(summary) == 9);
  CHECK(line_count(coverage) == 3);
  CHECK(line_count(mixing) == 7);  // header + k = 1..mixing_kmax
  CHECK(summary.rfind(otb::summary_csv_header() + "\n", 0) == 0);
  CHECK(coverage.rfind(otb::coverage_csv_header() + "\n", 0) == 0);
  CHECK(mixing.rfind("k,phi,beta\n", 0) == 0);

  SUBCASE("the manifest records the run without any wall-clock state") {
    const json manifest = json::parse(slurp(dir_a / "manifest.json"));
    CHECK(manifest.at("name") == "mini");
    CHECK(manifest.at("tool") == "otblab");
    CHECK(manifest.at("tool_version") == otb::kToolVersion);
    CHECK(manifest.at("config_hash") == cfg.config_hash);
    CHECK(manifest.at("seed0") == 7);
    CHECK(manifest.at("replications") == 4);
    CHECK(manifest.at("n_values") == json(std::vector<int>{4, 8}));
    CHECK(manifest.at("trace_check_failures") == 0);
    CHECK(!manifest.contains("timestamp"));
  }
  SUBCASE("re-running and changing thread count are both byte-stable") {
    const fs::path dir_b = fresh_dir("run_b");
    otb::RunOptions opts_b = opts;
    opts_b.out_dir = dir_b.string();
    opts_b.threads = 1;
    otb::run_experiment(cfg, opts_b);
    CHECK(slurp(dir_b / "summary.csv") == summary);
    CHECK(slurp(dir_b / "coverage.csv") == coverage);
    CHECK(slurp(dir_b / "mixing.csv") == mixing);
    fs::remove_all(dir_b);
  }
  SUBCASE("options override replications and seed") {
    const fs::path dir_c = fresh_dir("run_c");
    otb::RunOptions opts_c = opts;
    opts_c.out_dir = dir_c.string();
    opts_c.replications = 2;
    opts_c.seed0 = 99;
    const otb::ExperimentResult res_c = otb::run_experiment(cfg, opts_c);
    CHECK(res_c.rows.size() == 4);
    CHECK(res_c.rows.front().seed == 99);
    fs::remove_all(dir_c);
  }
  SUBCASE("check-only validates without writing anything") {
    const fs::path dir_d = fresh_dir("run_d");
    otb::RunOptions opts_d = opts;
    opts_d.out_dir = dir_d.string();
    opts_d.check_only = true;
    std::ostringstream log;
    opts_d.log = &log;
    const otb::ExperimentResult res_d = otb::run_experiment(cfg, opts_d);
    CHECK(res_d.exit_code == 0);
    CHECK(res_d.rows.empty());
    CHECK(!fs::exists(dir_d / "summary.csv"));
    CHECK(log.str().find("mini") != std::string::npos);
    fs::remove_all(dir_d);
  }
  SUBCASE("plot data aggregates the summary by n") {
    std::ostringstream out;
    otb::emit_plot_data(dir_a / "summary.csv", out);
    std::istringstream lines(out.str());
    std::string header;
    std::getline(lines, header);
    CHECK(header == "n,mean_gen,se_gen,bound_highprob_mean,bound_fixedrate_mean,bound_etaind,"
                    "regret_over_n_mean");
    int data_lines = 0;
    std::string line;
    while (std::getline(lines, line)) {
      if (!line.empty()) ++data_lines;
    }
    CHECK(data_lines == 2);
    // first column of the first data line is the first n
    const std::string body = out.str().substr(header.size() + 1);
    CHECK(body.rfind("4,", 0) == 0);
  }
  SUBCASE("plot data refuses files with a foreign header") {
    std::ostringstream out;
    CHECK_THROWS_AS(otb::emit_plot_data(dir_a / "coverage.csv", out), otb::ValidationError);
    CHECK_THROWS_AS(otb::emit_plot_data(dir_a / "absent.csv", out), otb::IoError);
  }

  fs::remove_all(dir_a);
}

TEST_CASE("cell summaries agree with their rows") {
  json j = mini_config_json();
  j["n"] = {6};
  j["replications"] = 6;
  const otb::ExperimentConfig cfg = otb::config_from_json(j);
  otb::RunOptions opts;
  opts.threads = 1;
  const fs::path dir = fresh_dir("cells");
  opts.out_dir = dir.string();
  const otb::ExperimentResult res = otb::run_experiment(cfg, opts);
  REQUIRE(res.cells.size() == 1);
  const otb::CellSummary& cell = res.cells.front();

  double sum = 0.0;
  for (const auto& row : res.rows) sum += row.gen_bar;
  CHECK(cell.mean_gen == doctest::Approx(sum / 6.0).epsilon(1e-15));
  CHECK(cell.replications == 6);
  CHECK(cell.se_gen >= 0.0);
  CHECK(std::isnan(cell.coverage_fixedrate));     // no certificate
  CHECK(std::isnan(cell.mean_bound_etaind));   // no certificate
  CHECK(cell.coverage_highprob >= 0.0);
  CHECK(cell.coverage_highprob <= 1.0);
  CHECK(cell.kappa_cap ==
        6 * cfg.eta_for(6) * cfg.loss->g_h() * cfg.loss->r_h() * cfg.loss->r_h());
  fs::remove_all(dir);
}
