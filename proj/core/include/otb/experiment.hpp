#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <json.hpp>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "otb/bounds.hpp"
#include "otb/loss_table.hpp"
#include "otb/markov_chain.hpp"
#include "otb/mixing.hpp"
#include "otb/offline.hpp"

namespace otb {

inline constexpr const char* kToolVersion = "0.1.0";

/// A fully validated experiment description. `load_config` /
/// `config_from_json` collect every problem they find and throw one
/// ValidationError listing all of them.
struct ExperimentConfig {
  std::string name = "experiment";
  std::shared_ptr<const MarkovChain> chain;
  std::shared_ptr<const LossTable> loss;
  Eigen::VectorXd prior_mass;  ///< over the hypothesis space

  bool eta_auto = true;  ///< eta = 1/sqrt(n) per cell when true
  double eta = 0.0;

  std::vector<int> n_values;
  double delta = 0.1;

  bool tau_rule_auto = true;  ///< tau = max(1, ceil(ln n) - 1) when true
  int tau_explicit = 1;

  PosteriorKind offline_kind = PosteriorKind::kErm;
  double gamma = 0.0;

  int replications = 100;
  std::uint64_t seed0 = 1;
  int mixing_kmax = 20;

  std::optional<GeometricCertificate> certificate;
  std::string out_dir;  ///< default output directory (may be empty)

  std::string config_hash;  ///< fingerprint of the source JSON
  nlohmann::json raw;       ///< the source JSON as parsed

  int tau_for(int n) const;
  double eta_for(int n) const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

struct RunOptions {
  std::string out_dir;                 ///< overrides the config when non-empty
  int replications = -1;               ///< overrides when > 0
  std::optional<std::uint64_t> seed0;  ///< overrides when set
  bool check_only = false;             ///< validate and summarize, run nothing
  int threads = 0;                     ///< 0 = hardware concurrency
  std::ostream* log = nullptr;         ///< progress lines, optional
};

/// One (n, replication) outcome: the simulated quantities, the bound values
/// with their term breakdowns and whether each bound covered the outcome.
struct ReplicationRow {
  int n = 0;
  int replication = 0;
  std::uint64_t seed = 0;
  double eta = 0.0;
  int tau = 1;

  double gen_bar = 0.0;
  double regret_value = 0.0;
  double kl_comparator = 0.0;
  double kappa_max = 0.0;
  double kappa_sum = 0.0;

  TermBreakdown highprob;
  bool covered_highprob = false;
  bool fixedrate_applicable = false;
  TermBreakdown fixedrate;
  bool covered_fixedrate = false;
  TermBreakdown etaind;

  bool invariants_ok = true;
  std::vector<std::string> issues;  ///< descriptions of failed trace checks
};

struct CellSummary {
  int n = 0;
  int replications = 0;
  double eta = 0.0;
  int tau = 1;
  double phi_tau1 = 0.0;
  double beta_tau1 = 0.0;
  double kappa_cap = 0.0;  ///< n * eta * g_h * r_h^2, the drift-sum cap

  double mean_gen = 0.0, se_gen = 0.0;
  double mean_regret = 0.0, se_regret = 0.0;
  double bound_expected = 0.0;
  bool expected_holds = false;  ///< mean_gen <= bound_expected + 2 se_gen
  double coverage_highprob = 0.0;
  double coverage_fixedrate = 0.0;  ///< NaN when no certificate
  double mean_bound_highprob = 0.0;
  double mean_bound_fixedrate = 0.0;  ///< NaN when no certificate
  double mean_bound_etaind = 0.0;  ///< NaN when no certificate
};

struct ExperimentResult {
  int exit_code = 0;  ///< 0 clean, 2 when any trace check failed
  std::filesystem::path out_dir;
  std::vector<ReplicationRow> rows;
  std::vector<CellSummary> cells;
  std::vector<std::string> failures;  ///< all trace-check failure messages
};

/// Runs the full sweep and writes summary.csv, coverage.csv, mixing.csv and
/// manifest.json into the output directory. Fully deterministic given the
/// config and seed: replication r of every cell uses seed0 + r.
ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& opts);

/// One replication in isolation (used by the runner's workers and by tests).
ReplicationRow run_replication(const ExperimentConfig& config, int n, int replication,
                               std::uint64_t seed);

void write_mixing_csv(const MixingProfile& profile, std::ostream& out);

/// Aggregates a summary.csv into per-n plot columns:
///   n, mean_gen, se_gen, bound_highprob_mean, bound_fixedrate_mean, bound_etaind,
///   regret_over_n_mean.
void emit_plot_data(const std::filesystem::path& summary_csv, std::ostream& out);

std::string summary_csv_header();
std::string summary_csv_row(const ReplicationRow& row);
std::string coverage_csv_header();
std::string coverage_csv_row(const CellSummary& cell);

}  // namespace otb
