#include "otb/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "otb/divergence.hpp"
#include "otb/errors.hpp"
#include "otb/ewa.hpp"
#include "otb/game.hpp"
#include "otb/serialize.hpp"
#include "otb/wasserstein.hpp"

namespace otb {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct ProblemList {
  std::vector<std::string> problems;
  void add(std::string msg) { problems.push_back(std::move(msg)); }
  bool empty() const { return problems.empty(); }
  [[noreturn]] void raise(const std::string& head) const {
    std::ostringstream msg;
    msg << head << ":";
    for (const auto& p : problems) msg << "\n  - " << p;
    throw ValidationError(msg.str());
  }
};

void parse_scalars(const json& j, ExperimentConfig& cfg, ProblemList& problems) {
  if (j.contains("name")) {
    if (j["name"].is_string()) {
      cfg.name = j["name"].get<std::string>();
    } else {
      problems.add("name: expected a string");
    }
  }
  if (j.contains("delta")) {
    if (j["delta"].is_number()) {
      cfg.delta = j["delta"].get<double>();
      if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) problems.add("delta: must lie in (0, 1)");
    } else {
      problems.add("delta: expected a number");
    }
  }
  if (j.contains("eta")) {
    const json& je = j["eta"];
    if (je.is_string() && je.get<std::string>() == "auto") {
      cfg.eta_auto = true;
    } else if (je.is_number()) {
      cfg.eta_auto = false;
      cfg.eta = je.get<double>();
      if (!(cfg.eta > 0.0) || !std::isfinite(cfg.eta)) {
        problems.add("eta: must be finite and > 0");
      }
    } else {
      problems.add("eta: expected \"auto\" or a positive number");
    }
  }
  if (j.contains("tau")) {
    const json& jt = j["tau"];
    if (jt.is_string() && jt.get<std::string>() == "auto") {
      cfg.tau_rule_auto = true;
    } else if (jt.is_number_integer()) {
      cfg.tau_rule_auto = false;
      cfg.tau_explicit = jt.get<int>();
      if (cfg.tau_explicit < 1) problems.add("tau: explicit lag must be >= 1");
    } else {
      problems.add("tau: expected \"auto\" or an integer >= 1");
    }
  }
  if (!j.contains("n")) {
    problems.add("missing \"n\" (array of sample sizes)");
  } else if (!j["n"].is_array() || j["n"].empty()) {
    problems.add("n: expected a non-empty array of integers");
  } else {
    int prev = 0;
    size_t idx = 0;
    for (const auto& e : j["n"]) {
      const std::string where = "n[" + std::to_string(idx++) + "]";
      if (!e.is_number_integer()) {
        problems.add(where + ": expected an integer");
        continue;
      }
      const int v = e.get<int>();
      if (v < 2) {
        problems.add(where + ": sample sizes must be >= 2");
      } else if (v <= prev) {
        problems.add(where + ": sample sizes must be strictly increasing");
      } else {
        cfg.n_values.push_back(v);
        prev = v;
      }
    }
  }
  if (j.contains("replications")) {
    if (j["replications"].is_number_integer() && j["replications"].get<long>() >= 1) {
      cfg.replications = j["replications"].get<int>();
    } else {
      problems.add("replications: expected an integer >= 1");
    }
  }
  if (j.contains("seed0")) {
    if (j["seed0"].is_number_unsigned() || (j["seed0"].is_number_integer() && j["seed0"].get<long long>() >= 0)) {
      cfg.seed0 = j["seed0"].get<std::uint64_t>();
    } else {
      problems.add("seed0: expected a nonnegative integer");
    }
  }
  if (j.contains("mixing_kmax")) {
    if (j["mixing_kmax"].is_number_integer() && j["mixing_kmax"].get<int>() >= 1) {
      cfg.mixing_kmax = j["mixing_kmax"].get<int>();
    } else {
      problems.add("mixing_kmax: expected an integer >= 1");
    }
  }
  if (j.contains("out_dir")) {
    if (j["out_dir"].is_string()) {
      cfg.out_dir = j["out_dir"].get<std::string>();
    } else {
      problems.add("out_dir: expected a string");
    }
  }
  if (j.contains("offline")) {
    const json& jo = j["offline"];
    if (jo.is_string() && jo.get<std::string>() == "erm") {
      cfg.offline_kind = PosteriorKind::kErm;
    } else if (jo.is_object()) {
      const std::string kind = jo.value("kind", "");
      if (kind == "erm") {
        cfg.offline_kind = PosteriorKind::kErm;
      } else if (kind == "gibbs") {
        cfg.offline_kind = PosteriorKind::kGibbs;
        if (!jo.contains("gamma") || !jo["gamma"].is_number()) {
          problems.add("offline.gamma: required number for the Gibbs comparator");
        } else {
          cfg.gamma = jo["gamma"].get<double>();
          if (!(cfg.gamma >= 0.0) || !std::isfinite(cfg.gamma)) {
            problems.add("offline.gamma: must be finite and >= 0");
          }
        }
      } else {
        problems.add("offline.kind: expected \"erm\" or \"gibbs\"");
      }
    } else {
      problems.add("offline: expected \"erm\" or an object with a \"kind\"");
    }
  }
}

void parse_certificate(const json& jchain, ExperimentConfig& cfg, ProblemList& problems) {
  if (!cfg.chain || !jchain.is_object() || !jchain.contains("geometric_certificate")) return;
  const json& jc = jchain["geometric_certificate"];
  if (!jc.is_object()) {
    problems.add("chain.geometric_certificate: expected an object");
    return;
  }
  for (auto it = jc.begin(); it != jc.end(); ++it) {
    if (it.key() != "K" && it.key() != "r") {
      problems.add("chain.geometric_certificate: unknown key \"" + it.key() + "\"");
    }
  }
  if (!jc.contains("r") || !jc["r"].is_number()) {
    problems.add("chain.geometric_certificate.r: required number");
    return;
  }
  GeometricCertificate cert;
  cert.r = jc["r"].get<double>();
  if (!(cert.r > 1.0) || !std::isfinite(cert.r)) {
    problems.add(
        "chain.geometric_certificate.r: must be > 1 (slower envelopes do not collapse the "
        "mixing tail to K/n)");
    return;
  }
  if (jc.contains("K")) {
    if (!jc["K"].is_number() || !(jc["K"].get<double>() >= 0.0)) {
      problems.add("chain.geometric_certificate.K: expected a number >= 0");
      return;
    }
    cert.K = jc["K"].get<double>();
  } else {
    // Smallest K consistent with the computed phi values before the exact
    // zero; if phi never reaches zero the verification below reports why.
    cert.K = 0.0;
    for (int k = 1; k <= cfg.mixing_kmax; ++k) {
      const double p = phi_coefficient(*cfg.chain, k);
      if (p == 0.0) break;
      cert.K = std::max(cert.K, p * std::exp(std::pow(k, cert.r)));
    }
  }
  const CertificateCheck check = verify_geometric_certificate(*cfg.chain, cert, cfg.mixing_kmax);
  if (!check.valid) {
    problems.add("chain.geometric_certificate: " + check.reason);
    return;
  }
  cfg.certificate = cert;
}

}  // namespace

int ExperimentConfig::tau_for(int n) const {
  return tau_rule_auto ? tau_auto(n) : tau_explicit;
}

double ExperimentConfig::eta_for(int n) const {
  return eta_auto ? 1.0 / std::sqrt(static_cast<double>(n)) : eta;
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("config: expected a JSON object");
  ProblemList problems;
  ExperimentConfig cfg;
  cfg.raw = j;
  cfg.config_hash = json_fingerprint(j);

  static const std::set<std::string> known = {"name",  "chain", "loss",         "prior",
                                              "eta",   "n",     "delta",        "tau",
                                              "offline", "replications", "seed0",
                                              "mixing_kmax", "out_dir"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) problems.add("unknown key \"" + it.key() + "\"");
  }

  json jchain;
  if (!j.contains("chain")) {
    problems.add("missing \"chain\"");
  } else {
    jchain = j["chain"];
    json stripped = jchain;
    if (stripped.is_object()) stripped.erase("geometric_certificate");
    try {
      cfg.chain = chain_from_json(stripped, "chain");
    } catch (const ValidationError& e) {
      problems.add(e.what());
    }
  }

  if (!j.contains("loss")) {
    problems.add("missing \"loss\"");
  } else if (cfg.chain) {
    json jloss = j["loss"];
    if (jloss.is_object() && !jloss.contains("z_space")) {
      jloss["z_space"] = space_to_json(*cfg.chain->space());
    }
    try {
      cfg.loss = loss_from_json(jloss, "loss");
      if (!cfg.loss->z_space()->same_as(*cfg.chain->space())) {
        problems.add("loss.z_space (" + std::to_string(cfg.loss->z_size()) +
                     " points) must structurally match chain.space (" +
                     std::to_string(cfg.chain->size()) + " points)");
      }
    } catch (const ValidationError& e) {
      problems.add(e.what());
    }
  }

  if (cfg.loss) {
    if (!j.contains("prior") ||
        (j["prior"].is_string() && j["prior"].get<std::string>() == "uniform")) {
      cfg.prior_mass =
          Eigen::VectorXd::Constant(cfg.loss->h_size(), 1.0 / cfg.loss->h_size());
    } else if (j["prior"].is_array()) {
      try {
        Eigen::VectorXd m = vector_from_json(j["prior"], "prior");
        DiscreteDistribution check(cfg.loss->h_space(), m);  // runs full validation
        cfg.prior_mass = std::move(m);
      } catch (const ValidationError& e) {
        problems.add(e.what());
      }
    } else {
      problems.add("prior: expected \"uniform\" or an array of masses over H");
    }
  }

  parse_scalars(j, cfg, problems);
  parse_certificate(jchain, cfg, problems);

  if (!problems.empty()) problems.raise("config validation failed");
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

ReplicationRow run_replication(const ExperimentConfig& cfg, int n, int replication,
                               std::uint64_t seed) {
  const MarkovChain& chain = *cfg.chain;
  const LossTable& loss = *cfg.loss;

  ReplicationRow row;
  row.n = n;
  row.replication = replication;
  row.seed = seed;
  row.eta = cfg.eta_for(n);
  row.tau = cfg.tau_for(n);

  std::vector<int> tau_set = {1};
  if (row.tau != 1) tau_set.push_back(row.tau);
  const int tau_max = tau_set.back();

  DiscreteDistribution prior(loss.h_space(), cfg.prior_mass);
  const GameTrace trace =
      run_game(chain, loss, row.eta, prior, n, tau_max, seed, cfg.config_hash);
  const std::vector<int> first_n(trace.samples.begin(), trace.samples.begin() + n);
  const OfflinePosterior comparator = cfg.offline_kind == PosteriorKind::kErm
                                          ? erm_posterior(loss, first_n)
                                          : gibbs_posterior(loss, first_n, prior, cfg.gamma);

  row.regret_value = regret(trace, comparator);
  row.gen_bar = generalization_error(comparator, trace, loss);
  row.kl_comparator = kl_divergence(comparator.distribution, prior);
  row.kappa_max = *std::max_element(trace.kappa.begin(), trace.kappa.end());
  row.kappa_sum = std::accumulate(trace.kappa.begin(), trace.kappa.end(), 0.0);

  auto fail = [&row](const std::string& msg) {
    row.invariants_ok = false;
    row.issues.push_back(msg);
  };

  // Per-round drift against the stability cap.
  const double drift_cap = ewa_stability_bound(row.eta, loss.g_h(), loss.r_h());
  for (int t = 0; t < n; ++t) {
    if (trace.kappa[t] > drift_cap + 1e-9) {
      std::ostringstream msg;
      msg << "round " << t + 1 << ": posterior drift " << trace.kappa[t]
          << " exceeds eta*g_h*r_h^2 = " << drift_cap;
      fail(msg.str());
    }
  }

  // Regret against the mirror-descent cap KL/eta + (eta/2) sum ||c||_inf^2.
  double sq = 0.0;
  for (int t = 0; t < n; ++t) {
    const double s = trace.costs[t].cwiseAbs().maxCoeff();
    sq += s * s;
  }
  const double regret_cap = row.kl_comparator / row.eta + 0.5 * row.eta * sq;
  if (row.regret_value > regret_cap + 1e-9) {
    std::ostringstream msg;
    msg << "regret " << row.regret_value << " exceeds KL/eta + (eta/2) sum ||c||^2 = "
        << regret_cap;
    fail(msg.str());
  }

  for (int tau : tau_set) {
    const TauShiftCheck ts = taushift_check(trace, comparator, loss, tau);
    if (!ts.holds) {
      std::ostringstream msg;
      msg << "tau-shift failed at tau = " << tau << ": lhs " << ts.lhs << " > rhs " << ts.rhs;
      fail(msg.str());
    }
    const GenBarDecompCheck gd = genbar_decomposition_check(trace, comparator, loss, tau);
    if (!gd.holds) {
      std::ostringstream msg;
      msg << "gen-bar decomposition failed at tau = " << tau << ": lhs " << gd.lhs << " > rhs "
          << gd.rhs;
      fail(msg.str());
    }
  }

  // Measure-theory spot checks on consecutive posteriors.
  std::set<int> spots = {0, n / 2, n - 1};
  for (int t : spots) {
    const DiscreteDistribution& a = trace.posteriors[t];
    const DiscreteDistribution& b = trace.posteriors[t + 1];
    if (!check_pinsker(a, b).holds) {
      fail("round " + std::to_string(t + 1) + ": Pinsker check failed");
    }
    if (!check_w1_tv(a, b).holds) {
      fail("round " + std::to_string(t + 1) + ": W1 <= diam*TV check failed");
    }
    const double primal = wasserstein1_primal(a, b).value;
    const double dual = wasserstein1_dual(a, b).value;
    if (std::abs(primal - dual) > 1e-9) {
      std::ostringstream msg;
      msg << "round " << t + 1 << ": W1 primal " << primal << " vs dual " << dual;
      fail(msg.str());
    }
  }

  BoundParams params;
  params.n = n;
  params.tau = row.tau;
  params.delta = cfg.delta;
  params.eta = row.eta;
  params.g_h = loss.g_h();
  params.r_h = loss.r_h();
  params.g_z = loss.g_z();
  params.r_z = loss.r_z();
  params.b_ell = loss.b_ell();
  params.kappa_sum = n * drift_cap;  // the a-priori cap, not the measured sum
  params.beta_tau1 = beta_coefficient(chain, row.tau + 1, n + tau_max);
  params.phi_tau1 = phi_coefficient(chain, row.tau + 1);
  params.kl_comparator = row.kl_comparator;

  row.highprob = bound_highprob_terms(params, row.regret_value);
  row.covered_highprob = row.gen_bar <= row.highprob.total + 1e-12;

  if (cfg.certificate) {
    params.cert_K = cfg.certificate->K;
    params.cert_r = cfg.certificate->r;
    row.fixedrate_applicable = true;
    row.fixedrate = bound_ewa_terms(params);
    row.covered_fixedrate = row.gen_bar <= row.fixedrate.total + 1e-12;
    row.etaind = bound_etaind_terms(params);
  }
  return row;
}

namespace {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& xs) {
  MeanSe out;
  const size_t r = xs.size();
  out.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(r);
  if (r > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.se = std::sqrt(ss / static_cast<double>(r - 1)) / std::sqrt(static_cast<double>(r));
  }
  return out;
}

CellSummary summarize_cell(const ExperimentConfig& cfg, int n,
                           const std::vector<ReplicationRow>& rows) {
  CellSummary cell;
  cell.n = n;
  cell.replications = static_cast<int>(rows.size());
  cell.eta = cfg.eta_for(n);
  cell.tau = cfg.tau_for(n);
  const int tau_max = std::max(1, cell.tau);
  cell.phi_tau1 = phi_coefficient(*cfg.chain, cell.tau + 1);
  cell.beta_tau1 = beta_coefficient(*cfg.chain, cell.tau + 1, n + tau_max);
  cell.kappa_cap = n * ewa_stability_bound(cell.eta, cfg.loss->g_h(), cfg.loss->r_h());

  std::vector<double> gens, regrets, b42, b54, b56;
  int cov42 = 0, cov54 = 0;
  for (const ReplicationRow& row : rows) {
    gens.push_back(row.gen_bar);
    regrets.push_back(row.regret_value);
    b42.push_back(row.highprob.total);
    cov42 += row.covered_highprob ? 1 : 0;
    if (row.fixedrate_applicable) {
      b54.push_back(row.fixedrate.total);
      b56.push_back(row.etaind.total);
      cov54 += row.covered_fixedrate ? 1 : 0;
    }
  }
  const MeanSe g = mean_se(gens), r = mean_se(regrets);
  cell.mean_gen = g.mean;
  cell.se_gen = g.se;
  cell.mean_regret = r.mean;
  cell.se_regret = r.se;
  cell.coverage_highprob = static_cast<double>(cov42) / rows.size();
  cell.mean_bound_highprob = mean_se(b42).mean;
  if (!b54.empty()) {
    cell.coverage_fixedrate = static_cast<double>(cov54) / rows.size();
    cell.mean_bound_fixedrate = mean_se(b54).mean;
    cell.mean_bound_etaind = mean_se(b56).mean;
  } else {
    cell.coverage_fixedrate = kNaN;
    cell.mean_bound_fixedrate = kNaN;
    cell.mean_bound_etaind = kNaN;
  }

  BoundParams params;
  params.n = n;
  params.tau = cell.tau;
  params.delta = cfg.delta;
  params.eta = cell.eta;
  params.g_h = cfg.loss->g_h();
  params.r_h = cfg.loss->r_h();
  params.g_z = cfg.loss->g_z();
  params.r_z = cfg.loss->r_z();
  params.b_ell = cfg.loss->b_ell();
  params.kappa_sum = cell.kappa_cap;
  params.beta_tau1 = cell.beta_tau1;
  params.phi_tau1 = cell.phi_tau1;
  cell.bound_expected = bound_expected(params, cell.mean_regret);
  cell.expected_holds = cell.mean_gen <= cell.bound_expected + 2.0 * cell.se_gen + 1e-12;
  return cell;
}

void append_terms(std::ostringstream& out, const TermBreakdown& b, size_t expected_terms,
                  bool applicable, bool with_flag, bool flag) {
  if (applicable) {
    for (const auto& [name, v] : b.terms) out << "," << format_double(v);
    out << "," << format_double(b.total);
    if (with_flag) out << "," << (flag ? 1 : 0);
  } else {
    for (size_t i = 0; i < expected_terms + 1; ++i) out << ",nan";
    if (with_flag) out << ",nan";
  }
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("write to " + path.string() + " failed");
}

}  // namespace

std::string summary_csv_header() {
  return "n,replication,seed,eta,tau,gen_bar,regret,kl_comparator,kappa_max,kappa_sum,"
         "highprob_regret,highprob_stability,highprob_shift_z,highprob_sqrt,highprob_mixing,bound_highprob,"
         "covered_highprob,"
         "fixedrate_kl,fixedrate_quad,fixedrate_shift_h,fixedrate_shift_z,fixedrate_sqrt,fixedrate_mixing,"
         "bound_fixedrate,covered_fixedrate,"
         "etaind_kl,etaind_quad,etaind_shift_h,etaind_shift_z,etaind_sqrt,etaind_mixing,"
         "bound_etaind,invariants_ok";
}

std::string summary_csv_row(const ReplicationRow& row) {
  std::ostringstream out;
  out << row.n << "," << row.replication << "," << row.seed << "," << format_double(row.eta)
      << "," << row.tau << "," << format_double(row.gen_bar) << ","
      << format_double(row.regret_value) << "," << format_double(row.kl_comparator) << ","
      << format_double(row.kappa_max) << "," << format_double(row.kappa_sum);
  append_terms(out, row.highprob, 5, true, true, row.covered_highprob);
  append_terms(out, row.fixedrate, 6, row.fixedrate_applicable, true, row.covered_fixedrate);
  append_terms(out, row.etaind, 6, row.fixedrate_applicable, false, false);
  out << "," << (row.invariants_ok ? 1 : 0);
  return out.str();
}

std::string coverage_csv_header() {
  return "n,replications,eta,tau,phi_tau1,beta_tau1,kappa_cap,mean_gen,se_gen,mean_regret,"
         "se_regret,bound_expected,expected_holds,coverage_highprob,coverage_fixedrate,mean_bound_highprob,"
         "mean_bound_fixedrate,mean_bound_etaind";
}

std::string coverage_csv_row(const CellSummary& cell) {
  std::ostringstream out;
  out << cell.n << "," << cell.replications << "," << format_double(cell.eta) << ","
      << cell.tau << "," << format_double(cell.phi_tau1) << ","
      << format_double(cell.beta_tau1) << "," << format_double(cell.kappa_cap) << ","
      << format_double(cell.mean_gen) << "," << format_double(cell.se_gen) << ","
      << format_double(cell.mean_regret) << "," << format_double(cell.se_regret) << ","
      << format_double(cell.bound_expected) << "," << (cell.expected_holds ? 1 : 0) << ","
      << format_double(cell.coverage_highprob) << "," << format_double(cell.coverage_fixedrate)
      << "," << format_double(cell.mean_bound_highprob) << ","
      << format_double(cell.mean_bound_fixedrate) << "," << format_double(cell.mean_bound_etaind);
  return out.str();
}

void write_mixing_csv(const MixingProfile& profile, std::ostream& out) {
  out << "k,phi,beta\n";
  for (size_t i = 0; i < profile.k.size(); ++i) {
    out << profile.k[i] << "," << format_double(profile.phi[i]) << ","
        << format_double(profile.beta[i]) << "\n";
  }
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
  ExperimentResult result;
  const int reps = opts.replications > 0 ? opts.replications : cfg.replications;
  const std::uint64_t seed0 = opts.seed0.value_or(cfg.seed0);
  result.out_dir = !opts.out_dir.empty()
                       ? opts.out_dir
                       : (!cfg.out_dir.empty() ? cfg.out_dir : std::string("otblab_out"));

  if (opts.check_only) {
    if (opts.log) {
      std::ostream& log = *opts.log;
      log << "config \"" << cfg.name << "\" (hash " << cfg.config_hash << ")\n"
          << "  chain: " << cfg.chain->size() << " states"
          << (cfg.chain->is_iid() ? " (i.i.d.)" : "") << ", |H| = " << cfg.loss->h_size()
          << "\n"
          << "  constants: g_h = " << cfg.loss->g_h() << ", r_h = " << cfg.loss->r_h()
          << ", g_z = " << cfg.loss->g_z() << ", r_z = " << cfg.loss->r_z()
          << ", b_ell = " << cfg.loss->b_ell() << "\n";
      log << "  cells:";
      for (int n : cfg.n_values) {
        log << " (n=" << n << ", tau=" << cfg.tau_for(n) << ", eta=" << cfg.eta_for(n) << ")";
      }
      log << "\n  replications: " << reps << ", seed0: " << seed0 << "\n";
      if (cfg.certificate) {
        log << "  certificate: phi(k) <= " << cfg.certificate->K << " * exp(-k^"
            << cfg.certificate->r << ") verified\n";
      } else {
        log << "  certificate: none (fixed-rate bounds reported as nan)\n";
      }
    }
    return result;
  }

  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  const int threads = std::min(opts.threads > 0 ? opts.threads : static_cast<int>(hw), reps);

  for (int n : cfg.n_values) {
    std::vector<ReplicationRow> rows(reps);
    std::vector<std::exception_ptr> errors(reps);
    auto worker = [&](int start) {
      for (int r = start; r < reps; r += threads) {
        try {
          rows[r] = run_replication(cfg, n, r, seed0 + static_cast<std::uint64_t>(r));
        } catch (...) {
          errors[r] = std::current_exception();
        }
      }
    };
    if (threads == 1) {
      worker(0);
    } else {
      std::vector<std::thread> pool;
      pool.reserve(threads);
      for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t);
      for (std::thread& t : pool) t.join();
    }
    for (int r = 0; r < reps; ++r) {
      if (errors[r]) std::rethrow_exception(errors[r]);
    }

    for (const ReplicationRow& row : rows) {
      for (const std::string& issue : row.issues) {
        std::ostringstream msg;
        msg << "n = " << row.n << ", replication " << row.replication << " (seed " << row.seed
            << "): " << issue;
        result.failures.push_back(msg.str());
      }
    }
    result.cells.push_back(summarize_cell(cfg, n, rows));
    if (opts.log) {
      const CellSummary& cell = result.cells.back();
      *opts.log << "n = " << n << ": " << reps << " replications, mean gen-bar "
                << cell.mean_gen << ", coverage " << cell.coverage_highprob << "\n";
    }
    result.rows.insert(result.rows.end(), std::make_move_iterator(rows.begin()),
                       std::make_move_iterator(rows.end()));
  }
  result.exit_code = result.failures.empty() ? 0 : 2;

  std::error_code ec;
  std::filesystem::create_directories(result.out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + result.out_dir.string());

  std::ostringstream summary;
  summary << summary_csv_header() << "\n";
  for (const ReplicationRow& row : result.rows) summary << summary_csv_row(row) << "\n";
  write_file(result.out_dir / "summary.csv", summary.str());

  std::ostringstream coverage;
  coverage << coverage_csv_header() << "\n";
  for (const CellSummary& cell : result.cells) coverage << coverage_csv_row(cell) << "\n";
  write_file(result.out_dir / "coverage.csv", coverage.str());

  const int n_back = cfg.n_values.back();
  const MixingProfile profile =
      mixing_profile(*cfg.chain, cfg.mixing_kmax, n_back + cfg.tau_for(n_back));
  std::ostringstream mixing;
  write_mixing_csv(profile, mixing);
  write_file(result.out_dir / "mixing.csv", mixing.str());

  json manifest;
  manifest["name"] = cfg.name;
  manifest["tool"] = "otblab";
  manifest["tool_version"] = kToolVersion;
  manifest["config_hash"] = cfg.config_hash;
  manifest["seed0"] = seed0;
  manifest["replications"] = reps;
  manifest["n_values"] = cfg.n_values;
  manifest["delta"] = cfg.delta;
  manifest["outputs"] = {"summary.csv", "coverage.csv", "mixing.csv"};
  manifest["trace_check_failures"] = result.failures.size();
  manifest["config"] = cfg.raw;
  write_file(result.out_dir / "manifest.json", manifest.dump(2) + "\n");

  return result;
}

void emit_plot_data(const std::filesystem::path& summary_csv, std::ostream& out) {
  std::ifstream in(summary_csv);
  if (!in) throw IoError("cannot open " + summary_csv.string());
  std::string header;
  if (!std::getline(in, header)) {
    throw ValidationError("plotdata: " + summary_csv.string() + " is empty");
  }
  if (header != summary_csv_header()) {
    throw ValidationError("plotdata: " + summary_csv.string() +
                          " does not look like a summary.csv (unexpected header)");
  }
  std::vector<std::string> names;
  {
    std::stringstream ss(header);
    std::string cell;
    while (std::getline(ss, cell, ',')) names.push_back(cell);
  }
  auto col = [&names](const std::string& name) {
    const auto it = std::find(names.begin(), names.end(), name);
    return static_cast<int>(it - names.begin());
  };
  const int c_n = col("n"), c_gen = col("gen_bar"), c_regret = col("regret");
  const int c_b42 = col("bound_highprob"), c_b54 = col("bound_fixedrate"), c_b56 = col("bound_etaind");

  std::vector<int> order;
  struct Group {
    std::vector<double> gen, b42, b54, b56, regret;
  };
  std::map<int, Group> groups;
  std::string line;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> fields;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) fields.push_back(std::strtod(cell.c_str(), nullptr));
    if (fields.size() != names.size()) {
      throw ValidationError("plotdata: line " + std::to_string(lineno) + " has " +
                            std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(names.size()));
    }
    const int n = static_cast<int>(fields[c_n]);
    if (!groups.count(n)) order.push_back(n);
    Group& g = groups[n];
    g.gen.push_back(fields[c_gen]);
    g.regret.push_back(fields[c_regret]);
    g.b42.push_back(fields[c_b42]);
    g.b54.push_back(fields[c_b54]);
    g.b56.push_back(fields[c_b56]);
  }
  if (order.empty()) {
    throw ValidationError("plotdata: " + summary_csv.string() + " has no data rows");
  }

  out << "n,mean_gen,se_gen,bound_highprob_mean,bound_fixedrate_mean,bound_etaind,"
         "regret_over_n_mean\n";
  for (int n : order) {
    const Group& g = groups.at(n);
    const MeanSe gen = mean_se(g.gen);
    out << n << "," << format_double(gen.mean) << "," << format_double(gen.se) << ","
        << format_double(mean_se(g.b42).mean) << "," << format_double(mean_se(g.b54).mean)
        << "," << format_double(mean_se(g.b56).mean) << ","
        << format_double(mean_se(g.regret).mean / n) << "\n";
  }
}

}  // namespace otb
