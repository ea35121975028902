#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace otb {

/// Inputs shared by the generalization bounds. All entries are plain
/// numbers so the evaluators stay pure formula arithmetic; callers are
/// responsible for producing them from a chain/loss/trace.
struct BoundParams {
  int n = 0;            ///< sample size
  int tau = 1;          ///< decoupling lag
  double delta = 0.1;   ///< failure probability of the high-probability bound
  double eta = 0.0;     ///< learner step size

  double g_h = 0.0, r_h = 0.0;  ///< hypothesis-side Lipschitz constant / diameter
  double g_z = 0.0, r_z = 0.0;  ///< sample-side Lipschitz constant / diameter
  double b_ell = 0.0;           ///< loss envelope

  double kappa_sum = 0.0;  ///< sum_t W1(P_t, P_{t+1}) or its cap n*eta*g_h*r_h^2
  double beta_tau1 = 0.0;  ///< beta(tau + 1)
  double phi_tau1 = 0.0;   ///< phi(tau + 1)
  double kl_comparator = 0.0;  ///< KL(comparator || prior)

  /// Geometric envelope constant K with phi(k) <= K exp(-k^r), r > 1.
  /// Required (with cert_r) only by the fixed-rate bounds.
  double cert_K = 0.0;
  double cert_r = 0.0;

  /// Throws ValidationError naming every offending field.
  void validate(bool need_certificate = false) const;
};

struct TermBreakdown {
  std::vector<std::pair<std::string, double>> terms;
  double total = 0.0;    ///< always the exact sum of `terms`
  bool clamped = false;  ///< a log factor was negative and clamped to 0
};

/// The default lag schedule: max(1, ceil(ln n) - 1).
int tau_auto(int n);

/// Expectation-level bound on E[gen-bar]:
///   E[regret]/n + (2 tau g_h / n)(kappa_sum + 2 r_h) + tau g_z r_z / n
///     + b_ell * beta(tau+1).
TermBreakdown bound_expected_terms(const BoundParams& p, double expected_regret);
double bound_expected(const BoundParams& p, double expected_regret);

/// High-probability bound (failure probability delta) on gen-bar:
///   regret/n + (2 tau g_h / n)(kappa_sum + 2 r_h) + tau g_z r_z / n
///     + 2 g_h r_h sqrt(2 tau ln(tau/delta) / n) + b_ell * phi(tau+1).
TermBreakdown bound_highprob_terms(const BoundParams& p, double observed_regret);
double bound_highprob(const BoundParams& p, double observed_regret);

/// Fully a-priori bound for the EWA learner at lag tau = max(1, ceil(ln n)-1)
/// under a geometric envelope phi(k) <= K exp(-k^r) with r > 1 (so the
/// mixing tail collapses to b_ell K / n). Requires a certificate; n >= 2.
///   KL/(n eta) + eta (b_ell^2 + 4 g_h^2 r_h^2 ln n)/2 + 4 g_h r_h ln n / n
///     + g_z r_z ln n / n + 2 g_h r_h sqrt(2 ln n ln(ln n / delta) / n)
///     + b_ell K / n.
TermBreakdown bound_ewa_terms(const BoundParams& p);
double bound_ewa(const BoundParams& p);

/// bound_ewa at the rate-free step size eta = 1/sqrt(n).
TermBreakdown bound_etaind_terms(const BoundParams& p);
double bound_etaind(const BoundParams& p);

struct CoverageResult {
  int total = 0;
  int covered = 0;
  double fraction = 0.0;
};

/// Runs `gen_and_bound` on seeds seed0, seed0+1, ... and counts how often
/// the returned (gen, bound) pair satisfies gen <= bound + 1e-12.
CoverageResult coverage(const std::function<std::pair<double, double>(std::uint64_t)>& gen_and_bound,
                        int replications, std::uint64_t seed0);

}  // namespace otb
