#include "otb/bounds.hpp"

#include <cmath>
#include <sstream>

#include "otb/errors.hpp"

namespace otb {

namespace {

double sum_terms(TermBreakdown& b) {
  b.total = 0.0;
  for (const auto& [name, v] : b.terms) b.total += v;
  return b.total;
}

// ln(x) clamped at 0, flagging the clamp; the bounds only make sense with a
// positive log factor and validated parameters keep x > 1, but a degenerate
// combination should be visible rather than silently imaginary.
double pos_log(double x, TermBreakdown& b) {
  const double l = std::log(x);
  if (l < 0.0) {
    b.clamped = true;
    return 0.0;
  }
  return l;
}

}  // namespace

void BoundParams::validate(bool need_certificate) const {
  std::ostringstream problems;
  auto bad = [&](const std::string& msg) { problems << "  - " << msg << "\n"; };
  if (n < 1) bad("n must be >= 1");
  if (tau < 1) bad("tau must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) bad("delta must lie in (0, 1)");
  if (!(eta > 0.0) || !std::isfinite(eta)) bad("eta must be finite and > 0");
  if (g_h < 0.0 || r_h < 0.0 || g_z < 0.0 || r_z < 0.0) {
    bad("Lipschitz constants and diameters must be >= 0");
  }
  if (b_ell < 0.0) bad("b_ell must be >= 0");
  if (kappa_sum < 0.0) bad("kappa_sum must be >= 0");
  if (!(beta_tau1 >= 0.0 && beta_tau1 <= 2.0 + 1e-12)) bad("beta(tau+1) must lie in [0, 2]");
  if (!(phi_tau1 >= 0.0 && phi_tau1 <= 2.0 + 1e-12)) bad("phi(tau+1) must lie in [0, 2]");
  if (kl_comparator < 0.0) bad("kl_comparator must be >= 0");
  if (need_certificate) {
    if (n < 2) bad("the fixed-rate bounds need n >= 2");
    if (!(cert_K >= 0.0) || !std::isfinite(cert_K)) bad("certificate K must be finite, >= 0");
    if (!(cert_r > 1.0)) bad("certificate rate r must be > 1");
  }
  const std::string all = problems.str();
  if (!all.empty()) {
    throw ValidationError("bound parameters invalid:\n" + all);
  }
}

int tau_auto(int n) {
  if (n < 1) throw ValidationError("tau_auto: n must be >= 1");
  return std::max(1, static_cast<int>(std::ceil(std::log(static_cast<double>(n)))) - 1);
}

TermBreakdown bound_expected_terms(const BoundParams& p, double expected_regret) {
  p.validate();
  const double n = p.n, tau = p.tau;
  TermBreakdown b;
  b.terms = {
      {"regret", expected_regret / n},
      {"stability", (2.0 * tau * p.g_h / n) * (p.kappa_sum + 2.0 * p.r_h)},
      {"shift_z", tau * p.g_z * p.r_z / n},
      {"mixing", p.b_ell * p.beta_tau1},
  };
  sum_terms(b);
  return b;
}

double bound_expected(const BoundParams& p, double expected_regret) {
  return bound_expected_terms(p, expected_regret).total;
}

TermBreakdown bound_highprob_terms(const BoundParams& p, double observed_regret) {
  p.validate();
  const double n = p.n, tau = p.tau;
  TermBreakdown b;
  b.terms = {
      {"regret", observed_regret / n},
      {"stability", (2.0 * tau * p.g_h / n) * (p.kappa_sum + 2.0 * p.r_h)},
      {"shift_z", tau * p.g_z * p.r_z / n},
      {"mixing", p.b_ell * p.phi_tau1},
  };
  const double log_factor = pos_log(tau / p.delta, b);
  b.terms.insert(b.terms.begin() + 3,
                 {"sqrt", 2.0 * p.g_h * p.r_h * std::sqrt(2.0 * tau * log_factor / n)});
  sum_terms(b);
  return b;
}

double bound_highprob(const BoundParams& p, double observed_regret) {
  return bound_highprob_terms(p, observed_regret).total;
}

TermBreakdown bound_ewa_terms(const BoundParams& p) {
  p.validate(/*need_certificate=*/true);
  const double n = p.n;
  const double ln_n = std::log(n);
  const double gr = p.g_h * p.r_h;
  TermBreakdown b;
  b.terms = {
      {"kl", p.kl_comparator / (n * p.eta)},
      {"quad", 0.5 * p.eta * (p.b_ell * p.b_ell + 4.0 * gr * gr * ln_n)},
      {"shift_h", 4.0 * gr * ln_n / n},
      {"shift_z", p.g_z * p.r_z * ln_n / n},
      {"mixing", p.b_ell * p.cert_K / n},
  };
  const double log_factor = pos_log(ln_n / p.delta, b);
  b.terms.insert(b.terms.begin() + 4,
                 {"sqrt", 2.0 * gr * std::sqrt(2.0 * ln_n * log_factor / n)});
  sum_terms(b);
  return b;
}

double bound_ewa(const BoundParams& p) { return bound_ewa_terms(p).total; }

TermBreakdown bound_etaind_terms(const BoundParams& p) {
  BoundParams q = p;
  q.eta = 1.0 / std::sqrt(static_cast<double>(p.n));
  return bound_ewa_terms(q);
}

double bound_etaind(const BoundParams& p) { return bound_etaind_terms(p).total; }

CoverageResult coverage(
    const std::function<std::pair<double, double>(std::uint64_t)>& gen_and_bound,
    int replications, std::uint64_t seed0) {
  if (replications < 1) throw ValidationError("coverage: need at least one replication");
  CoverageResult out;
  out.total = replications;
  for (int i = 0; i < replications; ++i) {
    const auto [gen, bound] = gen_and_bound(seed0 + static_cast<std::uint64_t>(i));
    if (gen <= bound + 1e-12) ++out.covered;
  }
  out.fraction = static_cast<double>(out.covered) / replications;
  return out;
}

}  // namespace otb
