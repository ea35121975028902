#include "otb/game.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "otb/errors.hpp"
#include "otb/ewa.hpp"
#include "otb/wasserstein.hpp"

namespace otb {

Eigen::VectorXd cost_vector(const LossTable& loss, int z, const Eigen::VectorXd& expected_loss) {
  return loss.column(z) - expected_loss;
}

GameTrace run_game(const MarkovChain& chain, const LossTable& loss, double eta,
                   const DiscreteDistribution& prior, int n, int tau_max, std::uint64_t seed,
                   std::string config_hash) {
  if (n < 1) throw ValidationError("run_game: need at least one round");
  if (tau_max < 0) throw ValidationError("run_game: negative tau_max");
  if (!chain.space()->same_as(*loss.z_space())) {
    throw ValidationError("run_game: chain space and loss Z space differ");
  }
  if (!prior.space()->same_as(*loss.h_space())) {
    throw ValidationError("run_game: prior lives on a different space than H");
  }

  GameTrace trace;
  trace.n = n;
  trace.tau_max = tau_max;
  trace.eta = eta;
  trace.seed = seed;
  trace.config_hash = std::move(config_hash);
  trace.expected_loss = loss.expected_loss(chain.stationary_distribution());
  trace.samples = chain.sample_path(n + tau_max, seed);

  const double cost_cap = 2.0 * loss.b_ell() + 1e-9;
  trace.costs.reserve(n + tau_max);
  for (int t = 0; t < n + tau_max; ++t) {
    Eigen::VectorXd c = cost_vector(loss, trace.samples[t], trace.expected_loss);
    if (c.cwiseAbs().maxCoeff() > cost_cap) {
      std::ostringstream msg;
      msg << "run_game: cost at round " << t + 1 << " has sup-norm "
          << c.cwiseAbs().maxCoeff() << " > 2 b_ell = " << 2.0 * loss.b_ell();
      throw InvariantViolation(msg.str());
    }
    trace.costs.push_back(std::move(c));
  }

  EwaState learner(eta, prior);
  trace.posteriors.reserve(n + 1);
  trace.posteriors.push_back(learner.current());
  trace.played_cost.reserve(n);
  trace.kappa.reserve(n);
  for (int t = 0; t < n; ++t) {
    trace.played_cost.push_back(learner.current().expectation(trace.costs[t]));
    EwaState next = learner.updated(trace.costs[t]);
    trace.kappa.push_back(wasserstein1(learner.current(), next.current()));
    trace.posteriors.push_back(next.current());
    learner = std::move(next);
  }
  return trace;
}

namespace {

void require_comparator(const GameTrace& trace, const OfflinePosterior& comparator,
                        const char* context) {
  if (trace.posteriors.empty()) {
    throw ValidationError(std::string(context) + ": empty trace");
  }
  if (!comparator.distribution.space()->same_as(*trace.posteriors.front().space())) {
    throw ValidationError(std::string(context) +
                          ": comparator lives on a different hypothesis space");
  }
}

double kappa_sum(const GameTrace& trace) {
  double s = 0.0;
  for (double k : trace.kappa) s += k;
  return s;
}

}  // namespace

double regret(const GameTrace& trace, const OfflinePosterior& comparator) {
  require_comparator(trace, comparator, "regret");
  double r = 0.0;
  for (int t = 0; t < trace.n; ++t) {
    r += trace.played_cost[t] - comparator.distribution.expectation(trace.costs[t]);
  }
  return r;
}

double generalization_error(const OfflinePosterior& comparator, const GameTrace& trace,
                            const LossTable& loss) {
  require_comparator(trace, comparator, "generalization_error");
  const DiscreteDistribution& q = comparator.distribution;

  double mean_sample_loss = 0.0;
  for (int t = 0; t < trace.n; ++t) {
    mean_sample_loss += q.expectation(loss.column(trace.samples[t]));
  }
  mean_sample_loss /= trace.n;
  const double direct = q.expectation(trace.expected_loss) - mean_sample_loss;

  double via_costs = 0.0;
  for (int t = 0; t < trace.n; ++t) via_costs += q.expectation(trace.costs[t]);
  via_costs = -via_costs / trace.n;

  if (std::abs(direct - via_costs) > 1e-12) {
    std::ostringstream msg;
    msg << "generalization_error: direct route " << direct << " and cost route " << via_costs
        << " disagree by " << std::abs(direct - via_costs);
    throw InvariantViolation(msg.str());
  }
  return direct;
}

TauShiftCheck taushift_check(const GameTrace& trace, const OfflinePosterior& comparator,
                             const LossTable& loss, int tau) {
  require_comparator(trace, comparator, "taushift_check");
  if (tau < 1 || tau > trace.tau_max) {
    std::ostringstream msg;
    msg << "taushift_check: tau = " << tau << " outside [1, " << trace.tau_max << "]";
    throw ValidationError(msg.str());
  }
  TauShiftCheck out;
  for (int t = 0; t < trace.n; ++t) {
    const Eigen::VectorXd& c = trace.costs[t + tau];
    out.lhs += trace.posteriors[t].expectation(c) - comparator.distribution.expectation(c);
  }
  out.rhs = regret(trace, comparator) + 2.0 * loss.g_h() * tau * kappa_sum(trace) +
            4.0 * tau * loss.g_h() * loss.r_h();
  out.holds = out.lhs <= out.rhs + 1e-9;
  return out;
}

GenBarDecompCheck genbar_decomposition_check(const GameTrace& trace,
                                             const OfflinePosterior& comparator,
                                             const LossTable& loss, int tau) {
  require_comparator(trace, comparator, "genbar_decomposition_check");
  if (tau < 1 || tau > trace.tau_max) {
    std::ostringstream msg;
    msg << "genbar_decomposition_check: tau = " << tau << " outside [1, " << trace.tau_max
        << "]";
    throw ValidationError(msg.str());
  }
  GenBarDecompCheck out;
  out.lhs = generalization_error(comparator, trace, loss);

  double shifted_played = 0.0;
  for (int t = 0; t < trace.n; ++t) {
    shifted_played += trace.posteriors[t].expectation(trace.costs[t + tau]);
  }
  const double n = trace.n;
  out.rhs = regret(trace, comparator) / n +
            (tau / n) * (2.0 * loss.g_h() * kappa_sum(trace) + 4.0 * loss.g_h() * loss.r_h() +
                         loss.g_z() * loss.r_z()) -
            shifted_played / n;
  out.holds = out.lhs <= out.rhs + 1e-9;
  return out;
}

}  // namespace otb
