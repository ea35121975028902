#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "otb/distribution.hpp"
#include "otb/loss_table.hpp"
#include "otb/markov_chain.hpp"
#include "otb/offline.hpp"

namespace otb {

/// Everything one run of the prediction game produced. Costs are centered
/// losses against the chain's stationary law D:
///   cost_t(h) = ell(h, Z_t) - E_{Z ~ D} ell(h, Z).
/// The learner plays n rounds; tau_max extra samples extend the cost
/// sequence so shifted diagnostics at lags up to tau_max stay in range.
struct GameTrace {
  int n = 0;
  int tau_max = 0;
  double eta = 0.0;
  std::uint64_t seed = 0;
  std::string config_hash;

  std::vector<int> samples;                       ///< Z_1..Z_{n+tau_max}
  std::vector<DiscreteDistribution> posteriors;   ///< P_1..P_{n+1}
  std::vector<Eigen::VectorXd> costs;             ///< c_1..c_{n+tau_max}
  std::vector<double> played_cost;                ///< <P_t, c_t>, t = 1..n
  std::vector<double> kappa;                      ///< W1(P_t, P_{t+1}), t = 1..n
  Eigen::VectorXd expected_loss;                  ///< E_D ell(h, .) per hypothesis
};

/// Builds the centered cost vector for one sample given the per-hypothesis
/// expected losses under the reference distribution.
Eigen::VectorXd cost_vector(const LossTable& loss, int z, const Eigen::VectorXd& expected_loss);

/// Plays the game: samples a path of n + tau_max points, runs the EWA
/// learner for n rounds from the given prior, records posteriors, costs,
/// played costs and per-round posterior drift (1-Wasserstein steps).
/// Every cost vector is checked against the 2*b_ell sup-norm envelope.
GameTrace run_game(const MarkovChain& chain, const LossTable& loss, double eta,
                   const DiscreteDistribution& prior, int n, int tau_max, std::uint64_t seed,
                   std::string config_hash = "");

/// Cumulative regret of the played sequence against a fixed comparator,
/// sum_{t=1..n} <P_t - Q, c_t>.
double regret(const GameTrace& trace, const OfflinePosterior& comparator);

/// Expected generalization error of the comparator on this trace, computed
/// by two algebraically equal routes:
///   (a) <Q, expected_loss> - (1/n) sum_t <Q, ell(., Z_t)>,
///   (b) -(1/n) sum_t <Q, c_t>;
/// disagreement beyond 1e-12 throws InvariantViolation. Returns route (a).
double generalization_error(const OfflinePosterior& comparator, const GameTrace& trace,
                            const LossTable& loss);

struct TauShiftCheck {
  double lhs = 0.0;  ///< sum_t [<P_t, c_{t+tau}> - <Q, c_{t+tau}>]
  double rhs = 0.0;  ///< regret + 2 g_h tau sum_t kappa_t + 4 tau g_h r_h
  bool holds = false;
};

/// The lag-tau comparison: shifting which cost each posterior is paired with
/// costs at most the accumulated posterior drift plus a boundary term.
TauShiftCheck taushift_check(const GameTrace& trace, const OfflinePosterior& comparator,
                             const LossTable& loss, int tau);

struct GenBarDecompCheck {
  double lhs = 0.0;  ///< generalization error of the comparator
  double rhs = 0.0;  ///< regret/n + (tau/n)(2 g_h sum kappa + 4 g_h r_h + g_z r_z)
                     ///<   - (1/n) sum_t <P_t, c_{t+tau}>
  bool holds = false;
};

/// The pathwise decomposition that the expectation/high-probability bounds
/// are built from; must hold on every trace for every 1 <= tau <= tau_max.
GenBarDecompCheck genbar_decomposition_check(const GameTrace& trace,
                                             const OfflinePosterior& comparator,
                                             const LossTable& loss, int tau);

}  // namespace otb
