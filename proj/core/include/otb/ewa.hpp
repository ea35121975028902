#pragma once

#include <Eigen/Dense>

#include "otb/distribution.hpp"

namespace otb {

/// Exponentially weighted average learner over a finite hypothesis space.
/// The state is the current posterior; updates are multiplicative-weights
/// steps computed with a max-shift so no intermediate over/underflows:
///
///   next(h)  proportional to  current(h) * exp(-eta * cost(h)).
///
/// Zero-mass hypotheses stay at zero mass and positive ones stay positive,
/// so the support never changes.
class EwaState {
 public:
  EwaState(double eta, DiscreteDistribution prior);

  double eta() const { return eta_; }
  const DiscreteDistribution& prior() const { return prior_; }
  const DiscreteDistribution& current() const { return current_; }

  /// One multiplicative-weights step; the state itself is immutable.
  EwaState updated(const Eigen::VectorXd& cost) const;

 private:
  EwaState(double eta, DiscreteDistribution prior, DiscreteDistribution current);

  double eta_;
  DiscreteDistribution prior_;
  DiscreteDistribution current_;
};

struct MinimizerCheck {
  double objective = 0.0;    ///< <Q, c> + KL(Q || current)/eta at Q = update
  double closed_form = 0.0;  ///< -(1/eta) ln E_current[exp(-eta c)]
  double gap = 0.0;          ///< |objective - closed_form|
};

/// The update is the minimizer of Q -> <Q, c> + KL(Q || current)/eta and its
/// optimal value has a closed form; this evaluates both routes and their gap.
MinimizerCheck ewa_minimizer_check(const EwaState& state, const Eigen::VectorXd& cost);

/// Per-round posterior-drift cap: W1(P_t, P_{t+1}) <= eta * g_h * r_h^2 when
/// costs are g_h-Lipschitz over a space of diameter r_h.
double ewa_stability_bound(double eta, double g_h, double r_h);

}  // namespace otb
