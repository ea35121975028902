#pragma once

#include <Eigen/Dense>

#include "otb/distribution.hpp"

namespace otb {

/// Total variation distance, (1/2) * sum_i |p_i - q_i|. Always in [0, 1].
double tv_distance(const DiscreteDistribution& p, const DiscreteDistribution& q);

/// Kullback-Leibler divergence KL(p || q) in nats, with the conventions
/// 0 * ln(0/q) = 0 and KL = +infinity when p puts mass outside supp(q).
double kl_divergence(const DiscreteDistribution& p, const DiscreteDistribution& q);

struct PinskerCheck {
  double tv = 0.0;
  double bound = 0.0;  ///< sqrt(KL(p||q) / 2), +infinity when KL diverges
  bool holds = false;  ///< tv <= bound + 1e-12
};

/// Evaluates both sides of Pinsker's inequality TV <= sqrt(KL/2).
PinskerCheck check_pinsker(const DiscreteDistribution& p, const DiscreteDistribution& q);

/// Absolute difference between the two sides of the Donsker-Varadhan
/// variational identity at the exponential-tilt maximizer:
///
///   ln E_p[exp(lambda (X - E_p X))]
///     = lambda <q* - p, X> - KL(q* || p),   q* proportional to p * exp(lambda X).
///
/// The left side is computed by shifted log-sum-exp, the right side by
/// explicitly building q* and reusing kl_divergence, so the returned gap
/// measures genuine numerical agreement between two routes.
double donsker_varadhan_gap(const DiscreteDistribution& p, const Eigen::VectorXd& x,
                            double lambda);

/// log(sum_i exp(v_i)) over the given indices with max-shift; -infinity on an
/// empty index set.
double log_sum_exp(const Eigen::VectorXd& v, const std::vector<int>& indices);

}  // namespace otb
