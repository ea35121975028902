#pragma once

#include <Eigen/Dense>
#include <vector>

#include "otb/distribution.hpp"
#include "otb/loss_table.hpp"

namespace otb {

enum class PosteriorKind { kErm, kGibbs };

/// The comparator the online iterates are measured against: a distribution
/// over hypotheses computed offline from the whole sample.
struct OfflinePosterior {
  PosteriorKind kind = PosteriorKind::kErm;
  DiscreteDistribution distribution;
  double gamma = 0.0;               ///< Gibbs inverse temperature (0 for ERM)
  int erm_index = -1;               ///< chosen hypothesis (-1 for Gibbs)
  Eigen::VectorXd empirical_loss;   ///< per-hypothesis mean loss on the sample
};

/// Point mass on the empirical risk minimizer; ties resolved to the lowest
/// hypothesis index so the result is deterministic.
OfflinePosterior erm_posterior(const LossTable& loss, const std::vector<int>& sample);

/// Gibbs posterior: mass(h) proportional to prior(h) * exp(-gamma * total
/// sample loss of h), computed with a max-shift. gamma = 0 returns the prior.
OfflinePosterior gibbs_posterior(const LossTable& loss, const std::vector<int>& sample,
                                 const DiscreteDistribution& prior, double gamma);

}  // namespace otb
