#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "otb/distribution.hpp"
#include "otb/metric_space.hpp"

namespace otb {

/// A time-homogeneous Markov chain on a finite metric space, given by a
/// row-stochastic transition matrix and an initial law.
///
/// Construction validates stochasticity and requires the eigenvalue-1
/// eigenspace of the transition matrix to be one-dimensional, so the
/// stationary distribution is unique; it is computed once (least-squares
/// solve, then fixed-point polishing) and cached. Chains whose rows are all
/// bitwise equal are flagged i.i.d. and get exact special-case treatment in
/// the mixing coefficients.
class MarkovChain {
 public:
  MarkovChain(SpacePtr space, Eigen::MatrixXd transition, DiscreteDistribution initial);

  const SpacePtr& space() const { return space_; }
  int size() const { return space_->size(); }
  const Eigen::MatrixXd& transition() const { return transition_; }
  const DiscreteDistribution& initial() const { return initial_; }
  const DiscreteDistribution& stationary_distribution() const { return *stationary_; }
  /// True when every row equals the first one bitwise (draws are i.i.d.).
  bool is_iid() const { return iid_; }

  /// k-step transition matrix via repeated squaring, renormalizing rows
  /// after each product to stop stochasticity drift.
  Eigen::MatrixXd power(int k) const;

  /// Law of Z_t for t >= 1 (t = 1 is the initial law).
  DiscreteDistribution marginal(int t) const;

  /// Samples (Z_1, ..., Z_n) as point indices. Deterministic in the seed:
  /// mt19937_64 uniforms mapped through the cumulative masses, so identical
  /// output across platforms.
  std::vector<int> sample_path(int n, std::uint64_t seed) const;

 private:
  SpacePtr space_;
  Eigen::MatrixXd transition_;
  DiscreteDistribution initial_;
  std::optional<DiscreteDistribution> stationary_;
  bool iid_ = false;
};

}  // namespace otb
