#pragma once

#include <Eigen/Dense>

#include "otb/metric_space.hpp"

namespace otb {

/// A probability distribution over the points of a FiniteMetricSpace.
///
/// Masses are validated at construction: nonnegative, summing to 1 within
/// 1e-12. The underlying space is held by shared pointer so distributions
/// over the same space can be compared cheaply (pointer or structural
/// equality via FiniteMetricSpace::same_as).
class DiscreteDistribution {
 public:
  DiscreteDistribution(SpacePtr space, Eigen::VectorXd mass);

  static DiscreteDistribution uniform(SpacePtr space);
  static DiscreteDistribution point_mass(SpacePtr space, int i);

  const SpacePtr& space() const { return space_; }
  int size() const { return static_cast<int>(mass_.size()); }
  const Eigen::VectorXd& mass() const { return mass_; }
  double operator[](int i) const { return mass_(i); }

  /// Indices with strictly positive mass, ascending.
  std::vector<int> support() const;

  /// Expectation of a function given as a vector of per-point values.
  double expectation(const Eigen::VectorXd& values) const;

 private:
  SpacePtr space_;
  Eigen::VectorXd mass_;
};

/// Throws ValidationError unless both distributions live on structurally
/// identical spaces. `context` names the caller in the error message.
void require_same_space(const DiscreteDistribution& p, const DiscreteDistribution& q,
                        const char* context);

}  // namespace otb
