#pragma once

#include <Eigen/Dense>

#include "otb/distribution.hpp"

namespace otb {

struct TransportResult {
  double value = 0.0;
  /// Optimal coupling over the full point set (rows marginal = p,
  /// columns marginal = q); zero-mass rows/columns are all-zero.
  Eigen::MatrixXd plan;
};

/// 1-Wasserstein distance by the transportation simplex on the coupling
/// polytope (exact LP, northwest-corner start, Bland's entering rule).
TransportResult wasserstein1_primal(const DiscreteDistribution& p,
                                    const DiscreteDistribution& q);

struct DualResult {
  double value = 0.0;
  /// 1-Lipschitz potential phi with value = <p - q, phi>, normalized to
  /// min phi = 0 up to LP degeneracy (phi in [0, diameter]).
  Eigen::VectorXd potential;
};

/// Kantorovich dual value via an independent dense-simplex solve of
///   max <p - q, phi>  s.t.  phi_i - phi_j <= d_ij,  0 <= phi <= diameter.
/// Shift-invariance of the objective makes the box normalization lossless.
DualResult wasserstein1_dual(const DiscreteDistribution& p, const DiscreteDistribution& q);

/// Primal optimal value (the default route for distances used in quantities).
double wasserstein1(const DiscreteDistribution& p, const DiscreteDistribution& q);

struct DiameterTvCheck {
  double w1 = 0.0;
  double bound = 0.0;  ///< diameter * TV
  bool holds = false;  ///< w1 <= bound + 1e-9
};

/// Evaluates the coupling inequality W1 <= diam * TV on the given pair.
DiameterTvCheck check_w1_tv(const DiscreteDistribution& p, const DiscreteDistribution& q);

/// Smallest L with |f_i - f_j| <= L * d_ij for all pairs (0 for one point).
double lipschitz_constant(const FiniteMetricSpace& space, const Eigen::VectorXd& f);

}  // namespace otb
