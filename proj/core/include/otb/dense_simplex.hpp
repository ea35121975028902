#pragma once

#include <Eigen/Dense>

namespace otb {

struct LpResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
};

/// Solves  max c^T x  subject to  A x <= b, x >= 0  by the standard dense
/// tableau simplex with an all-slack starting basis. Requires b >= 0 so the
/// start is feasible. Uses Bland's rule (lowest-index entering and leaving
/// variable), which makes the pivot sequence deterministic and terminating
/// even on the heavily degenerate systems it is used for here.
///
/// The problems fed to this solver are bounded by construction; hitting the
/// iteration cap throws InvariantViolation.
LpResult simplex_max(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                     const Eigen::VectorXd& b, int max_iterations = 200000);

}  // namespace otb
