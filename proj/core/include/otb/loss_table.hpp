#pragma once

#include <Eigen/Dense>

#include "otb/distribution.hpp"
#include "otb/metric_space.hpp"

namespace otb {

/// A bounded loss ell(h, z) over finite hypothesis and sample spaces,
/// tabulated as a |H| x |Z| matrix.
///
/// Construction derives the structural constants used by every bound:
///   g_h   largest Lipschitz constant of z -> ell(., z) columns over H,
///   g_z   largest Lipschitz constant of h -> ell(h, .) rows over Z,
///   r_h   diameter of H,  r_z  diameter of Z,
///   b_ell = min |ell| + g_h r_h + g_z r_z, an upper envelope for |ell|.
/// The envelope property max |ell| <= b_ell is re-checked numerically and a
/// violation (impossible up to rounding) throws InvariantViolation.
class LossTable {
 public:
  LossTable(SpacePtr h_space, SpacePtr z_space, Eigen::MatrixXd values);

  const SpacePtr& h_space() const { return h_space_; }
  const SpacePtr& z_space() const { return z_space_; }
  int h_size() const { return h_space_->size(); }
  int z_size() const { return z_space_->size(); }
  const Eigen::MatrixXd& values() const { return values_; }
  double value(int h, int z) const { return values_(h, z); }

  double g_h() const { return g_h_; }
  double g_z() const { return g_z_; }
  double r_h() const { return r_h_; }
  double r_z() const { return r_z_; }
  double b_ell() const { return b_ell_; }
  double min_loss() const { return min_loss_; }
  double max_loss() const { return max_loss_; }

  /// Loss of every hypothesis at sample z: the z-th column.
  Eigen::VectorXd column(int z) const;

  /// Per-hypothesis expected loss under a distribution on Z.
  Eigen::VectorXd expected_loss(const DiscreteDistribution& d) const;

 private:
  SpacePtr h_space_;
  SpacePtr z_space_;
  Eigen::MatrixXd values_;
  double g_h_ = 0.0, g_z_ = 0.0, r_h_ = 0.0, r_z_ = 0.0;
  double b_ell_ = 0.0, min_loss_ = 0.0, max_loss_ = 0.0;
};

}  // namespace otb
