#include "otb/loss_table.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "otb/errors.hpp"
#include "otb/wasserstein.hpp"

namespace otb {

LossTable::LossTable(SpacePtr h_space, SpacePtr z_space, Eigen::MatrixXd values)
    : h_space_(std::move(h_space)), z_space_(std::move(z_space)), values_(std::move(values)) {
  if (!h_space_ || !z_space_) throw ValidationError("loss table: null space");
  if (values_.rows() != h_space_->size() || values_.cols() != z_space_->size()) {
    std::ostringstream msg;
    msg << "loss table: values matrix is " << values_.rows() << "x" << values_.cols()
        << ", expected |H| x |Z| = " << h_space_->size() << "x" << z_space_->size();
    throw ValidationError(msg.str());
  }
  for (int h = 0; h < values_.rows(); ++h) {
    for (int z = 0; z < values_.cols(); ++z) {
      if (!std::isfinite(values_(h, z))) {
        std::ostringstream msg;
        msg << "loss table: non-finite loss at (" << h_space_->label(h) << ", "
            << z_space_->label(z) << ")";
        throw ValidationError(msg.str());
      }
    }
  }

  r_h_ = h_space_->diameter();
  r_z_ = z_space_->diameter();
  for (int z = 0; z < values_.cols(); ++z) {
    g_h_ = std::max(g_h_, lipschitz_constant(*h_space_, values_.col(z)));
  }
  for (int h = 0; h < values_.rows(); ++h) {
    g_z_ = std::max(g_z_, lipschitz_constant(*z_space_, values_.row(h).transpose()));
  }
  min_loss_ = values_.cwiseAbs().minCoeff();
  max_loss_ = values_.cwiseAbs().maxCoeff();
  b_ell_ = min_loss_ + g_h_ * r_h_ + g_z_ * r_z_;

  if (max_loss_ > b_ell_ + 1e-9) {
    std::ostringstream msg;
    msg << "loss table: envelope failed, max |loss| = " << max_loss_ << " > b_ell = " << b_ell_;
    throw InvariantViolation(msg.str());
  }
}

Eigen::VectorXd LossTable::column(int z) const {
  if (z < 0 || z >= values_.cols()) {
    std::ostringstream msg;
    msg << "loss table: sample index " << z << " out of range";
    throw ValidationError(msg.str());
  }
  return values_.col(z);
}

Eigen::VectorXd LossTable::expected_loss(const DiscreteDistribution& d) const {
  if (!d.space()->same_as(*z_space_)) {
    throw ValidationError("loss table: expectation distribution lives on a different space");
  }
  return values_ * d.mass();
}

}  // namespace otb
