#include "otb/distribution.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "otb/errors.hpp"

namespace otb {

namespace {
constexpr double kMassTol = 1e-12;
}

DiscreteDistribution::DiscreteDistribution(SpacePtr space, Eigen::VectorXd mass)
    : space_(std::move(space)), mass_(std::move(mass)) {
  if (!space_) {
    throw ValidationError("distribution: null space");
  }
  if (mass_.size() != space_->size()) {
    std::ostringstream msg;
    msg << "distribution: " << mass_.size() << " masses for a space of " << space_->size()
        << " points";
    throw ValidationError(msg.str());
  }
  double sum = 0.0;
  for (int i = 0; i < mass_.size(); ++i) {
    const double m = mass_(i);
    if (!std::isfinite(m) || m < 0.0) {
      std::ostringstream msg;
      msg << "distribution: mass(" << space_->label(i) << ") = " << m;
      throw ValidationError(msg.str());
    }
    sum += m;
  }
  if (std::abs(sum - 1.0) > kMassTol) {
    std::ostringstream msg;
    msg << "distribution: masses sum to " << sum << ", expected 1 within " << kMassTol;
    throw ValidationError(msg.str());
  }
}

DiscreteDistribution DiscreteDistribution::uniform(SpacePtr space) {
  const int n = space->size();
  return DiscreteDistribution(std::move(space), Eigen::VectorXd::Constant(n, 1.0 / n));
}

DiscreteDistribution DiscreteDistribution::point_mass(SpacePtr space, int i) {
  const int n = space->size();
  if (i < 0 || i >= n) {
    std::ostringstream msg;
    msg << "point mass: index " << i << " out of range for " << n << " points";
    throw ValidationError(msg.str());
  }
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(n);
  mass(i) = 1.0;
  return DiscreteDistribution(std::move(space), std::move(mass));
}

std::vector<int> DiscreteDistribution::support() const {
  std::vector<int> out;
  for (int i = 0; i < mass_.size(); ++i) {
    if (mass_(i) > 0.0) out.push_back(i);
  }
  return out;
}

double DiscreteDistribution::expectation(const Eigen::VectorXd& values) const {
  if (values.size() != mass_.size()) {
    throw ValidationError("expectation: value vector length mismatch");
  }
  return mass_.dot(values);
}

void require_same_space(const DiscreteDistribution& p, const DiscreteDistribution& q,
                        const char* context) {
  if (p.space() == q.space()) return;
  if (p.space()->same_as(*q.space())) return;
  std::ostringstream msg;
  msg << context << ": distributions live on different spaces (" << p.space()->size()
      << " vs " << q.space()->size() << " points)";
  throw ValidationError(msg.str());
}

}  // namespace otb
