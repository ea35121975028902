#include "otb/metric_space.hpp"

#include <cmath>
#include <set>
#include <sstream>
#include <utility>

#include "otb/errors.hpp"

namespace otb {

namespace {
constexpr double kTriangleTol = 1e-12;
}

FiniteMetricSpace::FiniteMetricSpace(std::vector<std::string> labels, Eigen::MatrixXd dist)
    : labels_(std::move(labels)), dist_(std::move(dist)) {
  const int n = static_cast<int>(labels_.size());
  if (n == 0) {
    throw ValidationError("metric space: need at least one point");
  }
  if (dist_.rows() != n || dist_.cols() != n) {
    std::ostringstream msg;
    msg << "metric space: distance matrix is " << dist_.rows() << "x" << dist_.cols()
        << " but there are " << n << " labels";
    throw ValidationError(msg.str());
  }
  std::set<std::string> seen(labels_.begin(), labels_.end());
  if (static_cast<int>(seen.size()) != n) {
    throw ValidationError("metric space: duplicate labels");
  }
  for (int i = 0; i < n; ++i) {
    if (dist_(i, i) != 0.0) {
      std::ostringstream msg;
      msg << "metric space: dist(" << labels_[i] << "," << labels_[i] << ") = " << dist_(i, i)
          << ", diagonal must be exactly 0";
      throw ValidationError(msg.str());
    }
    for (int j = i + 1; j < n; ++j) {
      const double dij = dist_(i, j);
      if (!std::isfinite(dij) || dij <= 0.0) {
        std::ostringstream msg;
        msg << "metric space: dist(" << labels_[i] << "," << labels_[j] << ") = " << dij
            << ", off-diagonal distances must be finite and > 0";
        throw ValidationError(msg.str());
      }
      if (dist_(j, i) != dij) {
        std::ostringstream msg;
        msg << "metric space: asymmetric distances between " << labels_[i] << " and "
            << labels_[j] << " (" << dij << " vs " << dist_(j, i) << ")";
        throw ValidationError(msg.str());
      }
      diameter_ = std::max(diameter_, dij);
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        if (dist_(i, k) > dist_(i, j) + dist_(j, k) + kTriangleTol) {
          std::ostringstream msg;
          msg << "metric space: triangle inequality fails: dist(" << labels_[i] << ","
              << labels_[k] << ") = " << dist_(i, k) << " > " << dist_(i, j) + dist_(j, k)
              << " via " << labels_[j];
          throw ValidationError(msg.str());
        }
      }
    }
  }
}

bool FiniteMetricSpace::same_as(const FiniteMetricSpace& other) const {
  return labels_ == other.labels_ && dist_ == other.dist_;
}

SpacePtr make_line_space(const std::vector<double>& positions, const std::string& label_prefix) {
  const int n = static_cast<int>(positions.size());
  std::vector<std::string> labels(n);
  Eigen::MatrixXd dist(n, n);
  for (int i = 0; i < n; ++i) {
    labels[i] = label_prefix + std::to_string(i);
    for (int j = 0; j < n; ++j) {
      dist(i, j) = std::abs(positions[i] - positions[j]);
    }
  }
  return std::make_shared<FiniteMetricSpace>(std::move(labels), std::move(dist));
}

}  // namespace otb
