#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

namespace otb {

/// A finite metric space: labelled points plus a full distance matrix.
///
/// Construction validates the metric axioms (zero diagonal, symmetry,
/// strictly positive off-diagonal entries, triangle inequality) and caches
/// the diameter. Instances are immutable and shared between the objects
/// built on top of them (distributions, chains, loss tables).
class FiniteMetricSpace {
 public:
  FiniteMetricSpace(std::vector<std::string> labels, Eigen::MatrixXd dist);

  int size() const { return static_cast<int>(labels_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(int i) const { return labels_.at(i); }
  const Eigen::MatrixXd& dist() const { return dist_; }
  double dist(int i, int j) const { return dist_(i, j); }
  /// Largest pairwise distance (0 for a single point).
  double diameter() const { return diameter_; }

  /// Structural equality: same labels and bitwise-equal distance matrix.
  bool same_as(const FiniteMetricSpace& other) const;

 private:
  std::vector<std::string> labels_;
  Eigen::MatrixXd dist_;
  double diameter_ = 0.0;
};

using SpacePtr = std::shared_ptr<const FiniteMetricSpace>;

/// Convenience: points on the real line with |x - y| distances.
SpacePtr make_line_space(const std::vector<double>& positions,
                         const std::string& label_prefix = "p");

}  // namespace otb
