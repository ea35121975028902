#include "otb/divergence.hpp"

#include <cmath>
#include <limits>

#include "otb/errors.hpp"

namespace otb {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double tv_distance(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  require_same_space(p, q, "tv_distance");
  return 0.5 * (p.mass() - q.mass()).cwiseAbs().sum();
}

double kl_divergence(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  require_same_space(p, q, "kl_divergence");
  double kl = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    const double pi = p[i];
    if (pi == 0.0) continue;
    const double qi = q[i];
    if (qi == 0.0) return kInf;
    kl += pi * std::log(pi / qi);
  }
  // Negative rounding dust can appear when p == q up to the last bit.
  return std::max(kl, 0.0);
}

PinskerCheck check_pinsker(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  PinskerCheck out;
  out.tv = tv_distance(p, q);
  const double kl = kl_divergence(p, q);
  out.bound = std::isinf(kl) ? kInf : std::sqrt(0.5 * kl);
  out.holds = out.tv <= out.bound + 1e-12;
  return out;
}

double log_sum_exp(const Eigen::VectorXd& v, const std::vector<int>& indices) {
  if (indices.empty()) return -kInf;
  double m = -kInf;
  for (int i : indices) m = std::max(m, v(i));
  if (std::isinf(m)) return m;
  double s = 0.0;
  for (int i : indices) s += std::exp(v(i) - m);
  return m + std::log(s);
}

double donsker_varadhan_gap(const DiscreteDistribution& p, const Eigen::VectorXd& x,
                            double lambda) {
  if (x.size() != p.size()) {
    throw ValidationError("donsker_varadhan_gap: value vector length mismatch");
  }
  const std::vector<int> supp = p.support();
  const double mean = p.expectation(x);

  // Left side: ln E_p[exp(lambda (X - mean))] via shifted log-sum-exp.
  Eigen::VectorXd shifted(p.size());
  for (int i = 0; i < p.size(); ++i) {
    shifted(i) = (p[i] > 0.0) ? std::log(p[i]) + lambda * (x(i) - mean) : -kInf;
  }
  const double lhs = log_sum_exp(shifted, supp);

  // Right side: evaluate the variational expression at the exponential tilt
  // q* proportional to p * exp(lambda X), built explicitly and normalized.
  double shift = -kInf;
  for (int i : supp) shift = std::max(shift, lambda * x(i));
  Eigen::VectorXd w = Eigen::VectorXd::Zero(p.size());
  for (int i : supp) w(i) = p[i] * std::exp(lambda * x(i) - shift);
  const DiscreteDistribution tilt(p.space(), w / w.sum());
  const double rhs = lambda * (tilt.expectation(x) - mean) - kl_divergence(tilt, p);

  return std::abs(lhs - rhs);
}

}  // namespace otb
