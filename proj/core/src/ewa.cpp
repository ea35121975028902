#include "otb/ewa.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "otb/divergence.hpp"
#include "otb/errors.hpp"

namespace otb {

EwaState::EwaState(double eta, DiscreteDistribution prior)
    : EwaState(eta, prior, prior) {}

EwaState::EwaState(double eta, DiscreteDistribution prior, DiscreteDistribution current)
    : eta_(eta), prior_(std::move(prior)), current_(std::move(current)) {
  if (!(eta_ > 0.0) || !std::isfinite(eta_)) {
    throw ValidationError("ewa: learning rate must be finite and > 0");
  }
}

EwaState EwaState::updated(const Eigen::VectorXd& cost) const {
  if (cost.size() != current_.size()) {
    throw ValidationError("ewa: cost vector length mismatch");
  }
  if (!cost.allFinite()) {
    throw ValidationError("ewa: non-finite cost entry");
  }
  double shift = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < cost.size(); ++i) {
    if (current_[i] > 0.0) shift = std::max(shift, -eta_ * cost(i));
  }
  Eigen::VectorXd w = Eigen::VectorXd::Zero(cost.size());
  for (int i = 0; i < cost.size(); ++i) {
    if (current_[i] > 0.0) w(i) = current_[i] * std::exp(-eta_ * cost(i) - shift);
  }
  w /= w.sum();
  return EwaState(eta_, prior_, DiscreteDistribution(current_.space(), std::move(w)));
}

MinimizerCheck ewa_minimizer_check(const EwaState& state, const Eigen::VectorXd& cost) {
  const DiscreteDistribution& p = state.current();
  const DiscreteDistribution q = state.updated(cost).current();
  MinimizerCheck out;
  out.objective = q.expectation(cost) + kl_divergence(q, p) / state.eta();

  Eigen::VectorXd logterms(p.size());
  for (int i = 0; i < p.size(); ++i) {
    logterms(i) = (p[i] > 0.0) ? std::log(p[i]) - state.eta() * cost(i)
                               : -std::numeric_limits<double>::infinity();
  }
  out.closed_form = -log_sum_exp(logterms, p.support()) / state.eta();
  out.gap = std::abs(out.objective - out.closed_form);
  return out;
}

double ewa_stability_bound(double eta, double g_h, double r_h) {
  if (!(eta > 0.0) || g_h < 0.0 || r_h < 0.0) {
    throw ValidationError("ewa_stability_bound: need eta > 0, g_h >= 0, r_h >= 0");
  }
  return eta * g_h * r_h * r_h;
}

}  // namespace otb
