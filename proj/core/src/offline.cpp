#include "otb/offline.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "otb/errors.hpp"

namespace otb {

namespace {

Eigen::VectorXd mean_sample_loss(const LossTable& loss, const std::vector<int>& sample) {
  if (sample.empty()) throw ValidationError("offline posterior: empty sample");
  Eigen::VectorXd total = Eigen::VectorXd::Zero(loss.h_size());
  for (int z : sample) {
    if (z < 0 || z >= loss.z_size()) {
      std::ostringstream msg;
      msg << "offline posterior: sample index " << z << " out of range";
      throw ValidationError(msg.str());
    }
    total += loss.column(z);
  }
  return total / static_cast<double>(sample.size());
}

}  // namespace

OfflinePosterior erm_posterior(const LossTable& loss, const std::vector<int>& sample) {
  Eigen::VectorXd mean = mean_sample_loss(loss, sample);
  int best = 0;
  for (int h = 1; h < mean.size(); ++h) {
    if (mean(h) < mean(best)) best = h;  // strict: ties keep the lowest index
  }
  OfflinePosterior out{PosteriorKind::kErm,
                       DiscreteDistribution::point_mass(loss.h_space(), best), 0.0, best,
                       std::move(mean)};
  return out;
}

OfflinePosterior gibbs_posterior(const LossTable& loss, const std::vector<int>& sample,
                                 const DiscreteDistribution& prior, double gamma) {
  if (!prior.space()->same_as(*loss.h_space())) {
    throw ValidationError("gibbs posterior: prior lives on a different space than H");
  }
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw ValidationError("gibbs posterior: gamma must be finite and >= 0");
  }
  Eigen::VectorXd mean = mean_sample_loss(loss, sample);
  const double n = static_cast<double>(sample.size());

  double shift = -std::numeric_limits<double>::infinity();
  for (int h = 0; h < prior.size(); ++h) {
    if (prior[h] > 0.0) shift = std::max(shift, -gamma * n * mean(h));
  }
  Eigen::VectorXd w = Eigen::VectorXd::Zero(prior.size());
  for (int h = 0; h < prior.size(); ++h) {
    if (prior[h] > 0.0) w(h) = prior[h] * std::exp(-gamma * n * mean(h) - shift);
  }
  w /= w.sum();

  OfflinePosterior out{PosteriorKind::kGibbs, DiscreteDistribution(prior.space(), std::move(w)),
                       gamma, -1, std::move(mean)};
  return out;
}

}  // namespace otb
