#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "otb/errors.hpp"
#include "otb/loss_table.hpp"
#include "otb/offline.hpp"

using otb::DiscreteDistribution;
using otb::LossTable;
using otb::OfflinePosterior;
using otb::PosteriorKind;
using otb::SpacePtr;
using otb::ValidationError;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

LossTable small_table() {
  const SpacePtr h = otb::make_line_space({0.0, 0.5, 1.0}, "h");
  const SpacePtr z = otb::make_line_space({0.0, 1.0}, "z");
  Eigen::MatrixXd values(3, 2);
  values << 0.0, 1.0,  //
      0.5, 0.5,        //
      1.0, 0.0;
  return LossTable(h, z, values);
}

}  // namespace

TEST_CASE("the empirical minimizer is a point mass with its statistics") {
  const LossTable table = small_table();
  // sample (z0, z0, z1): mean losses (1/3, 1/2, 2/3) -> h0 wins
  const OfflinePosterior post = otb::erm_posterior(table, {0, 0, 1});
  CHECK(post.kind == PosteriorKind::kErm);
  CHECK(post.erm_index == 0);
  CHECK(post.gamma == 0.0);
  CHECK(post.distribution[0] == 1.0);
  CHECK(post.distribution[1] == 0.0);
  CHECK(post.empirical_loss(0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(post.empirical_loss(1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(post.empirical_loss(2) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("minimizer ties break to the lowest hypothesis index") {
  const LossTable table = small_table();
  // sample (z0, z1): every hypothesis averages 1/2
  const OfflinePosterior post = otb::erm_posterior(table, {0, 1});
  CHECK(post.erm_index == 0);
  CHECK(post.distribution[0] == 1.0);
}

TEST_CASE("the Gibbs posterior interpolates between prior and minimizer") {
  const LossTable table = small_table();
  const DiscreteDistribution prior = DiscreteDistribution::uniform(table.h_space());
  const std::vector<int> sample = {0, 0, 1};

  SUBCASE("zero temperature returns the prior") {
    const OfflinePosterior post = otb::gibbs_posterior(table, sample, prior, 0.0);
    CHECK(post.kind == PosteriorKind::kGibbs);
    CHECK(post.erm_index == -1);
    for (int i = 0; i < 3; ++i) {
      CHECK(post.distribution[i] == doctest::Approx(prior[i]).epsilon(1e-15));
    }
  }
  SUBCASE("moderate temperature reweights by exp(-gamma * total loss)") {
    const double gamma = 0.7;
    const OfflinePosterior post = otb::gibbs_posterior(table, sample, prior, gamma);
    // direct route: weights exp(-gamma * n * mean loss) over a uniform prior
    Eigen::VectorXd w(3);
    const double n = 3.0;
    w << std::exp(-gamma * n / 3.0), std::exp(-gamma * n * 0.5), std::exp(-gamma * n * 2.0 / 3.0);
    w /= w.sum();
    for (int i = 0; i < 3; ++i) {
      CHECK(post.distribution[i] == doctest::Approx(w(i)).epsilon(1e-13));
    }
    CHECK(post.gamma == gamma);
  }
  SUBCASE("extreme temperature concentrates on the minimizer") {
    const OfflinePosterior post = otb::gibbs_posterior(table, sample, prior, 500.0);
    CHECK(post.distribution[0] == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("the Gibbs posterior respects the prior's support") {
  const LossTable table = small_table();
  // prior excludes the overall minimizer h0
  const DiscreteDistribution prior(table.h_space(), vec({0.0, 0.5, 0.5}));
  const OfflinePosterior post = otb::gibbs_posterior(table, {0, 0, 1}, prior, 50.0);
  CHECK(post.distribution[0] == 0.0);
  CHECK(post.distribution[1] == doctest::Approx(1.0).epsilon(1e-9));  // best inside the support
}

TEST_CASE("offline learners validate their inputs") {
  const LossTable table = small_table();
  const DiscreteDistribution prior = DiscreteDistribution::uniform(table.h_space());
  CHECK_THROWS_AS(otb::erm_posterior(table, {}), ValidationError);
  CHECK_THROWS_AS(otb::erm_posterior(table, {0, 2}), ValidationError);   // z index out of range
  CHECK_THROWS_AS(otb::erm_posterior(table, {-1}), ValidationError);
  CHECK_THROWS_AS(otb::gibbs_posterior(table, {0}, prior, -0.1), ValidationError);
  CHECK_THROWS_AS(otb::gibbs_posterior(table, {0}, prior, std::nan("")), ValidationError);

  const SpacePtr other = otb::make_line_space({0.0, 1.0}, "w");
  const DiscreteDistribution wrong = DiscreteDistribution::uniform(other);
  CHECK_THROWS_AS(otb::gibbs_posterior(table, {0}, wrong, 1.0), ValidationError);
}
