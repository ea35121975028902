// Micro-benchmarks for the hot paths: the two transport solvers (the primary
// per-round cost), one learner update, mixing coefficients and a full game.
#include <benchmark/benchmark.h>

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "otb/distribution.hpp"
#include "otb/ewa.hpp"
#include "otb/game.hpp"
#include "otb/markov_chain.hpp"
#include "otb/metric_space.hpp"
#include "otb/mixing.hpp"
#include "otb/wasserstein.hpp"

namespace {

using otb::DiscreteDistribution;
using otb::SpacePtr;

SpacePtr planar_space(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd pts(n, 2);
  for (int i = 0; i < n; ++i) {
    pts(i, 0) = (i % 7) * 0.151 + 0.05 * u(rng);
    pts(i, 1) = (i / 7) * 0.149 + 0.05 * u(rng);
  }
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  std::vector<std::string> labels(n);
  for (int i = 0; i < n; ++i) {
    labels[i] = "x" + std::to_string(i);
    for (int j = 0; j < i; ++j) {
      d(i, j) = d(j, i) = (pts.row(i) - pts.row(j)).norm();
    }
  }
  return std::make_shared<otb::FiniteMetricSpace>(labels, d);
}

DiscreteDistribution random_law(const SpacePtr& space, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd m(space->size());
  for (int i = 0; i < m.size(); ++i) m[i] = 0.01 + u(rng);
  m /= m.sum();
  return DiscreteDistribution(space, m);
}

struct TwoStateProblem {
  std::shared_ptr<otb::MarkovChain> chain;
  std::shared_ptr<otb::LossTable> loss;
  DiscreteDistribution prior;

  TwoStateProblem()
      : chain(), loss(), prior(make_prior()) {
    const SpacePtr z = std::make_shared<otb::FiniteMetricSpace>(
        std::vector<std::string>{"z0", "z1"},
        (Eigen::MatrixXd(2, 2) << 0.0, 1.0, 1.0, 0.0).finished());
    Eigen::MatrixXd t(2, 2);
    t << 0.7, 0.3, 0.1, 0.9;
    chain = std::make_shared<otb::MarkovChain>(
        z, t, DiscreteDistribution(z, Eigen::Vector2d(0.25, 0.75)));
    const SpacePtr h = otb::make_line_space({0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0}, "h");
    Eigen::MatrixXd values(4, 2);
    values << 0.0, 1.0, 1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0, 1.0, 0.0;
    loss = std::make_shared<otb::LossTable>(h, z, values);
  }

  static DiscreteDistribution make_prior() {
    return DiscreteDistribution::uniform(otb::make_line_space({0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0}, "h"));
  }
};

void bench_w1_primal(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const SpacePtr space = planar_space(static_cast<int>(state.range(0)), rng);
  const DiscreteDistribution p = random_law(space, rng);
  const DiscreteDistribution q = random_law(space, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(otb::wasserstein1_primal(p, q).value);
  }
}
BENCHMARK(bench_w1_primal)->Arg(4)->Arg(8)->Arg(12);

void bench_w1_dual(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const SpacePtr space = planar_space(static_cast<int>(state.range(0)), rng);
  const DiscreteDistribution p = random_law(space, rng);
  const DiscreteDistribution q = random_law(space, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(otb::wasserstein1_dual(p, q).value);
  }
}
BENCHMARK(bench_w1_dual)->Arg(4)->Arg(8)->Arg(12);

void bench_ewa_update(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const SpacePtr space = planar_space(16, rng);
  otb::EwaState ewa(0.1, DiscreteDistribution::uniform(space));
  Eigen::VectorXd cost(16);
  for (int i = 0; i < 16; ++i) cost[i] = std::sin(0.7 * i);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ewa.updated(cost));
  }
}
BENCHMARK(bench_ewa_update);

void bench_phi_coefficient(benchmark::State& state) {
  const TwoStateProblem problem;
  for (auto _ : state) {
    benchmark::DoNotOptimize(otb::phi_coefficient(*problem.chain, 8));
  }
}
BENCHMARK(bench_phi_coefficient);

void bench_full_game(benchmark::State& state) {
  const TwoStateProblem problem;
  const int n = static_cast<int>(state.range(0));
  std::uint64_t seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        otb::run_game(*problem.chain, *problem.loss, 0.1, problem.prior, n, 3, seed++));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(bench_full_game)->Arg(64)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
