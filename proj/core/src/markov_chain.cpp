#include "otb/markov_chain.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <utility>

#include "otb/errors.hpp"

namespace otb {

namespace {

constexpr double kRowSumTol = 1e-12;
constexpr double kStationaryResidualTol = 1e-10;

double uniform01(std::mt19937_64& gen) {
  // 53 random bits into [0, 1); avoids std::uniform_real_distribution, whose
  // output is implementation-defined.
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

int draw_index(const Eigen::VectorXd& weights, double u) {
  double cum = 0.0;
  int last_positive = -1;
  for (int i = 0; i < weights.size(); ++i) {
    const double w = weights(i);
    if (w <= 0.0) continue;
    cum += w;
    last_positive = i;
    if (u < cum) return i;
  }
  return last_positive;  // u landed in the rounding sliver above the last step
}

void renormalize_rows(Eigen::MatrixXd& m) {
  for (int i = 0; i < m.rows(); ++i) {
    m.row(i) /= m.row(i).sum();
  }
}

double stationary_residual(const Eigen::MatrixXd& t, const Eigen::VectorXd& pi) {
  return (t.transpose() * pi - pi).cwiseAbs().maxCoeff();
}

}  // namespace

MarkovChain::MarkovChain(SpacePtr space, Eigen::MatrixXd transition,
                         DiscreteDistribution initial)
    : space_(std::move(space)), transition_(std::move(transition)), initial_(std::move(initial)) {
  if (!space_) throw ValidationError("markov chain: null space");
  const int n = space_->size();
  if (transition_.rows() != n || transition_.cols() != n) {
    std::ostringstream msg;
    msg << "markov chain: transition matrix is " << transition_.rows() << "x"
        << transition_.cols() << " for a space of " << n << " points";
    throw ValidationError(msg.str());
  }
  if (!initial_.space()->same_as(*space_)) {
    throw ValidationError("markov chain: initial law lives on a different space");
  }
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
      const double p = transition_(i, j);
      if (!std::isfinite(p) || p < 0.0) {
        std::ostringstream msg;
        msg << "markov chain: transition(" << space_->label(i) << " -> " << space_->label(j)
            << ") = " << p;
        throw ValidationError(msg.str());
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRowSumTol) {
      std::ostringstream msg;
      msg << "markov chain: row " << space_->label(i) << " sums to " << sum;
      throw ValidationError(msg.str());
    }
  }

  iid_ = true;
  for (int i = 1; i < n && iid_; ++i) {
    iid_ = (transition_.row(i).array() == transition_.row(0).array()).all();
  }

  // Uniqueness of the stationary law: the eigenvalue-1 eigenspace must be
  // one-dimensional, i.e. rank(T - I) = n - 1.
  Eigen::FullPivLU<Eigen::MatrixXd> lu(transition_ - Eigen::MatrixXd::Identity(n, n));
  lu.setThreshold(1e-9);
  if (lu.rank() != n - 1) {
    std::ostringstream msg;
    msg << "markov chain: stationary distribution is not unique (eigenvalue-1 eigenspace has "
        << "dimension " << n - lu.rank() << ")";
    throw ValidationError(msg.str());
  }

  Eigen::VectorXd pi;
  if (iid_) {
    pi = transition_.row(0).transpose();
  } else {
    // Least-squares solve of [T' - I; 1'] pi = [0; 1], then polish by the
    // power map pi <- normalize(T' pi), keeping the best-residual iterate.
    // For chains with exactly representable entries this tends to land on
    // the exact fixed point, which the exact-zero mixing checks rely on.
    Eigen::MatrixXd a(n + 1, n);
    a.topRows(n) = transition_.transpose() - Eigen::MatrixXd::Identity(n, n);
    a.bottomRows(1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
    rhs(n) = 1.0;
    pi = a.colPivHouseholderQr().solve(rhs);
    for (int i = 0; i < n; ++i) pi(i) = std::max(pi(i), 0.0);
    pi /= pi.sum();

    Eigen::VectorXd best = pi;
    double best_res = stationary_residual(transition_, pi);
    for (int it = 0; it < 2000 && best_res > 0.0; ++it) {
      Eigen::VectorXd next = transition_.transpose() * pi;
      next /= next.sum();
      if (next == pi) break;
      pi = next;
      const double res = stationary_residual(transition_, pi);
      if (res < best_res) {
        best_res = res;
        best = pi;
      }
    }
    pi = best;
  }

  if (stationary_residual(transition_, pi) > kStationaryResidualTol) {
    throw ValidationError("markov chain: stationary distribution solve did not converge");
  }
  stationary_.emplace(space_, pi);
}

Eigen::MatrixXd MarkovChain::power(int k) const {
  if (k < 0) throw ValidationError("markov chain: negative matrix power");
  const int n = space_->size();
  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd base = transition_;
  while (k > 0) {
    if (k & 1) {
      result = result * base;
      renormalize_rows(result);
    }
    base = base * base;
    renormalize_rows(base);
    k >>= 1;
  }
  return result;
}

DiscreteDistribution MarkovChain::marginal(int t) const {
  if (t < 1) throw ValidationError("markov chain: marginal index must be >= 1");
  if (t == 1) return initial_;
  Eigen::VectorXd mu = power(t - 1).transpose() * initial_.mass();
  mu /= mu.sum();
  return DiscreteDistribution(space_, mu);
}

std::vector<int> MarkovChain::sample_path(int n, std::uint64_t seed) const {
  if (n < 0) throw ValidationError("markov chain: negative path length");
  std::vector<int> path;
  path.reserve(n);
  std::mt19937_64 gen(seed);
  if (n == 0) return path;
  int state = draw_index(initial_.mass(), uniform01(gen));
  path.push_back(state);
  for (int t = 1; t < n; ++t) {
    state = draw_index(transition_.row(state).transpose(), uniform01(gen));
    path.push_back(state);
  }
  return path;
}

}  // namespace otb
