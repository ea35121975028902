#include "otb/wasserstein.hpp"

#include <algorithm>
#include <sstream>
#include <vector>

#include "otb/dense_simplex.hpp"
#include "otb/divergence.hpp"
#include "otb/errors.hpp"

namespace otb {

namespace {

constexpr double kReducedCostTol = 1e-12;
constexpr double kMarginalTol = 1e-9;
constexpr int kMaxPivots = 100000;

struct BasisCell {
  int i;  // row within the support subproblem
  int j;  // column within the support subproblem
  double flow;
};

// Northwest-corner rule: greedily exhaust supplies/demands scanning the grid
// from the top-left. Produces exactly a+b-1 cells forming a spanning tree of
// the bipartite row/column graph (zero-flow cells appear on ties).
std::vector<BasisCell> northwest_corner(const Eigen::VectorXd& supply,
                                        const Eigen::VectorXd& demand) {
  const int a = static_cast<int>(supply.size());
  const int b = static_cast<int>(demand.size());
  std::vector<BasisCell> basis;
  basis.reserve(a + b - 1);
  int r = 0, s = 0;
  double rs = supply(0), rd = demand(0);
  for (;;) {
    const double f = std::min(rs, rd);
    basis.push_back({r, s, f});
    rs -= f;
    rd -= f;
    if (r == a - 1 && s == b - 1) break;
    if (rs <= 0.0 && r < a - 1) {
      ++r;
      rs = supply(r);
    } else if (s < b - 1) {
      ++s;
      rd = demand(s);
    } else {  // rounding left a sliver of supply with all columns consumed
      ++r;
      rs = supply(r);
    }
  }
  return basis;
}

}  // namespace

TransportResult wasserstein1_primal(const DiscreteDistribution& p,
                                    const DiscreteDistribution& q) {
  require_same_space(p, q, "wasserstein1_primal");
  const int n_full = p.size();
  TransportResult out;
  out.plan = Eigen::MatrixXd::Zero(n_full, n_full);

  const std::vector<int> rows = p.support();
  const std::vector<int> cols = q.support();
  const int a = static_cast<int>(rows.size());
  const int b = static_cast<int>(cols.size());
  const FiniteMetricSpace& space = *p.space();

  Eigen::MatrixXd cost(a, b);
  Eigen::VectorXd supply(a), demand(b);
  for (int i = 0; i < a; ++i) supply(i) = p[rows[i]];
  for (int j = 0; j < b; ++j) demand(j) = q[cols[j]];
  for (int i = 0; i < a; ++i) {
    for (int j = 0; j < b; ++j) cost(i, j) = space.dist(rows[i], cols[j]);
  }

  std::vector<BasisCell> basis = northwest_corner(supply, demand);
  std::vector<char> basic(a * b, 0);
  for (const BasisCell& c : basis) basic[c.i * b + c.j] = 1;

  // Transportation simplex. Each iteration: solve for the tree duals, scan
  // for a cell with negative reduced cost (Bland: lowest flattened index),
  // push flow around the unique tree cycle it closes.
  const int n_nodes = a + b;  // rows 0..a-1, columns a..a+b-1
  Eigen::VectorXd u(a), v(b);
  for (int iter = 0;; ++iter) {
    if (iter > kMaxPivots) {
      throw InvariantViolation("wasserstein1_primal: pivot limit exceeded");
    }

    std::vector<std::vector<std::pair<int, int>>> adj(n_nodes);  // (other node, basis idx)
    for (int k = 0; k < static_cast<int>(basis.size()); ++k) {
      const int rn = basis[k].i, cn = a + basis[k].j;
      adj[rn].push_back({cn, k});
      adj[cn].push_back({rn, k});
    }

    // Duals from u_i + v_j = cost(i,j) on basic cells, rooted at u_0 = 0.
    std::vector<char> seen(n_nodes, 0);
    std::vector<int> stack = {0};
    seen[0] = 1;
    u(0) = 0.0;
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      for (const auto& [y, k] : adj[x]) {
        if (seen[y]) continue;
        seen[y] = 1;
        const BasisCell& c = basis[k];
        if (y >= a) {
          v(y - a) = cost(c.i, c.j) - u(c.i);
        } else {
          u(y) = cost(c.i, c.j) - v(c.j);
        }
        stack.push_back(y);
      }
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
      throw InvariantViolation("wasserstein1_primal: basis lost the spanning-tree property");
    }

    int ei = -1, ej = -1;
    for (int i = 0; i < a && ei < 0; ++i) {
      for (int j = 0; j < b; ++j) {
        if (basic[i * b + j]) continue;
        if (cost(i, j) - u(i) - v(j) < -kReducedCostTol) {
          ei = i;
          ej = j;
          break;
        }
      }
    }
    if (ei < 0) break;  // dual feasible => optimal

    // Unique tree path from row node ei to column node a+ej.
    std::vector<int> parent(n_nodes, -1), via(n_nodes, -1);
    std::vector<char> vis(n_nodes, 0);
    stack = {ei};
    vis[ei] = 1;
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      if (x == a + ej) break;
      for (const auto& [y, k] : adj[x]) {
        if (vis[y]) continue;
        vis[y] = 1;
        parent[y] = x;
        via[y] = k;
        stack.push_back(y);
      }
    }
    std::vector<int> path;  // basis indices, ordered from ei outward
    for (int x = a + ej; x != ei; x = parent[x]) path.push_back(via[x]);
    std::reverse(path.begin(), path.end());

    // Cells at even path positions lose flow, odd positions gain; the
    // entering cell gains. The path alternates row/column nodes, so this is
    // exactly the alternating cycle sign pattern.
    double theta = std::numeric_limits<double>::infinity();
    for (size_t t = 0; t < path.size(); t += 2) {
      theta = std::min(theta, basis[path[t]].flow);
    }
    int leave_pos = -1;
    long leave_key = 0;
    for (size_t t = 0; t < path.size(); t += 2) {
      const BasisCell& c = basis[path[t]];
      if (c.flow != theta) continue;
      const long key = static_cast<long>(c.i) * b + c.j;
      if (leave_pos < 0 || key < leave_key) {
        leave_pos = path[t];
        leave_key = key;
      }
    }
    for (size_t t = 0; t < path.size(); ++t) {
      basis[path[t]].flow += (t % 2 == 0) ? -theta : theta;
    }
    basic[basis[leave_pos].i * b + basis[leave_pos].j] = 0;
    basic[ei * b + ej] = 1;
    basis[leave_pos] = {ei, ej, theta};
  }

  double value = 0.0;
  for (const BasisCell& c : basis) {
    value += c.flow * cost(c.i, c.j);
    out.plan(rows[c.i], cols[c.j]) += c.flow;
  }
  out.value = std::max(value, 0.0);

  const Eigen::VectorXd row_sums = out.plan.rowwise().sum();
  const Eigen::VectorXd col_sums = out.plan.colwise().sum().transpose();
  if ((row_sums - p.mass()).cwiseAbs().maxCoeff() > kMarginalTol ||
      (col_sums - q.mass()).cwiseAbs().maxCoeff() > kMarginalTol) {
    throw InvariantViolation("wasserstein1_primal: optimal plan violates its marginals");
  }
  return out;
}

DualResult wasserstein1_dual(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  require_same_space(p, q, "wasserstein1_dual");
  const int n = p.size();
  DualResult out;
  if (n == 1) {
    out.potential = Eigen::VectorXd::Zero(1);
    return out;
  }
  const FiniteMetricSpace& space = *p.space();
  const double diam = space.diameter();

  // max <p-q, phi>  s.t.  phi_i - phi_j <= d_ij  (all ordered pairs),
  //                       phi_i <= diam,  phi >= 0.
  // Any feasible potential can be shifted to min 0 without changing the
  // objective (the weights sum to 0), and then lies in [0, diam] by the
  // Lipschitz constraints, so the box loses nothing.
  const int m = n * (n - 1) + n;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, n);
  Eigen::VectorXd b(m);
  int r = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      A(r, i) = 1.0;
      A(r, j) = -1.0;
      b(r) = space.dist(i, j);
      ++r;
    }
  }
  for (int i = 0; i < n; ++i) {
    A(r, i) = 1.0;
    b(r) = diam;
    ++r;
  }

  const LpResult lp = simplex_max(p.mass() - q.mass(), A, b);
  out.value = lp.value;
  out.potential = lp.x;
  return out;
}

double wasserstein1(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  return wasserstein1_primal(p, q).value;
}

DiameterTvCheck check_w1_tv(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  DiameterTvCheck out;
  out.w1 = wasserstein1(p, q);
  out.bound = p.space()->diameter() * tv_distance(p, q);
  out.holds = out.w1 <= out.bound + 1e-9;
  return out;
}

double lipschitz_constant(const FiniteMetricSpace& space, const Eigen::VectorXd& f) {
  if (f.size() != space.size()) {
    throw ValidationError("lipschitz_constant: value vector length mismatch");
  }
  double lip = 0.0;
  for (int i = 0; i < space.size(); ++i) {
    for (int j = i + 1; j < space.size(); ++j) {
      lip = std::max(lip, std::abs(f(i) - f(j)) / space.dist(i, j));
    }
  }
  return lip;
}

}  // namespace otb
