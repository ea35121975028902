#include "otb/dense_simplex.hpp"

#include <sstream>

#include "otb/errors.hpp"

namespace otb {

namespace {
constexpr double kEnterTol = 1e-11;  // reduced-cost threshold for entering
constexpr double kPivotTol = 1e-12;  // smallest usable pivot element
}

LpResult simplex_max(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                     const Eigen::VectorXd& b, int max_iterations) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  if (b.size() != m || c.size() != n) {
    throw ValidationError("simplex_max: dimension mismatch");
  }
  if (m > 0 && b.minCoeff() < 0.0) {
    throw ValidationError("simplex_max: requires b >= 0 for the slack start");
  }

  // Tableau rows 1..m hold [A | I | b]; row 0 is the objective row, which
  // after pivoting carries the reduced costs (negated) and the value in the
  // last column. Column layout: n structural, m slack, 1 rhs.
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + 1, n + m + 1);
  t.row(0).head(n) = -c.transpose();
  t.block(1, 0, m, n) = A;
  t.block(1, n, m, m).setIdentity();
  t.col(n + m).tail(m) = b;

  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) basis[i] = n + i;

  LpResult result;
  for (;;) {
    // Bland: entering = lowest variable index whose objective-row entry is
    // negative (increasing it improves the objective).
    int enter = -1;
    for (int j = 0; j < n + m; ++j) {
      if (t(0, j) < -kEnterTol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break;

    // Ratio test; ties broken by lowest basis-variable index (Bland).
    int leave_row = -1;
    double best_ratio = 0.0;
    for (int i = 1; i <= m; ++i) {
      const double a = t(i, enter);
      if (a <= kPivotTol) continue;
      const double ratio = t(i, n + m) / a;
      if (leave_row < 0 || ratio < best_ratio ||
          (ratio == best_ratio && basis[i - 1] < basis[leave_row - 1])) {
        leave_row = i;
        best_ratio = ratio;
      }
    }
    if (leave_row < 0) {
      throw InvariantViolation("simplex_max: unbounded direction in a problem expected bounded");
    }

    t.row(leave_row) /= t(leave_row, enter);
    for (int i = 0; i <= m; ++i) {
      if (i == leave_row) continue;
      const double f = t(i, enter);
      if (f != 0.0) t.row(i) -= f * t.row(leave_row);
    }
    basis[leave_row - 1] = enter;

    if (++result.iterations > max_iterations) {
      std::ostringstream msg;
      msg << "simplex_max: no optimum after " << max_iterations << " pivots (m=" << m
          << ", n=" << n << ")";
      throw InvariantViolation(msg.str());
    }
  }

  result.x = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < m; ++i) {
    if (basis[i] < n) result.x(basis[i]) = t(i + 1, n + m);
  }
  result.value = t(0, n + m);
  return result;
}

}  // namespace otb
