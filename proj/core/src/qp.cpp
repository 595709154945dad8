#include "stclf/qp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace stclf {
namespace {

constexpr double kTol = 1e-11;

}  // namespace

QpResult solve_qp(const Mat& H, const Vec& c, const std::vector<Vec>& rows,
                  const DynVec& b, const Vec& x_feasible) {
  const int n = static_cast<int>(c.size());
  const int m = static_cast<int>(rows.size());

  Vec x = x_feasible;

  // Working set: tight constraints at the start point, kept linearly
  // independent so the KKT system below stays nonsingular.  (A blocking
  // constraint found during iteration is independent automatically, since
  // the step direction is orthogonal to every working row.)
  std::vector<int> active;
  Eigen::MatrixXd basis_rows(0, n);
  for (int i = 0; i < m; ++i) {
    if (rows[i].dot(x) <= b[i] - kTol) continue;
    if (static_cast<int>(active.size()) == n) break;
    Eigen::MatrixXd trial(basis_rows.rows() + 1, n);
    trial.topRows(basis_rows.rows()) = basis_rows;
    for (int j = 0; j < n; ++j) trial(basis_rows.rows(), j) = rows[i][j];
    if (trial.fullPivLu().rank() == trial.rows()) {
      basis_rows = trial;
      active.push_back(i);
    }
  }

  for (int iter = 0; iter < 200; ++iter) {
    // Equality-constrained step: minimize the quadratic over the affine set
    // of currently active constraints via the KKT system.
    const int k = static_cast<int>(active.size());
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + k, n + k);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + k);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) K(i, j) = H(i, j);
    }
    const Vec grad = H * x + c;
    for (int i = 0; i < n; ++i) rhs[i] = -grad[i];
    for (int a = 0; a < k; ++a) {
      for (int i = 0; i < n; ++i) {
        K(n + a, i) = rows[active[a]][i];
        K(i, n + a) = rows[active[a]][i];
      }
    }
    Eigen::VectorXd sol = K.fullPivLu().solve(rhs);
    Vec p(n);
    for (int i = 0; i < n; ++i) p[i] = sol[i];

    if (p.norm() <= kTol) {
      // Stationary on the active set; check multipliers.
      int drop = -1;
      double most_negative = -kTol;
      for (int a = 0; a < k; ++a) {
        const double lambda = sol[n + a];
        if (lambda < most_negative) {
          most_negative = lambda;
          drop = a;
        }
      }
      if (drop < 0) return {true, x};
      active.erase(active.begin() + drop);
      continue;
    }

    // Step to the nearest blocking inactive constraint.
    double alpha = 1.0;
    int block = -1;
    for (int i = 0; i < m; ++i) {
      if (std::find(active.begin(), active.end(), i) != active.end()) continue;
      const double advance = rows[i].dot(p);
      if (advance > kTol) {
        const double room = (b[i] - rows[i].dot(x)) / advance;
        if (room < alpha - 1e-15) {
          alpha = room;
          block = i;
        }
      }
    }
    if (alpha < 0.0) alpha = 0.0;
    x += alpha * p;
    if (block >= 0) active.push_back(block);
  }
  return {false, x};
}

}  // namespace stclf
