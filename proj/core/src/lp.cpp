#include "stclf/lp.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

namespace stclf {
namespace {

constexpr double kPivotTol = 1e-11;

// One simplex phase on an existing tableau.  `T` holds constraint rows with
// the right-hand side in the last column; `obj` is the (priced-out) reduced
// cost row with the negated objective value in its last entry.  Returns false
// when the problem is unbounded in the current phase.
bool run_phase(Eigen::MatrixXd& T, Eigen::RowVectorXd& obj,
               std::vector<int>& basis, const std::vector<bool>& allowed) {
  const int m = static_cast<int>(T.rows());
  const int ncols = static_cast<int>(T.cols()) - 1;
  for (int iter = 0; iter < 10000; ++iter) {
    // Bland's rule: lowest-index improving column.
    int enter = -1;
    for (int j = 0; j < ncols; ++j) {
      if (allowed[j] && obj[j] < -kPivotTol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) return true;  // optimal

    int leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      if (T(i, enter) > kPivotTol) {
        const double ratio = T(i, ncols) / T(i, enter);
        if (ratio < best_ratio - kPivotTol ||
            (ratio < best_ratio + kPivotTol &&
             (leave < 0 || basis[i] < basis[leave]))) {
          best_ratio = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0) return false;  // unbounded direction

    // Pivot on (leave, enter).
    T.row(leave) /= T(leave, enter);
    for (int i = 0; i < m; ++i) {
      if (i != leave && std::abs(T(i, enter)) > 0.0) {
        T.row(i) -= T(i, enter) * T.row(leave);
      }
    }
    obj -= obj[enter] * T.row(leave);
    basis[leave] = enter;
  }
  return true;  // iteration cap; with Bland's rule this is unreachable
}

}  // namespace

LpResult solve_lp(const Vec& c, const std::vector<Vec>& rows,
                  const DynVec& b) {
  const int n = static_cast<int>(c.size());
  const int m = static_cast<int>(rows.size());

  // Free variables are split as x = xp - xn; every row gets a slack.  Rows
  // with negative right-hand side are negated, and those slacks then point
  // the wrong way, so such rows get an artificial basic variable instead.
  std::vector<int> art_col(m, -1);
  int n_art = 0;
  for (int i = 0; i < m; ++i) {
    if (b[i] < 0.0) ++n_art;
  }
  const int ncols = 2 * n + m + n_art;

  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, ncols + 1);
  std::vector<int> basis(m, -1);
  int next_art = 2 * n + m;
  for (int i = 0; i < m; ++i) {
    const double sgn = (b[i] < 0.0) ? -1.0 : 1.0;
    for (int j = 0; j < n; ++j) {
      T(i, j) = sgn * rows[i][j];
      T(i, n + j) = -sgn * rows[i][j];
    }
    T(i, 2 * n + i) = sgn;  // slack
    T(i, ncols) = sgn * b[i];
    if (sgn < 0.0) {
      art_col[i] = next_art++;
      T(i, art_col[i]) = 1.0;
      basis[i] = art_col[i];
    } else {
      basis[i] = 2 * n + i;
    }
  }

  std::vector<bool> allowed(ncols, true);

  if (n_art > 0) {
    // Phase 1: minimize the sum of artificials (priced out over their rows).
    Eigen::RowVectorXd obj = Eigen::RowVectorXd::Zero(ncols + 1);
    for (int i = 0; i < m; ++i) {
      if (art_col[i] >= 0) obj -= T.row(i);
    }
    for (int j = 2 * n + m; j < ncols; ++j) obj[j] = 0.0;
    run_phase(T, obj, basis, allowed);
    if (-obj[ncols] > 1e-8) {
      return {LpResult::Status::Infeasible, Vec(), 0.0};
    }
    // Pivot remaining artificials out of the basis where possible; rows that
    // cannot be pivoted are redundant and keep a zero-valued artificial.
    for (int i = 0; i < m; ++i) {
      if (basis[i] >= 2 * n + m) {
        for (int j = 0; j < 2 * n + m; ++j) {
          if (std::abs(T(i, j)) > kPivotTol) {
            T.row(i) /= T(i, j);
            for (int k = 0; k < m; ++k) {
              if (k != i) T.row(k) -= T(k, j) * T.row(i);
            }
            basis[i] = j;
            break;
          }
        }
      }
    }
    for (int j = 2 * n + m; j < ncols; ++j) allowed[j] = false;
  }

  // Phase 2 with the real objective.
  Eigen::RowVectorXd obj = Eigen::RowVectorXd::Zero(ncols + 1);
  for (int j = 0; j < n; ++j) {
    obj[j] = c[j];
    obj[n + j] = -c[j];
  }
  for (int i = 0; i < m; ++i) {
    if (basis[i] < ncols && std::abs(obj[basis[i]]) > 0.0) {
      obj -= obj[basis[i]] * T.row(i);
    }
  }
  if (!run_phase(T, obj, basis, allowed)) {
    return {LpResult::Status::Unbounded, Vec(), 0.0};
  }

  Vec x = Vec::Zero(n);
  for (int i = 0; i < m; ++i) {
    if (basis[i] < n) {
      x[basis[i]] += T(i, ncols);
    } else if (basis[i] < 2 * n) {
      x[basis[i] - n] -= T(i, ncols);
    }
  }
  return {LpResult::Status::Optimal, x, c.dot(x)};
}

}  // namespace stclf
