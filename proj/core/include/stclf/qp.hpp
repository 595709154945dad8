#pragma once

#include <vector>

#include "stclf/types.hpp"

namespace stclf {

// Dense strictly convex quadratic program:
//
//   minimize    (1/2) x'H x + c'x      (H symmetric positive definite)
//   subject to  A x <= b
//
// solved by a primal active-set method starting from a supplied feasible
// point.  Deterministic: constraints are added/dropped by lowest index among
// candidates.  Sizes are tiny (<= a handful of variables).
struct QpResult {
  bool ok = false;
  Vec x;
};

QpResult solve_qp(const Mat& H, const Vec& c, const std::vector<Vec>& rows,
                  const DynVec& b, const Vec& x_feasible);

}  // namespace stclf
