#pragma once

#include <vector>

#include "stclf/types.hpp"

namespace stclf {

// Dense linear program over free variables:
//
//   minimize    c'x
//   subject to  A x <= b
//
// solved by a two-phase tableau simplex.  Problem sizes in this library are
// tiny (a handful of variables, at most a few dozen rows), so no sparsity or
// factorization updates are attempted.  Bland's rule keeps pivoting
// deterministic and cycle-free.
struct LpResult {
  enum class Status { Optimal, Infeasible, Unbounded } status;
  Vec x;
  double objective = 0.0;
};

LpResult solve_lp(const Vec& c, const std::vector<Vec>& rows, const DynVec& b);

}  // namespace stclf
