#pragma once

#include <optional>
#include <vector>

#include "stclf/lyapunov.hpp"
#include "stclf/system.hpp"
#include "stclf/types.hpp"

namespace stclf {

enum class DecayTag { Full, Relaxed };

// Scalarized decay condition at one state:
//   phi(u) = beta0 + sum_i beta[i] * u[i] <= 0
// with beta0 = <gradV, f> + decay and beta[i] = <gradV, g_i>.
struct BetaVector {
  double beta0 = 0.0;
  Vec beta;
  DecayTag tag = DecayTag::Relaxed;
};

BetaVector beta(const ControlAffineSystem& sys, const LyapunovPackage& lyap,
                DecayTag tag, const Vec& x);

double phi(const BetaVector& bv, const Vec& u);

// Halfspace a0 + a'u <= 0 in input space.
struct Halfspace {
  double a0 = 0.0;
  Vec a;
};

// Input box plus a list of halfspaces; the admissible-control set.
struct AdmissiblePolytope {
  InputBox box;
  std::vector<Halfspace> halfspaces;

  bool contains(const Vec& u, double tol = kFeasTol) const;
};

// Admissible set that is robust to any state within distance eps of the
// measurement: every sign realization of the Lipschitz interval
// [beta_i -+ L_i eps] must satisfy the decay condition, which yields
// 2^(m+1) halfspaces.  With eps = 0 this collapses to the nominal one.
AdmissiblePolytope robust_polytope(const BetaVector& bv, const Vec& L,
                                   double eps, const InputBox& box);

struct FeasibilityResult {
  bool nonempty = false;
  Vec witness;
};

// Exact feasibility: closed-form interval intersection for one input,
// phase-one simplex otherwise.
FeasibilityResult is_nonempty(const AdmissiblePolytope& poly);

enum class Strategy { Midpoint, Chebyshev, MinCost };

// Pick one admissible input.  Midpoint is the 1-D rule; Chebyshev picks the
// center of the largest inscribed ball (ties broken by minimum norm);
// MinCost minimizes (1/2) u'R u over the polytope.
Vec select_control(const AdmissiblePolytope& poly, Strategy strategy,
                   const Mat* cost = nullptr);

}  // namespace stclf
