#pragma once

#include <optional>
#include <vector>

#include "stclf/decay.hpp"
#include "stclf/system.hpp"
#include "stclf/types.hpp"

namespace stclf {

// Indices i whose input coordinate can, on its own, restore the decay
// condition at the measured state: the sign of beta[i] admits an input-box
// endpoint u with beta0 + beta[i] * u <= 0.  Coefficients within kZeroTol of
// zero are never members.  Indices are 0-based.
std::vector<int> index_set(const BetaVector& bv, const InputBox& box);

// Breakdown of the maximum admissible measurement error at one state.
struct EpsBarBreakdown {
  double eps_bar = 0.0;                   // reported bound (after the cap)
  double eps_bar_raw = 0.0;               // before the region cap
  std::optional<double> eps0;             // drift-only bound, when beta0 < 0
  std::optional<double> eps1;             // best input-assisted bound
  std::vector<int> index_set;             // 0-based
  std::vector<int> winning_subset;        // subset attaining eps1 (0-based)

  struct Candidate {
    std::vector<int> subset;
    double min_Ei = 0.0;   // min of |beta_i| / L_i over the subset
    double E0 = 0.0;       // combined drift bound with the subset's inputs saturated
    double score = 0.0;
  };
  std::vector<Candidate> candidates;
};

// Largest radius eps such that some single input in the box keeps the decay
// condition nonpositive for every coefficient realization within the
// Lipschitz intervals of radius eps around the measurement.  Evaluated in
// closed form by enumerating input-support subsets.  `cap`, when given,
// truncates the reported bound so certified balls stay inside the region the
// Lipschitz constants were estimated on (the raw value is kept alongside).
//
// Throws NoBoundExistsError when no positive bound exists (beta0 >= 0 and no
// input-assisted candidate is positive) — the decay hypothesis fails at this
// state.
EpsBarBreakdown eps_bar(const BetaVector& bv, const Vec& L, const InputBox& box,
                        std::optional<double> cap = std::nullopt);

// Literal two-input and three-input case evaluations, written out
// subset-by-subset.  Used to cross-check the generic enumeration; returns
// the raw (uncapped) bound, or a negative value when no bound exists.
double eps_bar_two_inputs(double beta0, const Vec& beta, const Vec& L, const InputBox& box);
double eps_bar_three_inputs(double beta0, const Vec& beta, const Vec& L, const InputBox& box);

}  // namespace stclf
