#include "stclf/epsbar.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <sstream>

namespace stclf {

std::vector<int> index_set(const BetaVector& bv, const InputBox& box) {
  std::vector<int> idx;
  for (int i = 0; i < bv.beta.size(); ++i) {
    const double bi = bv.beta[i];
    if (bi > kZeroTol) {
      if (bv.beta0 + bi * box.lo[i] <= 0.0) idx.push_back(i);
    } else if (bi < -kZeroTol) {
      if (bv.beta0 + bi * box.hi[i] <= 0.0) idx.push_back(i);
    }
  }
  return idx;
}

namespace {

// Saturating input for coordinate i: the box endpoint that pushes the decay
// condition down hardest given the sign of beta[i].
double saturating_input(double beta_i, const InputBox& box, int i) {
  return beta_i > 0.0 ? box.lo[i] : box.hi[i];
}

}  // namespace

EpsBarBreakdown eps_bar(const BetaVector& bv, const Vec& L, const InputBox& box,
                        std::optional<double> cap) {
  const int m = static_cast<int>(bv.beta.size());
  if (L.size() != m + 1) throw ConfigError("need one Lipschitz constant per coefficient");

  EpsBarBreakdown out;
  out.index_set = index_set(bv, box);

  const bool beta0_negative = bv.beta0 < -kZeroTol;
  if (beta0_negative) {
    if (!(L[0] > 0.0)) throw ConfigError("drift Lipschitz constant must be positive");
    out.eps0 = -bv.beta0 / L[0];
  }

  // Support set: inputs whose coefficient is distinguishable from zero.
  std::vector<int> support;
  for (int i = 0; i < m; ++i) {
    if (std::abs(bv.beta[i]) > kZeroTol) support.push_back(i);
  }

  // Candidate subsets of the support: the full support itself, plus every
  // nonempty subset containing at least one index-set member.  For each, the
  // bound is limited by (a) each used coefficient keeping its sign over the
  // interval, E_i = |beta_i|/L_i, and (b) the saturated combined condition
  // staying nonpositive, E0 = -(beta0 + sum beta_i u*_i)/(L0 + sum L_i |u*_i|).
  const std::size_t s = support.size();
  if (s > 0) {
    double best = 0.0;
    bool have_positive = false;
    for (std::size_t mask = 1; mask < (std::size_t{1} << s); ++mask) {
      std::vector<int> T;
      bool touches_index_set = false;
      for (std::size_t j = 0; j < s; ++j) {
        if ((mask >> j) & 1u) {
          T.push_back(support[j]);
          if (std::find(out.index_set.begin(), out.index_set.end(), support[j]) !=
              out.index_set.end()) {
            touches_index_set = true;
          }
        }
      }
      const bool is_full = (T.size() == s);
      if (!is_full && !touches_index_set) continue;

      EpsBarBreakdown::Candidate cand;
      cand.subset = T;
      double num = bv.beta0;
      double den = L[0];
      double min_Ei = std::numeric_limits<double>::infinity();
      for (int i : T) {
        if (!(L[i + 1] > 0.0)) throw ConfigError("Lipschitz constant must be positive for used inputs");
        min_Ei = std::min(min_Ei, std::abs(bv.beta[i]) / L[i + 1]);
        const double ui = saturating_input(bv.beta[i], box, i);
        num += bv.beta[i] * ui;
        den += L[i + 1] * std::abs(ui);
      }
      cand.min_Ei = min_Ei;
      cand.E0 = -num / den;
      cand.score = std::min(min_Ei, cand.E0);
      out.candidates.push_back(cand);
      if (cand.score > 0.0 && (!have_positive || cand.score > best)) {
        best = cand.score;
        have_positive = true;
        out.winning_subset = T;
      }
    }
    if (have_positive) out.eps1 = best;
  }

  double value = 0.0;
  if (!beta0_negative) {
    if (!out.eps1) {
      std::ostringstream os;
      os << "no positive admissible-error bound at this state (beta0 = " << bv.beta0
         << ", no input-assisted candidate is positive)";
      throw NoBoundExistsError(os.str());
    }
    value = *out.eps1;
  } else if (support.empty()) {
    value = *out.eps0;
  } else {
    value = out.eps1 ? std::max(*out.eps0, *out.eps1) : *out.eps0;
  }
  // winning_subset reports the argmax of the final bound: empty when the
  // drift-only term is the deciding one.
  if (out.eps0 && (!out.eps1 || *out.eps0 >= *out.eps1)) out.winning_subset.clear();

  out.eps_bar_raw = value;
  out.eps_bar = (cap && *cap < value) ? *cap : value;
  return out;
}

// --- Literal case evaluations -------------------------------------------
//
// The generic enumeration above is exercised against these straight-line
// transcriptions of the two- and three-input case analyses.  They are kept
// deliberately repetitive: every subset appears as its own expression.

namespace {

bool in_index_set(double beta0, double bi, const InputBox& box, int i) {
  if (bi > kZeroTol) return beta0 + bi * box.lo[i] <= 0.0;
  if (bi < -kZeroTol) return beta0 + bi * box.hi[i] <= 0.0;
  return false;
}

double combined_bound(double beta0, const Vec& beta, const Vec& L, const InputBox& box,
                      std::initializer_list<int> subset) {
  double num = beta0;
  double den = L[0];
  for (int i : subset) {
    const double ui = saturating_input(beta[i], box, i);
    num += beta[i] * ui;
    den += L[i + 1] * std::abs(ui);
  }
  return -num / den;
}

double finish(double beta0, double L0, bool any_support, double best_eps1, bool have_eps1) {
  const bool beta0_negative = beta0 < -kZeroTol;
  if (!beta0_negative) return have_eps1 ? best_eps1 : -1.0;
  const double eps0 = -beta0 / L0;
  if (!any_support) return eps0;
  return have_eps1 ? std::max(eps0, best_eps1) : eps0;
}

void consider(double score, double* best, bool* have) {
  if (score > 0.0 && (!*have || score > *best)) {
    *best = score;
    *have = true;
  }
}

}  // namespace

double eps_bar_two_inputs(double beta0, const Vec& beta, const Vec& L, const InputBox& box) {
  const bool s1 = std::abs(beta[0]) > kZeroTol;
  const bool s2 = std::abs(beta[1]) > kZeroTol;
  const bool i1 = in_index_set(beta0, beta[0], box, 0);
  const bool i2 = in_index_set(beta0, beta[1], box, 1);
  const double E1 = s1 ? std::abs(beta[0]) / L[1] : 0.0;
  const double E2 = s2 ? std::abs(beta[1]) / L[2] : 0.0;

  double best = 0.0;
  bool have = false;

  // Full support set.
  if (s1 && s2) {
    const double E012 = combined_bound(beta0, beta, L, box, {0, 1});
    consider(std::min({E1, E2, E012}), &best, &have);
  } else if (s1 && !s2) {
    const double E01 = combined_bound(beta0, beta, L, box, {0});
    consider(std::min(E1, E01), &best, &have);
  } else if (!s1 && s2) {
    const double E02 = combined_bound(beta0, beta, L, box, {1});
    consider(std::min(E2, E02), &best, &have);
  }

  // Proper singletons, admitted via the index set.
  if (s1 && s2 && i1) {
    const double E01 = combined_bound(beta0, beta, L, box, {0});
    consider(std::min(E1, E01), &best, &have);
  }
  if (s1 && s2 && i2) {
    const double E02 = combined_bound(beta0, beta, L, box, {1});
    consider(std::min(E2, E02), &best, &have);
  }

  return finish(beta0, L[0], s1 || s2, best, have);
}

double eps_bar_three_inputs(double beta0, const Vec& beta, const Vec& L, const InputBox& box) {
  const bool s1 = std::abs(beta[0]) > kZeroTol;
  const bool s2 = std::abs(beta[1]) > kZeroTol;
  const bool s3 = std::abs(beta[2]) > kZeroTol;
  const bool i1 = in_index_set(beta0, beta[0], box, 0);
  const bool i2 = in_index_set(beta0, beta[1], box, 1);
  const bool i3 = in_index_set(beta0, beta[2], box, 2);
  const double E1 = s1 ? std::abs(beta[0]) / L[1] : 0.0;
  const double E2 = s2 ? std::abs(beta[1]) / L[2] : 0.0;
  const double E3 = s3 ? std::abs(beta[2]) / L[3] : 0.0;
  const int support_count = (s1 ? 1 : 0) + (s2 ? 1 : 0) + (s3 ? 1 : 0);

  double best = 0.0;
  bool have = false;

  auto full = [&](std::initializer_list<int> T, double minE) {
    consider(std::min(minE, combined_bound(beta0, beta, L, box, T)), &best, &have);
  };

  // Full support set, by cardinality pattern.
  if (s1 && s2 && s3) full({0, 1, 2}, std::min({E1, E2, E3}));
  if (s1 && s2 && !s3) full({0, 1}, std::min(E1, E2));
  if (s1 && !s2 && s3) full({0, 2}, std::min(E1, E3));
  if (!s1 && s2 && s3) full({1, 2}, std::min(E2, E3));
  if (s1 && !s2 && !s3) full({0}, E1);
  if (!s1 && s2 && !s3) full({1}, E2);
  if (!s1 && !s2 && s3) full({2}, E3);

  // Proper subsets touching the index set.
  if (support_count > 1) {
    if (s1 && i1) full({0}, E1);
    if (s2 && i2) full({1}, E2);
    if (s3 && i3) full({2}, E3);
  }
  if (support_count == 3) {
    if (s1 && s2 && (i1 || i2)) full({0, 1}, std::min(E1, E2));
    if (s1 && s3 && (i1 || i3)) full({0, 2}, std::min(E1, E3));
    if (s2 && s3 && (i2 || i3)) full({1, 2}, std::min(E2, E3));
  }

  return finish(beta0, L[0], support_count > 0, best, have);
}

}  // namespace stclf
