#include "stclf/decay.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "stclf/lp.hpp"
#include "stclf/qp.hpp"

namespace stclf {

BetaVector beta(const ControlAffineSystem& sys, const LyapunovPackage& lyap,
                DecayTag tag, const Vec& x) {
  const Vec grad = lyap.gradV(x);
  const Vec fx = sys.f(x);
  const Mat gx = sys.g(x);
  BetaVector bv;
  bv.tag = tag;
  const double decay = (tag == DecayTag::Full) ? lyap.w(x) : lyap.wt(x);
  bv.beta0 = grad.dot(fx) + decay;
  bv.beta = gx.transpose() * grad;
  if (!std::isfinite(bv.beta0) || !bv.beta.allFinite()) {
    std::ostringstream os;
    os << "decay coefficients are non-finite at state [" << x.transpose() << "]";
    throw EvaluatorError(os.str());
  }
  return bv;
}

double phi(const BetaVector& bv, const Vec& u) {
  if (u.size() != bv.beta.size()) {
    throw EvaluatorError("input dimension does not match decay coefficients");
  }
  return bv.beta0 + bv.beta.dot(u);
}

bool AdmissiblePolytope::contains(const Vec& u, double tol) const {
  if (!box.contains(u, tol)) return false;
  for (const Halfspace& h : halfspaces) {
    if (h.a0 + h.a.dot(u) > tol) return false;
  }
  return true;
}

AdmissiblePolytope robust_polytope(const BetaVector& bv, const Vec& L,
                                   double eps, const InputBox& box) {
  if (eps < 0.0) throw ConfigError("negative measurement radius");
  const int m = static_cast<int>(bv.beta.size());
  if (L.size() != m + 1) throw ConfigError("need one Lipschitz constant per coefficient");
  AdmissiblePolytope poly;
  poly.box = box;
  if (eps == 0.0) {
    Halfspace h;
    h.a0 = bv.beta0;
    h.a = bv.beta;
    poly.halfspaces.push_back(h);
    return poly;
  }
  const unsigned count = 1u << (m + 1);
  poly.halfspaces.reserve(count);
  for (unsigned mask = 0; mask < count; ++mask) {
    Halfspace h;
    h.a0 = bv.beta0 + ((mask & 1u) ? L[0] * eps : -L[0] * eps);
    h.a.resize(m);
    for (int i = 0; i < m; ++i) {
      const double delta = ((mask >> (i + 1)) & 1u) ? L[i + 1] * eps : -L[i + 1] * eps;
      h.a[i] = bv.beta[i] + delta;
    }
    poly.halfspaces.push_back(h);
  }
  return poly;
}

namespace {

// Closed-form feasibility for a single input: intersect the box interval
// with every halfspace a0 + a*u <= 0.
bool interval_feasible(const AdmissiblePolytope& poly, double* lo_out, double* hi_out) {
  double lo = poly.box.lo[0];
  double hi = poly.box.hi[0];
  for (const Halfspace& h : poly.halfspaces) {
    const double a = h.a[0];
    if (a > 0.0) {
      hi = std::min(hi, -h.a0 / a);
    } else if (a < 0.0) {
      lo = std::max(lo, -h.a0 / a);
    } else if (h.a0 > 0.0) {
      return false;
    }
  }
  *lo_out = lo;
  *hi_out = hi;
  return lo <= hi;
}

// Constraint rows (A, b) with A u <= b for all halfspaces and box faces.
void gather_rows(const AdmissiblePolytope& poly, std::vector<Vec>* rows, std::vector<double>* rhs) {
  const int m = poly.box.dim();
  for (const Halfspace& h : poly.halfspaces) {
    rows->push_back(h.a);
    rhs->push_back(-h.a0);
  }
  for (int i = 0; i < m; ++i) {
    Vec e = Vec::Zero(m);
    e[i] = 1.0;
    rows->push_back(e);
    rhs->push_back(poly.box.hi[i]);
    rows->push_back(-e);
    rhs->push_back(-poly.box.lo[i]);
  }
}

// Chebyshev-center LP: maximize rho subject to a'u + |a| rho <= b over all
// rows.  Returns the optimal (u, rho); rho < 0 means empty.
bool chebyshev(const AdmissiblePolytope& poly, Vec* center, double* radius) {
  const int m = poly.box.dim();
  std::vector<Vec> rows;
  std::vector<double> rhs;
  gather_rows(poly, &rows, &rhs);

  std::vector<Vec> lp_rows;
  DynVec lp_b(static_cast<int>(rows.size()) + 1);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Vec r(m + 1);
    r.head(m) = rows[i];
    r[m] = rows[i].norm();
    lp_rows.push_back(r);
    lp_b[static_cast<int>(i)] = rhs[i];
  }
  // rho >= 0 so that an empty polytope reports as infeasible rather than a
  // negative inscribed radius.
  Vec r = Vec::Zero(m + 1);
  r[m] = -1.0;
  lp_rows.push_back(r);
  lp_b[static_cast<int>(rows.size())] = 0.0;

  Vec c = Vec::Zero(m + 1);
  c[m] = -1.0;
  const LpResult res = solve_lp(c, lp_rows, lp_b);
  if (res.status != LpResult::Status::Optimal) return false;
  *center = res.x.head(m);
  *radius = res.x[m];
  return true;
}

}  // namespace

FeasibilityResult is_nonempty(const AdmissiblePolytope& poly) {
  const int m = poly.box.dim();
  if (m == 1) {
    double lo, hi;
    if (!interval_feasible(poly, &lo, &hi)) return {false, Vec()};
    Vec u(1);
    u[0] = 0.5 * (lo + hi);
    return {true, u};
  }
  const Vec mid = poly.box.center();
  if (poly.contains(mid, 0.0)) return {true, mid};
  Vec center;
  double radius;
  if (!chebyshev(poly, &center, &radius)) return {false, Vec()};
  if (!poly.contains(center, kFeasTol)) return {false, Vec()};
  return {true, center};
}

Vec select_control(const AdmissiblePolytope& poly, Strategy strategy, const Mat* cost) {
  const int m = poly.box.dim();

  if (strategy == Strategy::Midpoint || (strategy == Strategy::Chebyshev && m == 1)) {
    if (m != 1) throw ConfigError("midpoint selection is defined for one input only");
    double lo, hi;
    if (!interval_feasible(poly, &lo, &hi)) {
      throw EmptyPolytopeError("admissible-control interval is empty");
    }
    Vec u(1);
    u[0] = 0.5 * (lo + hi);
    return u;
  }

  std::vector<Vec> rows;
  std::vector<double> rhs_v;
  gather_rows(poly, &rows, &rhs_v);
  DynVec rhs(static_cast<int>(rhs_v.size()));
  for (std::size_t i = 0; i < rhs_v.size(); ++i) rhs[static_cast<int>(i)] = rhs_v[i];

  if (strategy == Strategy::Chebyshev) {
    Vec center;
    double radius;
    if (!chebyshev(poly, &center, &radius) || radius < -kFeasTol) {
      throw EmptyPolytopeError("admissible-control polytope is empty");
    }
    // The center of the largest inscribed ball may be non-unique (the optimal
    // face of the LP); resolve ties by minimum Euclidean norm at that radius.
    std::vector<Vec> q_rows = rows;
    DynVec q_rhs = rhs;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      q_rhs[static_cast<int>(i)] -= rows[i].norm() * radius;
    }
    const Mat H = Mat::Identity(m, m);
    const Vec c = Vec::Zero(m);
    const QpResult qr = solve_qp(H, c, q_rows, q_rhs, center);
    return qr.ok ? qr.x : center;
  }

  if (strategy == Strategy::MinCost) {
    if (cost == nullptr) throw ConfigError("minimum-cost selection needs a cost matrix");
    const FeasibilityResult feas = is_nonempty(poly);
    if (!feas.nonempty) {
      throw EmptyPolytopeError("admissible-control polytope is empty");
    }
    const Vec c = Vec::Zero(m);
    const QpResult qr = solve_qp(*cost, c, rows, rhs, feas.witness);
    if (!qr.ok) throw EmptyPolytopeError("cost minimization failed to converge");
    return qr.x;
  }

  throw ConfigError("unknown control-selection strategy");
}

}  // namespace stclf
