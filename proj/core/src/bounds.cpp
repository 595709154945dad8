#include "stclf/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace stclf {

namespace {

constexpr double kRegionTol = 1e-12;

std::vector<double> axis_points(double lo, double hi, int count) {
  std::vector<double> pts(static_cast<std::size_t>(count));
  if (count == 1) {
    pts[0] = 0.5 * (lo + hi);
    return pts;
  }
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (int k = 0; k < count; ++k) pts[static_cast<std::size_t>(k)] = lo + k * step;
  pts.back() = hi;
  return pts;
}

StateBox intersect_ball_box(const Vec& center, double radius, const Vec& lo, const Vec& hi) {
  StateBox box;
  const int n = static_cast<int>(center.size());
  box.lo = Vec(n);
  box.hi = Vec(n);
  for (int j = 0; j < n; ++j) {
    box.lo[j] = std::max(center[j] - radius, lo[j]);
    box.hi[j] = std::min(center[j] + radius, hi[j]);
    if (box.lo[j] > box.hi[j]) {
      std::ostringstream os;
      os << "region is empty along coordinate " << j << " (lo " << box.lo[j] << " > hi "
         << box.hi[j] << ")";
      throw GeometryInfeasibleError(os.str());
    }
  }
  return box;
}

}  // namespace

void for_each_grid_point(const StateBox& box, int points_per_axis,
                         const std::function<void(const Vec&)>& fn) {
  if (points_per_axis < 1) throw ConfigError("grid needs at least one point per axis");
  const int n = box.dim();
  std::vector<std::vector<double>> axes;
  axes.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) axes.push_back(axis_points(box.lo[j], box.hi[j], points_per_axis));

  Vec x(n);
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  for (;;) {
    for (int j = 0; j < n; ++j) x[j] = axes[static_cast<std::size_t>(j)][static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])];
    fn(x);
    int j = n - 1;
    while (j >= 0) {
      if (++idx[static_cast<std::size_t>(j)] < points_per_axis) break;
      idx[static_cast<std::size_t>(j)] = 0;
      --j;
    }
    if (j < 0) break;
  }
}

bool RegionSpec::in_omega(const Vec& x) const {
  return omega_box.contains(x, kRegionTol) && (x - xstar).norm() <= Rhat + kRegionTol;
}

bool RegionSpec::in_omega_plus(const Vec& x) const {
  return omega_plus_box.contains(x, kRegionTol) && (x - xstar).norm() <= Rhat + pad + kRegionTol;
}

bool RegionSpec::in_level_region(const LyapunovPackage& lyap, const Vec& x) const {
  return level_box.contains(x, kRegionTol) && (x - xstar).norm() <= Rhat_star + kRegionTol &&
         lyap.V(x) <= Vhat + kRegionTol;
}

WorkingSet working_set(const ControlAffineSystem& sys, const LyapunovPackage& lyap,
                       double max_init_dist, double eps, const GridSpec& grid,
                       bool alpha2_tight) {
  if (max_init_dist < 0.0) throw ConfigError("initial measurement distance must be nonnegative");
  if (eps < 0.0) throw ConfigError("sensor accuracy must be nonnegative");

  WorkingSet ws;
  ws.Rhat = max_init_dist + 2.0 * eps;

  bool ball_in_domain = true;
  for (int j = 0; j < sys.n; ++j) {
    if (lyap.xstar[j] - ws.Rhat < sys.domain.lo[j] - kRegionTol ||
        lyap.xstar[j] + ws.Rhat > sys.domain.hi[j] + kRegionTol) {
      ball_in_domain = false;
      break;
    }
  }

  if (alpha2_tight && ball_in_domain) {
    ws.Vhat = lyap.alpha2.value(ws.Rhat);
    ws.vhat_exact = true;
  } else {
    const StateBox omega =
        intersect_ball_box(lyap.xstar, ws.Rhat, sys.domain.lo, sys.domain.hi);
    double vmax = -std::numeric_limits<double>::infinity();
    for_each_grid_point(omega, grid.vhat_points, [&](const Vec& x) {
      if ((x - lyap.xstar).norm() <= ws.Rhat + kRegionTol) vmax = std::max(vmax, lyap.V(x));
    });
    if (!std::isfinite(vmax)) throw GeometryInfeasibleError("level estimation grid is empty");
    ws.Vhat = 1.01 * vmax;
    ws.vhat_exact = false;
  }

  ws.Rhat_star = lyap.alpha1.inverse(ws.Vhat);
  return ws;
}

RegionSpec make_regions(const ControlAffineSystem& sys, const LyapunovPackage& lyap,
                        const WorkingSet& ws, double pad) {
  if (pad <= 0.0) throw ConfigError("region pad must be positive");

  RegionSpec region;
  region.xstar = lyap.xstar;
  region.Rhat = ws.Rhat;
  region.Rhat_star = ws.Rhat_star;
  region.Vhat = ws.Vhat;
  region.pad = pad;

  region.omega_box = intersect_ball_box(lyap.xstar, ws.Rhat, sys.domain.lo, sys.domain.hi);

  // Padded box: grow the domain by pad, but keep strictly positive axes away
  // from zero so functions with singularities on the axis stay evaluable.
  const int n = sys.n;
  Vec lo_pad(n), hi_pad(n);
  for (int j = 0; j < n; ++j) {
    double lo = sys.domain.lo[j] - pad;
    if (sys.domain.lo[j] > 0.0) lo = std::max(lo, 0.05);
    lo_pad[j] = lo;
    hi_pad[j] = sys.domain.hi[j] + pad;
  }
  region.omega_plus_box = intersect_ball_box(lyap.xstar, ws.Rhat + pad, lo_pad, hi_pad);

  region.level_box = intersect_ball_box(lyap.xstar, ws.Rhat_star, sys.domain.lo, sys.domain.hi);
  return region;
}

Vec lipschitz_constants(const ControlAffineSystem& sys, const LyapunovPackage& lyap,
                        const RegionSpec& region, const GridSpec& grid) {
  const int n = sys.n;
  const int m = sys.m;
  Vec sup_grad = Vec::Zero(m + 1);
  bool any = false;

  Vec grad_sq(m + 1);
  for_each_grid_point(region.omega_plus_box, grid.L_points, [&](const Vec& x) {
    if (!((x - region.xstar).norm() <= region.Rhat + region.pad + kRegionTol)) return;
    any = true;
    grad_sq.setZero();
    Vec xp = x, xm = x;
    for (int j = 0; j < n; ++j) {
      const double h = 1e-5 * std::max(1.0, std::abs(x[j]));
      xp[j] = x[j] + h;
      xm[j] = x[j] - h;
      const BetaVector bp = beta(sys, lyap, DecayTag::Relaxed, xp);
      const BetaVector bm = beta(sys, lyap, DecayTag::Relaxed, xm);
      const double inv = 1.0 / (2.0 * h);
      double d0 = (bp.beta0 - bm.beta0) * inv;
      grad_sq[0] += d0 * d0;
      for (int i = 0; i < m; ++i) {
        const double di = (bp.beta[i] - bm.beta[i]) * inv;
        grad_sq[i + 1] += di * di;
      }
      xp[j] = x[j];
      xm[j] = x[j];
    }
    for (int k = 0; k <= m; ++k) sup_grad[k] = std::max(sup_grad[k], grad_sq[k]);
  });

  if (!any) throw GeometryInfeasibleError("Lipschitz estimation grid is empty");
  Vec L(m + 1);
  for (int k = 0; k <= m; ++k) L[k] = grid.safety_factor * std::sqrt(sup_grad[k]);
  return L;
}

SupDynamics sup_dynamics(const ControlAffineSystem& sys, const LyapunovPackage& lyap,
                         const RegionSpec& region, const GridSpec& grid) {
  SupDynamics out;
  double max_full = 0.0;
  double max_drift = 0.0;
  bool any = false;
  const unsigned vertex_count = 1u << static_cast<unsigned>(sys.m);

  for_each_grid_point(region.level_box, grid.F_points, [&](const Vec& x) {
    if (!region.in_level_region(lyap, x)) return;
    any = true;
    const Vec fx = sys.f(x);
    const Mat gx = sys.g(x);
    max_drift = std::max(max_drift, fx.norm());
    for (unsigned mask = 0; mask < vertex_count; ++mask) {
      const Vec u = sys.input_box.vertex(mask);
      max_full = std::max(max_full, (fx + gx * u).norm());
    }
  });

  if (!any) throw GeometryInfeasibleError("dynamics estimation grid is empty");
  out.Fbar = grid.safety_factor * max_full;
  out.Fbar0 = grid.safety_factor * max_drift;
  return out;
}

double eps_min(double wbar, const Vec& L, const InputBox& box) {
  if (!(wbar > 0.0)) throw GeometryInfeasibleError("rate gap must be positive");
  double denom = L[0];
  for (int i = 0; i < box.dim(); ++i) denom += L[i + 1] * box.max_magnitude(i);
  if (!(denom > 0.0)) throw ConfigError("Lipschitz constants must not all vanish");
  return 0.5 * wbar / denom;
}

BoundsContext prepare_bounds(const ControlAffineSystem& sys, const LyapunovPackage& lyap,
                             double max_init_dist, double eps, double r_star,
                             const GridSpec& grid, bool alpha2_tight) {
  BoundsContext ctx;
  ctx.grid = grid;
  ctx.ws = working_set(sys, lyap, max_init_dist, eps, grid, alpha2_tight);
  ctx.region = make_regions(sys, lyap, ctx.ws, grid.pad);
  ctx.L = lipschitz_constants(sys, lyap, ctx.region, grid);

  double gap = std::numeric_limits<double>::infinity();
  for_each_grid_point(ctx.region.level_box, grid.wbar_points, [&](const Vec& x) {
    if (!ctx.region.in_level_region(lyap, x)) return;
    if ((x - ctx.region.xstar).norm() < r_star) return;
    gap = std::min(gap, lyap.w(x) - lyap.wt(x));
  });
  if (!std::isfinite(gap)) {
    throw GeometryInfeasibleError("rate-gap grid is empty outside the core ball");
  }
  ctx.wbar = gap;

  const SupDynamics sd = sup_dynamics(sys, lyap, ctx.region, grid);
  ctx.Fbar = sd.Fbar;
  ctx.Fbar0 = sd.Fbar0;
  ctx.eps_min = eps_min(ctx.wbar, ctx.L, sys.input_box);
  return ctx;
}

EpsBarBreakdown eps_bar_at(const ControlAffineSystem& sys, const LyapunovPackage& lyap,
                           const BoundsContext& ctx, const Vec& xhat) {
  const BetaVector bv = beta(sys, lyap, DecayTag::Relaxed, xhat);
  return eps_bar(bv, ctx.L, sys.input_box, ctx.grid.pad);
}

FieldResult eps_bar_field(const ControlAffineSystem& sys, const LyapunovPackage& lyap,
                          const BoundsContext& ctx, double r_star, int points_per_axis) {
  const int npts = points_per_axis > 0 ? points_per_axis : ctx.grid.F_points;
  FieldResult out;
  out.min_eps_bar = std::numeric_limits<double>::infinity();
  out.min_eps_bar_raw = std::numeric_limits<double>::infinity();

  for_each_grid_point(ctx.region.omega_box, npts, [&](const Vec& x) {
    const double d = (x - ctx.region.xstar).norm();
    if (d > ctx.region.Rhat + kRegionTol) return;
    if (d < r_star) return;

    FieldPoint pt;
    pt.x = x;
    try {
      const EpsBarBreakdown bd = eps_bar_at(sys, lyap, ctx, x);
      pt.eps_bar = bd.eps_bar;
      pt.eps_bar_raw = bd.eps_bar_raw;
      pt.eps0 = bd.eps0;
      pt.eps1 = bd.eps1;
      pt.winning_subset = bd.winning_subset;
    } catch (const NoBoundExistsError& e) {
      std::ostringstream os;
      os << e.what() << " (grid state:";
      for (int j = 0; j < x.size(); ++j) os << ' ' << x[j];
      os << ')';
      throw NoBoundExistsError(os.str());
    }
    if (pt.eps_bar < out.min_eps_bar) out.min_eps_bar = pt.eps_bar;
    if (pt.eps_bar_raw < out.min_eps_bar_raw) {
      out.min_eps_bar_raw = pt.eps_bar_raw;
      out.argmin = x;
    }
    out.points.push_back(pt);
  });

  // An empty sweep (operating region fully inside the core ball) is reported
  // with an empty grid and unset minima rather than as an error.
  if (!std::isfinite(out.min_eps_bar_raw)) {
    out.min_eps_bar = std::numeric_limits<double>::quiet_NaN();
    out.min_eps_bar_raw = std::numeric_limits<double>::quiet_NaN();
    out.required_accuracy = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  out.required_accuracy = 0.5 * out.min_eps_bar_raw;
  return out;
}

}  // namespace stclf
