#include "stclf/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace stclf {

namespace {

constexpr double kTimeTol = 1e-15;

std::string join_events(const std::vector<std::string>& ev) {
  std::string out;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    if (i) out += '|';
    out += ev[i];
  }
  return out;
}

// Shrink the working set to the current measurement distance (monotonically)
// and re-estimate the Lipschitz constants on the smaller padded region.  The
// speed bounds and the rate gap keep their original, more conservative
// values.
void refresh_context(const ControlAffineSystem& sys, const LyapunovPackage& lyap, double eps,
                     double d_meas, BoundsContext* ctx) {
  const double Rhat_new = d_meas + 2.0 * eps;
  if (Rhat_new >= ctx->ws.Rhat - kTimeTol) return;
  WorkingSet ws = working_set(sys, lyap, d_meas, eps, ctx->grid, ctx->ws.vhat_exact);
  ws.Vhat = std::min(ctx->ws.Vhat, ws.Vhat);
  ws.Rhat_star = lyap.alpha1.inverse(ws.Vhat);
  ctx->ws = ws;
  ctx->region = make_regions(sys, lyap, ws, ctx->grid.pad);
  ctx->L = lipschitz_constants(sys, lyap, ctx->region, ctx->grid);
}

}  // namespace

const char* to_string(NoiseTag tag) {
  switch (tag) {
    case NoiseTag::UniformBall:
      return "uniform-ball";
    case NoiseTag::SphereSurface:
      return "sphere-surface";
    case NoiseTag::AdversarialRadial:
      return "adversarial-radial";
  }
  return "unknown";
}

const char* to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::Midpoint:
      return "midpoint";
    case Strategy::Chebyshev:
      return "chebyshev";
    case Strategy::MinCost:
      return "mincost";
  }
  return "unknown";
}

Vec measure(const Vec& x_true, const Vec& xstar, double eps, NoiseTag noise, Rng& rng) {
  const int n = static_cast<int>(x_true.size());
  if (eps == 0.0) return x_true;
  switch (noise) {
    case NoiseTag::UniformBall:
      return x_true + eps * rng.ball(n);
    case NoiseTag::SphereSurface:
      return x_true + eps * rng.sphere(n);
    case NoiseTag::AdversarialRadial: {
      const Vec d = x_true - xstar;
      const double nm = d.norm();
      Vec dir = Vec::Zero(n);
      if (nm < 1e-12) {
        dir[0] = 1.0;
      } else {
        dir = d / nm;
      }
      return x_true + eps * dir;
    }
  }
  throw ConfigError("unknown noise model");
}

Vec integrate_step(const ControlAffineSystem& sys, const Vec& x, const Vec& u, double h) {
  const Vec k1 = sys.xdot(x, u);
  const Vec k2 = sys.xdot(x + 0.5 * h * k1, u);
  const Vec k3 = sys.xdot(x + 0.5 * h * k2, u);
  const Vec k4 = sys.xdot(x + h * k3, u);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

SimResult run_closed_loop(const ControlAffineSystem& sys, const LyapunovPackage& lyap,
                          const BoundsContext& ctx_in, const BallGeometry& geom,
                          const Vec& x0_measured, const SimConfig& cfg) {
  if (static_cast<int>(x0_measured.size()) != sys.n) {
    throw ConfigError("initial state dimension does not match the system");
  }
  if (!(cfg.h > 0.0)) throw ConfigError("integration step must be positive");
  if (!(cfg.T >= 0.0)) throw ConfigError("horizon must be nonnegative");
  if (cfg.eps < 0.0) throw ConfigError("sensor accuracy must be nonnegative");
  if (cfg.strategy == Strategy::MinCost && !cfg.cost) {
    throw ConfigError("minimum-cost selection needs a cost matrix");
  }
  if (cfg.trace_stride < 1) throw ConfigError("trace stride must be at least 1");

  BoundsContext ctx = ctx_in;
  Rng rng(cfg.seed);
  const Mat* costp = cfg.cost ? &*cfg.cost : nullptr;

  SimResult res;
  SimSummary& sum = res.summary;
  sum.h = cfg.h;
  sum.eps = cfg.eps;
  sum.seed = cfg.seed;
  sum.noise = to_string(cfg.noise);
  sum.strategy = to_string(cfg.strategy);

  // The configured initial condition is the first measurement; the true
  // state starts somewhere inside its accuracy ball.
  Vec x_true = measure(x0_measured, lyap.xstar, cfg.eps, cfg.noise, rng);
  Vec xhat = x0_measured;

  double t = 0.0;
  bool first_cycle = true;
  bool prev_in_core = false;
  bool entered = false;
  double maxd_after = 0.0;
  double dwell_sum = 0.0;
  double dwell_min = std::numeric_limits<double>::infinity();
  int dwell_n = 0;
  long substep_counter = 0;

  {
    const double d0 = (x_true - lyap.xstar).norm();
    if (d0 <= geom.r) {
      entered = true;
      sum.entry_time = 0.0;
      maxd_after = d0;
    }
  }

  auto push_row = [&](double tt, const Vec& x_model, const Vec& u, double ebar, double dlt,
                      const std::string& ev, bool force) {
    if (!force && cfg.trace_stride > 1 && (substep_counter % cfg.trace_stride) != 0) return;
    if (!res.trace.empty() && res.trace.back().t == tt) {
      // A measurement (or failure) lands exactly where the previous dwell
      // interval ended; fold it into that record so times stay strictly
      // increasing.
      TraceRecord& b = res.trace.back();
      b.x_model = x_model;
      b.u = u;
      b.V_model = lyap.V(x_model);
      b.eps_bar = ebar;
      b.delta = dlt;
      if (!ev.empty()) b.event = b.event.empty() ? ev : b.event + "|" + ev;
      return;
    }
    TraceRecord r;
    r.t = tt;
    r.x_true = x_true;
    r.x_model = x_model;
    r.u = u;
    r.V_true = lyap.V(x_true);
    r.V_model = lyap.V(x_model);
    r.eps_bar = ebar;
    r.delta = dlt;
    r.event = ev;
    res.trace.push_back(std::move(r));
  };

  for (;;) {
    std::vector<std::string> ev;
    if (first_cycle) {
      if (entered) ev.push_back("target-ball-entry");
    } else {
      xhat = measure(x_true, lyap.xstar, cfg.eps, cfg.noise, rng);
    }
    ev.insert(ev.begin(), "measurement");
    ++sum.measurements;

    const double d_meas = (xhat - lyap.xstar).norm();
    if (d_meas > ctx.ws.Rhat + kFeasTol) {
      ++sum.region_exit_count;
      ev.push_back("warning:measurement-outside-working-set");
    }

    const bool in_core = d_meas <= geom.r_star;
    if (first_cycle) {
      if (in_core) ev.push_back("core-ball-entry");
    } else {
      if (in_core && !prev_in_core) ev.push_back("core-ball-entry");
      if (!in_core && prev_in_core) ev.push_back("core-ball-exit");
    }
    prev_in_core = in_core;
    first_cycle = false;

    double ebar = std::numeric_limits<double>::quiet_NaN();
    double delta = 0.0;
    Vec u_hold = Vec::Zero(sys.m);
    try {
      if (in_core) {
        ++sum.core_dwell_count;
        delta = delta_k(ctx, geom, cfg.eps, 0.0, true);
      } else {
        if (cfg.level_set_refresh) refresh_context(sys, lyap, cfg.eps, d_meas, &ctx);
        const EpsBarBreakdown bd = eps_bar_at(sys, lyap, ctx, xhat);
        ebar = bd.eps_bar;
        delta = delta_k(ctx, geom, cfg.eps, ebar, false);
        // The hold input is certified against the full admissible error; the
        // radius backs off infinitesimally because the supremum itself is the
        // degenerate boundary case.
        const BetaVector bv = beta(sys, lyap, DecayTag::Relaxed, xhat);
        const AdmissiblePolytope poly =
            robust_polytope(bv, ctx.L, (1.0 - 1e-9) * ebar, sys.input_box);
        bool selected = false;
        if (is_nonempty(poly).nonempty) {
          try {
            u_hold = select_control(poly, cfg.strategy, costp);
            selected = true;
          } catch (const EmptyPolytopeError&) {
          }
        }
        if (!selected) {
          const AdmissiblePolytope fallback =
              robust_polytope(bv, ctx.L, 2.0 * cfg.eps, sys.input_box);
          if (!is_nonempty(fallback).nonempty) {
            throw EmptyPolytopeError("robust admissible set is empty at a measurement");
          }
          u_hold = select_control(fallback, cfg.strategy, costp);
          ++sum.fallback_count;
          ev.push_back("warning:witness-radius-fallback");
        }
      }
    } catch (const NoBoundExistsError& e) {
      sum.failure = "no-bound-exists";
      sum.warnings.push_back(e.what());
      ev.push_back("failure:no-bound-exists");
    } catch (const NonPositiveDwellError& e) {
      sum.failure = "non-positive-dwell";
      sum.warnings.push_back(e.what());
      ev.push_back("failure:non-positive-dwell");
    } catch (const EmptyPolytopeError& e) {
      sum.failure = "empty-polytope";
      sum.warnings.push_back(e.what());
      ev.push_back("failure:empty-polytope");
    }
    if (!sum.failure.empty()) {
      push_row(t, xhat, u_hold, ebar, delta, join_events(ev), true);
      break;
    }

    const double t_end = std::min(t + delta, cfg.T);
    const bool truncated = t + delta > cfg.T;
    const double elapsed = t_end - t;
    Vec x_model = xhat;
    const Vec x_true_start = x_true;

    push_row(t, x_model, u_hold, ebar, delta, join_events(ev), true);

    double remaining = elapsed;
    while (remaining > kTimeTol) {
      const double hs = std::min(cfg.h, remaining);
      std::vector<std::string> sev;
      Vec u = u_hold;
      if (!in_core) {
        // Re-select at the model state: the true state is certified to stay
        // within twice the sensor accuracy of it over one dwell.
        const BetaVector bvm = beta(sys, lyap, DecayTag::Relaxed, x_model);
        const AdmissiblePolytope p = robust_polytope(bvm, ctx.L, 2.0 * cfg.eps, sys.input_box);
        bool reselected = false;
        if (is_nonempty(p).nonempty) {
          try {
            u = select_control(p, cfg.strategy, costp);
            reselected = true;
          } catch (const EmptyPolytopeError&) {
          }
        }
        if (!reselected) {
          ++sum.fallback_count;
          sev.push_back("warning:hold-fallback");
        }
      }

      const Vec x_prev = x_true;
      const double V_before = lyap.V(x_true);
      x_true = integrate_step(sys, x_true, u, hs);
      x_model = integrate_step(sys, x_model, u, hs);
      remaining -= hs;
      const double tt = remaining <= kTimeTol ? t_end : t_end - remaining;

      if (!in_core) {
        const double V_after = lyap.V(x_true);
        const double drop = V_before - V_after;
        const double required = lyap.wt(x_prev) * hs - cfg.decay_band_C * hs * hs;
        if (drop < required) {
          ++sum.decay_band_violations;
          sev.push_back("failure:decay-band");
        }
        if (V_after > ctx.ws.Vhat + kFeasTol) {
          ++sum.level_set_violations;
          sev.push_back("failure:level-set");
        }
      }

      const double d_true = (x_true - lyap.xstar).norm();
      if (!entered) {
        if (d_true <= geom.r) {
          entered = true;
          sum.entry_time = tt;
          maxd_after = d_true;
          sev.push_back("target-ball-entry");
        }
      } else {
        if (d_true > geom.r + 1e-6) {
          ++sum.violations;
          sev.push_back("failure:target-exit");
        }
        maxd_after = std::max(maxd_after, d_true);
      }

      ++substep_counter;
      const bool final_row = truncated && remaining <= kTimeTol;
      push_row(tt, x_model, u, ebar, delta, join_events(sev), !sev.empty() || final_row);
    }
    t = t_end;

    const double disp = (x_true - x_true_start).norm();
    const double dbound = displacement_bound(in_core ? ctx.Fbar0 : ctx.Fbar, elapsed) + 1e-9;
    if (disp > dbound) ++sum.displacement_violations;
    if (!in_core && !truncated) {
      if ((x_true - x_model).norm() > ebar - cfg.eps + 1e-9) ++sum.consistency_violations;
    }
    if (!truncated) {
      ++dwell_n;
      dwell_sum += delta;
      dwell_min = std::min(dwell_min, delta);
    }
    if (truncated || t >= cfg.T - kTimeTol) break;
  }

  sum.final_dist = (x_true - lyap.xstar).norm();
  sum.horizon = t;
  sum.max_dist_after_entry =
      entered ? maxd_after : std::numeric_limits<double>::quiet_NaN();
  sum.min_dwell = dwell_n > 0 ? dwell_min : std::numeric_limits<double>::quiet_NaN();
  sum.mean_dwell = dwell_n > 0 ? dwell_sum / dwell_n : std::numeric_limits<double>::quiet_NaN();
  sum.contained = entered && sum.violations == 0;

  if (dwell_n > 0 && cfg.h > dwell_min / 10.0) {
    std::ostringstream os;
    os << "integration step " << cfg.h << " exceeds one tenth of the smallest dwell "
       << dwell_min;
    sum.warnings.push_back(os.str());
  }
  if (sum.region_exit_count > 0) {
    std::ostringstream os;
    os << "measured state left the working set " << sum.region_exit_count << " time(s)";
    sum.warnings.push_back(os.str());
  }
  if (sum.fallback_count > 0) {
    std::ostringstream os;
    os << "control selection fell back to the held input " << sum.fallback_count << " time(s)";
    sum.warnings.push_back(os.str());
  }
  return res;
}

}  // namespace stclf
