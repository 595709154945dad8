#include "stclf/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "stclf/decay.hpp"
#include "stclf/rng.hpp"

namespace stclf {

namespace {

Vec vec1(double a) {
  Vec v(1);
  v[0] = a;
  return v;
}

Vec vec2(double a, double b) {
  Vec v(2);
  v[0] = a;
  v[1] = b;
  return v;
}

Vec vec3(double a, double b, double c) {
  Vec v(3);
  v[0] = a;
  v[1] = b;
  v[2] = c;
  return v;
}

std::string fmt_vec(const Vec& x) {
  std::ostringstream os;
  os << '[';
  for (int i = 0; i < x.size(); ++i) {
    if (i) os << ", ";
    os << x[i];
  }
  os << ']';
  return os.str();
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ConfigError("relaxed-rate fraction must lie strictly between 0 and 1");
  }
}

// Two-sided piecewise-linear class-K envelopes for a smooth positive-definite
// V on the positive quadrant, built from ray sweeps around x*.  Soundness of
// the linear interpolation comes from a one-knot stagger: the lower table
// stores at radius s_i the directional minimum at s_{i-1} (times 0.99), so
// every chord sits below the increasing true envelope; the upper table stores
// at s_i the running directional maximum at s_{i+1} (times 1.01), so every
// chord sits above it.  A geometric head grid keeps the stagger slack below
// absolute 1e-9 near the origin, where V is locally quadratic.
void fit_envelopes_2d(const std::function<double(const Vec&)>& V, const Vec& xstar,
                      ClassK* alpha1, ClassK* alpha2) {
  constexpr int kDirections = 1024;
  constexpr double kSmax = 60.0;
  constexpr double kTwoPi = 6.283185307179586476925286766559;

  std::vector<double> radii;
  for (int k = 0; k <= 16; ++k) {
    radii.push_back(1e-4 * std::pow(500.0, static_cast<double>(k) / 16.0));
  }
  for (int k = 1;; ++k) {
    const double s = 0.05 + 0.025 * static_cast<double>(k);
    if (s > kSmax + 1e-12) break;
    radii.push_back(s);
  }
  const int nr = static_cast<int>(radii.size());

  std::vector<double> vmin(static_cast<std::size_t>(nr),
                           std::numeric_limits<double>::infinity());
  std::vector<double> vmax(static_cast<std::size_t>(nr), 0.0);
  Vec x(2);
  for (int j = 0; j < kDirections; ++j) {
    const double th = kTwoPi * static_cast<double>(j) / kDirections;
    const double c0 = std::cos(th);
    const double c1 = std::sin(th);
    for (int i = 0; i < nr; ++i) {
      x[0] = xstar[0] + radii[static_cast<std::size_t>(i)] * c0;
      x[1] = xstar[1] + radii[static_cast<std::size_t>(i)] * c1;
      if (x[0] <= 1e-9 || x[1] <= 1e-9) continue;
      const double v = V(x);
      vmin[static_cast<std::size_t>(i)] = std::min(vmin[static_cast<std::size_t>(i)], v);
      vmax[static_cast<std::size_t>(i)] = std::max(vmax[static_cast<std::size_t>(i)], v);
    }
  }
  for (int i = 0; i < nr; ++i) {
    if (!std::isfinite(vmin[static_cast<std::size_t>(i)])) {
      throw GeometryInfeasibleError("class-K fit found no admissible direction at some radius");
    }
  }
  for (int i = 1; i < nr; ++i) {
    vmax[static_cast<std::size_t>(i)] =
        std::max(vmax[static_cast<std::size_t>(i)], vmax[static_cast<std::size_t>(i - 1)]);
  }

  std::vector<double> lo(static_cast<std::size_t>(nr), 0.0);
  std::vector<double> hi(static_cast<std::size_t>(nr), 0.0);
  for (int i = 1; i < nr; ++i) lo[static_cast<std::size_t>(i)] = 0.99 * vmin[static_cast<std::size_t>(i - 1)];
  for (int i = 0; i < nr; ++i) {
    const int next = std::min(i + 1, nr - 1);
    hi[static_cast<std::size_t>(i)] = 1.01 * vmax[static_cast<std::size_t>(next)];
  }
  for (int i = 1; i < nr; ++i) {
    lo[static_cast<std::size_t>(i)] =
        std::max(lo[static_cast<std::size_t>(i)], lo[static_cast<std::size_t>(i - 1)]);
    hi[static_cast<std::size_t>(i)] =
        std::max(hi[static_cast<std::size_t>(i)], hi[static_cast<std::size_t>(i - 1)]);
  }
  *alpha1 = ClassK::table(radii, lo);
  *alpha2 = ClassK::table(std::move(radii), std::move(hi));
}

double max_init_distance(const ScenarioBundle& sc) {
  if (sc.x0s.empty()) throw ConfigError("scenario has no initial conditions");
  double maxd = 0.0;
  for (const Vec& x0 : sc.x0s) {
    if (static_cast<int>(x0.size()) != sc.sys.n) {
      throw ConfigError("initial condition dimension does not match the system");
    }
    maxd = std::max(maxd, sc.lyap.dist(x0));
  }
  return maxd;
}

// Rows 1-3: sampled decay under the known feedback, relaxed-rate ordering,
// and the class-K sandwich, each with its worst witness.
void sampled_rows(const ScenarioBundle& sc, int samples, std::uint64_t seed,
                  VerifyReport* rep) {
  Rng rng(seed);
  const int n = sc.sys.n;

  double worst_phi = -std::numeric_limits<double>::infinity();
  Vec worst_phi_x;
  bool kappa_ok = true;
  Vec kappa_bad_x;
  bool w_ok = true;
  double min_w = std::numeric_limits<double>::infinity();
  double min_gap = std::numeric_limits<double>::infinity();
  bool lo_ok = true, hi_ok = true;
  double worst_lo = std::numeric_limits<double>::infinity();
  double worst_hi = std::numeric_limits<double>::infinity();
  Vec worst_lo_x, worst_hi_x;

  Vec x(n);
  for (int k = 0; k < samples; ++k) {
    for (int j = 0; j < n; ++j) x[j] = rng.uniform(sc.sys.domain.lo[j], sc.sys.domain.hi[j]);

    const BetaVector bv = beta(sc.sys, sc.lyap, DecayTag::Full, x);
    const Vec u = sc.feedback.kappa(x);
    const double p = phi(bv, u);
    if (p > worst_phi) {
      worst_phi = p;
      worst_phi_x = x;
    }
    if (kappa_ok && !sc.sys.input_box.contains(u, kFeasTol)) {
      kappa_ok = false;
      kappa_bad_x = x;
    }

    const double wv = sc.lyap.w(x);
    min_w = std::min(min_w, wv);
    if (wv < 0.0 || (wv == 0.0 && sc.lyap.dist(x) > 1e-6)) w_ok = false;
    min_gap = std::min(min_gap, wv - sc.lyap.wt(x));

    const double d = sc.lyap.dist(x);
    const double V = sc.lyap.V(x);
    const double tol = 1e-9 * std::max(1.0, std::abs(V));
    const double lo_margin = V - sc.lyap.alpha1.value(d);
    const double hi_margin = sc.lyap.alpha2.value(d) - V;
    if (lo_margin < -tol) lo_ok = false;
    if (hi_margin < -tol) hi_ok = false;
    if (lo_margin < worst_lo) {
      worst_lo = lo_margin;
      worst_lo_x = x;
    }
    if (hi_margin < worst_hi) {
      worst_hi = hi_margin;
      worst_hi_x = x;
    }
  }

  {
    VerifyRow row;
    row.name = "decay-under-feedback";
    row.required = true;
    row.pass = worst_phi <= 1e-7 && kappa_ok && w_ok;
    std::ostringstream os;
    os << samples << " samples; worst decay value " << worst_phi << " at "
       << fmt_vec(worst_phi_x) << "; smallest rate " << min_w;
    if (!kappa_ok) os << "; feedback left the input box at " << fmt_vec(kappa_bad_x);
    if (!w_ok) os << "; rate not positive definite";
    row.detail = os.str();
    rep->rows.push_back(std::move(row));
  }
  {
    VerifyRow row;
    row.name = "relaxed-rate";
    row.required = true;
    row.pass = min_gap >= -1e-12;
    std::ostringstream os;
    os << "smallest margin of the full rate over the relaxed rate: " << min_gap;
    row.detail = os.str();
    rep->rows.push_back(std::move(row));
  }
  {
    VerifyRow row;
    row.name = "class-k-sandwich";
    row.required = true;
    row.pass = lo_ok && hi_ok;
    std::ostringstream os;
    os << "worst lower margin " << worst_lo << " at " << fmt_vec(worst_lo_x)
       << "; worst upper margin " << worst_hi << " at " << fmt_vec(worst_hi_x);
    row.detail = os.str();
    rep->rows.push_back(std::move(row));
  }
}

VerifyRow eps_min_row(const ScenarioBundle& sc, const BoundsContext* ctx,
                      const std::string& err) {
  VerifyRow row;
  row.name = "uniform-accuracy-bound";
  row.required = false;  // the state-dependent field below is the operative gate
  if (!ctx) {
    row.pass = false;
    row.detail = "unavailable: " + err;
    return row;
  }
  row.pass = sc.eps == 0.0 || sc.eps <= ctx->eps_min + 1e-12;
  std::ostringstream os;
  os << "sensor accuracy " << sc.eps << " vs uniform bound " << ctx->eps_min;
  if (!row.pass) os << " (informational: the state-dependent bound below governs)";
  row.detail = os.str();
  return row;
}

VerifyRow field_row(const ScenarioBundle& sc, const FieldResult* field,
                    const std::string& err) {
  VerifyRow row;
  row.name = "field-accuracy-bound";
  row.required = true;
  if (!field) {
    row.pass = false;
    row.detail = "unavailable: " + err;
    return row;
  }
  if (field->points.empty()) {
    row.pass = sc.eps == 0.0;
    row.detail = "field sweep is empty (operating region inside the core ball)";
    return row;
  }
  row.pass = sc.eps == 0.0 || sc.eps <= field->required_accuracy + 1e-12;
  std::ostringstream os;
  os << "sensor accuracy " << sc.eps << " vs required accuracy " << field->required_accuracy
     << " (half the smallest admissible error " << field->min_eps_bar_raw << " at "
     << fmt_vec(field->argmin) << ")";
  row.detail = os.str();
  return row;
}

VerifyRow geometry_row(const ScenarioBundle& sc, const BallGeometry* geom,
                       const std::string& err) {
  VerifyRow row;
  row.name = "ball-geometry";
  row.required = true;
  if (!geom) {
    row.pass = false;
    row.detail = err;
    return row;
  }
  row.pass = true;
  std::ostringstream os;
  os << "target radius " << geom->r << ", trapping level " << geom->V_r << ", inner radius "
     << geom->r_tilde << ", core radius " << geom->r_star << ", dwell slack "
     << geom->r_tilde - geom->r_star - 2.0 * sc.eps;
  row.detail = os.str();
  return row;
}

}  // namespace

bool VerifyReport::all_required_pass() const {
  for (const VerifyRow& row : rows) {
    if (row.required && !row.pass) return false;
  }
  return true;
}

const VerifyRow* VerifyReport::find(const std::string& name) const {
  for (const VerifyRow& row : rows) {
    if (row.name == name) return &row;
  }
  return nullptr;
}

ScenarioBundle make_train_scenario(double alpha) {
  check_alpha(alpha);

  // Longitudinal train model: quadratic running resistance against an
  // exponentially speed-dependent traction envelope, normalized by mass.
  const double p = 5.18;
  const double q = 13046.32;
  const double mass = 68200.0;
  const double k1 = 1.516e5;
  const double k2 = 0.1147;
  const double k3 = 1.564e4;
  const double vW = 5.0;
  const double xstar = 30.0;

  auto resistance = [=](double x) { return p * (x - vW) * (x - vW) + q; };
  auto traction = [=](double x) { return k1 * std::exp(-k2 * x) + k3; };
  const double ustar = resistance(xstar) / traction(xstar);
  const double shift = std::atanh(ustar);

  ScenarioBundle sc;
  sc.name = "train";
  sc.alpha = alpha;

  sc.sys.n = 1;
  sc.sys.m = 1;
  sc.sys.f = [=](const Vec& x) { return vec1(-resistance(x[0]) / mass); };
  sc.sys.g = [=](const Vec& x) {
    Mat G(1, 1);
    G(0, 0) = traction(x[0]) / mass;
    return G;
  };
  sc.sys.input_box.lo = vec1(-1.0);
  sc.sys.input_box.hi = vec1(1.0);
  sc.sys.domain.lo = vec1(24.0);
  sc.sys.domain.hi = vec1(40.0);

  sc.lyap.xstar = vec1(xstar);
  sc.lyap.V = [=](const Vec& x) { return 0.5 * (x[0] - xstar) * (x[0] - xstar); };
  sc.lyap.gradV = [=](const Vec& x) { return vec1(x[0] - xstar); };
  sc.lyap.w = [=](const Vec& x) { return 0.025 * (x[0] - xstar) * (x[0] - xstar); };
  sc.lyap.wt = [=](const Vec& x) { return alpha * 0.025 * (x[0] - xstar) * (x[0] - xstar); };
  sc.lyap.alpha1 = ClassK::quadratic(0.5);
  sc.lyap.alpha2 = ClassK::quadratic(0.5);

  sc.feedback.kappa = [=](const Vec& x) { return vec1(-std::tanh(x[0] - xstar - shift)); };

  sc.eps = 0.03;
  sc.r = 1.0;
  sc.r_star = 0.9;
  sc.alpha2_tight = true;

  sc.grid.L_points = 2001;
  sc.grid.wbar_points = 4001;
  sc.grid.F_points = 2001;
  sc.grid.vhat_points = 2001;
  sc.grid.pad = 0.5;

  sc.x0s = {vec1(27.0)};

  sc.sim.h = 1e-3;
  sc.sim.T = 260.0;
  sc.sim.eps = sc.eps;
  sc.sim.strategy = Strategy::Midpoint;
  sc.sim.seed = 1;
  sc.sim.trace_stride = 100;
  return sc;
}

ScenarioBundle make_cubic3d_scenario(double alpha) {
  check_alpha(alpha);

  Mat P(3, 3);
  P << 1.0, 0.5, 0.0,  //
      0.5, 1.5, 0.5,   //
      0.0, 0.5, 1.0;
  Mat D = Mat::Zero(3, 3);
  D(0, 0) = 0.5;
  D(1, 1) = 0.2;
  D(2, 2) = 0.25;
  const Mat Q = P.transpose() * D * P;

  ScenarioBundle sc;
  sc.name = "cubic3d";
  sc.alpha = alpha;

  sc.sys.n = 3;
  sc.sys.m = 2;
  sc.sys.f = [](const Vec& x) {
    const double a = 2.0 * x[0] + x[1];
    const double b = x[1] + 2.0 * x[2];
    return vec3(-1.25 * x[1] - 0.5 * x[2] - a * a * a / 16.0,
                0.9 * x[0] + 0.7 * x[1] + 0.9 * x[2],
                -0.5 * x[0] - 1.375 * x[1] - 0.25 * x[2] - b * b * b / 32.0);
  };
  sc.sys.g = [](const Vec&) {
    Mat G = Mat::Zero(3, 2);
    G(0, 0) = 1.0;
    G(2, 1) = 1.0;
    return G;
  };
  sc.sys.input_box.lo = vec2(-1.0, -0.5);
  sc.sys.input_box.hi = vec2(1.0, 0.5);
  sc.sys.domain.lo = vec3(-2.5, -2.5, -2.5);
  sc.sys.domain.hi = vec3(2.5, 2.5, 2.5);

  sc.lyap.xstar = vec3(0.0, 0.0, 0.0);
  sc.lyap.V = [P](const Vec& x) { return 0.5 * x.dot(P * x); };
  sc.lyap.gradV = [P](const Vec& x) { return Vec(P * x); };
  sc.lyap.w = [Q](const Vec& x) { return 0.5 * x.dot(Q * x); };
  sc.lyap.wt = [Q, alpha](const Vec& x) { return alpha * 0.5 * x.dot(Q * x); };
  sc.lyap.alpha1 = ClassK::quadratic(0.25);
  sc.lyap.alpha2 = ClassK::quadratic(1.0);

  sc.feedback.kappa = [](const Vec& x) {
    return vec2(-std::tanh(x[0] + 0.5 * x[1]), -0.5 * std::tanh(0.5 * x[1] + x[2]));
  };

  sc.eps = 1e-3;
  sc.r = 0.7;
  sc.r_star = 0.3;
  sc.alpha2_tight = true;

  sc.grid.L_points = 41;
  sc.grid.wbar_points = 41;
  sc.grid.F_points = 41;
  sc.grid.vhat_points = 41;
  sc.grid.pad = 0.01;

  sc.x0s = {vec3(-0.5, 0.5, -0.5)};

  sc.sim.h = 2e-4;
  sc.sim.T = 12.0;
  sc.sim.eps = sc.eps;
  sc.sim.strategy = Strategy::Chebyshev;
  sc.sim.seed = 1;
  sc.sim.trace_stride = 10;
  return sc;
}

ScenarioBundle make_lotka_volterra_scenario(double alpha) {
  check_alpha(alpha);

  const double a = 1.1;   // prey growth
  const double b = 0.4;   // predation
  const double c = 0.4;   // predator decay
  const double d = 0.1;   // conversion
  const Vec xstar = vec2(10.0, 4.0);

  ScenarioBundle sc;
  sc.name = "lotka-volterra";
  sc.alpha = alpha;

  sc.sys.n = 2;
  sc.sys.m = 2;
  sc.sys.f = [=](const Vec& x) {
    return vec2(a * x[0] - b * x[0] * x[1], -c * x[1] + d * x[0] * x[1]);
  };
  sc.sys.g = [](const Vec& x) {
    Mat G = Mat::Zero(2, 2);
    G(0, 0) = x[0];
    G(1, 1) = x[1];
    return G;
  };
  sc.sys.input_box.lo = vec2(-3.0, -3.0);
  sc.sys.input_box.hi = vec2(4.0, 2.0);
  sc.sys.domain.lo = vec2(0.1, 0.1);
  sc.sys.domain.hi = vec2(20.0, 8.0);

  sc.lyap.xstar = xstar;
  sc.lyap.V = [xstar](const Vec& x) {
    double v = 0.0;
    for (int i = 0; i < 2; ++i) {
      v += x[i] - xstar[i] - xstar[i] * std::log(x[i] / xstar[i]);
    }
    return v;
  };
  sc.lyap.gradV = [xstar](const Vec& x) {
    return vec2(1.0 - xstar[0] / x[0], 1.0 - xstar[1] / x[1]);
  };
  sc.lyap.w = [xstar](const Vec& x) {
    const double d1 = x[0] - xstar[0];
    const double d2 = x[1] - xstar[1];
    return d1 * std::tanh(d1) + d2 * std::tanh(d2);
  };
  sc.lyap.wt = [xstar, alpha](const Vec& x) {
    const double d1 = x[0] - xstar[0];
    const double d2 = x[1] - xstar[1];
    return alpha * (d1 * std::tanh(d1) + d2 * std::tanh(d2));
  };
  fit_envelopes_2d(sc.lyap.V, xstar, &sc.lyap.alpha1, &sc.lyap.alpha2);

  sc.feedback.kappa = [=](const Vec& x) {
    return vec2(-a + b * x[1] - std::tanh(x[0] - xstar[0]),
                c - d * x[0] - std::tanh(x[1] - xstar[1]));
  };

  sc.eps = 1e-2;
  sc.r = 0.7;
  sc.r_star = 0.2;
  sc.r_tilde_override = 0.3;
  sc.alpha2_tight = false;

  sc.grid.L_points = 201;
  sc.grid.wbar_points = 401;
  sc.grid.F_points = 201;
  sc.grid.vhat_points = 201;
  sc.grid.pad = 0.1;

  sc.x0s = {vec2(5.0, 8.0), vec2(10.0, 6.0), vec2(15.0, 4.0), vec2(10.0, 3.0),
            vec2(5.0, 2.0),  vec2(1.0, 3.0),  vec2(1.0, 5.0)};

  sc.sim.h = 3e-5;
  sc.sim.T = 12.0;
  sc.sim.eps = sc.eps;
  sc.sim.strategy = Strategy::MinCost;
  Mat R = Mat::Zero(2, 2);
  R(0, 0) = 3.0;
  R(1, 1) = 1.0;
  sc.sim.cost = R;
  sc.sim.seed = 1;
  sc.sim.trace_stride = 100;
  return sc;
}

std::vector<std::string> scenario_names() { return {"train", "cubic3d", "lotka-volterra"}; }

ScenarioBundle make_scenario(const std::string& name, std::optional<double> alpha) {
  if (name == "train") return make_train_scenario(alpha.value_or(0.6));
  if (name == "cubic3d") return make_cubic3d_scenario(alpha.value_or(0.5));
  if (name == "lotka-volterra") return make_lotka_volterra_scenario(alpha.value_or(0.5));
  std::ostringstream os;
  os << "unknown scenario '" << name << "'; available:";
  for (const std::string& s : scenario_names()) os << ' ' << s;
  throw ConfigError(os.str());
}

VerifyReport verify_assumptions(const ScenarioBundle& sc, int samples, std::uint64_t seed) {
  VerifyReport rep;
  sampled_rows(sc, samples, seed, &rep);

  std::optional<BallGeometry> geom;
  std::string err;
  try {
    geom = ball_geometry(sc.lyap, sc.r, sc.eps, sc.r_star, sc.r_tilde_override);
  } catch (const std::exception& e) {
    err = e.what();
  }

  std::optional<BoundsContext> ctx;
  std::optional<FieldResult> field;
  std::string bounds_err = err;
  if (geom) {
    try {
      const double maxd = max_init_distance(sc);
      ctx = prepare_bounds(sc.sys, sc.lyap, maxd, sc.eps, geom->r_star, sc.grid,
                           sc.alpha2_tight);
      field = eps_bar_field(sc.sys, sc.lyap, *ctx, geom->r_star, 0);
    } catch (const std::exception& e) {
      bounds_err = e.what();
    }
  }

  rep.rows.push_back(eps_min_row(sc, ctx ? &*ctx : nullptr, bounds_err));
  rep.rows.push_back(field_row(sc, field ? &*field : nullptr, bounds_err));
  rep.rows.push_back(geometry_row(sc, geom ? &*geom : nullptr, err));
  return rep;
}

Prepared prepare(const ScenarioBundle& sc, std::optional<int> field_points) {
  Prepared out;
  out.geom = ball_geometry(sc.lyap, sc.r, sc.eps, sc.r_star, sc.r_tilde_override);
  out.max_init_dist = max_init_distance(sc);
  out.ctx = prepare_bounds(sc.sys, sc.lyap, out.max_init_dist, sc.eps, out.geom.r_star,
                           sc.grid, sc.alpha2_tight);
  out.field =
      eps_bar_field(sc.sys, sc.lyap, out.ctx, out.geom.r_star, field_points.value_or(0));

  sampled_rows(sc, 10000, 2026, &out.report);
  std::string no_err;
  out.report.rows.push_back(eps_min_row(sc, &out.ctx, no_err));
  out.report.rows.push_back(field_row(sc, &out.field, no_err));
  out.report.rows.push_back(geometry_row(sc, &out.geom, no_err));
  return out;
}

}  // namespace stclf
