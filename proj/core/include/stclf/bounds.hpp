#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "stclf/decay.hpp"
#include "stclf/epsbar.hpp"
#include "stclf/lyapunov.hpp"
#include "stclf/system.hpp"
#include "stclf/types.hpp"

namespace stclf {

// Grid densities and conservatism knobs used by the offline preparation
// sweeps.  Points are per axis; safety_factor inflates grid maxima of
// Lipschitz and dynamics bounds to absorb discretization slack; pad is the
// geometric margin by which the estimation region exceeds the operating
// region, and doubles as the cap on the admissible-error bound so that every
// error ball stays inside the estimation region.
struct GridSpec {
  int L_points = 201;
  int wbar_points = 401;
  int F_points = 201;
  int vhat_points = 201;
  double safety_factor = 1.1;
  double pad = 0.1;
};

// Radii and level describing where the closed loop can live: Rhat bounds the
// distance of measured states from the target, Vhat bounds the Lyapunov
// value reachable from inside that ball, and Rhat_star bounds the distance
// of any state under the Vhat level.
struct WorkingSet {
  double Rhat = 0.0;
  double Vhat = 0.0;
  double Rhat_star = 0.0;
  bool vhat_exact = false;  // true when Vhat came from the closed form
};

// Boxes and membership tests for the three nested regions used offline:
//   omega       — operating region (measured states, field sweeps)
//   omega_plus  — padded region (Lipschitz estimation; holds all error balls)
//   level       — sublevel region (dynamics and rate-gap bounds)
struct RegionSpec {
  Vec xstar;
  double Rhat = 0.0;
  double Rhat_star = 0.0;
  double Vhat = 0.0;
  double pad = 0.0;
  StateBox omega_box;
  StateBox omega_plus_box;
  StateBox level_box;

  bool in_omega(const Vec& x) const;
  bool in_omega_plus(const Vec& x) const;
  bool in_level_region(const LyapunovPackage& lyap, const Vec& x) const;
};

// Everything the online phase needs that is computed offline: the working
// set, the regions it induces, the Lipschitz constants of the decay
// coefficients, the worst-case rate gap, speed bounds, and the sensor
// accuracy floor.
struct BoundsContext {
  WorkingSet ws;
  RegionSpec region;
  Vec L;            // size m+1: drift coefficient first, then one per input
  double wbar = 0.0;
  double Fbar = 0.0;
  double Fbar0 = 0.0;
  double eps_min = 0.0;
  GridSpec grid;
};

// One sampled state in an admissible-error field sweep.
struct FieldPoint {
  Vec x;
  double eps_bar = 0.0;      // capped at the region pad
  double eps_bar_raw = 0.0;  // uncapped value
  std::optional<double> eps0;
  std::optional<double> eps1;
  std::vector<int> winning_subset;  // 0-based input indices; empty if drift term wins
};

// An empty sweep (operating region fully inside the core ball) yields an
// empty point list and NaN minima.
struct FieldResult {
  std::vector<FieldPoint> points;
  double min_eps_bar = 0.0;      // capped minimum over sampled points
  double min_eps_bar_raw = 0.0;  // uncapped minimum over sampled points
  Vec argmin;                    // state achieving the raw minimum
  double required_accuracy = 0.0;  // half the raw minimum: sensors at least this
                                   // accurate keep every sampled state feasible
};

// Rhat/Vhat/Rhat_star from the worst-case initial measurement distance.
// alpha2_tight asserts that alpha2 is attained on spheres (quadratic-form V),
// letting Vhat use the closed form whenever the ball fits in the domain;
// otherwise Vhat is a domain-clamped grid maximum inflated by 1%.
WorkingSet working_set(const ControlAffineSystem& sys, const LyapunovPackage& lyap,
                       double max_init_dist, double eps, const GridSpec& grid,
                       bool alpha2_tight);

RegionSpec make_regions(const ControlAffineSystem& sys, const LyapunovPackage& lyap,
                        const WorkingSet& ws, double pad);

// Grid maxima (times safety factor) of the gradient norms of the relaxed
// decay coefficients over the padded region.  Entry 0 is for the drift
// coefficient, entry i for input i.
Vec lipschitz_constants(const ControlAffineSystem& sys, const LyapunovPackage& lyap,
                        const RegionSpec& region, const GridSpec& grid);

// Grid maxima (times safety factor) of the closed-loop speed over the
// sublevel region: Fbar over all input-box vertices, Fbar0 with zero input.
struct SupDynamics {
  double Fbar = 0.0;
  double Fbar0 = 0.0;
};
SupDynamics sup_dynamics(const ControlAffineSystem& sys, const LyapunovPackage& lyap,
                         const RegionSpec& region, const GridSpec& grid);

// Sensor accuracy floor: half the worst-case rate gap divided by the
// worst-case sensitivity of the decay condition to measurement error.
double eps_min(double wbar, const Vec& L, const InputBox& box);

// Full offline pipeline.  r_star excludes the core ball from the rate-gap
// minimum (the relaxed rate has no slack at the target itself).
BoundsContext prepare_bounds(const ControlAffineSystem& sys, const LyapunovPackage& lyap,
                             double max_init_dist, double eps, double r_star,
                             const GridSpec& grid, bool alpha2_tight);

// Admissible-error bound on a grid over the operating region minus the core
// ball.  points_per_axis <= 0 falls back to the context grid density.
FieldResult eps_bar_field(const ControlAffineSystem& sys, const LyapunovPackage& lyap,
                          const BoundsContext& ctx, double r_star, int points_per_axis);

// Evaluate the admissible-error bound at a single measured state, with the
// relaxed rate and the context cap applied.  Throws NoBoundExistsError.
EpsBarBreakdown eps_bar_at(const ControlAffineSystem& sys, const LyapunovPackage& lyap,
                           const BoundsContext& ctx, const Vec& xhat);

// Iterate an axis-aligned grid with the given points per axis over box,
// invoking fn on every node.  Exposed for reuse by verification sweeps.
void for_each_grid_point(const StateBox& box, int points_per_axis,
                         const std::function<void(const Vec&)>& fn);

}  // namespace stclf
