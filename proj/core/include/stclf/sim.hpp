#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stclf/ball.hpp"
#include "stclf/bounds.hpp"
#include "stclf/decay.hpp"
#include "stclf/rng.hpp"
#include "stclf/system.hpp"
#include "stclf/trigger.hpp"
#include "stclf/types.hpp"

namespace stclf {

// Measurement error models.  uniform_ball draws errors uniformly in the
// accuracy ball; sphere_surface always uses full-magnitude errors;
// adversarial_radial pushes every measurement radially away from the target
// (the worst direction for containment).
enum class NoiseTag { UniformBall, SphereSurface, AdversarialRadial };

const char* to_string(NoiseTag tag);
const char* to_string(Strategy strategy);

// One measurement: the true state corrupted by an error of magnitude at most
// eps drawn from the given model.  xstar is needed by the radial model.
Vec measure(const Vec& x_true, const Vec& xstar, double eps, NoiseTag noise, Rng& rng);

// One classical fourth-order Runge-Kutta step with the input held constant.
Vec integrate_step(const ControlAffineSystem& sys, const Vec& x, const Vec& u, double h);

struct SimConfig {
  double h = 1e-3;           // integration substep
  double T = 10.0;           // horizon
  double eps = 0.0;          // sensor accuracy
  NoiseTag noise = NoiseTag::UniformBall;
  std::uint64_t seed = 1;
  Strategy strategy = Strategy::Midpoint;
  std::optional<Mat> cost;   // required by the min-cost strategy
  bool level_set_refresh = false;
  int trace_stride = 1;      // record every this-many substeps
  double decay_band_C = 10.0;  // second-order tolerance in the decay check
};

struct TraceRecord {
  double t = 0.0;
  Vec x_true;
  Vec x_model;
  Vec u;
  double V_true = 0.0;
  double V_model = 0.0;
  double eps_bar = 0.0;  // NaN while coasting in the core
  double delta = 0.0;
  std::string event;  // '|'-joined tags; empty for plain integration rows
};

struct SimSummary {
  bool contained = false;
  // Nonempty when the run stopped early because a scheme hypothesis failed
  // mid-run (no admissible-error bound, non-positive dwell, or an empty
  // admissible set); the trace holds everything up to the failure event.
  std::string failure;
  std::optional<double> entry_time;
  double max_dist_after_entry = 0.0;  // NaN when the target was never entered
  double final_dist = 0.0;
  int violations = 0;  // samples beyond the target radius after entry
  int measurements = 0;
  double min_dwell = 0.0;   // NaN when no full dwell completed
  double mean_dwell = 0.0;  // NaN when no full dwell completed
  int core_dwell_count = 0;
  int fallback_count = 0;
  int decay_band_violations = 0;
  int level_set_violations = 0;
  int displacement_violations = 0;
  int consistency_violations = 0;
  int region_exit_count = 0;
  double horizon = 0.0;
  double h = 0.0;
  double eps = 0.0;
  std::uint64_t seed = 0;
  std::string noise;
  std::string strategy;
  std::vector<std::string> warnings;
};

struct SimResult {
  SimSummary summary;
  std::vector<TraceRecord> trace;
};

// Closed-loop self-triggered run.  x0_measured is the initial measured
// state; the true initial state is placed inside its accuracy ball.  The
// loop alternates measurement, admissible-error evaluation, dwell
// computation, and continuous integration, switching to an open-loop coast
// whenever the measured state is inside the core ball.  Containment
// statistics are collected on the true state.  A mid-run hypothesis failure
// (no admissible-error bound, non-positive dwell, empty admissible set) ends
// the run early: the partial trace gains a failure event and the summary's
// failure field names the cause.  Only configuration problems throw.
SimResult run_closed_loop(const ControlAffineSystem& sys, const LyapunovPackage& lyap,
                          const BoundsContext& ctx, const BallGeometry& geom,
                          const Vec& x0_measured, const SimConfig& cfg);

}  // namespace stclf
