#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stclf/ball.hpp"
#include "stclf/bounds.hpp"
#include "stclf/sim.hpp"

namespace stclf {

// A fully specified benchmark problem: plant, certificate, stabilizing
// feedback for the up-front checks, sensor accuracy, target geometry, grid
// densities, and simulation defaults.
struct ScenarioBundle {
  std::string name;
  ControlAffineSystem sys;
  LyapunovPackage lyap;
  StabilizingFeedback feedback;
  double eps = 0.0;  // default sensor accuracy
  double r = 0.0;    // target ball radius
  std::optional<double> r_star;            // core radius override
  std::optional<double> r_tilde_override;  // inner radius override
  double alpha = 0.5;                      // relaxed-rate fraction in (0, 1)
  GridSpec grid;
  bool alpha2_tight = true;  // upper envelope attained on spheres
  std::vector<Vec> x0s;      // nominal initial measurements
  SimConfig sim;             // per-scenario defaults (h, horizon, strategy, cost)
};

// Built-in scenarios.  The relaxed decay rate is alpha * w; passing a
// different alpha rebuilds the bundle consistently.
ScenarioBundle make_train_scenario(double alpha = 0.6);
ScenarioBundle make_cubic3d_scenario(double alpha = 0.5);
ScenarioBundle make_lotka_volterra_scenario(double alpha = 0.5);

std::vector<std::string> scenario_names();
ScenarioBundle make_scenario(const std::string& name,
                             std::optional<double> alpha = std::nullopt);

// One row of the hypothesis-verification report.  Rows marked required gate
// the run; informational rows record verdicts that the state-dependent
// machinery is expected to repair.
struct VerifyRow {
  std::string name;
  bool pass = false;
  bool required = true;
  std::string detail;
};

struct VerifyReport {
  std::vector<VerifyRow> rows;

  bool all_required_pass() const;
  const VerifyRow* find(const std::string& name) const;
};

// Everything computed offline for a scenario: verification report, regional
// constants, ball geometry, and the admissible-error field.
struct Prepared {
  VerifyReport report;
  BoundsContext ctx;
  BallGeometry geom;
  double max_init_dist = 0.0;
  FieldResult field;
};

// Samples the decay hypothesis under the known feedback, checks the relaxed
// rate and the class-K sandwich, and reports the sensor-accuracy verdicts
// against both the uniform bound and the field minimum.  Failures are
// recorded in the report; nothing is thrown.
VerifyReport verify_assumptions(const ScenarioBundle& sc, int samples = 10000,
                                std::uint64_t seed = 2026);

// Runs the full offline pipeline: ball geometry, working set, Lipschitz
// constants, rate gap, speed bounds, uniform accuracy bound, and the
// admissible-error field, with the verification report attached.
// Deterministic in (scenario, grid); geometry and bound failures propagate.
Prepared prepare(const ScenarioBundle& sc,
                 std::optional<int> field_points = std::nullopt);

}  // namespace stclf
