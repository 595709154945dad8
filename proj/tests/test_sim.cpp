#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "stclf/scenarios.hpp"
#include "stclf/sim.hpp"
#include "stclf/trace_io.hpp"

using namespace stclf;
using stclf::testing::vec1;
using stclf::testing::vec3;

namespace {

ControlAffineSystem decay_system() {
  ControlAffineSystem sys;
  sys.n = 1;
  sys.m = 1;
  sys.f = [](const Vec& x) { return vec1(-x[0]); };
  sys.g = [](const Vec&) { return Mat::Zero(1, 1); };
  sys.input_box = InputBox{vec1(-1.0), vec1(1.0)};
  sys.domain = StateBox{vec1(-10.0), vec1(10.0)};
  return sys;
}

SimResult run_train(SimConfig cfg, double x0 = 27.0, double eps = -1.0) {
  static const ScenarioBundle sc = make_train_scenario();
  static const Prepared prep = prepare(sc);
  cfg.eps = eps >= 0.0 ? eps : sc.eps;
  BallGeometry geom = prep.geom;
  if (eps >= 0.0 && eps != sc.eps) {
    geom = ball_geometry(sc.lyap, sc.r, eps, sc.r_star, sc.r_tilde_override);
  }
  return run_closed_loop(sc.sys, sc.lyap, prep.ctx, geom, vec1(x0), cfg);
}

}  // namespace

TEST_CASE("integrate_step: classical fourth-order polynomial on a linear plant") {
  const ControlAffineSystem sys = decay_system();
  const Vec x1 = integrate_step(sys, vec1(1.0), vec1(0.0), 0.1);
  const double h = 0.1;
  const double expected = 1.0 - h + h * h / 2.0 - h * h * h / 6.0 + h * h * h * h / 24.0;
  CHECK(x1[0] == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("integrate_step: error shrinks at fourth order under step halving") {
  const ControlAffineSystem sys = decay_system();
  const auto integrate_to = [&](double h, int steps) {
    Vec x = vec1(1.0);
    for (int i = 0; i < steps; ++i) x = integrate_step(sys, x, vec1(0.0), h);
    return x[0];
  };
  const double exact = std::exp(-1.0);
  const double err_h = std::abs(integrate_to(0.05, 20) - exact);
  const double err_h2 = std::abs(integrate_to(0.025, 40) - exact);
  const double ratio = err_h / err_h2;
  CHECK(ratio > 14.0);
  CHECK(ratio < 18.0);
}

TEST_CASE("measure: error models respect their magnitude contracts") {
  Rng rng(17);
  const Vec x = vec3(1.0, -2.0, 0.5);
  const Vec xstar = vec3(0.0, 0.0, 0.0);
  const double eps = 0.1;

  double max_uniform = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double e = (measure(x, xstar, eps, NoiseTag::UniformBall, rng) - x).norm();
    CHECK(e <= eps + 1e-12);
    max_uniform = std::max(max_uniform, e);
  }
  CHECK(max_uniform > 0.99 * eps);

  for (int i = 0; i < 1000; ++i) {
    const double e = (measure(x, xstar, eps, NoiseTag::SphereSurface, rng) - x).norm();
    CHECK(e == doctest::Approx(eps).epsilon(1e-12));
  }

  const double d0 = (x - xstar).norm();
  for (int i = 0; i < 1000; ++i) {
    const Vec xm = measure(x, xstar, eps, NoiseTag::AdversarialRadial, rng);
    CHECK((xm - x).norm() == doctest::Approx(eps).epsilon(1e-12));
    CHECK((xm - xstar).norm() == doctest::Approx(d0 + eps).epsilon(1e-9));
  }

  const Vec exact = measure(x, xstar, 0.0, NoiseTag::UniformBall, rng);
  CHECK((exact - x).norm() == 0.0);
}

TEST_CASE("closed loop: deterministic traces for a fixed seed") {
  SimConfig cfg;
  cfg.h = 1e-3;
  cfg.T = 5.0;
  cfg.seed = 7;
  cfg.trace_stride = 10;
  const SimResult a = run_train(cfg);
  const SimResult b = run_train(cfg);
  std::ostringstream sa, sb;
  write_trace_csv(sa, 1, 1, a.trace);
  write_trace_csv(sb, 1, 1, b.trace);
  CHECK(sa.str() == sb.str());
  CHECK(a.summary.measurements == b.summary.measurements);
}

TEST_CASE("closed loop: record times are nondecreasing and rows merge at equal time") {
  SimConfig cfg;
  cfg.h = 1e-3;
  cfg.T = 5.0;
  cfg.trace_stride = 7;
  const SimResult res = run_train(cfg);
  REQUIRE(res.trace.size() > 2);
  for (std::size_t i = 1; i < res.trace.size(); ++i) {
    CHECK(res.trace[i].t > res.trace[i - 1].t);  // strict: equal-time rows merged
  }
}

TEST_CASE("closed loop: consistency between true and modeled state at measurements") {
  SimConfig cfg;
  cfg.h = 1e-3;
  cfg.T = 10.0;
  cfg.seed = 3;
  const SimResult res = run_train(cfg);
  const ScenarioBundle sc = make_train_scenario();
  int measured_rows = 0;
  for (const TraceRecord& rec : res.trace) {
    if (rec.event.find("measurement") == std::string::npos) continue;
    ++measured_rows;
    CHECK((rec.x_true - rec.x_model).norm() <= sc.eps + 1e-12);
  }
  CHECK(measured_rows == res.summary.measurements);
  CHECK(res.summary.consistency_violations == 0);
}

TEST_CASE("closed loop: zero horizon emits the initial record only") {
  SimConfig cfg;
  cfg.T = 0.0;
  const SimResult res = run_train(cfg);
  REQUIRE(res.trace.size() == 1);
  CHECK(res.trace[0].t == 0.0);
  CHECK(res.summary.measurements == 1);
  CHECK_FALSE(res.summary.contained);
  CHECK(res.summary.violations == 0);
  CHECK(res.summary.failure.empty());
}

TEST_CASE("closed loop: the decay band holds outside the core on every logged step") {
  SimConfig cfg;
  cfg.h = 1e-3;
  cfg.T = 20.0;
  cfg.seed = 5;
  const SimResult res = run_train(cfg);
  CHECK(res.summary.failure.empty());
  CHECK(res.summary.decay_band_violations == 0);
  CHECK(res.summary.displacement_violations == 0);
}

TEST_CASE("closed loop: triangle chain between consecutive measurements") {
  static const ScenarioBundle sc = make_train_scenario();
  static const Prepared prep = prepare(sc);
  SimConfig cfg = sc.sim;
  cfg.T = 40.0;
  cfg.trace_stride = 1;
  cfg.eps = sc.eps;
  const SimResult res =
      run_closed_loop(sc.sys, sc.lyap, prep.ctx, prep.geom, vec1(27.0), cfg);
  REQUIRE(res.summary.failure.empty());

  const TraceRecord* prev = nullptr;
  int chained = 0;
  for (const TraceRecord& rec : res.trace) {
    if (rec.event.find("measurement") == std::string::npos) continue;
    if (prev != nullptr && std::isfinite(prev->eps_bar)) {
      // Outside the core: the model drift plus two sensor errors stays
      // within the admissible bound granted at the previous measurement.
      const double hop = (rec.x_model - prev->x_model).norm();
      const double budget = prep.ctx.Fbar * prev->delta + 2.0 * cfg.eps;
      CHECK(hop <= budget + 1e-9);
      CHECK(budget <= prev->eps_bar + 1e-9);
      ++chained;
    }
    prev = &rec;
  }
  CHECK(chained > 10);
}

TEST_CASE("closed loop: a mid-run dwell failure ends the run without throwing") {
  // eps = 0.045 passes the offline geometry (0.9 + 0.09 < 1) but exceeds
  // half the field minimum (~0.0347), so the first admissible-error bound
  // below 2 eps stops the run.
  SimConfig cfg;
  cfg.h = 1e-3;
  cfg.T = 260.0;
  SimResult res;
  REQUIRE_NOTHROW(res = run_train(cfg, 27.0, 0.045));
  CHECK(res.summary.failure == "non-positive-dwell");
  REQUIRE(!res.trace.empty());
  const std::string& last_event = res.trace.back().event;
  CHECK(last_event.find("failure:non-positive-dwell") != std::string::npos);
  CHECK_FALSE(res.summary.contained);
}

TEST_CASE("closed loop: a coarse integration step is reported as a warning") {
  SimConfig cfg;
  cfg.h = 0.1;  // more than a tenth of the smallest dwell at this accuracy
  cfg.T = 5.0;
  const SimResult res = run_train(cfg);
  bool has_warning = false;
  for (const std::string& w : res.summary.warnings) {
    if (w.find("integration step") != std::string::npos) has_warning = true;
  }
  CHECK(has_warning);
}

TEST_CASE("closed loop: level-set refresh keeps the certificate monotone") {
  SimConfig cfg;
  cfg.h = 1e-3;
  cfg.T = 30.0;
  cfg.level_set_refresh = true;
  const SimResult res = run_train(cfg);
  CHECK(res.summary.failure.empty());
  CHECK(res.summary.level_set_violations == 0);
}

TEST_CASE("closed loop: containment certificate on the three-state cubic plant") {
  const ScenarioBundle sc = make_cubic3d_scenario();
  const Prepared prep = prepare(sc);
  SimConfig cfg = sc.sim;
  cfg.eps = sc.eps;
  const SimResult res =
      run_closed_loop(sc.sys, sc.lyap, prep.ctx, prep.geom, sc.x0s.at(0), cfg);
  CHECK(res.summary.failure.empty());
  CHECK(res.summary.contained);
  CHECK(res.summary.violations == 0);
  REQUIRE(res.summary.entry_time.has_value());
  CHECK(*res.summary.entry_time > 0.0);
  CHECK(res.summary.max_dist_after_entry <= sc.r + 1e-6);
  CHECK(res.summary.final_dist <= sc.r + 1e-6);
  CHECK(res.summary.min_dwell > 0.0);
  CHECK(res.summary.mean_dwell >= res.summary.min_dwell);
  CHECK(res.summary.core_dwell_count > 0);
}
