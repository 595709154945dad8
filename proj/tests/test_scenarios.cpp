#include <algorithm>
#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "stclf/scenarios.hpp"

using namespace stclf;

TEST_CASE("scenario registry: the three built-ins resolve and validate") {
  const std::vector<std::string> names = scenario_names();
  REQUIRE(names.size() == 3);
  for (const std::string& name : names) {
    const ScenarioBundle sc = make_scenario(name);
    CHECK(sc.name == name);
    CHECK(sc.sys.n >= 1);
    CHECK(sc.sys.m >= 1);
    CHECK_NOTHROW(sc.sys.input_box.validate());
    CHECK(sc.eps > 0.0);
    CHECK(sc.r > 0.0);
    CHECK(!sc.x0s.empty());
    for (const Vec& x0 : sc.x0s) CHECK(static_cast<int>(x0.size()) == sc.sys.n);
    CHECK(sc.sys.domain.contains(sc.lyap.xstar));
  }
}

TEST_CASE("scenario registry: unknown names are rejected with the available list") {
  try {
    make_scenario("no-such-scenario");
    FAIL("expected a configuration error");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("no-such-scenario") != std::string::npos);
    CHECK(msg.find("train") != std::string::npos);
    CHECK(msg.find("cubic3d") != std::string::npos);
    CHECK(msg.find("lotka-volterra") != std::string::npos);
  }
}

TEST_CASE("scenario registry: the relaxed-rate fraction must be interior") {
  CHECK_THROWS_AS(make_scenario("train", 0.0), ConfigError);
  CHECK_THROWS_AS(make_scenario("train", 1.0), ConfigError);
  CHECK_THROWS_AS(make_scenario("train", -0.3), ConfigError);
  const ScenarioBundle sc = make_scenario("train", 0.4);
  // The relaxed rate is the configured fraction of the full rate.
  const Vec x = stclf::testing::vec1(27.0);
  CHECK(sc.lyap.wt(x) == doctest::Approx(0.4 * sc.lyap.w(x)).epsilon(1e-12));
}

TEST_CASE("verify_assumptions: the default bundle passes every required row") {
  const ScenarioBundle sc = make_train_scenario();
  const VerifyReport report = verify_assumptions(sc, 2000);
  REQUIRE(report.rows.size() == 6);

  const char* names[] = {"decay-under-feedback", "relaxed-rate",    "class-k-sandwich",
                         "uniform-accuracy-bound", "field-accuracy-bound", "ball-geometry"};
  for (const char* name : names) {
    REQUIRE_MESSAGE(report.find(name) != nullptr, name);
  }

  // The uniform sensor bound is stricter than this plant's sensor and is
  // expected to fail; it is informational because the state-dependent bound
  // below it governs the scheme.
  const VerifyRow* uniform = report.find("uniform-accuracy-bound");
  CHECK_FALSE(uniform->pass);
  CHECK_FALSE(uniform->required);

  for (const VerifyRow& row : report.rows) {
    if (row.name == "uniform-accuracy-bound") continue;
    CHECK_MESSAGE(row.pass, row.name, ": ", row.detail);
    CHECK(row.required);
  }
  CHECK(report.all_required_pass());
}

TEST_CASE("verify_assumptions: a perfect sensor satisfies even the uniform bound") {
  ScenarioBundle sc = make_train_scenario();
  sc.eps = 0.0;
  sc.sim.eps = 0.0;
  const VerifyReport report = verify_assumptions(sc, 1000);
  for (const VerifyRow& row : report.rows) {
    CHECK_MESSAGE(row.pass, row.name, ": ", row.detail);
  }
  CHECK(report.all_required_pass());
}

TEST_CASE("verify_assumptions: infeasible geometry is reported, not thrown") {
  ScenarioBundle sc = make_train_scenario();
  sc.r_star = 2.0;  // outside the inner radius: no core dwell can exist
  VerifyReport report;
  REQUIRE_NOTHROW(report = verify_assumptions(sc, 500));
  const VerifyRow* geom = report.find("ball-geometry");
  REQUIRE(geom != nullptr);
  CHECK_FALSE(geom->pass);
  CHECK(geom->required);
  CHECK_FALSE(report.all_required_pass());
}

TEST_CASE("verify_assumptions: fixed seed gives identical reports") {
  const ScenarioBundle sc = make_train_scenario();
  const VerifyReport a = verify_assumptions(sc, 500, 99);
  const VerifyReport b = verify_assumptions(sc, 500, 99);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].pass == b.rows[i].pass);
    CHECK(a.rows[i].detail == b.rows[i].detail);
  }
}

TEST_CASE("prepare: repeated preparation is bitwise identical") {
  const ScenarioBundle sc = make_train_scenario();
  const Prepared a = prepare(sc);
  const Prepared b = prepare(sc);
  CHECK(a.ctx.eps_min == b.ctx.eps_min);
  CHECK(a.ctx.wbar == b.ctx.wbar);
  CHECK(a.ctx.Fbar == b.ctx.Fbar);
  CHECK(a.ctx.Fbar0 == b.ctx.Fbar0);
  CHECK(a.ctx.ws.Vhat == b.ctx.ws.Vhat);
  REQUIRE(a.ctx.L.size() == b.ctx.L.size());
  for (int k = 0; k < a.ctx.L.size(); ++k) CHECK(a.ctx.L[k] == b.ctx.L[k]);
  CHECK(a.geom.r_tilde == b.geom.r_tilde);
  CHECK(a.field.min_eps_bar_raw == b.field.min_eps_bar_raw);
  CHECK(a.field.points.size() == b.field.points.size());
  CHECK(a.max_init_dist == b.max_init_dist);
}

TEST_CASE("prepare: a sensor too coarse for the geometry propagates the dwell error") {
  ScenarioBundle sc = make_train_scenario();
  sc.eps = 0.2;  // r_star + 2 eps exceeds the inner radius
  sc.sim.eps = 0.2;
  CHECK_THROWS_AS(prepare(sc), NonPositiveDwellError);
}

TEST_CASE("prepare: stored reference constants for the train bundle") {
  const ScenarioBundle sc = make_train_scenario();
  const Prepared prep = prepare(sc);
  CHECK(prep.max_init_dist == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(prep.ctx.ws.Rhat == doctest::Approx(3.06).epsilon(1e-12));
  CHECK(prep.geom.r_tilde == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(prep.geom.r_star == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(prep.ctx.eps_min == doctest::Approx(0.00526147).epsilon(1e-4));
  CHECK(prep.field.required_accuracy == doctest::Approx(0.0347148).epsilon(1e-4));
}
