#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "json.hpp"
#include "stclf/scenarios.hpp"
#include "stclf/trace_io.hpp"

using namespace stclf;
using stclf::testing::vec1;
using stclf::testing::vec2;

namespace {

std::vector<TraceRecord> sample_trace() {
  std::vector<TraceRecord> trace;
  TraceRecord a;
  a.t = 0.0;
  a.x_true = vec2(27.123456789012345, -0.25);
  a.x_model = vec2(27.0, -0.25);
  a.u = vec1(0.79420000000000013);
  a.V_true = 4.1;
  a.V_model = 4.0;
  a.eps_bar = 0.5;
  a.delta = 0.71;
  a.event = "measurement|core-ball-entry";
  TraceRecord b;
  b.t = 1.0 / 3.0;
  b.x_true = vec2(1e-300, 2e17);
  b.x_model = vec2(-1e-300, 2e17);
  b.u = vec1(0.0);
  b.V_true = 0.0;
  b.V_model = 0.0;
  b.eps_bar = std::numeric_limits<double>::quiet_NaN();  // coasting in the core
  b.delta = 0.03;
  b.event = "";
  trace.push_back(a);
  trace.push_back(b);
  return trace;
}

}  // namespace

TEST_CASE("trace csv: bit-exact round trip including the NaN convention") {
  const std::vector<TraceRecord> trace = sample_trace();
  std::ostringstream os;
  write_trace_csv(os, 2, 1, trace);

  const std::string text = os.str();
  CHECK(text.rfind("t,x_true_1,x_true_2,x_model_1,x_model_2,u_1,"
                   "V_true,V_model,eps_bar,delta_k,event\n",
                   0) == 0);
  // NaN is an empty field: two adjacent separators on the coasting row.
  CHECK(text.find(",,") != std::string::npos);

  std::istringstream is(text);
  const TraceFile tf = read_trace_csv(is);
  CHECK(tf.n == 2);
  CHECK(tf.m == 1);
  REQUIRE(tf.records.size() == trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const TraceRecord& in = trace[i];
    const TraceRecord& out = tf.records[i];
    CHECK(out.t == in.t);
    for (int j = 0; j < 2; ++j) {
      CHECK(out.x_true[j] == in.x_true[j]);
      CHECK(out.x_model[j] == in.x_model[j]);
    }
    CHECK(out.u[0] == in.u[0]);
    CHECK(out.V_true == in.V_true);
    CHECK(out.V_model == in.V_model);
    CHECK(out.delta == in.delta);
    CHECK(out.event == in.event);
  }
  CHECK(tf.records[0].eps_bar == 0.5);
  CHECK(std::isnan(tf.records[1].eps_bar));

  // A second write of the parsed records reproduces the bytes.
  std::ostringstream os2;
  write_trace_csv(os2, tf.n, tf.m, tf.records);
  CHECK(os2.str() == text);
}

TEST_CASE("trace csv: malformed input is rejected") {
  {
    std::istringstream is("");
    CHECK_THROWS_AS(read_trace_csv(is), ConfigError);
  }
  {
    std::istringstream is("time,x,u\n1,2,3\n");
    CHECK_THROWS_AS(read_trace_csv(is), ConfigError);
  }
  {
    // Right header, non-numeric time field.
    std::istringstream is(
        "t,x_true_1,x_model_1,u_1,V_true,V_model,eps_bar,delta_k,event\n"
        "abc,1,1,0,1,1,0.1,0.1,\n");
    CHECK_THROWS_AS(read_trace_csv(is), ConfigError);
  }
  {
    // Short row.
    std::istringstream is(
        "t,x_true_1,x_model_1,u_1,V_true,V_model,eps_bar,delta_k,event\n"
        "0,1,1\n");
    CHECK_THROWS_AS(read_trace_csv(is), ConfigError);
  }
}

TEST_CASE("field csv: data rows, one-based subsets, and the minimum footer") {
  FieldResult field;
  FieldPoint p1;
  p1.x = vec1(29.0);
  p1.eps_bar = 0.0701;
  p1.eps_bar_raw = 0.0701;
  p1.eps0 = 0.0701;
  p1.winning_subset = {};
  FieldPoint p2;
  p2.x = vec1(28.0);
  p2.eps_bar = 0.21;
  p2.eps_bar_raw = 0.25;
  p2.eps1 = 0.25;
  p2.winning_subset = {0, 1};
  field.points = {p1, p2};
  field.min_eps_bar = 0.0701;
  field.min_eps_bar_raw = 0.0701;
  field.argmin = vec1(29.0);
  field.required_accuracy = 0.03505;

  std::ostringstream os;
  write_field_csv(os, 1, field);
  const std::string text = os.str();
  CHECK(text.rfind("x_1,eps_bar,eps0,eps1,winning_subset\n", 0) == 0);
  CHECK(text.find("1;2\n") != std::string::npos);  // subsets are one-based
  CHECK(text.find("# minimum eps_bar = ") != std::string::npos);
  CHECK(text.find(" at [29]") != std::string::npos);
  CHECK(text.find("# minimum eps_bar uncapped = ") != std::string::npos);
  CHECK(text.find("# required accuracy = ") != std::string::npos);
  CHECK(text.find("(half the uncapped minimum)") != std::string::npos);
}

TEST_CASE("field csv: an empty sweep writes a warning footer instead of minima") {
  FieldResult field;
  std::ostringstream os;
  write_field_csv(os, 1, field);
  const std::string text = os.str();
  CHECK(text.find("# warning: field sweep is empty") != std::string::npos);
  CHECK(text.find("# minimum eps_bar") == std::string::npos);
}

TEST_CASE("summary json: schema, null failure, and round trip through a parser") {
  SimSummary s;
  s.contained = true;
  s.entry_time = 28.4;
  s.max_dist_after_entry = 0.97;
  s.final_dist = 0.5;
  s.measurements = 12;
  s.min_dwell = 0.016;
  s.mean_dwell = 0.4;
  s.horizon = 260.0;
  s.h = 1e-3;
  s.eps = 0.03;
  s.seed = 1;
  s.noise = "uniform-ball";
  s.strategy = "midpoint";
  s.warnings = {"control selection fell back to the held input 2 time(s)"};

  std::ostringstream os;
  write_summary_json(os, "train", s);
  const nlohmann::json j = nlohmann::json::parse(os.str());
  CHECK(j.at("schema") == "stclf-summary-1");
  CHECK(j.at("scenario") == "train");
  CHECK(j.at("contained") == true);
  CHECK(j.at("failure").is_null());
  CHECK(j.at("entry_time").get<double>() == doctest::Approx(28.4));
  CHECK(j.at("violations") == 0);
  CHECK(j.at("measurements") == 12);
  CHECK(j.at("noise") == "uniform-ball");
  CHECK(j.at("strategy") == "midpoint");
  REQUIRE(j.at("warnings").is_array());
  CHECK(j.at("warnings").size() == 1);

  // A failed run stores the cause as a string and NaN statistics as null.
  SimSummary f;
  f.failure = "non-positive-dwell";
  f.max_dist_after_entry = std::numeric_limits<double>::quiet_NaN();
  f.min_dwell = std::numeric_limits<double>::quiet_NaN();
  f.mean_dwell = std::numeric_limits<double>::quiet_NaN();
  f.noise = "uniform-ball";
  f.strategy = "midpoint";
  std::ostringstream osf;
  write_summary_json(osf, "train", f);
  const nlohmann::json jf = nlohmann::json::parse(osf.str());
  CHECK(jf.at("failure") == "non-positive-dwell");
  CHECK(jf.at("entry_time").is_null());
  CHECK(jf.at("max_dist_after_entry").is_null());
  CHECK(jf.at("min_dwell").is_null());
}

TEST_CASE("prepared json: schema and the offline constants") {
  const ScenarioBundle sc = make_train_scenario();
  const Prepared prep = prepare(sc);
  std::ostringstream os;
  write_prepared_json(os, sc.name, prep);
  const nlohmann::json j = nlohmann::json::parse(os.str());
  CHECK(j.at("schema") == "stclf-prepared-1");
  CHECK(j.at("scenario") == "train");
  CHECK(j.at("Rhat").get<double>() == doctest::Approx(3.06));
  CHECK(j.at("L").is_array());
  CHECK(j.at("L").size() == 2);
  CHECK(j.at("eps_min").get<double>() == doctest::Approx(prep.ctx.eps_min));
  CHECK(j.at("r_tilde").get<double>() == doctest::Approx(1.0));
  CHECK(j.at("r_star").get<double>() == doctest::Approx(0.9));
  CHECK(j.at("field_points").get<int>() ==
        static_cast<int>(prep.field.points.size()));
  CHECK(j.at("required_accuracy").get<double>() ==
        doctest::Approx(prep.field.required_accuracy));
  REQUIRE(j.at("report").is_array());
  CHECK(j.at("report").size() == 6);
  CHECK(j.at("report")[0].contains("name"));
  CHECK(j.at("report")[0].contains("pass"));
  CHECK(j.at("report")[0].contains("required"));
  CHECK(j.at("report")[0].contains("detail"));
}

TEST_CASE("verify report: readable rows with the informational marker") {
  VerifyReport report;
  report.rows.push_back({"decay-under-feedback", true, true, "all good"});
  report.rows.push_back({"uniform-accuracy-bound", false, false, "sensor too coarse"});
  std::ostringstream os;
  write_verify_report(os, "train", report);
  const std::string text = os.str();
  CHECK(text.find("hypothesis verification: train") != std::string::npos);
  CHECK(text.find("[PASS] decay-under-feedback: all good") != std::string::npos);
  CHECK(text.find("[FAIL] uniform-accuracy-bound (informational): sensor too coarse") !=
        std::string::npos);
  CHECK(text.find("required rows: PASS") != std::string::npos);

  report.rows.push_back({"ball-geometry", false, true, "broken"});
  std::ostringstream os2;
  write_verify_report(os2, "train", report);
  CHECK(os2.str().find("required rows: FAIL") != std::string::npos);
}
