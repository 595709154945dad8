#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "commands.hpp"
#include "config.hpp"
#include "stclf/types.hpp"

namespace {

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const stclf::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return stclf::kExitConfig;
  } catch (const stclf::NoBoundExistsError& e) {
    std::cerr << "hypothesis failure: " << e.what() << '\n';
    return stclf::kExitHypothesis;
  } catch (const stclf::NonPositiveDwellError& e) {
    std::cerr << "hypothesis failure: " << e.what() << '\n';
    return stclf::kExitHypothesis;
  } catch (const stclf::EmptyPolytopeError& e) {
    std::cerr << "hypothesis failure: " << e.what() << '\n';
    return stclf::kExitHypothesis;
  } catch (const stclf::GeometryInfeasibleError& e) {
    std::cerr << "hypothesis failure: " << e.what() << '\n';
    return stclf::kExitHypothesis;
  } catch (const stclf::EvaluatorError& e) {
    std::cerr << "hypothesis failure: " << e.what() << '\n';
    return stclf::kExitHypothesis;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return stclf::kExitConfig;
  }
}

}  // namespace

int main(int argc, char** argv) {
  using stclf::cli::Overrides;

  CLI::App app{
      "self-triggered control toolkit: admissible measurement-error bounds, "
      "dwell times, and certified closed-loop simulations"};
  app.require_subcommand(1);

  std::optional<std::string> config_path;
  Overrides ov;

  const auto add_scenario_flags = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON configuration file");
    sub->add_option("--scenario", ov.scenario,
                    "built-in scenario (train | cubic3d | lotka-volterra)");
    sub->add_option("--eps", ov.eps, "sensor accuracy");
    sub->add_option("--r", ov.r, "target ball radius");
    sub->add_option("--r-star", ov.r_star, "core ball radius");
    sub->add_option("--alpha", ov.alpha, "relaxed-rate fraction in (0, 1)");
    sub->add_option("--out", ov.out,
                    "output directory (default: $STCLF_OUT_DIR, then ./stclf-out)");
  };

  CLI::App* run =
      app.add_subcommand("run", "simulate the closed loop and certify containment");
  add_scenario_flags(run);
  run->add_option("--seed", ov.seed, "measurement-noise seed");
  run->add_option("--strategy", ov.strategy, "control selection rule")
      ->check(CLI::IsMember({"midpoint", "chebyshev", "mincost"}));

  CLI::App* field = app.add_subcommand(
      "field", "sweep the admissible-error bound over the operating region");
  add_scenario_flags(field);
  field->add_option("--grid", ov.grid, "field grid points per axis");

  CLI::App* verify =
      app.add_subcommand("verify", "check the standing hypotheses and report verdicts");
  add_scenario_flags(verify);
  verify->add_option("--seed", ov.seed, "sampling seed for the hypothesis checks");

  CLI::App* reproduce = app.add_subcommand(
      "reproduce", "run all built-in case studies and compare with stored references");
  reproduce->add_option("--out", ov.out,
                        "output directory (default: $STCLF_OUT_DIR, then ./stclf-out)");

  CLI::App* report = app.add_subcommand(
      "report", "collate artifacts in the output directory into report.md");
  report->add_option("--out", ov.out,
                     "output directory (default: $STCLF_OUT_DIR, then ./stclf-out)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : stclf::kExitConfig;
  }

  using stclf::cli::build_job;
  using stclf::cli::resolve_out_dir;
  if (run->parsed()) {
    return guarded([&] { return stclf::cli::cmd_run(build_job(config_path, ov)); });
  }
  if (field->parsed()) {
    return guarded([&] { return stclf::cli::cmd_field(build_job(config_path, ov)); });
  }
  if (verify->parsed()) {
    return guarded([&] { return stclf::cli::cmd_verify(build_job(config_path, ov)); });
  }
  if (reproduce->parsed()) {
    return guarded([&] { return stclf::cli::cmd_reproduce(resolve_out_dir(ov.out)); });
  }
  if (report->parsed()) {
    return guarded([&] { return stclf::cli::cmd_report(resolve_out_dir(ov.out)); });
  }
  return stclf::kExitConfig;
}
