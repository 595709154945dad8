// Microbenchmarks for the hot paths: the admissible-error bound enumeration,
// robust-polytope construction and feasibility, control selection, one
// integrator substep, and the full offline pipeline per scenario.

#include <benchmark/benchmark.h>

#include <optional>

#include "stclf/bounds.hpp"
#include "stclf/decay.hpp"
#include "stclf/epsbar.hpp"
#include "stclf/scenarios.hpp"
#include "stclf/sim.hpp"

namespace {

using namespace stclf;

const ScenarioBundle& train() {
  static const ScenarioBundle sc = make_train_scenario();
  return sc;
}

const ScenarioBundle& cubic() {
  static const ScenarioBundle sc = make_cubic3d_scenario();
  return sc;
}

const Prepared& train_prep() {
  static const Prepared p = prepare(train());
  return p;
}

const Prepared& cubic_prep() {
  static const Prepared p = prepare(cubic());
  return p;
}

Vec vec3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

void BM_EpsBarTrain(benchmark::State& state) {
  const ScenarioBundle& sc = train();
  const Prepared& p = train_prep();
  Vec x(1);
  x << 27.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(eps_bar_at(sc.sys, sc.lyap, p.ctx, x));
  }
}
BENCHMARK(BM_EpsBarTrain);

void BM_EpsBarCubic(benchmark::State& state) {
  const ScenarioBundle& sc = cubic();
  const Prepared& p = cubic_prep();
  const Vec x = vec3(-0.5, 0.5, -0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(eps_bar_at(sc.sys, sc.lyap, p.ctx, x));
  }
}
BENCHMARK(BM_EpsBarCubic);

void BM_RobustPolytopeCubic(benchmark::State& state) {
  const ScenarioBundle& sc = cubic();
  const Prepared& p = cubic_prep();
  const Vec x = vec3(-0.5, 0.5, -0.5);
  const BetaVector bv = beta(sc.sys, sc.lyap, DecayTag::Relaxed, x);
  for (auto _ : state) {
    AdmissiblePolytope poly = robust_polytope(bv, p.ctx.L, 5e-3, sc.sys.input_box);
    benchmark::DoNotOptimize(is_nonempty(poly));
  }
}
BENCHMARK(BM_RobustPolytopeCubic);

void BM_SelectChebyshevCubic(benchmark::State& state) {
  const ScenarioBundle& sc = cubic();
  const Prepared& p = cubic_prep();
  const Vec x = vec3(-0.5, 0.5, -0.5);
  const BetaVector bv = beta(sc.sys, sc.lyap, DecayTag::Relaxed, x);
  const AdmissiblePolytope poly = robust_polytope(bv, p.ctx.L, 5e-3, sc.sys.input_box);
  for (auto _ : state) {
    benchmark::DoNotOptimize(select_control(poly, Strategy::Chebyshev));
  }
}
BENCHMARK(BM_SelectChebyshevCubic);

void BM_IntegrateStepCubic(benchmark::State& state) {
  const ScenarioBundle& sc = cubic();
  const Vec x = vec3(-0.5, 0.5, -0.5);
  Vec u(2);
  u << 0.3, -0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate_step(sc.sys, x, u, 2e-4));
  }
}
BENCHMARK(BM_IntegrateStepCubic);

void BM_FieldSweepTrain(benchmark::State& state) {
  const ScenarioBundle& sc = train();
  const Prepared& p = train_prep();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        eps_bar_field(sc.sys, sc.lyap, p.ctx, p.geom.r_star, 201));
  }
}
BENCHMARK(BM_FieldSweepTrain);

void BM_PrepareTrain(benchmark::State& state) {
  const ScenarioBundle& sc = train();
  for (auto _ : state) {
    benchmark::DoNotOptimize(prepare(sc));
  }
}
BENCHMARK(BM_PrepareTrain);

}  // namespace

BENCHMARK_MAIN();
