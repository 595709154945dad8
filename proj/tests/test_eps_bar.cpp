#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "stclf/bounds.hpp"
#include "stclf/epsbar.hpp"
#include "stclf/rng.hpp"
#include "stclf/scenarios.hpp"

using namespace stclf;
using stclf::testing::vec1;
using stclf::testing::vec2;
using stclf::testing::vec3;

namespace {

BetaVector make_bv(double b0, const Vec& b) {
  BetaVector bv;
  bv.beta0 = b0;
  bv.beta = b;
  return bv;
}

const EpsBarBreakdown::Candidate* find_candidate(const EpsBarBreakdown& bd,
                                                 const std::vector<int>& subset) {
  for (const auto& c : bd.candidates) {
    if (c.subset == subset) return &c;
  }
  return nullptr;
}

// Independent oracle: the admissible-error bound is the largest eps for
// which the robust polytope stays nonempty.  Found by bisection on the
// monotone feasibility predicate.
double eps_by_bisection(const BetaVector& bv, const Vec& L, const InputBox& box) {
  const auto feasible = [&](double eps) {
    return is_nonempty(robust_polytope(bv, L, eps, box)).nonempty;
  };
  if (!feasible(0.0)) return -1.0;
  double lo = 0.0, hi = 1.0;
  while (feasible(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) return 1e300;  // effectively unbounded
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace

TEST_CASE("eps_bar: drift-only bound when no input coefficient is active") {
  const EpsBarBreakdown bd =
      eps_bar(make_bv(-1.0, vec1(0.0)), vec2(2.0, 1.0), InputBox{vec1(-1.0), vec1(1.0)});
  REQUIRE(bd.eps0.has_value());
  CHECK(*bd.eps0 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_FALSE(bd.eps1.has_value());
  CHECK(bd.eps_bar == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(bd.eps_bar_raw == bd.eps_bar);
  CHECK(bd.winning_subset.empty());
  CHECK(bd.index_set.empty());
}

TEST_CASE("eps_bar: input-assisted bound rescues a positive drift coefficient") {
  const EpsBarBreakdown bd =
      eps_bar(make_bv(1.0, vec1(2.0)), vec2(1.0, 1.0), InputBox{vec1(-1.0), vec1(1.0)});
  CHECK_FALSE(bd.eps0.has_value());
  REQUIRE(bd.eps1.has_value());
  // Single subset {0}: E_i = 2/1 = 2, combined bound (1 - 2) / -(1 + 1) ... = 0.5.
  const auto* c = find_candidate(bd, {0});
  REQUIRE(c != nullptr);
  CHECK(c->min_Ei == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(c->E0 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(c->score == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(*bd.eps1 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(bd.eps_bar == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(bd.index_set == std::vector<int>{0});
  CHECK(bd.winning_subset == std::vector<int>{0});
}

TEST_CASE("eps_bar: two-input reference breakdown") {
  const EpsBarBreakdown bd = eps_bar(make_bv(0.2, vec2(1.0, 0.8)), vec3(1.0, 1.0, 1.0),
                                     InputBox{vec2(-1.0, -0.5), vec2(1.0, 0.5)});
  CHECK(bd.index_set == std::vector<int>({0, 1}));

  const auto* c0 = find_candidate(bd, {0});
  REQUIRE(c0 != nullptr);
  CHECK(c0->score == doctest::Approx(0.4).epsilon(1e-12));

  const auto* c1 = find_candidate(bd, {1});
  REQUIRE(c1 != nullptr);
  CHECK(c1->score == doctest::Approx(0.2 / 1.5).epsilon(1e-9));

  const auto* c01 = find_candidate(bd, {0, 1});
  REQUIRE(c01 != nullptr);
  CHECK(c01->min_Ei == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(c01->E0 == doctest::Approx(1.2 / 2.5).epsilon(1e-12));
  CHECK(c01->score == doctest::Approx(0.48).epsilon(1e-12));

  REQUIRE(bd.eps1.has_value());
  CHECK(*bd.eps1 == doctest::Approx(0.48).epsilon(1e-12));
  CHECK(bd.eps_bar == doctest::Approx(0.48).epsilon(1e-12));
  CHECK(bd.winning_subset == std::vector<int>({0, 1}));
}

TEST_CASE("eps_bar: throws when no positive bound exists") {
  // Positive drift coefficient and a vanishing input window.
  CHECK_THROWS_AS(eps_bar(make_bv(1.0, vec1(2.0)), vec2(1.0, 1.0),
                          InputBox{vec1(-1e-9), vec1(1e-9)}),
                  NoBoundExistsError);
}

TEST_CASE("eps_bar: the cap truncates the reported bound but keeps the raw one") {
  const EpsBarBreakdown bd = eps_bar(make_bv(-1.0, vec1(0.0)), vec2(2.0, 1.0),
                                     InputBox{vec1(-1.0), vec1(1.0)}, 0.3);
  CHECK(bd.eps_bar == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(bd.eps_bar_raw == doctest::Approx(0.5).epsilon(1e-12));
  // A cap above the raw bound changes nothing.
  const EpsBarBreakdown loose = eps_bar(make_bv(-1.0, vec1(0.0)), vec2(2.0, 1.0),
                                        InputBox{vec1(-1.0), vec1(1.0)}, 0.9);
  CHECK(loose.eps_bar == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("eps_bar: agrees with bisection on the robust-feasibility predicate") {
  Rng rng(4242);
  int done = 0;
  for (int trial = 0; trial < 400 && done < 100; ++trial) {
    const int m = 1 + static_cast<int>(rng.u01() * 3.0);
    BetaVector bv;
    bv.beta0 = rng.uniform(-1.5, 0.8);
    bv.beta = Vec(m);
    Vec L(m + 1);
    L[0] = rng.uniform(0.2, 2.0);
    Vec lo(m), hi(m);
    for (int i = 0; i < m; ++i) {
      bv.beta[i] = rng.uniform(-2.0, 2.0);
      L[i + 1] = rng.uniform(0.2, 2.0);
      lo[i] = -rng.uniform(0.2, 1.5);
      hi[i] = rng.uniform(0.2, 1.5);
    }
    const InputBox box{lo, hi};

    double closed_form = -1.0;
    bool exists = true;
    try {
      closed_form = eps_bar(bv, L, box).eps_bar_raw;
    } catch (const NoBoundExistsError&) {
      exists = false;
    }
    const double oracle = eps_by_bisection(bv, L, box);
    if (!exists) {
      CHECK(oracle <= 1e-9);
      continue;
    }
    if (oracle >= 1e300) continue;  // unbounded window; skip comparison
    CHECK(closed_form == doctest::Approx(oracle).epsilon(1e-7));
    ++done;
  }
  CHECK(done >= 100);
}

TEST_CASE("eps_bar: dominates twice the sensor floor away from the core") {
  // Uniform-accuracy counterpart of the state-dependent bound: on the
  // sublevel working set minus the core ball, the pointwise bound must be at
  // least twice the uniform floor.
  const ScenarioBundle sc = make_train_scenario();
  const Prepared prep = prepare(sc);
  Rng rng(77);
  int tested = 0;
  for (int trial = 0; trial < 4000 && tested < 200; ++trial) {
    const Vec x = vec1(rng.uniform(sc.sys.domain.lo[0], sc.sys.domain.hi[0]));
    if (!prep.ctx.region.in_level_region(sc.lyap, x)) continue;
    if (sc.lyap.dist(x) <= prep.geom.r_star) continue;
    const EpsBarBreakdown bd = eps_bar_at(sc.sys, sc.lyap, prep.ctx, x);
    CHECK(bd.eps_bar_raw >= 2.0 * prep.ctx.eps_min - 1e-12);
    ++tested;
  }
  CHECK(tested == 200);
}

TEST_CASE("index_set: sign conditions against the box endpoints") {
  // beta0 = 0.2; coordinate 0 helps only via its positive range, coordinate 1
  // only via its negative range.
  const InputBox box{vec2(-1.0, -0.5), vec2(1.0, 0.5)};
  const std::vector<int> is1 = index_set(make_bv(0.2, vec2(1.0, 0.8)), box);
  CHECK(is1 == std::vector<int>({0, 1}));
  // Coefficients below the zero threshold never enter.
  const std::vector<int> is2 = index_set(make_bv(0.2, vec2(1e-13, 0.8)), box);
  CHECK(is2 == std::vector<int>({1}));
  // A coefficient whose endpoint cannot flip the sign is excluded: with
  // beta0 = 2 and beta = 0.5 on [-1, 1], beta0 + beta * u_min = 1.5 > 0.
  const std::vector<int> is3 =
      index_set(make_bv(2.0, vec1(0.5)), InputBox{vec1(-1.0), vec1(1.0)});
  CHECK(is3.empty());
}
