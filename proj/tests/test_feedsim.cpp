#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>
#include <vector>

#include "curveguide/feedsim.hpp"
#include "curveguide/pipeline.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace curveguide;
using geom::Point3;
using path::IsoProgram;
using sim::BlockPlan;
using sim::MachineKinematics;

namespace {

// Closed-form end state of the phase list (cubic per phase).
struct EndState {
  double s, v, a, t;
};

EndState phase_end_state(const BlockPlan& plan) {
  double s = 0, v = plan.v_in, a = 0, t = 0;
  for (const auto& ph : plan.phases) {
    double d = ph.duration;
    s += v * d + 0.5 * a * d * d + ph.jerk * d * d * d / 6.0;
    v += a * d + 0.5 * ph.jerk * d * d;
    a += ph.jerk * d;
    t += d;
  }
  return {s, v, a, t};
}

IsoProgram one_block(Point3 from, Point3 to) {
  IsoProgram p;
  p.blocks.push_back({from, to, 6000.0});
  p.passes.push_back({0, 1, 0});
  return p;
}

}  // namespace

TEST_CASE("speed change primitives match the closed forms") {
  // Triangular: the acceleration peak sqrt(j*dv) stays under a_max.
  double t_tri = sim::speed_change_time(0.0, 100.0, 2500.0, 5000.0);
  CHECK(t_tri == doctest::Approx(2.0 * std::sqrt(100.0 / 5000.0)).epsilon(
                     1e-12));
  // Trapezoidal: dv = 1000 saturates a_max = 2000 between the jerk ramps
  // (the triangular peak sqrt(j*dv) = 2236 would exceed it).
  double t_trap = sim::speed_change_time(0.0, 1000.0, 2000.0, 5000.0);
  CHECK(t_trap == doctest::Approx(2000.0 / 5000.0 + 1000.0 / 2000.0).epsilon(
                      1e-12));
  // Symmetric in the endpoints; distance is the mean speed times the time.
  CHECK(sim::speed_change_time(30.0, 80.0, 2500.0, 5000.0) ==
        doctest::Approx(sim::speed_change_time(80.0, 30.0, 2500.0, 5000.0)));
  CHECK(sim::speed_change_distance(30.0, 80.0, 2500.0, 5000.0) ==
        doctest::Approx(55.0 *
                        sim::speed_change_time(30.0, 80.0, 2500.0, 5000.0)));
  CHECK(sim::speed_change_time(50.0, 50.0, 2500.0, 5000.0) ==
        doctest::Approx(0.0));
}

TEST_CASE("rest-to-rest block reproduces the reference duration") {
  MachineKinematics kin;
  auto res = sim::plan_program(testsup::straight_program({100.0}), kin, 100.0);
  REQUIRE(res.plans.size() == 1);
  // 1 s cruise plus two triangular ramps of 2*sqrt(100/5000) s each side:
  // 1.28284 s, mean feed 77.95 mm/s.
  CHECK(res.total_time == doctest::Approx(1.2828427124746).epsilon(1e-9));
  CHECK(res.plans[0].mean_feed == doctest::Approx(77.95).epsilon(1e-4));
  CHECK(res.plans[0].v_in == doctest::Approx(0.0));
  CHECK(res.plans[0].v_out == doctest::Approx(0.0));
  CHECK(res.plans[0].v_peak == doctest::Approx(100.0));
}

TEST_CASE("splitting a straight block changes nothing") {
  MachineKinematics kin;
  auto whole = sim::plan_program(testsup::straight_program({100.0}), kin,
                                 100.0);
  auto split = sim::plan_program(testsup::straight_program({50.0, 50.0}), kin,
                                 100.0);
  CHECK(split.total_time == doctest::Approx(whole.total_time).epsilon(1e-12));
  CHECK(split.plans[0].v_out == doctest::Approx(100.0));
  auto thirds = sim::plan_program(
      testsup::straight_program({30.0, 50.0, 20.0}), kin, 100.0);
  CHECK(thirds.total_time ==
        doctest::Approx(whole.total_time).epsilon(1e-12));
}

TEST_CASE("junction feed follows the per-axis velocity step limit") {
  MachineKinematics kin;
  // 90 degree xy corner: the x axis must shed its whole component in one
  // cycle: 2500 * 0.012 / 1 = 30 mm/s.
  CHECK(sim::junction_feed({1, 0, 0}, {0, 1, 0}, kin, 100.0) ==
        doctest::Approx(30.0).epsilon(1e-12));
  // Full reversal doubles the step.
  CHECK(sim::junction_feed({1, 0, 0}, {-1, 0, 0}, kin, 100.0) ==
        doctest::Approx(15.0).epsilon(1e-12));
  // Collinear moves pass at the set point.
  CHECK(sim::junction_feed({1, 0, 0}, {1, 0, 0}, kin, 100.0) ==
        doctest::Approx(100.0));
  // The set point caps the junction.
  CHECK(sim::junction_feed({1, 0, 0}, {0, 1, 0}, kin, 5.0) ==
        doctest::Approx(5.0));
  CHECK_THROWS_AS(sim::junction_feed({0, 0, 0}, {1, 0, 0}, kin, 100.0),
                  Error);
}

TEST_CASE("corner programs realize the junction feed") {
  MachineKinematics kin;
  IsoProgram corner;
  corner.blocks.push_back({{0, 0, 0}, {100, 0, 0}, 6000.0});
  corner.blocks.push_back({{100, 0, 0}, {100, 100, 0}, 6000.0});
  corner.passes.push_back({0, 2, 0});
  auto res = sim::plan_program(corner, kin, 100.0);
  CHECK(res.plans[0].v_out == doctest::Approx(30.0).epsilon(1e-12));
  CHECK(res.plans[1].v_in == doctest::Approx(30.0).epsilon(1e-12));
  CHECK(res.plans[1].v_out == doctest::Approx(0.0));
}

TEST_CASE("analytic durations match microsecond integration") {
  MachineKinematics kin;
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> ulen(1.0, 500.0);
  std::uniform_real_distribution<double> usp(10.0, 500.0);
  std::uniform_real_distribution<double> udir(-1.0, 1.0);
  for (int rep = 0; rep < 25; ++rep) {
    Point3 dir{udir(rng), udir(rng), 0.2 * udir(rng)};
    if (dir.norm() < 1e-3) dir = {1, 0, 0};
    dir = dir * (1.0 / dir.norm());
    double len = ulen(rng);
    auto res = sim::plan_program(one_block({0, 0, 0}, dir * len), kin,
                                 usp(rng));
    const auto& plan = res.plans[0];
    double t_num = testsup::integrate_duration(plan, plan.length, 1e-6);
    CHECK(std::abs(plan.duration - t_num) / t_num < 0.005);
  }
}

TEST_CASE("phase sequences integrate to the block length exactly") {
  auto master = pipeline::make_fixture("master-like");
  auto prog = path::guidance_toolpath(master, {master.boundary1,
                                               master.boundary2, "B1", "B2"},
                                      path::Tool{}, path::StrategyParams{});
  MachineKinematics kin;
  auto res = sim::plan_program(prog, kin, 200.0 / 3.0);
  REQUIRE(res.plans.size() == prog.blocks.size());
  double total = 0.0;
  for (size_t i = 0; i < res.plans.size(); i += 3) {
    const auto& plan = res.plans[i];
    auto end = phase_end_state(plan);
    CHECK(std::abs(end.s - plan.length) < 1e-6);
    CHECK(std::abs(end.v - plan.v_out) < 1e-9);
    CHECK(std::abs(end.a) < 1e-9);
    CHECK(std::abs(end.t - plan.duration) < 1e-12);
    CHECK(plan.mean_feed ==
          doctest::Approx(plan.length / plan.duration).epsilon(1e-12));
    // Phases chain continuously.
    double s = 0, v = plan.v_in, a = 0;
    for (const auto& ph : plan.phases) {
      CHECK(std::abs(ph.s0 - s) < 1e-9);
      CHECK(std::abs(ph.v0 - v) < 1e-9);
      CHECK(std::abs(ph.a0 - a) < 1e-9);
      double d = ph.duration;
      s += v * d + 0.5 * a * d * d + ph.jerk * d * d * d / 6.0;
      v += a * d + 0.5 * ph.jerk * d * d;
      a += ph.jerk * d;
    }
  }
}

TEST_CASE("junction speeds are continuous and capped") {
  auto master = pipeline::make_fixture("master-like");
  auto prog = path::guidance_toolpath(master, {master.boundary1,
                                               master.boundary2, "B1", "B2"},
                                      path::Tool{}, path::StrategyParams{});
  MachineKinematics kin;
  double sp = 100.0;
  auto res = sim::plan_program(prog, kin, sp);
  for (const auto& pass : prog.passes) {
    int first = pass.first_block;
    int last = pass.first_block + pass.block_count - 1;
    CHECK(res.plans[first].v_in == doctest::Approx(0.0));
    CHECK(res.plans[last].v_out == doctest::Approx(0.0));
    for (int b = first; b < last; ++b) {
      const auto& cur = res.plans[b];
      const auto& nxt = res.plans[b + 1];
      CHECK(cur.v_out == doctest::Approx(nxt.v_in).epsilon(1e-12));
      Point3 d1 = prog.blocks[b].end - prog.blocks[b].start;
      Point3 d2 = prog.blocks[b + 1].end - prog.blocks[b + 1].start;
      double cap = sim::junction_feed(d1, d2, kin, sp);
      CHECK(cur.v_out <= cap + 1e-9);
    }
  }
}

TEST_CASE("sampled profiles respect every axis limit") {
  auto flat = pipeline::make_fixture("flat-straight");
  auto prog = path::guidance_toolpath(flat, {flat.boundary1, flat.boundary2,
                                             "B1", "B2"},
                                      path::Tool{}, path::StrategyParams{});
  MachineKinematics kin;
  auto res = sim::simulate(prog, kin, 100.0);  // internal envelope check
  const sim::AxisLimits* ax[3] = {&kin.x, &kin.y, &kin.z};
  for (size_t b = 0; b < res.plans.size(); ++b) {
    Point3 d = prog.blocks[b].end - prog.blocks[b].start;
    Point3 u = d * (1.0 / d.norm());
    double uc[3] = {std::abs(u.x), std::abs(u.y), std::abs(u.z)};
    const auto& plan = res.plans[b];
    for (int i = 0; i <= 200; ++i) {
      auto st = sim::sample_plan(plan, plan.duration * i / 200.0);
      for (int c = 0; c < 3; ++c) {
        CHECK(std::abs(st.v) * uc[c] <= ax[c]->v_max + 1e-6);
        CHECK(std::abs(st.a) * uc[c] <= ax[c]->a_max + 1e-6);
        CHECK(std::abs(st.j) * uc[c] <= ax[c]->j_max + 1e-6);
      }
    }
  }
}

TEST_CASE("raising any single axis limit never slows the program") {
  auto master = pipeline::make_fixture("master-like");
  auto prog = path::guidance_toolpath(master, {master.boundary1,
                                               master.boundary2, "B1", "B2"},
                                      path::Tool{}, path::StrategyParams{});
  MachineKinematics kin;
  double base = sim::plan_program(prog, kin, 100.0).total_time;
  auto bump = [&](auto mutate) {
    MachineKinematics k2 = kin;
    mutate(k2);
    return sim::plan_program(prog, k2, 100.0).total_time;
  };
  CHECK(bump([](auto& k) { k.x.v_max *= 2; }) <= base + 1e-9);
  CHECK(bump([](auto& k) { k.x.a_max *= 2; }) <= base + 1e-9);
  CHECK(bump([](auto& k) { k.x.j_max *= 2; }) <= base + 1e-9);
  CHECK(bump([](auto& k) { k.y.v_max *= 2; }) <= base + 1e-9);
  CHECK(bump([](auto& k) { k.y.a_max *= 2; }) <= base + 1e-9);
  CHECK(bump([](auto& k) { k.y.j_max *= 2; }) <= base + 1e-9);
  CHECK(bump([](auto& k) { k.z.v_max *= 2; }) <= base + 1e-9);
  CHECK(bump([](auto& k) { k.z.a_max *= 2; }) <= base + 1e-9);
  CHECK(bump([](auto& k) { k.z.j_max *= 2; }) <= base + 1e-9);
}

TEST_CASE("the set point overrides programmed feed words") {
  MachineKinematics kin;
  auto prog = testsup::straight_program({200.0});  // blocks carry 6000 mm/min
  auto res = sim::plan_program(prog, kin, 50.0);
  CHECK(res.set_point == doctest::Approx(50.0));
  CHECK(res.plans[0].v_peak <= 50.0 + 1e-9);
}

TEST_CASE("sampling clamps to the block time range") {
  MachineKinematics kin;
  auto res = sim::plan_program(testsup::straight_program({100.0}), kin,
                               100.0);
  const auto& plan = res.plans[0];
  auto before = sim::sample_plan(plan, -1.0);
  CHECK(before.s == doctest::Approx(0.0));
  CHECK(before.v == doctest::Approx(plan.v_in));
  auto after = sim::sample_plan(plan, plan.duration + 1.0);
  CHECK(after.s == doctest::Approx(plan.length));
  CHECK(after.v == doctest::Approx(plan.v_out));
}

TEST_CASE("planning rejects malformed programs and parameters") {
  MachineKinematics kin;
  IsoProgram empty;
  CHECK_THROWS_AS(sim::plan_program(empty, kin, 100.0), Error);
  CHECK_THROWS_AS(
      sim::plan_program(testsup::straight_program({100.0}), kin, 0.0), Error);
  CHECK_THROWS_AS(
      sim::plan_program(testsup::straight_program({100.0}), kin, -5.0),
      Error);

  IsoProgram zero_len;
  zero_len.blocks.push_back({{0, 0, 0}, {0, 0, 0}, 6000.0});
  zero_len.passes.push_back({0, 1, 0});
  try {
    sim::plan_program(zero_len, kin, 100.0);
    FAIL("expected degenerate_input");
  } catch (const Error& e) {
    CHECK(e.code() == Error::Code::degenerate_input);
  }

  auto gap = testsup::straight_program({50.0, 50.0});
  gap.passes = {{0, 1, 0}};  // second block not covered by any pass
  CHECK_THROWS_AS(sim::plan_program(gap, kin, 100.0), Error);
  auto overlap = testsup::straight_program({50.0, 50.0});
  overlap.passes = {{0, 2, 0}, {1, 1, 0}};
  CHECK_THROWS_AS(sim::plan_program(overlap, kin, 100.0), Error);

  MachineKinematics bad = kin;
  bad.x.v_max = 0.0;
  CHECK_THROWS_AS(
      sim::plan_program(testsup::straight_program({100.0}), bad, 100.0),
      Error);
}
