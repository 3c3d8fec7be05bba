#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <string>
#include <vector>

#include "curveguide/perfview.hpp"
#include "curveguide/pipeline.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace curveguide;
using path::IsoProgram;
using sim::MachineKinematics;

namespace {

IsoProgram program_with_lengths(const std::vector<double>& lengths) {
  return testsup::straight_program(lengths);
}

view::PerfReport synthetic(const std::string& name, double slow,
                           double time) {
  view::PerfReport r;
  r.name = name;
  r.set_point = 100.0;
  r.total_time = time;
  r.slow_fraction = slow;
  return r;
}

}  // namespace

TEST_CASE("block length histogram drops one block into each bin") {
  auto prog = program_with_lengths({0.05, 0.3, 0.7, 1.5, 3.0, 7.0, 20.0});
  auto hist = view::block_length_hist(prog);
  REQUIRE(hist.edges.size() == 8);
  REQUIRE(hist.counts.size() == 7);
  CHECK(hist.edges.front() == doctest::Approx(0.0));
  CHECK(std::isinf(hist.edges.back()));
  double total_share = 0.0;
  std::size_t total_count = 0;
  for (std::size_t i = 0; i < hist.counts.size(); ++i) {
    CHECK(hist.counts[i] == 1);
    total_share += hist.length_share[i];
    total_count += hist.counts[i];
  }
  CHECK(total_count == prog.blocks.size());
  CHECK(total_share == doctest::Approx(1.0).epsilon(1e-9));
  // Shares are length weighted, so the 20 mm block dominates.
  CHECK(hist.length_share.back() ==
        doctest::Approx(20.0 / prog.total_length()).epsilon(1e-9));
}

TEST_CASE("feed histogram separates near-saturation from saturation") {
  MachineKinematics kin;
  // A 1000 mm block at 10 mm/s cruises almost the whole way, but the ramps
  // pull the mean just below the set point: near-saturation bin, not the
  // exact-hold bin.
  auto res = sim::plan_program(program_with_lengths({1000.0}), kin, 10.0);
  auto hist = view::feed_hist(res);
  REQUIRE(hist.edges.size() == 12);
  REQUIRE(hist.counts.size() == 11);
  CHECK(hist.counts[9] == 1);
  CHECK(hist.counts[10] == 0);
  double share = 0.0;
  for (double s : hist.length_share) share += s;
  CHECK(share == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("histogram csv carries the expected header and rows") {
  auto prog = program_with_lengths({0.05, 3.0});
  auto csv = view::histogram_csv(view::block_length_hist(prog));
  CHECK(csv.rfind("bin_low,bin_high,count,length_share", 0) == 0);
  // Header plus one row per bin.
  std::size_t lines = 0;
  for (char c : csv)
    if (c == '\n') ++lines;
  CHECK(lines == 8);
}

TEST_CASE("slow fraction hits both extremes") {
  MachineKinematics kin;
  // Long collinear blocks at a low set point: everything cruises.
  auto fast = sim::plan_program(
      program_with_lengths({1000.0, 1000.0, 1000.0}), kin, 10.0);
  auto fast_report = view::make_report("fast", program_with_lengths(
                                                   {1000.0, 1000.0, 1000.0}),
                                       fast);
  CHECK(fast_report.slow_fraction == doctest::Approx(0.0));
  CHECK(fast_report.boundary_slow_fraction == doctest::Approx(0.0));

  // Set point above the axis cap: no block can reach 95% of it.
  auto prog = program_with_lengths({1000.0, 1000.0});
  auto capped = sim::plan_program(prog, kin, 600.0);
  CHECK(capped.plans[0].v_peak <= kin.x.v_max + 1e-9);
  auto slow_report = view::make_report("slow", prog, capped);
  CHECK(slow_report.slow_fraction == doctest::Approx(1.0));
}

TEST_CASE("per-area rows add up to the program totals") {
  auto flat = pipeline::make_fixture("flat-straight");
  auto composed = net::compose_median(flat, net::RatioK(0.5), net::StepP(1.0),
                                      net::MedianDirection::toward_median, 1);
  auto prog = path::program_for_composed(flat, composed, path::Tool{},
                                         path::StrategyParams{});
  MachineKinematics kin;
  auto res = sim::plan_program(prog, kin, 100.0);
  auto report = view::make_report("flat", prog, res, &flat);
  REQUIRE(report.per_area.size() == 4);
  double t = 0.0, len = 0.0;
  for (const auto& area : report.per_area) {
    t += area.time;
    len += area.length;
    CHECK(area.slow_fraction >= 0.0);
    CHECK(area.slow_fraction <= 1.0);
  }
  CHECK(t == doctest::Approx(report.total_time).epsilon(1e-9));
  CHECK(len == doctest::Approx(prog.total_length()).epsilon(1e-9));
  CHECK(report.boundary_slow_fraction >= 0.0);
  CHECK(report.boundary_slow_fraction <= 1.0);
  CHECK(report.set_point == doctest::Approx(100.0));
}

TEST_CASE("comparison table semantics") {
  auto a = synthetic("a", 0.30, 100.0);
  auto b = synthetic("b", 0.10, 120.0);
  auto c = synthetic("c", 0.10, 110.0);
  auto table = view::compare({a, b, c});
  REQUIRE(table.size() == 3);
  CHECK(table[0].delta_pct == doctest::Approx(0.0));
  CHECK(table[1].delta_pct == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(table[2].delta_pct == doctest::Approx(10.0).epsilon(1e-12));
  // Rank is lexicographic on (slow_fraction, total_time): c beats b beats a.
  CHECK(table[0].rank == 3);
  CHECK(table[1].rank == 2);
  CHECK(table[2].rank == 1);

  // Ties keep input order.
  auto tied = view::compare({synthetic("x", 0.2, 50.0),
                             synthetic("y", 0.2, 50.0)});
  CHECK(tied[0].rank == 1);
  CHECK(tied[1].rank == 2);

  // Swapping the baseline flips the sign of the relative delta.
  auto swapped = view::compare({b, a});
  CHECK(swapped[1].delta_pct ==
        doctest::Approx(-100.0 * 20.0 / 120.0).epsilon(1e-12));

  CHECK_THROWS_AS(view::compare({a}), Error);
  auto other_sp = synthetic("d", 0.1, 90.0);
  other_sp.set_point = 50.0;
  CHECK_THROWS_AS(view::compare({a, other_sp}), Error);
}

TEST_CASE("feed map rows mirror the program blocks") {
  MachineKinematics kin;
  auto prog = program_with_lengths({100.0, 100.0});
  auto res = sim::plan_program(prog, kin, 100.0);
  auto rows = view::feed_map(res, prog);
  REQUIRE(rows.size() == prog.blocks.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].block == i);
    geom::Point3 mid = (prog.blocks[i].start + prog.blocks[i].end) * 0.5;
    CHECK(geom::distance(rows[i].midpoint, mid) < 1e-12);
    CHECK(rows[i].fraction ==
          doctest::Approx(rows[i].mean_feed / 100.0).epsilon(1e-12));
  }
  auto csv = view::feed_map_csv(rows);
  CHECK(csv.rfind("block,x,y,z,mean_feed,fraction", 0) == 0);
}

TEST_CASE("feed map svg colors saturation and starvation") {
  MachineKinematics kin;
  auto cruise_prog = program_with_lengths({1000.0});
  auto cruise = sim::plan_program(cruise_prog, kin, 10.0);
  auto svg_fast = view::feed_map_svg(view::feed_map(cruise, cruise_prog),
                                     cruise_prog);
  CHECK(svg_fast.find("<svg") != std::string::npos);
  CHECK(svg_fast.find("#2a9d3e") != std::string::npos);

  auto starved_prog = program_with_lengths({0.5});
  auto starved = sim::plan_program(starved_prog, kin, 500.0);
  auto svg_slow = view::feed_map_svg(view::feed_map(starved, starved_prog),
                                     starved_prog);
  CHECK(svg_slow.find("#d33a2f") != std::string::npos);
}

TEST_CASE("candidate ranking picks the lexicographic best") {
  auto flat = pipeline::make_fixture("flat-straight");
  auto net1 = net::build_net(flat, flat.boundary1, flat.boundary2,
                             net::RatioK(0.75), net::StepP(1.0));
  std::vector<net::ComposedArea> candidates;
  candidates.push_back(net::compose_boundary_direction(net1, 0));
  candidates.push_back(net::compose_median(flat, net::RatioK(0.5),
                                           net::StepP(1.0),
                                           net::MedianDirection::toward_median,
                                           0));
  MachineKinematics kin;
  auto ranked = view::rank_candidates(flat, candidates, path::Tool{},
                                      path::StrategyParams{}, kin, 100.0);
  REQUIRE(ranked.reports.size() == 2);
  REQUIRE(ranked.table.size() == 2);
  CHECK(ranked.reports[0].name == "candidate-1");
  CHECK(ranked.reports[1].name == "candidate-2");
  CHECK(ranked.best < 2);
  CHECK(ranked.table[ranked.best].rank == 1);
}
