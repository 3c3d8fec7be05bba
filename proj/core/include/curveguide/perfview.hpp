#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "curveguide/curvenet.hpp"
#include "curveguide/feedsim.hpp"
#include "curveguide/geometry.hpp"
#include "curveguide/toolpath.hpp"

namespace curveguide::view {

// Length-weighted histogram; bin i covers [edges[i], edges[i+1]), the last
// bin is closed above when its upper edge is finite.
struct Histogram {
  std::vector<double> edges;         // bin count + 1
  std::vector<std::size_t> counts;   // per bin
  std::vector<double> length_share;  // per bin, sums to 1
};

// Block lengths binned at [0, 0.1, 0.5, 1, 2, 5, 10, inf) mm.
Histogram block_length_hist(const path::IsoProgram& program);

// Mean block feeds as fractions of the set point, binned at 10% increments;
// the extra top bin holds blocks that hold the set point over their whole
// length (fraction within 1e-9 of 1).
Histogram feed_hist(const sim::SimResult& result);

std::string histogram_csv(const Histogram& hist);

struct FeedMapRow {
  std::size_t block = 0;
  geom::Point3 midpoint;
  double mean_feed = 0.0;  // mm/s
  double fraction = 0.0;   // of set point
};

std::vector<FeedMapRow> feed_map(const sim::SimResult& result,
                                 const path::IsoProgram& program);
std::string feed_map_csv(const std::vector<FeedMapRow>& rows);

// Top view of the program, one line per block, colored by fraction of the
// set point: green >= 95%, yellow 60..95%, red < 60%.
std::string feed_map_svg(const std::vector<FeedMapRow>& rows,
                         const path::IsoProgram& program);

struct AreaPerf {
  int area_index = 0;
  double time = 0.0;           // s
  double length = 0.0;         // mm
  double slow_fraction = 0.0;  // within the area
};

struct PerfReport {
  std::string name;
  double set_point = 0.0;   // mm/s
  double total_time = 0.0;  // s
  Histogram block_length_hist;
  Histogram feed_hist;
  // Path-length share whose mean feed falls below slow_threshold of the
  // set point; the boundary variant restricts both numerator and
  // denominator to blocks whose midpoint lies within two stepovers of a
  // feature boundary.
  double slow_fraction = 0.0;
  double boundary_slow_fraction = 0.0;
  std::vector<AreaPerf> per_area;
};

// feature may be null; then boundary_slow_fraction is reported as 0.
PerfReport make_report(const std::string& name,
                       const path::IsoProgram& program,
                       const sim::SimResult& result,
                       const geom::FeatureModel* feature = nullptr,
                       double slow_threshold = 0.95);

struct ComparisonRow {
  std::string name;
  double total_time = 0.0;
  double delta_pct = 0.0;  // vs the first report
  double slow_fraction = 0.0;
  double boundary_slow_fraction = 0.0;
  int rank = 0;  // 1 = best by (slow_fraction, total_time)
};

// Requires at least two reports with identical set points.
std::vector<ComparisonRow> compare(const std::vector<PerfReport>& reports);

struct RankResult {
  std::size_t best = 0;  // index into the candidate list
  std::vector<PerfReport> reports;
  std::vector<ComparisonRow> table;
};

// Builds, simulates and reports a program for every candidate decomposition
// and picks the lexicographic (slow_fraction, total_time) minimum; ties keep
// input order.
RankResult rank_candidates(const geom::FeatureModel& feature,
                           const std::vector<net::ComposedArea>& candidates,
                           const path::Tool& tool,
                           const path::StrategyParams& params,
                           const sim::MachineKinematics& kin,
                           double set_point);

}  // namespace curveguide::view
