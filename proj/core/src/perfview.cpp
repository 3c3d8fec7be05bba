#include "curveguide/perfview.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <limits>
#include <map>

#include "curveguide/errors.hpp"

namespace curveguide::view {
namespace {

constexpr double kTopBinSlack = 1e-9;

std::string format(const char* fmt, ...) {
  char buf[256];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  return buf;
}

Histogram make_hist(const std::vector<double>& edges) {
  Histogram h;
  h.edges = edges;
  h.counts.assign(edges.size() - 1, 0);
  h.length_share.assign(edges.size() - 1, 0.0);
  return h;
}

void deposit(Histogram& h, std::size_t bin, double length) {
  h.counts[bin] += 1;
  h.length_share[bin] += length;
}

void normalize(Histogram& h, double total_length) {
  if (total_length <= 0.0) return;
  for (double& share : h.length_share) share /= total_length;
}

std::size_t lower_closed_bin(const Histogram& h, double value) {
  std::size_t last = h.counts.size() - 1;
  for (std::size_t i = 0; i < last; ++i)
    if (value < h.edges[i + 1]) return i;
  return last;
}

void check_matched(const sim::SimResult& result,
                   const path::IsoProgram& program) {
  if (program.blocks.empty()) throw_invalid("program has no blocks");
  if (result.plans.size() != program.blocks.size())
    throw_invalid("simulation does not match the program block count");
}

// Minimum xy distance from p to a sampled polyline of the curve.
double xy_distance_to_curve(const geom::Point3& p,
                            const std::vector<geom::Point3>& samples) {
  double best = std::numeric_limits<double>::infinity();
  for (const geom::Point3& q : samples) {
    double dx = p.x - q.x, dy = p.y - q.y;
    best = std::min(best, std::hypot(dx, dy));
  }
  return best;
}

std::vector<geom::Point3> sample_curve(const geom::SplineCurve& c, int n) {
  const auto& knots = c.knots();
  double t0 = knots.front(), t1 = knots.back();
  std::vector<geom::Point3> pts(n);
  for (int i = 0; i < n; ++i)
    pts[i] = c.evaluate(t0 + (t1 - t0) * i / (n - 1));
  return pts;
}

const char* fraction_color(double fraction) {
  if (fraction >= 0.95) return "#2a9d3e";
  if (fraction >= 0.60) return "#e2b93b";
  return "#d33a2f";
}

}  // namespace

Histogram block_length_hist(const path::IsoProgram& program) {
  if (program.blocks.empty()) throw_invalid("program has no blocks");
  Histogram h = make_hist({0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0,
                           std::numeric_limits<double>::infinity()});
  double total = 0.0;
  for (const path::IsoBlock& b : program.blocks) {
    double len = b.length();
    deposit(h, lower_closed_bin(h, len), len);
    total += len;
  }
  normalize(h, total);
  return h;
}

Histogram feed_hist(const sim::SimResult& result) {
  if (result.plans.empty()) throw_invalid("simulation has no blocks");
  std::vector<double> edges;
  for (int i = 0; i <= 10; ++i) edges.push_back(i / 10.0);
  edges.push_back(std::numeric_limits<double>::infinity());
  Histogram h = make_hist(edges);
  double total = 0.0;
  for (const sim::BlockPlan& plan : result.plans) {
    double fraction = plan.mean_feed / result.set_point;
    std::size_t bin = fraction >= 1.0 - kTopBinSlack
                          ? h.counts.size() - 1
                          : std::min<std::size_t>(9, lower_closed_bin(h, fraction));
    deposit(h, bin, plan.length);
    total += plan.length;
  }
  normalize(h, total);
  return h;
}

std::string histogram_csv(const Histogram& hist) {
  std::string out = "bin_low,bin_high,count,length_share\n";
  for (std::size_t i = 0; i < hist.counts.size(); ++i) {
    double lo = hist.edges[i], hi = hist.edges[i + 1];
    out += std::isinf(lo) ? "inf" : format("%.6g", lo);
    out += ',';
    out += std::isinf(hi) ? "inf" : format("%.6g", hi);
    out += format(",%zu,%.9f\n", hist.counts[i], hist.length_share[i]);
  }
  return out;
}

std::vector<FeedMapRow> feed_map(const sim::SimResult& result,
                                 const path::IsoProgram& program) {
  check_matched(result, program);
  std::vector<FeedMapRow> rows;
  rows.reserve(result.plans.size());
  for (const sim::BlockPlan& plan : result.plans) {
    const path::IsoBlock& b = program.blocks[plan.block_index];
    FeedMapRow row;
    row.block = plan.block_index;
    row.midpoint = (b.start + b.end) * 0.5;
    row.mean_feed = plan.mean_feed;
    row.fraction = plan.mean_feed / result.set_point;
    rows.push_back(row);
  }
  return rows;
}

std::string feed_map_csv(const std::vector<FeedMapRow>& rows) {
  std::string out = "block,x,y,z,mean_feed,fraction\n";
  for (const FeedMapRow& r : rows)
    out += format("%zu,%.4f,%.4f,%.4f,%.4f,%.6f\n", r.block, r.midpoint.x,
                  r.midpoint.y, r.midpoint.z, r.mean_feed, r.fraction);
  return out;
}

std::string feed_map_svg(const std::vector<FeedMapRow>& rows,
                         const path::IsoProgram& program) {
  if (rows.empty()) throw_invalid("feed map is empty");
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
  double y0 = x0, y1 = -x0;
  for (const FeedMapRow& r : rows) {
    const path::IsoBlock& b = program.blocks[r.block];
    for (const geom::Point3& p : {b.start, b.end}) {
      x0 = std::min(x0, p.x);
      x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.y);
      y1 = std::max(y1, p.y);
    }
  }
  double w = std::max(x1 - x0, 1e-6), hgt = std::max(y1 - y0, 1e-6);
  double pad = 0.05 * std::max(w, hgt);
  double sw = 0.004 * std::max(w, hgt);
  // Machine y points up; flip into the SVG frame.
  auto Y = [&](double y) { return y1 - y + pad; };
  auto X = [&](double x) { return x - x0 + pad; };
  std::string out =
      format("<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 %.4f "
             "%.4f\">\n",
             w + 2 * pad, hgt + 2 * pad);
  for (const FeedMapRow& r : rows) {
    const path::IsoBlock& b = program.blocks[r.block];
    out += format("<line x1=\"%.4f\" y1=\"%.4f\" x2=\"%.4f\" y2=\"%.4f\" "
                  "stroke=\"%s\" stroke-width=\"%.4f\"/>\n",
                  X(b.start.x), Y(b.start.y), X(b.end.x), Y(b.end.y),
                  fraction_color(r.fraction), sw);
  }
  out += "</svg>\n";
  return out;
}

PerfReport make_report(const std::string& name,
                       const path::IsoProgram& program,
                       const sim::SimResult& result,
                       const geom::FeatureModel* feature,
                       double slow_threshold) {
  check_matched(result, program);
  if (!(slow_threshold > 0.0 && slow_threshold <= 1.0))
    throw_invalid("slow threshold must be in (0, 1]");

  PerfReport report;
  report.name = name;
  report.set_point = result.set_point;
  report.total_time = result.total_time;
  report.block_length_hist = block_length_hist(program);
  report.feed_hist = feed_hist(result);

  std::vector<geom::Point3> b1, b2;
  double band = 0.0;
  if (feature) {
    b1 = sample_curve(feature->boundary1, 257);
    b2 = sample_curve(feature->boundary2, 257);
    band = 2.0 * path::stepover_from_cusp(program.tool,
                                          program.params.cusp_height);
  }

  double slow_len = 0.0, total_len = 0.0;
  double band_slow_len = 0.0, band_len = 0.0;
  std::vector<char> is_slow(result.plans.size());
  for (std::size_t i = 0; i < result.plans.size(); ++i) {
    const sim::BlockPlan& plan = result.plans[i];
    bool slow = plan.mean_feed < slow_threshold * result.set_point;
    is_slow[i] = slow;
    total_len += plan.length;
    if (slow) slow_len += plan.length;
    if (feature) {
      const path::IsoBlock& b = program.blocks[plan.block_index];
      geom::Point3 mid = (b.start + b.end) * 0.5;
      double d = std::min(xy_distance_to_curve(mid, b1),
                          xy_distance_to_curve(mid, b2));
      if (d <= band) {
        band_len += plan.length;
        if (slow) band_slow_len += plan.length;
      }
    }
  }
  report.slow_fraction = total_len > 0.0 ? slow_len / total_len : 0.0;
  report.boundary_slow_fraction =
      band_len > 0.0 ? band_slow_len / band_len : 0.0;

  std::map<int, AreaPerf> areas;
  for (const path::Pass& pass : program.passes) {
    AreaPerf& ap = areas[pass.area_index];
    ap.area_index = pass.area_index;
    for (int k = 0; k < pass.block_count; ++k) {
      std::size_t i = static_cast<std::size_t>(pass.first_block + k);
      ap.time += result.plans[i].duration;
      ap.length += result.plans[i].length;
      if (is_slow[i]) ap.slow_fraction += result.plans[i].length;
    }
  }
  for (auto& [index, ap] : areas) {
    if (ap.length > 0.0) ap.slow_fraction /= ap.length;
    report.per_area.push_back(ap);
  }
  return report;
}

std::vector<ComparisonRow> compare(const std::vector<PerfReport>& reports) {
  if (reports.size() < 2) throw_invalid("need at least two reports");
  for (const PerfReport& r : reports)
    if (std::abs(r.set_point - reports.front().set_point) > 1e-9)
      throw_invalid("reports mix set points");

  std::vector<ComparisonRow> rows;
  rows.reserve(reports.size());
  for (const PerfReport& r : reports) {
    ComparisonRow row;
    row.name = r.name;
    row.total_time = r.total_time;
    row.delta_pct = reports.front().total_time > 0.0
                        ? 100.0 * (r.total_time - reports.front().total_time) /
                              reports.front().total_time
                        : 0.0;
    row.slow_fraction = r.slow_fraction;
    row.boundary_slow_fraction = r.boundary_slow_fraction;
    rows.push_back(row);
  }
  std::vector<std::size_t> order(rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     if (rows[a].slow_fraction != rows[b].slow_fraction)
                       return rows[a].slow_fraction < rows[b].slow_fraction;
                     return rows[a].total_time < rows[b].total_time;
                   });
  for (std::size_t pos = 0; pos < order.size(); ++pos)
    rows[order[pos]].rank = static_cast<int>(pos) + 1;
  return rows;
}

RankResult rank_candidates(const geom::FeatureModel& feature,
                           const std::vector<net::ComposedArea>& candidates,
                           const path::Tool& tool,
                           const path::StrategyParams& params,
                           const sim::MachineKinematics& kin,
                           double set_point) {
  if (candidates.empty()) throw_invalid("no candidates to rank");
  RankResult result;
  result.reports.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    path::IsoProgram program =
        path::program_for_composed(feature, candidates[i], tool, params);
    sim::SimResult simulated = sim::simulate(program, kin, set_point);
    result.reports.push_back(make_report("candidate-" + std::to_string(i + 1),
                                         program, simulated, &feature));
  }
  if (result.reports.size() >= 2) {
    result.table = compare(result.reports);
    for (std::size_t i = 0; i < result.table.size(); ++i)
      if (result.table[i].rank == 1) result.best = i;
  } else {
    const PerfReport& r = result.reports.front();
    result.table.push_back(
        {r.name, r.total_time, 0.0, r.slow_fraction, r.boundary_slow_fraction,
         1});
    result.best = 0;
  }
  return result;
}

}  // namespace curveguide::view
