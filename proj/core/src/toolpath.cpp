#include "curveguide/toolpath.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace curveguide::path {

using geom::DiscretizationPlane;
using geom::FeatureModel;
using geom::Point3;
using geom::SplineCurve;
using geom::Vec2;

namespace {

constexpr double kDenseStep = 0.25;  // mm between dense pass samples
constexpr double kInf = std::numeric_limits<double>::infinity();

double point_segment_distance(Point3 p, Point3 a, Point3 b) {
  Point3 ab = b - a;
  double len2 = ab.dot(ab);
  if (len2 < 1e-24) return geom::distance(p, a);
  double u = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return geom::distance(p, a + ab * u);
}

// Shared station extent of two guides along `dir`.
std::pair<double, double> guides_extent(const SplineCurve& a,
                                        const SplineCurve& b, Vec2 dir) {
  auto span_of = [&](const SplineCurve& c) {
    double lo = kInf, hi = -kInf;
    const int N = 257;
    for (int i = 0; i < N; ++i) {
      double s = c.evaluate(static_cast<double>(i) / (N - 1)).xy().dot(dir);
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    return std::pair{lo, hi};
  };
  auto [a0, a1] = span_of(a);
  auto [b0, b1] = span_of(b);
  double lo = std::max(a0, b0), hi = std::min(a1, b1);
  if (!(lo < hi)) throw_invalid("guides share no extent along the direction");
  return {lo, hi};
}

std::vector<DiscretizationPlane> dense_planes(double s0, double s1, Vec2 dir) {
  int n = std::max(2, static_cast<int>(std::ceil((s1 - s0) / kDenseStep)) + 1);
  std::vector<DiscretizationPlane> planes(n);
  for (int i = 0; i < n; ++i)
    planes[i] = {s0 + (s1 - s0) * i / (n - 1), dir};
  return planes;
}

// Assembles a program from ordered pass polylines; zigzag alternates the
// travel direction by global pass parity.
IsoProgram emit_program(std::vector<PassPolyline>& polylines, const Tool& tool,
                        const StrategyParams& params,
                        std::vector<PassPolyline>* keep_dense) {
  IsoProgram prog;
  prog.tool = tool;
  prog.params = params;
  int pass_idx = 0;
  for (auto& poly : polylines) {
    if (poly.points.size() < 2) continue;
    if (params.sweep == Sweep::zigzag && (pass_idx % 2) == 1)
      std::reverse(poly.points.begin(), poly.points.end());
    auto blocks =
        linearize(poly.points, params.chordal_tolerance, params.feed_set_point);
    Pass pass;
    pass.first_block = static_cast<int>(prog.blocks.size());
    pass.block_count = static_cast<int>(blocks.size());
    pass.area_index = poly.area_index;
    prog.blocks.insert(prog.blocks.end(), blocks.begin(), blocks.end());
    prog.passes.push_back(pass);
    if (keep_dense) keep_dense->push_back(poly);
    ++pass_idx;
  }
  if (prog.blocks.empty())
    throw_empty("toolpath produced no blocks");
  return prog;
}

// ----------------------------------------------------------------------------
// Guidance (morphing) passes
// ----------------------------------------------------------------------------

std::vector<PassPolyline> guidance_polylines(const FeatureModel& feature,
                                             const net::MachiningArea& area,
                                             const Tool& tool,
                                             const StrategyParams& params,
                                             int area_index) {
  Vec2 dir = feature.machining_dir;
  auto [s0, s1] = guides_extent(area.lower, area.upper, dir);
  auto planes = dense_planes(s0, s1, dir);
  auto lo = geom::curve_station_points(area.lower, planes);
  auto hi = geom::curve_station_points(area.upper, planes);
  const size_t M = planes.size();

  double maxgap = 0.0;
  for (size_t j = 0; j < M; ++j)
    maxgap = std::max(maxgap, geom::distance(lo[j], hi[j]));

  const double stepover = stepover_from_cusp(tool, params.cusp_height);

  auto pass_points = [&](double s) {
    std::vector<Point3> pts(M);
    for (size_t j = 0; j < M; ++j) {
      Point3 p = lo[j] + (hi[j] - lo[j]) * s;
      pts[j] = geom::project_to_surface(p, feature.surface);
    }
    return pts;
  };

  std::vector<PassPolyline> out;
  if (maxgap < 1e-9) {
    // Coincident guides: one pass, no morphing.
    out.push_back({pass_points(0.0), area_index});
    return out;
  }

  int n_pass = std::max(2, 1 + static_cast<int>(std::ceil(maxgap / stepover)));
  for (;; ++n_pass) {
    if (n_pass > 100000) throw_internal("pass count runaway");
    double worst = 0.0;
    auto prev = pass_points(0.0);
    for (int i = 1; i < n_pass && worst <= stepover; ++i) {
      auto cur = pass_points(static_cast<double>(i) / (n_pass - 1));
      for (size_t j = 0; j < M; ++j)
        worst = std::max(worst, geom::distance(prev[j], cur[j]));
      prev = std::move(cur);
    }
    if (worst <= stepover + 1e-12) break;
  }

  out.reserve(n_pass);
  for (int i = 0; i < n_pass; ++i)
    out.push_back(
        {pass_points(static_cast<double>(i) / (n_pass - 1)), area_index});
  return out;
}

// ----------------------------------------------------------------------------
// Parallel-plane passes
// ----------------------------------------------------------------------------

std::vector<PassPolyline> parallel_polylines(const FeatureModel& feature,
                                             const net::MachiningArea& area,
                                             Vec2 basic_dir, const Tool& tool,
                                             const StrategyParams& params,
                                             int area_index) {
  Vec2 bdir = basic_dir.normalized();
  Vec2 lat = bdir.perp();
  auto [a0raw, a1raw] = guides_extent(area.lower, area.upper, bdir);

  // Overrun extends the passes past the open sides, clamped to the surface
  // domain so the height stays defined.
  double a0 = a0raw, a1 = a1raw;
  if (params.overrun > 0.0) {
    // Only the axis-aligned case can be clamped to the surface domain
    // exactly; other directions keep the unextended extent.
    const auto& d = feature.surface.domain();
    if (std::abs(bdir.x) == 1.0 && bdir.y == 0.0) {
      a0 = std::max(a0 - params.overrun, bdir.x > 0 ? d.x0 : -d.x1);
      a1 = std::min(a1 + params.overrun, bdir.x > 0 ? d.x1 : -d.x0);
    }
  }

  auto along_planes = dense_planes(a0raw, a1raw, bdir);
  auto plo = geom::curve_station_points(area.lower, along_planes);
  auto phi = geom::curve_station_points(area.upper, along_planes);
  const size_t M = along_planes.size();

  // Lateral guide profiles over the along grid.
  std::vector<double> glo(M), ghi(M);
  double cmin = kInf, cmax = -kInf;
  for (size_t i = 0; i < M; ++i) {
    double l1 = plo[i].xy().dot(lat), l2 = phi[i].xy().dot(lat);
    glo[i] = std::min(l1, l2);
    ghi[i] = std::max(l1, l2);
    cmin = std::min(cmin, glo[i]);
    cmax = std::max(cmax, ghi[i]);
  }

  const double stepover = stepover_from_cusp(tool, params.cusp_height);

  auto xy_at = [&](double a, double c) {
    Vec2 q = bdir * a + lat * c;
    return q;
  };
  auto height_at = [&](double a, double c) {
    Vec2 q = xy_at(a, c);
    return feature.surface.height(q.x, q.y);
  };

  // Max surface-measured distance between the lateral lines c and c2,
  // sampled along the shared along-extent.
  auto lane_gap = [&](double c, double c2) {
    double worst = 0.0;
    for (size_t i = 0; i < M; i += 2) {
      double a = along_planes[i].station;
      Vec2 q = xy_at(a, c), q2 = xy_at(a, c2);
      if (!feature.surface.domain().contains(q.x, q.y) ||
          !feature.surface.domain().contains(q2.x, q2.y))
        continue;
      double dz = height_at(a, c2) - height_at(a, c);
      worst = std::max(worst, std::hypot(c2 - c, dz));
    }
    return worst;
  };

  // March lateral offsets with adaptive spacing so the surface stepover
  // stays within budget.
  std::vector<double> lanes{cmin};
  while (lanes.back() < cmax - 1e-9) {
    double c = lanes.back();
    double step = std::min(stepover, cmax - c);
    if (lane_gap(c, c + step) > stepover) {
      double lo = 0.0, hi = step;
      for (int it = 0; it < 30; ++it) {
        double mid = 0.5 * (lo + hi);
        if (lane_gap(c, c + mid) > stepover)
          hi = mid;
        else
          lo = mid;
      }
      step = lo;
      if (step < 1e-6) step = 1e-6;  // pathological slope; keep marching
    }
    lanes.push_back(std::min(c + step, cmax));
  }

  // Clip each lane against the guides and cut it into in-material passes.
  std::vector<PassPolyline> out;
  for (double c : lanes) {
    auto inside = [&](size_t i) {
      return c >= glo[i] - 1e-9 && c <= ghi[i] + 1e-9;
    };
    size_t i = 0;
    while (i < M) {
      if (!inside(i)) {
        ++i;
        continue;
      }
      size_t j = i;
      while (j + 1 < M && inside(j + 1)) ++j;
      // Interval [i, j]; refine the open ends by interpolating the guide
      // profiles between grid samples.
      double aS = along_planes[i].station;
      double aE = along_planes[j].station;
      if (i > 0) {
        // Violation f > 0 means the lane sits outside [glo, ghi]; the
        // boundary crossing is where f changes sign.
        double a_prev = along_planes[i - 1].station;
        double f0 = std::max(glo[i - 1] - c, c - ghi[i - 1]);
        double f1 = std::max(glo[i] - c, c - ghi[i]);
        if (f0 > 0.0 && f1 <= 0.0)
          aS = a_prev +
               (along_planes[i].station - a_prev) * (f0 / (f0 - f1));
      }
      if (j + 1 < M) {
        double a_next = along_planes[j + 1].station;
        double f0 = std::max(glo[j] - c, c - ghi[j]);
        double f1 = std::max(glo[j + 1] - c, c - ghi[j + 1]);
        if (f1 > 0.0 && f0 <= 0.0)
          aE = along_planes[j].station +
               (a_next - along_planes[j].station) * ((0.0 - f0) / (f1 - f0));
      }
      // Open-side ends get the overrun extension.
      if (i == 0 && a0 < a0raw) aS = a0;
      if (j + 1 == M && a1 > a1raw) aE = a1;

      if (aE - aS > 1e-9) {
        int n = std::max(
            2, static_cast<int>(std::ceil((aE - aS) / kDenseStep)) + 1);
        std::vector<Point3> pts(n);
        for (int q = 0; q < n; ++q) {
          double a = aS + (aE - aS) * q / (n - 1);
          Vec2 xy = xy_at(a, c);
          pts[q] = {xy.x, xy.y, feature.surface.height(xy.x, xy.y)};
        }
        out.push_back({std::move(pts), area_index});
      }
      i = j + 1;
    }
  }
  return out;
}

}  // namespace

// ----------------------------------------------------------------------------
// Public API
// ----------------------------------------------------------------------------

double IsoProgram::total_length() const {
  double s = 0.0;
  for (const auto& b : blocks) s += b.length();
  return s;
}

double stepover_from_cusp(const Tool& tool, double cusp_height) {
  if (!(tool.ball_radius > 0.0)) throw_invalid("tool radius must be positive");
  if (!(cusp_height > 0.0) || cusp_height >= tool.ball_radius)
    throw_invalid("cusp height must lie in (0, tool radius)");
  double r = tool.ball_radius, h = cusp_height;
  return 2.0 * std::sqrt(2.0 * r * h - h * h);
}

std::vector<IsoBlock> linearize(std::span<const Point3> dense, double tol,
                                double feed_set) {
  if (!(tol > 0.0)) throw_invalid("chordal tolerance must be positive");
  // Collapse exact duplicates.
  std::vector<Point3> pts;
  pts.reserve(dense.size());
  for (const auto& p : dense)
    if (pts.empty() || geom::distance(pts.back(), p) > 1e-12)
      pts.push_back(p);
  if (pts.size() < 2)
    throw_degenerate("linearize needs at least 2 distinct points");

  auto ok = [&](size_t i, size_t j) {
    for (size_t k = i + 1; k < j; ++k)
      if (point_segment_distance(pts[k], pts[i], pts[j]) > tol) return false;
    return true;
  };

  std::vector<IsoBlock> blocks;
  size_t i = 0;
  const size_t n = pts.size();
  while (i + 1 < n) {
    // Exponential growth then binary search for the longest admissible chord.
    size_t lo = i + 1, probe = 1;
    while (lo + probe < n && ok(i, lo + probe)) {
      lo += probe;
      probe *= 2;
    }
    size_t hi = std::min(n - 1, lo + probe);
    while (lo < hi) {
      size_t mid = (lo + hi + 1) / 2;
      if (ok(i, mid))
        lo = mid;
      else
        hi = mid - 1;
    }
    blocks.push_back({pts[i], pts[lo], feed_set});
    i = lo;
  }
  return blocks;
}

IsoProgram parallel_planes_toolpath(const FeatureModel& feature,
                                    const net::MachiningArea& area,
                                    Vec2 basic_dir, const Tool& tool,
                                    const StrategyParams& params) {
  auto polys = parallel_polylines(feature, area, basic_dir, tool, params, 0);
  return emit_program(polys, tool, params, nullptr);
}

ToolpathDetail parallel_planes_toolpath_detailed(const FeatureModel& feature,
                                                 const net::MachiningArea& area,
                                                 Vec2 basic_dir,
                                                 const Tool& tool,
                                                 const StrategyParams& params) {
  auto polys = parallel_polylines(feature, area, basic_dir, tool, params, 0);
  ToolpathDetail det;
  det.program = emit_program(polys, tool, params, &det.dense);
  return det;
}

IsoProgram guidance_toolpath(const FeatureModel& feature,
                             const net::MachiningArea& area, const Tool& tool,
                             const StrategyParams& params) {
  auto polys = guidance_polylines(feature, area, tool, params, 0);
  return emit_program(polys, tool, params, nullptr);
}

ToolpathDetail guidance_toolpath_detailed(const FeatureModel& feature,
                                          const net::MachiningArea& area,
                                          const Tool& tool,
                                          const StrategyParams& params) {
  auto polys = guidance_polylines(feature, area, tool, params, 0);
  ToolpathDetail det;
  det.program = emit_program(polys, tool, params, &det.dense);
  return det;
}

namespace {

std::vector<PassPolyline> composed_polylines(const FeatureModel& feature,
                                             const net::ComposedArea& composed,
                                             const Tool& tool,
                                             const StrategyParams& params) {
  if (composed.area_count() < 1)
    throw_invalid("composed area has no elementary areas");
  std::vector<PassPolyline> all;
  for (int i = 0; i < composed.area_count(); ++i) {
    auto polys =
        guidance_polylines(feature, composed.area(i), tool, params, i);
    // The shared guide was already machined as the previous area's last
    // pass; drop the duplicate.
    size_t begin = 0;
    if (i > 0 && !all.empty() && !polys.empty()) {
      const auto& prev = all.back().points;
      const auto& cur = polys.front().points;
      if (prev.size() == cur.size()) {
        double worst = 0.0;
        for (size_t k = 0; k < cur.size(); ++k)
          worst = std::max(worst, geom::distance(prev[k], cur[k]));
        if (worst < 1e-6) begin = 1;
      }
    }
    for (size_t k = begin; k < polys.size(); ++k)
      all.push_back(std::move(polys[k]));
  }
  return all;
}

}  // namespace

IsoProgram program_for_composed(const FeatureModel& feature,
                                const net::ComposedArea& composed,
                                const Tool& tool,
                                const StrategyParams& params) {
  auto polys = composed_polylines(feature, composed, tool, params);
  return emit_program(polys, tool, params, nullptr);
}

ToolpathDetail program_for_composed_detailed(const FeatureModel& feature,
                                             const net::ComposedArea& composed,
                                             const Tool& tool,
                                             const StrategyParams& params) {
  auto polys = composed_polylines(feature, composed, tool, params);
  ToolpathDetail det;
  det.program = emit_program(polys, tool, params, &det.dense);
  return det;
}

std::string to_gcode(const IsoProgram& program) {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "(ball radius %.3f mm, chordal tol %.4f mm, cusp %.4f mm)",
                program.tool.ball_radius, program.params.chordal_tolerance,
                program.params.cusp_height);
  os << buf << "\n";
  std::snprintf(buf, sizeof buf, "(feed set point %.1f mm/min, %zu passes)",
                program.params.feed_set_point, program.passes.size());
  os << buf << "\n";
  int n = 1;
  for (const auto& pass : program.passes) {
    if (pass.block_count == 0) continue;
    const auto& first = program.blocks[pass.first_block];
    std::snprintf(buf, sizeof buf, "N%d G0 X%.4f Y%.4f Z%.4f", n++,
                  first.start.x, first.start.y, first.start.z);
    os << buf << "\n";
    for (int b = 0; b < pass.block_count; ++b) {
      const auto& blk = program.blocks[pass.first_block + b];
      std::snprintf(buf, sizeof buf, "N%d G1 X%.4f Y%.4f Z%.4f F%.1f", n++,
                    blk.end.x, blk.end.y, blk.end.z, blk.feed_set);
      os << buf << "\n";
    }
  }
  return os.str();
}

}  // namespace curveguide::path
