#include "curveguide/curvenet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace curveguide::net {

using geom::DiscretizationPlane;
using geom::FeatureModel;
using geom::Point3;
using geom::SplineCurve;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double active_step(const StepP& step, double s) {
  for (const auto& o : step.overrides)
    if (s >= o.begin - 1e-9 && s < o.end - 1e-9) return o.step;
  return step.value;
}

std::vector<Point3> blend_points(const std::vector<Point3>& pa,
                                 const std::vector<Point3>& pb, double k,
                                 const geom::SurfacePatch& surface) {
  std::vector<Point3> out(pa.size());
  for (size_t i = 0; i < pa.size(); ++i) {
    Point3 p = pa[i] + (pb[i] - pa[i]) * k;
    out[i] = geom::project_to_surface(p, surface);
  }
  return out;
}

SplineCurve fit_blend(const std::vector<Point3>& pts) {
  if (pts.size() < 2)
    throw_invalid("intermediate curve needs at least 2 stations");
  return geom::fit_spline(pts, 5);
}

struct StationGap {
  double distance = kInf;
  bool crossing = false;
};

// Station-wise gap between two point sets sampled on the same plane grid.
StationGap station_gap(const std::vector<Point3>& pa,
                       const std::vector<Point3>& pb,
                       std::span<const DiscretizationPlane> planes) {
  StationGap g;
  double prev_lat = 0.0;
  bool have_prev = false;
  for (size_t i = 0; i < pa.size(); ++i) {
    g.distance = std::min(g.distance, geom::distance(pa[i], pb[i]));
    double lat = (pb[i] - pa[i]).xy().dot(planes[i].normal.perp());
    if (std::abs(lat) < 1e-12 ||
        (have_prev && (lat < 0.0) != (prev_lat < 0.0))) {
      g.crossing = true;
      g.distance = 0.0;
      return g;
    }
    prev_lat = lat;
    have_prev = true;
  }
  return g;
}

}  // namespace

std::vector<DiscretizationPlane> station_planes(const FeatureModel& feature,
                                                const StepP& step) {
  double s0 = feature.station_begin();
  double s1 = feature.station_end();
  if (!(s0 < s1)) throw_invalid("feature has an empty station extent");

  // Segment the extent at override edges so each override interval starts on
  // a station.
  std::vector<double> cuts{s0, s1};
  for (const auto& o : step.overrides) {
    if (o.begin > s0 && o.begin < s1) cuts.push_back(o.begin);
    if (o.end > s0 && o.end < s1) cuts.push_back(o.end);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double a, double b) { return b - a < 1e-9; }),
             cuts.end());

  std::vector<DiscretizationPlane> planes;
  geom::Vec2 dir = feature.machining_dir;
  for (size_t c = 0; c + 1 < cuts.size(); ++c) {
    double a = cuts[c], b = cuts[c + 1];
    double h = active_step(step, a + 1e-12);
    for (double s = a; s < b - 1e-9; s += h) planes.push_back({s, dir});
  }
  planes.push_back({s1, dir});
  if (planes.size() < 2) throw_invalid("step produced fewer than 2 stations");
  return planes;
}

SplineCurve intermediate_curve(const SplineCurve& a, const SplineCurve& b,
                               RatioK k, const StepP& step,
                               const FeatureModel& feature) {
  auto planes = station_planes(feature, step);
  auto pa = geom::curve_station_points(a, planes);
  auto pb = geom::curve_station_points(b, planes);
  return fit_blend(blend_points(pa, pb, k.value, feature.surface));
}

SplineCurve median_curve(const FeatureModel& feature, const StepP& step) {
  return intermediate_curve(feature.boundary1, feature.boundary2, RatioK(0.5),
                            step, feature);
}

CurveNet build_net(const FeatureModel& feature, const SplineCurve& start,
                   const SplineCurve& target, RatioK k, const StepP& step,
                   double stop_eps, int max_iters, std::string start_id,
                   std::string target_id) {
  if (stop_eps < 0.0) throw_invalid("stop_eps must be >= 0");
  if (max_iters < 1) throw_invalid("max_iters must be >= 1");

  auto planes = station_planes(feature, step);
  auto target_pts = geom::curve_station_points(target, planes);
  auto cur_pts = geom::curve_station_points(start, planes);

  CurveNet result{start, target, {}, std::move(start_id), std::move(target_id),
                k.value, step, stop_eps, false};

  for (int it = 0; it < max_iters; ++it) {
    auto pts = blend_points(cur_pts, target_pts, k.value, feature.surface);
    auto gap = station_gap(pts, target_pts, planes);
    if (gap.crossing || gap.distance <= stop_eps) {
      // The offending candidate is discarded; the previous curve stands.
      return result;
    }
    result.interiors.push_back(fit_blend(pts));
    cur_pts = std::move(pts);
  }
  result.truncated = true;
  return result;
}

ComposedArea compose_boundary_direction(const CurveNet& net, int j) {
  if (j < 0 || j > static_cast<int>(net.interiors.size()))
    throw_invalid("compose_boundary_direction: j exceeds the net");
  ComposedArea out;
  out.guides.push_back(net.start);
  out.ids.push_back(net.start_id);
  for (int i = 0; i < j; ++i) {
    out.guides.push_back(net.interiors[i]);
    out.ids.push_back("C" + std::to_string(i + 1));
  }
  out.guides.push_back(net.target);
  out.ids.push_back(net.target_id);
  return out;
}

ComposedArea compose_median(const FeatureModel& feature, RatioK k,
                            const StepP& step, MedianDirection direction,
                            int levels, double stop_eps, int max_iters) {
  if (levels < 0) throw_invalid("levels must be >= 0");
  SplineCurve med = median_curve(feature, step);

  CurveNet n1 = direction == MedianDirection::toward_median
                    ? build_net(feature, feature.boundary1, med, k, step,
                                stop_eps, max_iters, "B1", "C_med")
                    : build_net(feature, med, feature.boundary1, k, step,
                                stop_eps, max_iters, "C_med", "B1");
  CurveNet n2 = direction == MedianDirection::toward_median
                    ? build_net(feature, feature.boundary2, med, k, step,
                                stop_eps, max_iters, "B2", "C_med")
                    : build_net(feature, med, feature.boundary2, k, step,
                                stop_eps, max_iters, "C_med", "B2");

  ComposedArea out;
  int take1 = std::min<int>(levels, static_cast<int>(n1.interiors.size()));
  int take2 = std::min<int>(levels, static_cast<int>(n2.interiors.size()));
  out.truncated = take1 < levels || take2 < levels;

  // Guides ordered laterally from B1 to B2. For nets built from the median
  // the interiors march toward the boundary, so their order is reversed on
  // the B1 side and kept on the B2 side; toward-median nets are the opposite.
  out.guides.push_back(feature.boundary1);
  out.ids.push_back("B1");
  if (direction == MedianDirection::toward_median) {
    for (int i = 0; i < take1; ++i) {
      out.guides.push_back(n1.interiors[i]);
      out.ids.push_back("L" + std::to_string(i + 1));
    }
  } else {
    for (int i = take1 - 1; i >= 0; --i) {
      out.guides.push_back(n1.interiors[i]);
      out.ids.push_back("L" + std::to_string(i + 1));
    }
  }
  out.guides.push_back(med);
  out.ids.push_back("C_med");
  if (direction == MedianDirection::toward_median) {
    for (int i = take2 - 1; i >= 0; --i) {
      out.guides.push_back(n2.interiors[i]);
      out.ids.push_back("R" + std::to_string(i + 1));
    }
  } else {
    for (int i = 0; i < take2; ++i) {
      out.guides.push_back(n2.interiors[i]);
      out.ids.push_back("R" + std::to_string(i + 1));
    }
  }
  out.guides.push_back(feature.boundary2);
  out.ids.push_back("B2");
  return out;
}

StepP determine_step(const FeatureModel& feature, const StepP& p0) {
  auto s1 = geom::inflection_stations(feature.boundary1, feature.machining_dir);
  auto s2 = geom::inflection_stations(feature.boundary2, feature.machining_dir);
  std::vector<double> all;
  all.reserve(s1.size() + s2.size());
  all.insert(all.end(), s1.begin(), s1.end());
  all.insert(all.end(), s2.begin(), s2.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end(),
                        [](double a, double b) { return b - a < 1e-6; }),
            all.end());

  StepP out = p0;
  for (size_t i = 0; i + 1 < all.size(); ++i) {
    double gap = all[i + 1] - all[i];
    if (gap < 2.0 * p0.value)
      out.overrides.push_back({all[i], all[i + 1], gap / 2.0});
  }
  return out;
}

GuidanceMethodResult guidance_method(const FeatureModel& feature,
                                     const StepP& p0,
                                     std::span<const double> k_refine) {
  GuidanceMethodResult res{ComposedArea{}, determine_step(feature, p0), {}};
  const StepP& step = res.step;
  SplineCurve med = median_curve(feature, step);
  auto planes = station_planes(feature, step);
  auto med_pts = geom::curve_station_points(med, planes);

  auto min_radius = [](const SplineCurve& c) {
    auto prof = geom::curvature_profile(c, 256);
    return geom::min_curvature_radius(prof);
  };
  double r_med = min_radius(med);

  // Returns the half's interior guide, or nothing when both guides are
  // straight or the blend lands on top of the boundary.
  auto half_interior = [&](const SplineCurve& boundary, double k)
      -> std::vector<SplineCurve> {
    double r_b = min_radius(boundary);
    if (std::isinf(r_b) && std::isinf(r_med)) return {};
    // Start from the guide whose smallest curvature radius is greatest;
    // ties go to the median.
    const bool start_from_boundary = r_b > r_med;
    auto pb = geom::curve_station_points(boundary, planes);
    auto pts = start_from_boundary
                   ? blend_points(pb, med_pts, k, feature.surface)
                   : blend_points(med_pts, pb, k, feature.surface);
    auto gap = station_gap(pts, start_from_boundary ? med_pts : pb, planes);
    if (gap.crossing || gap.distance <= 1e-9) return {};
    return {fit_blend(pts)};
  };

  auto build = [&](double k) {
    ComposedArea area;
    area.guides.push_back(feature.boundary1);
    area.ids.push_back("B1");
    for (auto& c : half_interior(feature.boundary1, k)) {
      area.guides.push_back(std::move(c));
      area.ids.push_back("C1");
    }
    area.guides.push_back(med);
    area.ids.push_back("C_med");
    for (auto& c : half_interior(feature.boundary2, k)) {
      area.guides.push_back(std::move(c));
      area.ids.push_back("C2");
    }
    area.guides.push_back(feature.boundary2);
    area.ids.push_back("B2");
    return area;
  };

  res.decomposition = build(0.75);
  if (k_refine.empty()) {
    res.candidates.emplace_back(0.75, res.decomposition);
  } else {
    for (double k : k_refine) {
      RatioK check(k);  // validates range
      res.candidates.emplace_back(k, build(k));
    }
  }
  return res;
}

}  // namespace curveguide::net
