#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "curveguide/geometry.hpp"

namespace curveguide::net {

// Blend ratio between two guide curves, exclusive of the ends.
struct RatioK {
  double value;
  explicit RatioK(double v) : value(v) {
    if (!(v > 0.0 && v < 1.0))
      throw_invalid("ratio K must lie strictly between 0 and 1");
  }
};

// Discretization step along the machining direction, with optional local
// refinements over station intervals.
struct StepOverride {
  double begin = 0.0;
  double end = 0.0;
  double step = 0.0;
};

struct StepP {
  double value;
  std::vector<StepOverride> overrides;

  explicit StepP(double v, std::vector<StepOverride> ovr = {})
      : value(v), overrides(std::move(ovr)) {
    if (!(v > 0.0)) throw_invalid("step P must be positive");
    for (const auto& o : overrides)
      if (!(o.step > 0.0) || !(o.end > o.begin))
        throw_invalid("step override must have positive step and extent");
  }
};

// Station planes across the feature extent. Override interval edges always
// receive a station; the final station is clamped to the extent end.
std::vector<geom::DiscretizationPlane> station_planes(
    const geom::FeatureModel& feature, const StepP& step);

// The ratio curve: at every station, p = p_a + K * (p_b - p_a) in xy,
// projected onto the feature surface, then fit as a degree-5 spline.
geom::SplineCurve intermediate_curve(const geom::SplineCurve& a,
                                     const geom::SplineCurve& b, RatioK k,
                                     const StepP& step,
                                     const geom::FeatureModel& feature);

geom::SplineCurve median_curve(const geom::FeatureModel& feature,
                               const StepP& step);

// ----------------------------------------------------------------------------
// Curve nets and machining areas
// ----------------------------------------------------------------------------

struct CurveNet {
  geom::SplineCurve start;
  geom::SplineCurve target;
  std::vector<geom::SplineCurve> interiors;  // ordered start -> target
  std::string start_id = "B1";
  std::string target_id = "B2";
  double k = 0.5;
  StepP step{1.0};
  double stop_eps = 0.4;
  bool truncated = false;  // max_iters hit before the stop rule fired
};

// Iterates intermediate curves from `start` toward `target`; a candidate that
// crosses the target or comes within stop_eps of it is discarded and the
// iteration stops.
CurveNet build_net(const geom::FeatureModel& feature,
                   const geom::SplineCurve& start,
                   const geom::SplineCurve& target, RatioK k,
                   const StepP& step, double stop_eps = 0.4,
                   int max_iters = 50, std::string start_id = "B1",
                   std::string target_id = "B2");

// One elementary machining area between two guides.
struct MachiningArea {
  geom::SplineCurve lower;
  geom::SplineCurve upper;
  std::string lower_id = "B1";
  std::string upper_id = "B2";
};

// An ordered chain of guides spanning the feature; adjacent guides bound one
// elementary area each.
struct ComposedArea {
  std::vector<geom::SplineCurve> guides;
  std::vector<std::string> ids;
  bool truncated = false;

  int area_count() const { return static_cast<int>(guides.size()) - 1; }
  MachiningArea area(int i) const {
    if (i < 0 || i >= area_count()) throw_out_of_range("area index");
    return {guides[i], guides[i + 1], ids[i], ids[i + 1]};
  }
};

// Uses the first j interior curves of the net: j+1 areas.
ComposedArea compose_boundary_direction(const CurveNet& net, int j);

enum class MedianDirection { toward_median, from_median };

// Median pre-decomposition: a net in each half, `levels` interior curves per
// half, 2*levels + 2 areas. Falls back to what a half-net can supply (and
// sets `truncated`) when levels exceeds it.
ComposedArea compose_median(const geom::FeatureModel& feature, RatioK k,
                            const StepP& step, MedianDirection direction,
                            int levels, double stop_eps = 0.4,
                            int max_iters = 50);

// ----------------------------------------------------------------------------
// Four-step decomposition method
// ----------------------------------------------------------------------------

StepP determine_step(const geom::FeatureModel& feature, const StepP& p0);

struct GuidanceMethodResult {
  ComposedArea decomposition;  // the K = 0.75 construction
  StepP step;                  // after inflection-driven refinement
  // One candidate per requested refinement ratio, for downstream ranking.
  std::vector<std::pair<double, ComposedArea>> candidates;
};

// 1) median split, 2) step refinement from boundary inflections, 3) one
// K=0.75 intermediate per half starting from the straightest guide (a guide
// with infinite minimum curvature radius always starts; two straight guides
// leave the half undivided), 4) candidate decompositions for each K in
// k_refine.
GuidanceMethodResult guidance_method(const geom::FeatureModel& feature,
                                     const StepP& p0,
                                     std::span<const double> k_refine = {});

}  // namespace curveguide::net
