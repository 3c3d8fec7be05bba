#pragma once

#include <cstddef>
#include <vector>

#include "curveguide/geometry.hpp"
#include "curveguide/toolpath.hpp"

namespace curveguide::sim {

struct AxisLimits {
  double v_max;  // mm/s
  double a_max;  // mm/s^2
  double j_max;  // mm/s^3
};

// Per-axis machine/NCU envelope. Defaults: 30 m/min feed on every axis,
// 2.5 / 3 / 2 m/s^2 acceleration, 5 / 5 / 50 m/s^3 jerk, 12 ms cycle.
struct MachineKinematics {
  AxisLimits x{500.0, 2500.0, 5000.0};
  AxisLimits y{500.0, 3000.0, 5000.0};
  AxisLimits z{500.0, 2000.0, 50000.0};
  double t_cycle = 0.012;  // s, interpolation cycle
};

// Feed cap along a straight move: the set point clipped so no axis component
// exceeds its v_max. Zero direction is invalid.
double axis_limited_feed(const geom::Point3& direction,
                         const MachineKinematics& kin, double set_point);

// Same projection for acceleration and jerk caps along the path.
double axis_limited_accel(const geom::Point3& direction,
                          const MachineKinematics& kin);
double axis_limited_jerk(const geom::Point3& direction,
                         const MachineKinematics& kin);

// Crossing feed at a tangency discontinuity: each axis may step its velocity
// by at most a_max * t_cycle in one interpolation cycle, so the feed is
// limited by the largest per-axis direction change. Collinear moves pass
// through unconstrained (up to the axis feed caps).
double junction_feed(const geom::Point3& dir_in, const geom::Point3& dir_out,
                     const MachineKinematics& kin, double set_point);

// One constant-jerk segment of a block profile; start state is cumulative
// within the block (s0 in mm from block start, t from block start).
struct Phase {
  double duration;  // s
  double jerk;      // mm/s^3, signed
  double a0;        // mm/s^2 at phase start
  double v0;        // mm/s at phase start
  double s0;        // mm at phase start
};

struct PlanState {
  double s;  // mm along the block
  double v;  // mm/s
  double a;  // mm/s^2
  double j;  // mm/s^3
};

// Jerk-limited speed profile for one block: accelerate v_in -> v_peak,
// cruise, decelerate v_peak -> v_out, degenerate phases dropped.
struct BlockPlan {
  std::size_t block_index = 0;
  double length = 0.0;     // mm
  double v_in = 0.0;       // mm/s
  double v_out = 0.0;      // mm/s
  double v_peak = 0.0;     // mm/s
  double duration = 0.0;   // s
  double mean_feed = 0.0;  // mm/s, length / duration
  std::vector<Phase> phases;
};

// Profile state at time t from block start; t is clamped to [0, duration].
PlanState sample_plan(const BlockPlan& plan, double t);

struct SimResult {
  std::vector<BlockPlan> plans;  // one per block, program order
  double total_time = 0.0;       // s
  double set_point = 0.0;        // mm/s
};

// Lookahead planning over every pass of the program. The feed starts and
// ends at zero within each pass; interior junction speeds are capped by
// junction_feed and by what the S-curve kinematics can reach over each
// block. set_point is in mm/s and overrides the blocks' programmed feed.
SimResult plan_program(const path::IsoProgram& program,
                       const MachineKinematics& kin, double set_point);

// plan_program plus a sampled check that every block profile respects the
// per-axis velocity/acceleration/jerk envelope.
SimResult simulate(const path::IsoProgram& program,
                   const MachineKinematics& kin, double set_point);

// Closed-form S-curve primitives (exposed for tests): minimum time and path
// length for a speed change with zero end accelerations under path caps.
double speed_change_time(double v1, double v2, double a_max, double j_max);
double speed_change_distance(double v1, double v2, double a_max,
                             double j_max);

}  // namespace curveguide::sim
