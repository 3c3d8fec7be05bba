#include "curveguide/feedsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "curveguide/errors.hpp"

namespace curveguide::sim {
namespace {

constexpr double kZeroLength = 1e-12;  // mm, blocks below this are degenerate

void check_kinematics(const MachineKinematics& kin) {
  for (const AxisLimits& ax : {kin.x, kin.y, kin.z}) {
    if (!(ax.v_max > 0.0) || !(ax.a_max > 0.0) || !(ax.j_max > 0.0))
      throw_invalid("axis limits must be strictly positive");
  }
  if (!(kin.t_cycle > 0.0))
    throw_invalid("interpolation cycle time must be strictly positive");
}

geom::Point3 unit_or_throw(const geom::Point3& d) {
  double n = d.norm();
  if (n < kZeroLength) throw_invalid("zero direction");
  return d * (1.0 / n);
}

double project_limit(const geom::Point3& u, double lx, double ly, double lz) {
  double lim = std::numeric_limits<double>::infinity();
  if (std::abs(u.x) > 0.0) lim = std::min(lim, lx / std::abs(u.x));
  if (std::abs(u.y) > 0.0) lim = std::min(lim, ly / std::abs(u.y));
  if (std::abs(u.z) > 0.0) lim = std::min(lim, lz / std::abs(u.z));
  return lim;
}

// d(v1 -> v2) is symmetric and strictly increasing in max(v1, v2), which
// makes the junction bisections below well posed.
double ramp_time(double dv, double a_max, double j_max) {
  if (dv <= 0.0) return 0.0;
  double a_pk = std::sqrt(j_max * dv);
  if (a_pk <= a_max) return 2.0 * std::sqrt(dv / j_max);
  return a_max / j_max + dv / a_max;
}

struct PhaseBuilder {
  std::vector<Phase> phases;
  double s = 0.0;
  double v = 0.0;
  double a = 0.0;

  void add(double t, double jerk) {
    if (t <= 0.0) return;
    phases.push_back({t, jerk, a, v, s});
    s += v * t + 0.5 * a * t * t + jerk * t * t * t / 6.0;
    v += a * t + 0.5 * jerk * t * t;
    a += jerk * t;
  }

  // Jerk-accel-jerk ramp between speeds; sign +1 accelerates, -1 brakes.
  // Snaps the end state to (v_to, a=0) to keep float drift out of the
  // following phases.
  void ramp(double v_from, double v_to, double sign, double a_max,
            double j_max) {
    double dv = std::abs(v_to - v_from);
    if (dv <= 0.0) return;
    double a_pk = std::sqrt(j_max * dv);
    double t_j, t_a;
    if (a_pk <= a_max) {
      t_j = std::sqrt(dv / j_max);
      t_a = 0.0;
    } else {
      t_j = a_max / j_max;
      t_a = dv / a_max - a_max / j_max;
    }
    add(t_j, sign * j_max);
    add(t_a, 0.0);
    add(t_j, -sign * j_max);
    v = v_to;
    a = 0.0;
  }
};

struct PathCaps {
  double v, a, j;
};

PathCaps path_caps(const geom::Point3& u, const MachineKinematics& kin,
                   double set_point) {
  return {axis_limited_feed(u, kin, set_point), axis_limited_accel(u, kin),
          axis_limited_jerk(u, kin)};
}

BlockPlan plan_block(std::size_t index, double length, double v_in,
                     double v_out, const PathCaps& caps) {
  double lo = std::max(v_in, v_out);
  double hi = std::max(lo, caps.v);
  auto dist = [&](double peak) {
    return speed_change_distance(v_in, peak, caps.a, caps.j) +
           speed_change_distance(peak, v_out, caps.a, caps.j);
  };
  if (dist(lo) > length + 1e-9)
    throw_internal("junction sweep left an infeasible block");
  double v_peak;
  if (dist(hi) <= length) {
    v_peak = hi;
  } else {
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      (dist(mid) <= length ? lo : hi) = mid;
    }
    v_peak = lo;
  }

  BlockPlan plan;
  plan.block_index = index;
  plan.length = length;
  plan.v_in = v_in;
  plan.v_out = v_out;
  plan.v_peak = v_peak;

  PhaseBuilder pb;
  pb.v = v_in;
  pb.ramp(v_in, v_peak, 1.0, caps.a, caps.j);
  double residual = length - dist(v_peak);
  if (residual > 0.0 && v_peak > 0.0) pb.add(residual / v_peak, 0.0);
  pb.ramp(v_peak, v_out, -1.0, caps.a, caps.j);

  plan.phases = std::move(pb.phases);
  for (const Phase& ph : plan.phases) plan.duration += ph.duration;
  plan.mean_feed = plan.duration > 0.0 ? length / plan.duration : 0.0;
  return plan;
}

// Lowers junction speeds until every block can realize its speed change
// within its length. Updates only shrink the speeds, so the sweep reaches a
// fixed point; typical programs settle in two rounds.
void settle_junctions(std::vector<double>& v, const std::vector<double>& len,
                      const std::vector<PathCaps>& caps) {
  size_t n = len.size();
  auto fits = [&](double v1, double v2, size_t k) {
    return speed_change_distance(v1, v2, caps[k].a, caps[k].j) <=
           len[k] + 1e-12;
  };
  auto shrink = [&](double fixed, double from, size_t k) {
    double lo = fixed, hi = from;
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      (fits(fixed, mid, k) ? lo : hi) = mid;
    }
    return lo;
  };
  for (int round = 0; round < 64; ++round) {
    bool changed = false;
    for (size_t k = 0; k < n; ++k) {
      if (v[k + 1] > v[k] && !fits(v[k], v[k + 1], k)) {
        v[k + 1] = shrink(v[k], v[k + 1], k);
        changed = true;
      }
    }
    for (size_t k = n; k-- > 0;) {
      if (v[k] > v[k + 1] && !fits(v[k + 1], v[k], k)) {
        v[k] = shrink(v[k + 1], v[k], k);
        changed = true;
      }
    }
    if (!changed) return;
  }
  throw_internal("junction speed sweep did not settle");
}

void plan_pass(const path::IsoProgram& program, size_t first, size_t count,
               const MachineKinematics& kin, double set_point,
               SimResult& out) {
  std::vector<double> len(count);
  std::vector<geom::Point3> dir(count);
  std::vector<PathCaps> caps(count);
  for (size_t k = 0; k < count; ++k) {
    const path::IsoBlock& b = program.blocks[first + k];
    len[k] = b.length();
    if (len[k] < kZeroLength) throw_degenerate("zero-length block");
    dir[k] = (b.end - b.start) * (1.0 / len[k]);
    caps[k] = path_caps(dir[k], kin, set_point);
  }

  std::vector<double> v(count + 1, 0.0);
  for (size_t k = 1; k < count; ++k)
    v[k] = junction_feed(dir[k - 1], dir[k], kin, set_point);
  settle_junctions(v, len, caps);

  for (size_t k = 0; k < count; ++k) {
    BlockPlan plan = plan_block(first + k, len[k], v[k], v[k + 1], caps[k]);
    out.total_time += plan.duration;
    out.plans.push_back(std::move(plan));
  }
}

void check_axis_envelope(const BlockPlan& plan, const geom::Point3& u,
                         const MachineKinematics& kin) {
  const AxisLimits* ax[3] = {&kin.x, &kin.y, &kin.z};
  double uc[3] = {std::abs(u.x), std::abs(u.y), std::abs(u.z)};
  for (int i = 0; i < 1000; ++i) {
    double t = plan.duration * i / 999.0;
    PlanState st = sample_plan(plan, t);
    for (int c = 0; c < 3; ++c) {
      if (std::abs(st.v) * uc[c] > ax[c]->v_max + 1e-6 ||
          std::abs(st.a) * uc[c] > ax[c]->a_max + 1e-6 ||
          std::abs(st.j) * uc[c] > ax[c]->j_max + 1e-6)
        throw_internal("planned profile exceeds an axis limit");
    }
  }
}

}  // namespace

double axis_limited_feed(const geom::Point3& direction,
                         const MachineKinematics& kin, double set_point) {
  check_kinematics(kin);
  if (!(set_point > 0.0)) throw_invalid("set point must be positive");
  geom::Point3 u = unit_or_throw(direction);
  return std::min(set_point,
                  project_limit(u, kin.x.v_max, kin.y.v_max, kin.z.v_max));
}

double axis_limited_accel(const geom::Point3& direction,
                          const MachineKinematics& kin) {
  check_kinematics(kin);
  geom::Point3 u = unit_or_throw(direction);
  return project_limit(u, kin.x.a_max, kin.y.a_max, kin.z.a_max);
}

double axis_limited_jerk(const geom::Point3& direction,
                         const MachineKinematics& kin) {
  check_kinematics(kin);
  geom::Point3 u = unit_or_throw(direction);
  return project_limit(u, kin.x.j_max, kin.y.j_max, kin.z.j_max);
}

double junction_feed(const geom::Point3& dir_in, const geom::Point3& dir_out,
                     const MachineKinematics& kin, double set_point) {
  double v = std::min(axis_limited_feed(dir_in, kin, set_point),
                      axis_limited_feed(dir_out, kin, set_point));
  geom::Point3 du = unit_or_throw(dir_out) - unit_or_throw(dir_in);
  double step = kin.t_cycle;
  double cap = project_limit(du, kin.x.a_max * step, kin.y.a_max * step,
                             kin.z.a_max * step);
  return std::min(v, cap);
}

double speed_change_time(double v1, double v2, double a_max, double j_max) {
  if (!(a_max > 0.0) || !(j_max > 0.0))
    throw_invalid("path caps must be strictly positive");
  return ramp_time(std::abs(v2 - v1), a_max, j_max);
}

double speed_change_distance(double v1, double v2, double a_max,
                             double j_max) {
  // Velocity is antisymmetric about the ramp midpoint, so the mean speed is
  // exactly (v1 + v2) / 2.
  return 0.5 * (v1 + v2) * speed_change_time(v1, v2, a_max, j_max);
}

PlanState sample_plan(const BlockPlan& plan, double t) {
  if (plan.phases.empty()) return {0.0, plan.v_in, 0.0, 0.0};
  t = std::clamp(t, 0.0, plan.duration);
  double begin = 0.0;
  for (const Phase& ph : plan.phases) {
    if (t <= begin + ph.duration || &ph == &plan.phases.back()) {
      double dt = std::clamp(t - begin, 0.0, ph.duration);
      return {ph.s0 + ph.v0 * dt + 0.5 * ph.a0 * dt * dt +
                  ph.jerk * dt * dt * dt / 6.0,
              ph.v0 + ph.a0 * dt + 0.5 * ph.jerk * dt * dt,
              ph.a0 + ph.jerk * dt, ph.jerk};
    }
    begin += ph.duration;
  }
  throw_internal("unreachable");
}

SimResult plan_program(const path::IsoProgram& program,
                       const MachineKinematics& kin, double set_point) {
  check_kinematics(kin);
  if (!(set_point > 0.0)) throw_invalid("set point must be positive");
  if (program.blocks.empty()) throw_invalid("program has no blocks");

  SimResult result;
  result.set_point = set_point;
  result.plans.reserve(program.blocks.size());
  if (program.passes.empty()) {
    plan_pass(program, 0, program.blocks.size(), kin, set_point, result);
    return result;
  }
  size_t next = 0;
  for (const path::Pass& pass : program.passes) {
    if (pass.first_block != static_cast<int>(next) || pass.block_count <= 0 ||
        next + static_cast<size_t>(pass.block_count) > program.blocks.size())
      throw_invalid("passes must tile the block list in order");
    plan_pass(program, next, static_cast<size_t>(pass.block_count), kin,
              set_point, result);
    next += static_cast<size_t>(pass.block_count);
  }
  if (next != program.blocks.size())
    throw_invalid("passes do not cover every block");
  return result;
}

SimResult simulate(const path::IsoProgram& program,
                   const MachineKinematics& kin, double set_point) {
  SimResult result = plan_program(program, kin, set_point);
  for (const BlockPlan& plan : result.plans) {
    const path::IsoBlock& b = program.blocks[plan.block_index];
    geom::Point3 u = (b.end - b.start) * (1.0 / plan.length);
    check_axis_envelope(plan, u, kin);
  }
  return result;
}

}  // namespace curveguide::sim
