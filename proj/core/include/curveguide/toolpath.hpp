#pragma once

#include <span>
#include <string>
#include <vector>

#include "curveguide/curvenet.hpp"
#include "curveguide/geometry.hpp"

namespace curveguide::path {

struct Tool {
  double ball_radius = 2.0;  // mm
};

enum class Sweep { one_way, zigzag };

struct StrategyParams {
  double chordal_tolerance = 0.01;  // mm, max deviation of a block from the pass
  double cusp_height = 0.01;        // mm, scallop budget between passes
  double overrun = 0.0;             // mm past the open feature sides
  Sweep sweep = Sweep::zigzag;
  double feed_set_point = 6000.0;   // mm/min, written to blocks and G-code
};

// One linear interpolation move.
struct IsoBlock {
  geom::Point3 start;
  geom::Point3 end;
  double feed_set = 6000.0;  // mm/min

  double length() const { return geom::distance(start, end); }
};

// Contiguous block range machined in one tool engagement.
struct Pass {
  int first_block = 0;
  int block_count = 0;
  int area_index = 0;
};

struct IsoProgram {
  Tool tool;
  StrategyParams params;
  std::vector<IsoBlock> blocks;
  std::vector<Pass> passes;

  double total_length() const;
};

// Lateral distance between passes leaving at most `cusp_height` of material
// with a ball-end tool on a plane: the two-tangent-spheres construction.
double stepover_from_cusp(const Tool& tool, double cusp_height);

// Greedy chordal linearization of a dense polyline: emits the longest blocks
// whose deviation from the covered polyline points stays within tol.
std::vector<IsoBlock> linearize(std::span<const geom::Point3> dense,
                                double tol, double feed_set);

IsoProgram parallel_planes_toolpath(const geom::FeatureModel& feature,
                                    const net::MachiningArea& area,
                                    geom::Vec2 basic_dir, const Tool& tool,
                                    const StrategyParams& params);

IsoProgram guidance_toolpath(const geom::FeatureModel& feature,
                             const net::MachiningArea& area, const Tool& tool,
                             const StrategyParams& params);

IsoProgram program_for_composed(const geom::FeatureModel& feature,
                                const net::ComposedArea& composed,
                                const Tool& tool,
                                const StrategyParams& params);

std::string to_gcode(const IsoProgram& program);

// Detailed variants keep the dense pass polylines the blocks were cut from,
// for deviation and scallop checks.
struct PassPolyline {
  std::vector<geom::Point3> points;
  int area_index = 0;
};

struct ToolpathDetail {
  IsoProgram program;
  std::vector<PassPolyline> dense;
};

ToolpathDetail parallel_planes_toolpath_detailed(
    const geom::FeatureModel& feature, const net::MachiningArea& area,
    geom::Vec2 basic_dir, const Tool& tool, const StrategyParams& params);

ToolpathDetail guidance_toolpath_detailed(const geom::FeatureModel& feature,
                                          const net::MachiningArea& area,
                                          const Tool& tool,
                                          const StrategyParams& params);

ToolpathDetail program_for_composed_detailed(
    const geom::FeatureModel& feature, const net::ComposedArea& composed,
    const Tool& tool, const StrategyParams& params);

}  // namespace curveguide::path
