#pragma once

#include <string>
#include <vector>

#include "curveguide/curvenet.hpp"
#include "curveguide/feedsim.hpp"
#include "curveguide/geometry.hpp"
#include "curveguide/toolpath.hpp"

// File-level command implementations behind the CLI. Every artifact write is
// atomic and byte-deterministic for identical inputs.
namespace curveguide::pipeline {

// Built-in features: "master-like" (curved boundaries on a wavy surface),
// "flat-straight" (parallel straight guides on a plane), "converging"
// (straight guides closing from 10 mm to 2 mm). All validated.
geom::FeatureModel make_fixture(const std::string& name);

struct NetOptions {
  double k = 0.5;
  double step = 1.0;      // mm
  double stop_eps = 0.4;  // mm
  int max_iters = 50;
  bool reverse = false;  // iterate from B2 toward B1
};

struct DecomposeOptions {
  std::string type = "median";  // single | boundary | median | method4
  double k = 0.75;
  double step = 1.0;
  double stop_eps = 0.4;
  int max_iters = 50;
  int use_first = 1;     // boundary: interior guides taken from the net
  bool reverse = false;  // boundary: net direction
  int levels = 1;        // median: interior curves per half
  std::string median_direction = "toward";  // toward | from
  double p0 = 5.0;       // method4: seed step
};

struct ToolpathOptions {
  std::string strategy = "guidance";  // guidance | parallel
  path::Tool tool;
  path::StrategyParams params;
};

struct PipelineConfig {
  std::string fixture = "master-like";
  std::string feature_file;  // overrides fixture when nonempty
  path::Tool tool;
  path::StrategyParams params;
  sim::MachineKinematics kin;
  // 2, 4 and 6 m/min in mm/s.
  std::vector<double> set_points = {2000.0 / 60.0, 4000.0 / 60.0, 100.0};
  double boundary_step = 1.0;  // P for the boundary-direction nets
  double median_stop_eps = 0.4;
  double p0 = 5.0;  // seed step for the four-step method
  std::vector<double> k_refine = {0.70, 0.75, 0.80};
};

std::string config_json(const PipelineConfig& config);
PipelineConfig config_from_json(const std::string& text);
void validate(const PipelineConfig& config);

void cmd_make_feature(const std::string& name, const std::string& out_file);

void cmd_net(const std::string& feature_file, const NetOptions& options,
             const std::string& out_file);

void cmd_decompose(const std::string& feature_file,
                   const DecomposeOptions& options,
                   const std::string& out_file);

// area_file empty = the whole feature as one area. Writes <out_base>.json
// and <out_base>.gcode. The parallel strategy accepts single-area inputs.
void cmd_toolpath(const std::string& feature_file,
                  const std::string& area_file, const ToolpathOptions& options,
                  const std::string& out_base);

void cmd_simulate(const std::string& program_file,
                  const sim::MachineKinematics& kin, double set_point,
                  const std::string& out_file);

// feature_file may be empty (boundary metrics omitted). Writes
// <out_base>.json plus length/feed histogram CSVs and the feed map CSV/SVG.
void cmd_report(const std::string& feature_file,
                const std::string& program_file, const std::string& sim_file,
                const std::string& name, const std::string& out_base);

void cmd_report_compare(const std::vector<std::string>& report_files,
                        const std::string& out_csv);

// The full experiment matrix on one feature: single-area baselines for both
// strategies, boundary-direction decompositions for K in {0.25, 0.75} from
// both boundaries, median decompositions for K x P x direction at one and at
// maximum level, and the four-step method with candidate ranking. Emits
// summary.csv and one comparison table per set point.
void cmd_pipeline(const PipelineConfig& config, const std::string& out_dir);

}  // namespace curveguide::pipeline
