// Command line driver: wraps the pipeline entry points. Artifacts land under
// --out (default "."); input paths are taken as given. Exit codes: 0 ok,
// 2 validation/config error, 1 anything else.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "curveguide/errors.hpp"
#include "curveguide/json_io.hpp"
#include "curveguide/pipeline.hpp"

namespace {

using curveguide::pipeline::DecomposeOptions;
using curveguide::pipeline::NetOptions;
using curveguide::pipeline::PipelineConfig;
using curveguide::pipeline::ToolpathOptions;

std::string joined(const std::string& out_dir, const std::string& name) {
  if (out_dir.empty() || out_dir == ".") return name;
  return out_dir + "/" + name;
}

PipelineConfig load_config(const std::string& config_file) {
  if (config_file.empty()) return PipelineConfig{};
  return curveguide::pipeline::config_from_json(
      curveguide::io::read_file(config_file));
}

void add_strategy_flags(CLI::App* cmd, ToolpathOptions& options,
                        std::string& sweep) {
  cmd->add_option("--strategy", options.strategy,
                  "Toolpath strategy: guidance | parallel")
      ->check(CLI::IsMember({"guidance", "parallel"}));
  cmd->add_option("--ball-radius", options.tool.ball_radius,
                  "Ball-end tool radius, mm");
  cmd->add_option("--chordal-tol", options.params.chordal_tolerance,
                  "Max chord deviation per block, mm");
  cmd->add_option("--cusp", options.params.cusp_height,
                  "Scallop budget between passes, mm");
  cmd->add_option("--overrun", options.params.overrun,
                  "Extension past open feature sides, mm");
  cmd->add_option("--feed", options.params.feed_set_point,
                  "Programmed feed word, mm/min");
  cmd->add_option("--sweep", sweep, "Pass linking: zigzag | one_way")
      ->check(CLI::IsMember({"zigzag", "one_way"}));
  cmd->parse_complete_callback([&options, &sweep] {
    options.params.sweep = sweep == "zigzag"
                               ? curveguide::path::Sweep::zigzag
                               : curveguide::path::Sweep::one_way;
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Guidance-curve machining pipeline"};
  app.require_subcommand(1);

  std::string out_dir = ".";
  app.add_option("--out", out_dir, "Output directory for artifacts")
      ->capture_default_str();

  // make-feature
  auto* make_feature = app.add_subcommand(
      "make-feature", "Write a built-in feature (fixture) as JSON");
  std::string fixture_name = "master-like";
  std::string feature_out = "feature.json";
  make_feature->add_option("name", fixture_name,
                           "master-like | flat-straight | converging");
  make_feature->add_option("--to", feature_out, "Output file name");

  // net
  auto* net_cmd = app.add_subcommand(
      "net", "Iterate intermediate curves between the boundaries");
  std::string net_feature, net_out = "net.json";
  NetOptions net_options;
  net_cmd->add_option("--feature", net_feature, "Feature JSON")->required();
  net_cmd->add_option("--K", net_options.k, "Blend ratio in (0,1)");
  net_cmd->add_option("--P", net_options.step, "Station step, mm");
  net_cmd->add_option("--stop-eps", net_options.stop_eps,
                      "Stop distance to the target, mm");
  net_cmd->add_option("--max-iters", net_options.max_iters);
  net_cmd->add_flag("--reverse", net_options.reverse,
                    "Iterate from B2 toward B1");
  net_cmd->add_option("--to", net_out, "Output file name");

  // decompose
  auto* decompose = app.add_subcommand(
      "decompose", "Compose machining areas from guide curves");
  std::string dec_feature, dec_out = "composed.json";
  DecomposeOptions dec_options;
  decompose->add_option("--feature", dec_feature, "Feature JSON")->required();
  decompose->add_option("--type", dec_options.type,
                        "single | boundary | median | method4")
      ->check(CLI::IsMember({"single", "boundary", "median", "method4"}));
  decompose->add_option("--K", dec_options.k, "Blend ratio in (0,1)");
  decompose->add_option("--P", dec_options.step, "Station step, mm");
  decompose->add_option("--stop-eps", dec_options.stop_eps);
  decompose->add_option("--max-iters", dec_options.max_iters);
  decompose->add_option("--j", dec_options.use_first,
                        "boundary: interior guides used (M_Aj)");
  decompose->add_flag("--reverse", dec_options.reverse,
                      "boundary: build the net from B2");
  decompose->add_option("--levels", dec_options.levels,
                        "median: interior curves per half");
  decompose->add_option("--direction", dec_options.median_direction,
                        "median: toward | from")
      ->check(CLI::IsMember({"toward", "from"}));
  decompose->add_option("--P0", dec_options.p0, "method4: seed step, mm");
  decompose->add_option("--to", dec_out, "Output file name");

  // toolpath
  auto* toolpath = app.add_subcommand(
      "toolpath", "Generate an ISO program for a composed area");
  std::string tp_feature, tp_area, tp_out = "toolpath";
  std::string tp_sweep = "zigzag";
  ToolpathOptions tp_options;
  toolpath->add_option("--feature", tp_feature, "Feature JSON")->required();
  toolpath->add_option("--area", tp_area,
                       "Composed-area JSON (default: whole feature)");
  add_strategy_flags(toolpath, tp_options, tp_sweep);
  toolpath->add_option("--to", tp_out,
                       "Output base name (writes .json and .gcode)");

  // simulate
  auto* simulate =
      app.add_subcommand("simulate", "Feed-rate simulation of a program");
  std::string sim_program, sim_config, sim_out = "sim.json";
  double set_point = 100.0;
  simulate->add_option("--program", sim_program, "Program JSON")->required();
  simulate->add_option("--set-point", set_point, "Feed set point, mm/s");
  simulate->add_option("--config", sim_config,
                       "Pipeline config JSON carrying machine kinematics");
  simulate->add_option("--to", sim_out, "Output file name");

  // report
  auto* report = app.add_subcommand(
      "report", "Performance report for a simulated program, or --compare");
  std::string rep_feature, rep_program, rep_sim, rep_name = "program";
  std::string rep_out = "report";
  std::vector<std::string> rep_compare;
  report->add_option("--feature", rep_feature,
                     "Feature JSON for boundary-band metrics");
  report->add_option("--program", rep_program, "Program JSON");
  report->add_option("--sim", rep_sim, "Simulation JSON");
  report->add_option("--name", rep_name, "Report name");
  report->add_option("--compare", rep_compare,
                     "Two or more report JSONs; writes a comparison CSV");
  report->add_option("--to", rep_out, "Output base name");

  // pipeline
  auto* pipeline_cmd = app.add_subcommand(
      "pipeline", "Run the full experiment matrix on a feature");
  std::string pipe_config;
  std::string pipe_fixture, pipe_feature_file;
  std::vector<double> pipe_set_points;
  pipeline_cmd->add_option("--config", pipe_config, "Pipeline config JSON");
  pipeline_cmd->add_option("--fixture", pipe_fixture,
                           "Built-in feature name override");
  pipeline_cmd->add_option("--feature", pipe_feature_file,
                           "Feature JSON override");
  pipeline_cmd->add_option("--set-points", pipe_set_points,
                           "Set points override, mm/s");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (make_feature->parsed()) {
      curveguide::pipeline::cmd_make_feature(fixture_name,
                                             joined(out_dir, feature_out));
    } else if (net_cmd->parsed()) {
      curveguide::pipeline::cmd_net(net_feature, net_options,
                                    joined(out_dir, net_out));
    } else if (decompose->parsed()) {
      curveguide::pipeline::cmd_decompose(dec_feature, dec_options,
                                          joined(out_dir, dec_out));
    } else if (toolpath->parsed()) {
      curveguide::pipeline::cmd_toolpath(tp_feature, tp_area, tp_options,
                                         joined(out_dir, tp_out));
    } else if (simulate->parsed()) {
      PipelineConfig config = load_config(sim_config);
      curveguide::pipeline::cmd_simulate(sim_program, config.kin, set_point,
                                         joined(out_dir, sim_out));
    } else if (report->parsed()) {
      if (!rep_compare.empty()) {
        curveguide::pipeline::cmd_report_compare(
            rep_compare, joined(out_dir, rep_out + ".csv"));
      } else {
        if (rep_program.empty() || rep_sim.empty())
          curveguide::throw_invalid(
              "report needs --program and --sim (or --compare)");
        curveguide::pipeline::cmd_report(rep_feature, rep_program, rep_sim,
                                         rep_name, joined(out_dir, rep_out));
      }
    } else if (pipeline_cmd->parsed()) {
      PipelineConfig config = load_config(pipe_config);
      if (!pipe_fixture.empty()) config.fixture = pipe_fixture;
      if (!pipe_feature_file.empty()) config.feature_file = pipe_feature_file;
      if (!pipe_set_points.empty()) config.set_points = pipe_set_points;
      curveguide::pipeline::cmd_pipeline(config, out_dir);
    }
  } catch (const curveguide::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.is_validation() ? 2 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
