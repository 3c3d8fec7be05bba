#include "curveguide/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <utility>

#include "curveguide/errors.hpp"
#include "curveguide/json_io.hpp"
#include "curveguide/perfview.hpp"
#include "json_detail.hpp"

namespace curveguide::pipeline {
namespace {

using io::detail::Json;

std::string format(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  return buf;
}

constexpr double kPi = 3.14159265358979323846;

double master_b1_y(double x) { return 10.0 + 6.0 * std::sin(2.0 * kPi * x / 70.0); }
double master_b2_y(double x) {
  return 40.0 - 0.1 * x + 4.0 * std::sin(2.0 * kPi * x / 50.0 + 1.0);
}

// Boundary sampled on the surface every 0.5 mm and interpolated.
geom::SplineCurve sampled_boundary(const geom::SurfacePatch& surface,
                                   double x0, double x1, double (*y_of)(double)) {
  int n = static_cast<int>(std::lround((x1 - x0) / 0.5)) + 1;
  std::vector<geom::Point3> pts(n);
  for (int i = 0; i < n; ++i) {
    double x = x0 + (x1 - x0) * i / (n - 1);
    double y = y_of(x);
    pts[i] = {x, y, surface.height(x, y)};
  }
  return geom::fit_spline(pts, 5, geom::FitMode::interpolate);
}

geom::FeatureModel build_fixture(const std::string& name) {
  if (name == "master-like") {
    geom::SurfacePatch surface =
        geom::SurfacePatch::fixture("master-like", {0.0, 140.0, 0.0, 50.0});
    return {surface, sampled_boundary(surface, 0.0, 140.0, master_b1_y),
            sampled_boundary(surface, 0.0, 140.0, master_b2_y),
            {1.0, 0.0}};
  }
  if (name == "flat-straight") {
    geom::SurfacePatch surface =
        geom::SurfacePatch::fixture("flat", {0.0, 20.0, -1.0, 11.0});
    return {surface,
            geom::SplineCurve::line({0.0, 0.0, 0.0}, {20.0, 0.0, 0.0}),
            geom::SplineCurve::line({0.0, 10.0, 0.0}, {20.0, 10.0, 0.0}),
            {1.0, 0.0}};
  }
  if (name == "converging") {
    geom::SurfacePatch surface =
        geom::SurfacePatch::fixture("flat", {0.0, 20.0, -1.0, 11.0});
    return {surface,
            geom::SplineCurve::line({0.0, 0.0, 0.0}, {20.0, 0.0, 0.0}),
            geom::SplineCurve::line({0.0, 10.0, 0.0}, {20.0, 2.0, 0.0}),
            {1.0, 0.0}};
  }
  throw_invalid("unknown fixture: " + name +
                " (known: master-like, flat-straight, converging)");
}

geom::FeatureModel load_feature(const PipelineConfig& config) {
  if (!config.feature_file.empty())
    return io::feature_from_json(io::read_file(config.feature_file));
  return make_fixture(config.fixture);
}

net::ComposedArea whole_feature(const geom::FeatureModel& feature) {
  net::ComposedArea composed;
  composed.guides = {feature.boundary1, feature.boundary2};
  composed.ids = {"B1", "B2"};
  return composed;
}

net::MedianDirection median_direction_from(const std::string& name) {
  if (name == "toward") return net::MedianDirection::toward_median;
  if (name == "from") return net::MedianDirection::from_median;
  throw_invalid("median direction must be 'toward' or 'from', got '" + name +
                "'");
}

path::IsoProgram build_program(const geom::FeatureModel& feature,
                               const net::ComposedArea& composed,
                               const std::string& strategy,
                               const path::Tool& tool,
                               const path::StrategyParams& params) {
  if (strategy == "guidance")
    return path::program_for_composed(feature, composed, tool, params);
  if (strategy == "parallel") {
    if (composed.area_count() != 1)
      throw_invalid("parallel strategy expects a single machining area");
    return path::parallel_planes_toolpath(feature, composed.area(0),
                                          feature.machining_dir, tool, params);
  }
  throw_invalid("unknown strategy: " + strategy +
                " (known: guidance, parallel)");
}

std::string comparison_csv(const std::vector<view::ComparisonRow>& rows) {
  std::string out =
      "name,total_time_s,delta_pct,slow_fraction,boundary_slow_fraction,"
      "rank\n";
  for (const view::ComparisonRow& r : rows)
    out += format("%s,%.6f,%.4f,%.9f,%.9f,%d\n", r.name.c_str(), r.total_time,
                  r.delta_pct, r.slow_fraction, r.boundary_slow_fraction,
                  r.rank);
  return out;
}

// ---------------------------------------------------------------------------
// Experiment matrix
// ---------------------------------------------------------------------------

struct Cell {
  std::string name;
  std::string strategy;  // guidance | parallel
  double k = 0.0;        // 0 when not applicable
  double p = 0.0;
  std::string direction;
  int level_or_j = 0;
  net::ComposedArea composed;
};

int kpct(double k) { return static_cast<int>(std::lround(100.0 * k)); }

std::string summary_header() {
  return "cell,strategy,K,P,direction,level_or_j,areas,passes,blocks,"
         "length_mm,set_point_mm_s,total_time_s,mean_feed_mm_s,"
         "slow_fraction,boundary_slow_fraction,short_block_count_share\n";
}

std::string summary_row(const Cell& cell, const path::IsoProgram& program,
                        const view::PerfReport& report) {
  std::size_t blocks = program.blocks.size();
  std::size_t short_blocks = 0;
  for (std::size_t i = 0; i < 3; ++i)
    short_blocks += report.block_length_hist.counts[i];
  double length = program.total_length();
  return format(
      "%s,%s,%.2f,%.9g,%s,%d,%d,%zu,%zu,%.3f,%.9g,%.6f,%.4f,%.9f,%.9f,%.9f\n",
      cell.name.c_str(), cell.strategy.c_str(), cell.k, cell.p,
      cell.direction.c_str(), cell.level_or_j, cell.composed.area_count(),
      program.passes.size(), blocks, length, report.set_point,
      report.total_time, length / report.total_time, report.slow_fraction,
      report.boundary_slow_fraction,
      blocks ? static_cast<double>(short_blocks) / blocks : 0.0);
}

}  // namespace

geom::FeatureModel make_fixture(const std::string& name) {
  geom::FeatureModel feature = build_fixture(name);
  geom::validate_feature(feature);
  return feature;
}

std::string config_json(const PipelineConfig& config) {
  auto axis = [](const sim::AxisLimits& ax) {
    return Json{{"v_max", ax.v_max}, {"a_max", ax.a_max}, {"j_max", ax.j_max}};
  };
  Json j{{"fixture", config.fixture},
         {"feature_file", config.feature_file},
         {"tool", {{"ball_radius", config.tool.ball_radius}}},
         {"params",
          {{"chordal_tolerance", config.params.chordal_tolerance},
           {"cusp_height", config.params.cusp_height},
           {"overrun", config.params.overrun},
           {"sweep", config.params.sweep == path::Sweep::zigzag ? "zigzag"
                                                                : "one_way"},
           {"feed_set_point", config.params.feed_set_point}}},
         {"kinematics",
          {{"x", axis(config.kin.x)},
           {"y", axis(config.kin.y)},
           {"z", axis(config.kin.z)},
           {"t_cycle", config.kin.t_cycle}}},
         {"set_points", config.set_points},
         {"boundary_step", config.boundary_step},
         {"median_stop_eps", config.median_stop_eps},
         {"p0", config.p0},
         {"k_refine", config.k_refine}};
  return j.dump();
}

PipelineConfig config_from_json(const std::string& text) {
  PipelineConfig config;
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw_serialization(std::string("malformed config JSON: ") + e.what());
  }
  try {
    config.fixture = j.value("fixture", config.fixture);
    config.feature_file = j.value("feature_file", config.feature_file);
    if (j.contains("tool"))
      config.tool.ball_radius =
          j["tool"].value("ball_radius", config.tool.ball_radius);
    if (j.contains("params")) {
      const Json& p = j["params"];
      config.params.chordal_tolerance =
          p.value("chordal_tolerance", config.params.chordal_tolerance);
      config.params.cusp_height =
          p.value("cusp_height", config.params.cusp_height);
      config.params.overrun = p.value("overrun", config.params.overrun);
      std::string sweep = p.value("sweep", std::string("zigzag"));
      if (sweep != "zigzag" && sweep != "one_way")
        throw_invalid("sweep must be 'zigzag' or 'one_way', got '" + sweep +
                      "'");
      config.params.sweep =
          sweep == "zigzag" ? path::Sweep::zigzag : path::Sweep::one_way;
      config.params.feed_set_point =
          p.value("feed_set_point", config.params.feed_set_point);
    }
    if (j.contains("kinematics")) {
      const Json& k = j["kinematics"];
      auto axis = [&](const char* name, sim::AxisLimits& ax) {
        if (!k.contains(name)) return;
        ax.v_max = k[name].value("v_max", ax.v_max);
        ax.a_max = k[name].value("a_max", ax.a_max);
        ax.j_max = k[name].value("j_max", ax.j_max);
      };
      axis("x", config.kin.x);
      axis("y", config.kin.y);
      axis("z", config.kin.z);
      config.kin.t_cycle = k.value("t_cycle", config.kin.t_cycle);
    }
    if (j.contains("set_points"))
      config.set_points = j["set_points"].get<std::vector<double>>();
    config.boundary_step = j.value("boundary_step", config.boundary_step);
    config.median_stop_eps =
        j.value("median_stop_eps", config.median_stop_eps);
    config.p0 = j.value("p0", config.p0);
    if (j.contains("k_refine"))
      config.k_refine = j["k_refine"].get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw_serialization(std::string("config schema violation: ") + e.what());
  }
  validate(config);
  return config;
}

void validate(const PipelineConfig& config) {
  if (config.fixture.empty() && config.feature_file.empty())
    throw_invalid("config needs a fixture name or a feature file");
  if (!(config.tool.ball_radius > 0.0))
    throw_invalid(format("tool ball radius must be positive, got %g",
                         config.tool.ball_radius));
  if (!(config.params.chordal_tolerance > 0.0))
    throw_invalid(format("chordal tolerance must be positive, got %g",
                         config.params.chordal_tolerance));
  if (!(config.params.cusp_height > 0.0) ||
      config.params.cusp_height >= config.tool.ball_radius)
    throw_invalid(format(
        "cusp height must lie in (0, ball radius), got %g with radius %g",
        config.params.cusp_height, config.tool.ball_radius));
  if (config.params.overrun < 0.0)
    throw_invalid(
        format("overrun must not be negative, got %g", config.params.overrun));
  if (config.set_points.empty())
    throw_invalid("config needs at least one set point");
  for (double sp : config.set_points)
    if (!(sp > 0.0))
      throw_invalid(format("set points must be positive, got %g", sp));
  if (!(config.boundary_step > 0.0))
    throw_invalid(
        format("step P must be positive, got %g", config.boundary_step));
  if (!(config.median_stop_eps > 0.0))
    throw_invalid(format("stop distance must be positive, got %g",
                         config.median_stop_eps));
  if (!(config.p0 > 0.0))
    throw_invalid(format("seed step P0 must be positive, got %g", config.p0));
  if (config.k_refine.empty())
    throw_invalid("config needs at least one refinement ratio K");
  for (double k : config.k_refine)
    if (!(k > 0.0 && k < 1.0))
      throw_invalid(format(
          "refinement ratio K must lie strictly between 0 and 1, got %g", k));
  for (const sim::AxisLimits& ax : {config.kin.x, config.kin.y, config.kin.z})
    if (!(ax.v_max > 0.0) || !(ax.a_max > 0.0) || !(ax.j_max > 0.0))
      throw_invalid("axis limits must be strictly positive");
  if (!(config.kin.t_cycle > 0.0))
    throw_invalid(format("interpolation cycle time must be positive, got %g",
                         config.kin.t_cycle));
}

void cmd_make_feature(const std::string& name, const std::string& out_file) {
  io::write_file_atomic(out_file, io::feature_json(make_fixture(name)));
}

void cmd_net(const std::string& feature_file, const NetOptions& options,
             const std::string& out_file) {
  geom::FeatureModel feature =
      io::feature_from_json(io::read_file(feature_file));
  const geom::SplineCurve& start =
      options.reverse ? feature.boundary2 : feature.boundary1;
  const geom::SplineCurve& target =
      options.reverse ? feature.boundary1 : feature.boundary2;
  net::CurveNet result = net::build_net(
      feature, start, target, net::RatioK(options.k), net::StepP(options.step),
      options.stop_eps, options.max_iters, options.reverse ? "B2" : "B1",
      options.reverse ? "B1" : "B2");
  io::write_file_atomic(out_file, io::net_json(result));
}

void cmd_decompose(const std::string& feature_file,
                   const DecomposeOptions& options,
                   const std::string& out_file) {
  geom::FeatureModel feature =
      io::feature_from_json(io::read_file(feature_file));
  net::ComposedArea composed;
  if (options.type == "single") {
    composed = whole_feature(feature);
  } else if (options.type == "boundary") {
    const geom::SplineCurve& start =
        options.reverse ? feature.boundary2 : feature.boundary1;
    const geom::SplineCurve& target =
        options.reverse ? feature.boundary1 : feature.boundary2;
    net::CurveNet built = net::build_net(
        feature, start, target, net::RatioK(options.k),
        net::StepP(options.step), options.stop_eps, options.max_iters,
        options.reverse ? "B2" : "B1", options.reverse ? "B1" : "B2");
    composed = net::compose_boundary_direction(built, options.use_first);
  } else if (options.type == "median") {
    composed = net::compose_median(
        feature, net::RatioK(options.k), net::StepP(options.step),
        median_direction_from(options.median_direction), options.levels,
        options.stop_eps, options.max_iters);
  } else if (options.type == "method4") {
    composed =
        net::guidance_method(feature, net::StepP(options.p0)).decomposition;
  } else {
    throw_invalid("unknown decomposition type: " + options.type +
                  " (known: single, boundary, median, method4)");
  }
  io::write_file_atomic(out_file, io::composed_json(composed));
}

void cmd_toolpath(const std::string& feature_file,
                  const std::string& area_file, const ToolpathOptions& options,
                  const std::string& out_base) {
  geom::FeatureModel feature =
      io::feature_from_json(io::read_file(feature_file));
  net::ComposedArea composed =
      area_file.empty() ? whole_feature(feature)
                        : io::composed_from_json(io::read_file(area_file));
  path::IsoProgram program = build_program(feature, composed, options.strategy,
                                           options.tool, options.params);
  io::write_file_atomic(out_base + ".json", io::program_json(program));
  io::write_file_atomic(out_base + ".gcode", path::to_gcode(program));
}

void cmd_simulate(const std::string& program_file,
                  const sim::MachineKinematics& kin, double set_point,
                  const std::string& out_file) {
  path::IsoProgram program =
      io::program_from_json(io::read_file(program_file));
  io::write_file_atomic(out_file,
                        io::sim_json(sim::simulate(program, kin, set_point)));
}

void cmd_report(const std::string& feature_file,
                const std::string& program_file, const std::string& sim_file,
                const std::string& name, const std::string& out_base) {
  path::IsoProgram program =
      io::program_from_json(io::read_file(program_file));
  sim::SimResult result = io::sim_from_json(io::read_file(sim_file));
  view::PerfReport report;
  if (feature_file.empty()) {
    report = view::make_report(name, program, result);
  } else {
    geom::FeatureModel feature =
        io::feature_from_json(io::read_file(feature_file));
    report = view::make_report(name, program, result, &feature);
  }
  io::write_file_atomic(out_base + ".json", io::report_json(report));
  io::write_file_atomic(out_base + "_length_hist.csv",
                        view::histogram_csv(report.block_length_hist));
  io::write_file_atomic(out_base + "_feed_hist.csv",
                        view::histogram_csv(report.feed_hist));
  std::vector<view::FeedMapRow> rows = view::feed_map(result, program);
  io::write_file_atomic(out_base + "_feedmap.csv", view::feed_map_csv(rows));
  io::write_file_atomic(out_base + "_feedmap.svg",
                        view::feed_map_svg(rows, program));
}

void cmd_report_compare(const std::vector<std::string>& report_files,
                        const std::string& out_csv) {
  std::vector<view::PerfReport> reports;
  reports.reserve(report_files.size());
  for (const std::string& file : report_files)
    reports.push_back(io::report_from_json(io::read_file(file)));
  io::write_file_atomic(out_csv, comparison_csv(view::compare(reports)));
}

void cmd_pipeline(const PipelineConfig& config, const std::string& out_dir) {
  validate(config);
  geom::FeatureModel feature = load_feature(config);
  io::write_file_atomic(out_dir + "/config.json", config_json(config));
  io::write_file_atomic(out_dir + "/feature.json", io::feature_json(feature));

  std::vector<Cell> cells;
  cells.push_back({"single-guidance", "guidance", 0.0, 0.0, "", 0,
                   whole_feature(feature)});
  cells.push_back({"single-parallel", "parallel", 0.0, 0.0, "", 0,
                   whole_feature(feature)});

  // Boundary-direction decompositions M_A1..M_Aj from either boundary.
  for (double k : {0.25, 0.75}) {
    for (bool reverse : {false, true}) {
      const char* dir = reverse ? "b2" : "b1";
      net::CurveNet built = net::build_net(
          feature, reverse ? feature.boundary2 : feature.boundary1,
          reverse ? feature.boundary1 : feature.boundary2, net::RatioK(k),
          net::StepP(config.boundary_step), config.median_stop_eps, 50,
          reverse ? "B2" : "B1", reverse ? "B1" : "B2");
      io::write_file_atomic(
          out_dir + format("/nets/boundary_K%d_%s.json", kpct(k), dir),
          io::net_json(built));
      int usable = std::min<int>(9, static_cast<int>(built.interiors.size()));
      for (int j = 1; j <= usable; ++j) {
        Cell cell;
        cell.name = format("boundary-K%d-%s-MA%d", kpct(k), dir, j);
        cell.strategy = "guidance";
        cell.k = k;
        cell.p = config.boundary_step;
        cell.direction = dir;
        cell.level_or_j = j;
        cell.composed = net::compose_boundary_direction(built, j);
        cells.push_back(std::move(cell));
      }
    }
  }

  // Median decompositions at one level and at the deepest level available.
  for (double k : {0.25, 0.5, 0.75}) {
    for (double p : {5.0, 10.0, 20.0}) {
      for (const char* dir : {"toward", "from"}) {
        net::MedianDirection direction = median_direction_from(dir);
        auto add = [&](int levels, const net::ComposedArea& composed) {
          Cell cell;
          cell.name =
              format("median-K%d-P%g-%s-L%d", kpct(k), p, dir, levels);
          cell.strategy = "guidance";
          cell.k = k;
          cell.p = p;
          cell.direction = dir;
          cell.level_or_j = levels;
          cell.composed = composed;
          cells.push_back(std::move(cell));
        };
        net::ComposedArea one =
            net::compose_median(feature, net::RatioK(k), net::StepP(p),
                                direction, 1, config.median_stop_eps);
        add(1, one);
        net::ComposedArea deep =
            net::compose_median(feature, net::RatioK(k), net::StepP(p),
                                direction, 25, config.median_stop_eps);
        int deep_levels = (static_cast<int>(deep.guides.size()) - 3) / 2;
        if (deep_levels > 1) add(deep_levels, deep);
      }
    }
  }

  // Four-step method: decomposition, candidate ranking, winner cell.
  {
    net::GuidanceMethodResult method = net::guidance_method(
        feature, net::StepP(config.p0), config.k_refine);
    io::write_file_atomic(out_dir + "/method4/decomposition.json",
                          io::composed_json(method.decomposition));
    Json step{{"P", method.step.value}};
    Json overrides = Json::array();
    for (const net::StepOverride& o : method.step.overrides)
      overrides.push_back(
          Json{{"begin", o.begin}, {"end", o.end}, {"step", o.step}});
    step["overrides"] = overrides;
    io::write_file_atomic(out_dir + "/method4/step.json", step.dump());

    std::vector<net::ComposedArea> candidates;
    for (const auto& [k, composed] : method.candidates)
      candidates.push_back(composed);
    view::RankResult ranked =
        view::rank_candidates(feature, candidates, config.tool, config.params,
                              config.kin, config.set_points.back());
    for (std::size_t i = 0; i < ranked.table.size(); ++i)
      ranked.table[i].name =
          format("K%d", kpct(method.candidates[i].first));
    io::write_file_atomic(out_dir + "/method4/rank.csv",
                          comparison_csv(ranked.table));

    Cell cell;
    cell.name = format("method4-K%d", kpct(method.candidates[ranked.best].first));
    cell.strategy = "guidance";
    cell.k = method.candidates[ranked.best].first;
    cell.p = method.step.value;
    cell.direction = "";
    cell.level_or_j = 0;
    cell.composed = method.candidates[ranked.best].second;
    cells.push_back(std::move(cell));
  }

  // Build, simulate and report every cell at every set point.
  std::string summary = summary_header();
  std::vector<std::vector<view::PerfReport>> by_set_point(
      config.set_points.size());
  for (const Cell& cell : cells) {
    std::string cell_dir = out_dir + "/cells/" + cell.name;
    path::IsoProgram program = build_program(
        feature, cell.composed, cell.strategy, config.tool, config.params);
    io::write_file_atomic(cell_dir + "/composed.json",
                          io::composed_json(cell.composed));
    io::write_file_atomic(cell_dir + "/program.json",
                          io::program_json(program));
    bool showcase = cell.name.rfind("single-", 0) == 0 ||
                    cell.name.rfind("method4-", 0) == 0;
    if (showcase)
      io::write_file_atomic(cell_dir + "/program.gcode",
                            path::to_gcode(program));
    for (std::size_t i = 0; i < config.set_points.size(); ++i) {
      sim::SimResult result =
          sim::plan_program(program, config.kin, config.set_points[i]);
      io::write_file_atomic(cell_dir + format("/sim_%zu.json", i + 1),
                            io::sim_json(result));
      view::PerfReport report =
          view::make_report(cell.name, program, result, &feature);
      io::write_file_atomic(cell_dir + format("/report_%zu.json", i + 1),
                            io::report_json(report));
      summary += summary_row(cell, program, report);
      by_set_point[i].push_back(report);
      if (showcase && i + 1 == config.set_points.size()) {
        std::vector<view::FeedMapRow> rows = view::feed_map(result, program);
        io::write_file_atomic(cell_dir + "/feedmap.csv",
                              view::feed_map_csv(rows));
        io::write_file_atomic(cell_dir + "/feedmap.svg",
                              view::feed_map_svg(rows, program));
      }
    }
  }
  io::write_file_atomic(out_dir + "/summary.csv", summary);
  for (std::size_t i = 0; i < by_set_point.size(); ++i) {
    if (by_set_point[i].size() < 2) continue;
    io::write_file_atomic(out_dir + format("/compare_%zu.csv", i + 1),
                          comparison_csv(view::compare(by_set_point[i])));
  }
}

}  // namespace curveguide::pipeline
