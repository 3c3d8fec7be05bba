#include "curveguide/json_io.hpp"

#include <filesystem>
#include <fstream>
#include <limits>

#include "curveguide/errors.hpp"
#include "json_detail.hpp"

namespace curveguide::io {
namespace detail {
namespace {

Json point_to(const geom::Point3& p) { return Json::array({p.x, p.y, p.z}); }

geom::Point3 point_from(const Json& j) {
  if (!j.is_array() || j.size() != 3)
    throw_serialization("point must be a 3-number array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Json hist_to(const view::Histogram& h) {
  Json edges = Json::array();
  for (double e : h.edges)
    edges.push_back(std::isinf(e) ? Json(nullptr) : Json(e));
  return Json{{"edges", edges},
              {"counts", h.counts},
              {"length_share", h.length_share}};
}

view::Histogram hist_from(const Json& j) {
  view::Histogram h;
  for (const Json& e : j.at("edges"))
    h.edges.push_back(e.is_null() ? std::numeric_limits<double>::infinity()
                                  : e.get<double>());
  h.counts = j.at("counts").get<std::vector<std::size_t>>();
  h.length_share = j.at("length_share").get<std::vector<double>>();
  return h;
}

}  // namespace

Json curve_to(const geom::SplineCurve& curve) {
  Json pts = Json::array();
  for (const geom::Point3& p : curve.control_points())
    pts.push_back(point_to(p));
  return Json{{"degree", curve.degree()},
              {"control_points", pts},
              {"knots", curve.knots()}};
}

geom::SplineCurve curve_from(const Json& j) {
  std::vector<geom::Point3> pts;
  for (const Json& p : j.at("control_points")) pts.push_back(point_from(p));
  return geom::SplineCurve(j.at("degree").get<int>(), std::move(pts),
                           j.at("knots").get<std::vector<double>>());
}

Json surface_to(const geom::SurfacePatch& surface) {
  const geom::Domain2& d = surface.domain();
  Json j{{"kind", surface.kind()},
         {"domain",
          {{"x", Json::array({d.x0, d.x1})},
           {"y", Json::array({d.y0, d.y1})}}}};
  if (surface.kind() == "bicubic") {
    j["grid"] = Json{{"x", surface.grid_x()},
                     {"y", surface.grid_y()},
                     {"z", surface.grid_z()}};
  } else {
    j["params"] = Json::object();
  }
  return j;
}

geom::SurfacePatch surface_from(const Json& j) {
  std::string kind = j.at("kind").get<std::string>();
  const Json& dom = j.at("domain");
  geom::Domain2 d{dom.at("x")[0].get<double>(), dom.at("x")[1].get<double>(),
                  dom.at("y")[0].get<double>(), dom.at("y")[1].get<double>()};
  if (kind == "bicubic") {
    const Json& g = j.at("grid");
    return geom::SurfacePatch::bicubic(
        g.at("x").get<std::vector<double>>(),
        g.at("y").get<std::vector<double>>(),
        g.at("z").get<std::vector<std::vector<double>>>());
  }
  const std::string prefix = "fixture:";
  if (kind.rfind(prefix, 0) != 0)
    throw_serialization("unknown surface kind: " + kind);
  return geom::SurfacePatch::fixture(kind.substr(prefix.size()), d);
}

Json feature_to(const geom::FeatureModel& feature) {
  return Json{{"surface", surface_to(feature.surface)},
              {"boundary1", curve_to(feature.boundary1)},
              {"boundary2", curve_to(feature.boundary2)},
              {"machining_dir",
               Json::array({feature.machining_dir.x, feature.machining_dir.y})}};
}

geom::FeatureModel feature_from(const Json& j) {
  const Json& dir = j.at("machining_dir");
  return geom::FeatureModel{surface_from(j.at("surface")),
                            curve_from(j.at("boundary1")),
                            curve_from(j.at("boundary2")),
                            {dir[0].get<double>(), dir[1].get<double>()}};
}

Json net_to(const net::CurveNet& value) {
  Json curves = Json::array();
  curves.push_back(curve_to(value.start));
  for (const geom::SplineCurve& c : value.interiors)
    curves.push_back(curve_to(c));
  curves.push_back(curve_to(value.target));
  Json j{{"direction", Json::array({value.start_id, value.target_id})},
         {"K", value.k},
         {"P", value.step.value}};
  if (!value.step.overrides.empty()) {
    Json ovr = Json::array();
    for (const net::StepOverride& o : value.step.overrides)
      ovr.push_back(
          Json{{"begin", o.begin}, {"end", o.end}, {"step", o.step}});
    j["P_overrides"] = ovr;
  }
  j["stop_eps"] = value.stop_eps;
  j["truncated"] = value.truncated;
  j["curves"] = curves;
  return j;
}

net::CurveNet net_from(const Json& j) {
  const Json& curves = j.at("curves");
  if (!curves.is_array() || curves.size() < 2)
    throw_serialization("net needs at least the two boundary curves");
  std::vector<geom::SplineCurve> interiors;
  for (std::size_t i = 1; i + 1 < curves.size(); ++i)
    interiors.push_back(curve_from(curves[i]));
  std::vector<net::StepOverride> overrides;
  if (j.contains("P_overrides")) {
    for (const Json& o : j.at("P_overrides"))
      overrides.push_back({o.at("begin").get<double>(),
                           o.at("end").get<double>(),
                           o.at("step").get<double>()});
  }
  return net::CurveNet{curve_from(curves.front()),
                       curve_from(curves.back()),
                       std::move(interiors),
                       j.at("direction")[0].get<std::string>(),
                       j.at("direction")[1].get<std::string>(),
                       j.at("K").get<double>(),
                       net::StepP(j.at("P").get<double>(), overrides),
                       j.at("stop_eps").get<double>(),
                       j.at("truncated").get<bool>()};
}

Json composed_to(const net::ComposedArea& value) {
  Json areas = Json::array();
  for (int i = 0; i < value.area_count(); ++i)
    areas.push_back(
        Json{{"lower", value.ids[i]}, {"upper", value.ids[i + 1]}});
  Json curves = Json::object();
  for (std::size_t i = 0; i < value.guides.size(); ++i)
    curves[value.ids[i]] = curve_to(value.guides[i]);
  return Json{
      {"areas", areas}, {"curves", curves}, {"truncated", value.truncated}};
}

net::ComposedArea composed_from(const Json& j) {
  const Json& areas = j.at("areas");
  if (!areas.is_array() || areas.empty())
    throw_serialization("composed area needs at least one area");
  net::ComposedArea out;
  out.ids.push_back(areas[0].at("lower").get<std::string>());
  for (const Json& a : areas) {
    if (a.at("lower").get<std::string>() != out.ids.back())
      throw_serialization("area chain is not contiguous");
    out.ids.push_back(a.at("upper").get<std::string>());
  }
  const Json& curves = j.at("curves");
  for (const std::string& id : out.ids) {
    if (!curves.contains(id))
      throw_serialization("missing curve for guide id: " + id);
    out.guides.push_back(curve_from(curves.at(id)));
  }
  out.truncated = j.value("truncated", false);
  return out;
}

Json program_to(const path::IsoProgram& program) {
  Json blocks = Json::array();
  for (const path::IsoBlock& b : program.blocks)
    blocks.push_back(Json::array({b.start.x, b.start.y, b.start.z, b.end.x,
                                  b.end.y, b.end.z, b.feed_set}));
  Json passes = Json::array();
  for (const path::Pass& p : program.passes)
    passes.push_back(Json{{"first", p.first_block},
                          {"count", p.block_count},
                          {"area", p.area_index}});
  return Json{
      {"tool", {{"ball_radius", program.tool.ball_radius}}},
      {"params",
       {{"chordal_tolerance", program.params.chordal_tolerance},
        {"cusp_height", program.params.cusp_height},
        {"overrun", program.params.overrun},
        {"sweep",
         program.params.sweep == path::Sweep::zigzag ? "zigzag" : "one_way"},
        {"feed_set_point", program.params.feed_set_point}}},
      {"passes", passes},
      {"blocks", blocks}};
}

path::IsoProgram program_from(const Json& j) {
  path::IsoProgram program;
  program.tool.ball_radius = j.at("tool").at("ball_radius").get<double>();
  const Json& p = j.at("params");
  program.params.chordal_tolerance = p.at("chordal_tolerance").get<double>();
  program.params.cusp_height = p.at("cusp_height").get<double>();
  program.params.overrun = p.at("overrun").get<double>();
  std::string sweep = p.at("sweep").get<std::string>();
  if (sweep != "zigzag" && sweep != "one_way")
    throw_serialization("unknown sweep mode: " + sweep);
  program.params.sweep =
      sweep == "zigzag" ? path::Sweep::zigzag : path::Sweep::one_way;
  program.params.feed_set_point = p.at("feed_set_point").get<double>();
  for (const Json& b : j.at("blocks")) {
    if (!b.is_array() || b.size() != 7)
      throw_serialization("block must be a 7-number array");
    program.blocks.push_back(
        {{b[0].get<double>(), b[1].get<double>(), b[2].get<double>()},
         {b[3].get<double>(), b[4].get<double>(), b[5].get<double>()},
         b[6].get<double>()});
  }
  for (const Json& q : j.at("passes"))
    program.passes.push_back({q.at("first").get<int>(),
                              q.at("count").get<int>(),
                              q.at("area").get<int>()});
  return program;
}

Json sim_to(const sim::SimResult& result) {
  Json blocks = Json::array();
  for (const sim::BlockPlan& p : result.plans)
    blocks.push_back(Json{{"i", p.block_index},
                          {"len_mm", p.length},
                          {"v_in", p.v_in},
                          {"v_peak", p.v_peak},
                          {"v_out", p.v_out},
                          {"t_s", p.duration},
                          {"mean_feed", p.mean_feed}});
  return Json{{"set_point", result.set_point},
              {"total_time_s", result.total_time},
              {"blocks", blocks}};
}

sim::SimResult sim_from(const Json& j) {
  sim::SimResult result;
  result.set_point = j.at("set_point").get<double>();
  result.total_time = j.at("total_time_s").get<double>();
  for (const Json& b : j.at("blocks")) {
    sim::BlockPlan plan;
    plan.block_index = b.at("i").get<std::size_t>();
    plan.length = b.at("len_mm").get<double>();
    plan.v_in = b.at("v_in").get<double>();
    plan.v_peak = b.at("v_peak").get<double>();
    plan.v_out = b.at("v_out").get<double>();
    plan.duration = b.at("t_s").get<double>();
    plan.mean_feed = b.at("mean_feed").get<double>();
    result.plans.push_back(std::move(plan));
  }
  return result;
}

Json report_to(const view::PerfReport& report) {
  Json areas = Json::array();
  for (const view::AreaPerf& a : report.per_area)
    areas.push_back(Json{{"area", a.area_index},
                         {"time_s", a.time},
                         {"length_mm", a.length},
                         {"slow_fraction", a.slow_fraction}});
  return Json{{"schema", "perf-report/1"},
              {"name", report.name},
              {"set_point", report.set_point},
              {"total_time_s", report.total_time},
              {"slow_fraction", report.slow_fraction},
              {"boundary_slow_fraction", report.boundary_slow_fraction},
              {"block_length_hist", hist_to(report.block_length_hist)},
              {"feed_hist", hist_to(report.feed_hist)},
              {"per_area", areas}};
}

view::PerfReport report_from(const Json& j) {
  if (j.value("schema", "") != "perf-report/1")
    throw_serialization("unknown report schema");
  view::PerfReport report;
  report.name = j.at("name").get<std::string>();
  report.set_point = j.at("set_point").get<double>();
  report.total_time = j.at("total_time_s").get<double>();
  report.slow_fraction = j.at("slow_fraction").get<double>();
  report.boundary_slow_fraction =
      j.at("boundary_slow_fraction").get<double>();
  report.block_length_hist = hist_from(j.at("block_length_hist"));
  report.feed_hist = hist_from(j.at("feed_hist"));
  for (const Json& a : j.at("per_area"))
    report.per_area.push_back({a.at("area").get<int>(),
                               a.at("time_s").get<double>(),
                               a.at("length_mm").get<double>(),
                               a.at("slow_fraction").get<double>()});
  return report;
}

}  // namespace detail

namespace {

using detail::Json;

Json parse(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw_serialization(std::string("malformed JSON: ") + e.what());
  }
}

template <typename Fn>
auto guarded(Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    throw_serialization(std::string("artifact schema violation: ") +
                        e.what());
  }
}

}  // namespace

std::string curve_json(const geom::SplineCurve& curve) {
  return detail::curve_to(curve).dump();
}
geom::SplineCurve curve_from_json(const std::string& text) {
  return guarded([&] { return detail::curve_from(parse(text)); });
}

std::string surface_json(const geom::SurfacePatch& surface) {
  return detail::surface_to(surface).dump();
}
geom::SurfacePatch surface_from_json(const std::string& text) {
  return guarded([&] { return detail::surface_from(parse(text)); });
}

std::string feature_json(const geom::FeatureModel& feature) {
  return detail::feature_to(feature).dump();
}
geom::FeatureModel feature_from_json(const std::string& text) {
  return guarded([&] { return detail::feature_from(parse(text)); });
}

std::string net_json(const net::CurveNet& value) {
  return detail::net_to(value).dump();
}
net::CurveNet net_from_json(const std::string& text) {
  return guarded([&] { return detail::net_from(parse(text)); });
}

std::string composed_json(const net::ComposedArea& value) {
  return detail::composed_to(value).dump();
}
net::ComposedArea composed_from_json(const std::string& text) {
  return guarded([&] { return detail::composed_from(parse(text)); });
}

std::string program_json(const path::IsoProgram& program) {
  return detail::program_to(program).dump();
}
path::IsoProgram program_from_json(const std::string& text) {
  return guarded([&] { return detail::program_from(parse(text)); });
}

std::string sim_json(const sim::SimResult& result) {
  return detail::sim_to(result).dump();
}
sim::SimResult sim_from_json(const std::string& text) {
  return guarded([&] { return detail::sim_from(parse(text)); });
}

std::string report_json(const view::PerfReport& report) {
  return detail::report_to(report).dump();
}
view::PerfReport report_from_json(const std::string& text) {
  return guarded([&] { return detail::report_from(parse(text)); });
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_serialization("cannot read file: " + path);
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  if (in.bad()) throw_serialization("read failed: " + path);
  return content;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw_serialization("cannot write file: " + tmp.string());
    out.write(content.data(),
              static_cast<std::streamsize>(content.size()));
    if (!out) throw_serialization("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec)
    throw_serialization("cannot move " + tmp.string() + " to " + path + ": " +
                        ec.message());
}

}  // namespace curveguide::io
