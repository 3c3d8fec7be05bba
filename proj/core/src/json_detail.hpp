#pragma once

#include "json.hpp"

#include "curveguide/curvenet.hpp"
#include "curveguide/feedsim.hpp"
#include "curveguide/geometry.hpp"
#include "curveguide/perfview.hpp"
#include "curveguide/toolpath.hpp"

// In-memory JSON converters shared by json_io and the pipeline driver.
// Field order is fixed (ordered_json) so artifacts are byte-stable.
namespace curveguide::io::detail {

using Json = nlohmann::ordered_json;

Json curve_to(const geom::SplineCurve& curve);
geom::SplineCurve curve_from(const Json& j);

Json surface_to(const geom::SurfacePatch& surface);
geom::SurfacePatch surface_from(const Json& j);

Json feature_to(const geom::FeatureModel& feature);
geom::FeatureModel feature_from(const Json& j);

Json net_to(const net::CurveNet& value);
net::CurveNet net_from(const Json& j);

Json composed_to(const net::ComposedArea& value);
net::ComposedArea composed_from(const Json& j);

Json program_to(const path::IsoProgram& program);
path::IsoProgram program_from(const Json& j);

Json sim_to(const sim::SimResult& result);
sim::SimResult sim_from(const Json& j);

Json report_to(const view::PerfReport& report);
view::PerfReport report_from(const Json& j);

}  // namespace curveguide::io::detail
