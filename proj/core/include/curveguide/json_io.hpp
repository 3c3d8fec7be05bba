#pragma once

#include <string>

#include "curveguide/curvenet.hpp"
#include "curveguide/feedsim.hpp"
#include "curveguide/geometry.hpp"
#include "curveguide/perfview.hpp"
#include "curveguide/toolpath.hpp"

// JSON artifact formats. Every *_json / *_from_json pair round-trips; parse
// and schema violations surface as serialization errors.
namespace curveguide::io {

std::string curve_json(const geom::SplineCurve& curve);
geom::SplineCurve curve_from_json(const std::string& text);

std::string surface_json(const geom::SurfacePatch& surface);
geom::SurfacePatch surface_from_json(const std::string& text);

std::string feature_json(const geom::FeatureModel& feature);
geom::FeatureModel feature_from_json(const std::string& text);

std::string net_json(const net::CurveNet& value);
net::CurveNet net_from_json(const std::string& text);

std::string composed_json(const net::ComposedArea& value);
net::ComposedArea composed_from_json(const std::string& text);

std::string program_json(const path::IsoProgram& program);
path::IsoProgram program_from_json(const std::string& text);

// Per-block plan summary; phase breakdowns are not serialized, so a parsed
// SimResult supports reporting but not resampling.
std::string sim_json(const sim::SimResult& result);
sim::SimResult sim_from_json(const std::string& text);

std::string report_json(const view::PerfReport& report);
view::PerfReport report_from_json(const std::string& text);

// Throws a serialization error naming the path when the file is unreadable.
std::string read_file(const std::string& path);

// Writes through a sibling temp file and renames into place.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace curveguide::io
