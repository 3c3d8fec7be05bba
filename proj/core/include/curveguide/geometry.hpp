#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "curveguide/errors.hpp"

namespace curveguide::geom {

// ============================================================================
// Small vector types. Units are millimetres throughout.
// ============================================================================

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double norm() const { return std::sqrt(x * x + y * y); }
  // 90 degree counter-clockwise rotation.
  Vec2 perp() const { return {-y, x}; }
  Vec2 normalized() const;
};

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Point3 operator+(Point3 o) const { return {x + o.x, y + o.y, z + o.z}; }
  Point3 operator-(Point3 o) const { return {x - o.x, y - o.y, z - o.z}; }
  Point3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double dot(Point3 o) const { return x * o.x + y * o.y + z * o.z; }
  Point3 cross(Point3 o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  Vec2 xy() const { return {x, y}; }
};

inline double distance(Point3 a, Point3 b) { return (a - b).norm(); }

// ============================================================================
// SplineCurve: clamped, non-rational B-spline in 3D, parameterized over [0,1].
// ============================================================================

class SplineCurve {
 public:
  // Knot vector must be clamped: first/last knot repeated degree+1 times.
  SplineCurve(int degree, std::vector<Point3> control_points,
              std::vector<double> knots);

  static SplineCurve line(Point3 a, Point3 b);

  int degree() const { return degree_; }
  const std::vector<Point3>& control_points() const { return control_; }
  const std::vector<double>& knots() const { return knots_; }

  Point3 evaluate(double t) const;
  // order 1 or 2.
  Point3 derivative(double t, int order) const;

 private:
  int degree_;
  std::vector<Point3> control_;
  std::vector<double> knots_;
  int find_span(double t) const;
};

enum class FitMode {
  interpolate,     // curve passes through the points (global interpolation)
  control_polygon  // points are taken directly as the control polygon
};

// Fits a B-spline of degree min(target_degree, points-1) through the points.
// Chord-length parameterization, averaged interior knots. The first and last
// points are pinned exactly.
SplineCurve fit_spline(std::span<const Point3> points, int target_degree = 5,
                       FitMode mode = FitMode::interpolate);

// ============================================================================
// SurfacePatch: single-valued height field z = f(x, y) over a rectangular
// domain. Either a named analytic fixture or a bicubic tensor-product spline
// over a grid.
// ============================================================================

struct Domain2 {
  double x0 = 0.0, x1 = 0.0;
  double y0 = 0.0, y1 = 0.0;

  bool contains(double x, double y, double tol = 1e-9) const {
    return x >= x0 - tol && x <= x1 + tol && y >= y0 - tol && y <= y1 + tol;
  }
};

class SurfacePatch {
 public:
  // Known fixture names: "flat", "master-like".
  static SurfacePatch fixture(const std::string& name, Domain2 domain);
  // Grid coordinates must be strictly increasing; z is indexed z[ix][iy].
  static SurfacePatch bicubic(std::vector<double> xs, std::vector<double> ys,
                              std::vector<std::vector<double>> z);

  double height(double x, double y) const;  // out_of_range outside the domain
  const Domain2& domain() const;
  // "fixture:<name>" or "bicubic".
  const std::string& kind() const;

  // bicubic accessors (serialization); invalid_input for fixtures.
  const std::vector<double>& grid_x() const;
  const std::vector<double>& grid_y() const;
  const std::vector<std::vector<double>>& grid_z() const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  explicit SurfacePatch(std::shared_ptr<const Impl> impl);
};

Point3 project_to_surface(Point3 p, const SurfacePatch& surface);

// ============================================================================
// Machining feature: surface patch bounded by two guide curves, machined
// along a fixed direction in the xy plane.
// ============================================================================

// A vertical plane at `station` whose unit normal (in xy) is the machining
// direction. Signed station of a point = dot(p.xy, normal).
struct DiscretizationPlane {
  double station = 0.0;
  Vec2 normal{1.0, 0.0};
};

struct FeatureModel {
  SurfacePatch surface;
  SplineCurve boundary1;
  SplineCurve boundary2;
  Vec2 machining_dir{1.0, 0.0};

  // Station extent shared by both boundaries (intersection of their spans).
  double station_begin() const;
  double station_end() const;
};

// Checks the feature invariants: normalized direction, boundaries on the
// surface within 1e-6 mm, each boundary cut exactly once by interior planes,
// boundaries not crossing. Throws on violation.
void validate_feature(const FeatureModel& feature, int samples = 200);

// ============================================================================
// Curve interrogation.
// ============================================================================

// Intersection of a curve with a station plane. The feature contract
// guarantees a single crossing; more than one is an ambiguity error, a
// station outside the curve extent is out_of_range.
Point3 curve_plane_point(const SplineCurve& curve,
                         const DiscretizationPlane& plane);

// Parameter of that intersection (same search, exposed for reuse).
double curve_plane_param(const SplineCurve& curve,
                         const DiscretizationPlane& plane);

// Batch form of curve_plane_point over a shared station grid. All planes must
// share one normal; the curve is tabulated once, so this is much cheaper than
// per-plane queries.
std::vector<Point3> curve_station_points(
    const SplineCurve& curve, std::span<const DiscretizationPlane> planes);

struct MinDistanceResult {
  double distance = 0.0;
  double station = 0.0;  // station where the minimum (or a crossing) occurs
  bool crossing = false;
};

// Station-sampled distance between two curves. A flip of the lateral ordering
// between adjacent stations counts as a crossing with distance zero.
MinDistanceResult min_distance(const SplineCurve& a, const SplineCurve& b,
                               std::span<const DiscretizationPlane> stations);

struct CurvatureSample {
  double param = 0.0;
  double curvature = 0.0;  // 1/mm
  bool defined = true;     // false where |c'| vanishes
};

// Curvature |c' x c''| / |c'|^3 at `samples` uniform parameters (endpoints
// included). samples >= 2.
std::vector<CurvatureSample> curvature_profile(const SplineCurve& curve,
                                               int samples = 256);

// 1 / max curvature; +infinity when the curve is straight.
double min_curvature_radius(std::span<const CurvatureSample> profile);

// Stations (machining-direction coordinates) of interior sign changes of the
// signed xy curvature. Sign-scan over >= 512 samples, bisection-refined until
// the bracketing stations differ by < 1e-6 mm.
std::vector<double> inflection_stations(const SplineCurve& curve,
                                        Vec2 machining_dir);

}  // namespace curveguide::geom
