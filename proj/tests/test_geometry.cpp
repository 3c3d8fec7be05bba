#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>
#include <vector>

#include "curveguide/geometry.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace curveguide;
using geom::DiscretizationPlane;
using geom::Point3;
using geom::SplineCurve;
using geom::SurfacePatch;
using geom::Vec2;

namespace {

std::vector<DiscretizationPlane> uniform_planes(double s0, double s1, int n,
                                                Vec2 dir = {1.0, 0.0}) {
  std::vector<DiscretizationPlane> planes;
  for (int i = 0; i < n; ++i)
    planes.push_back({s0 + (s1 - s0) * i / (n - 1), dir});
  return planes;
}

std::vector<Point3> wavy_points(int n) {
  std::vector<Point3> pts;
  for (int i = 0; i < n; ++i) {
    double x = 20.0 * i / (n - 1);
    pts.push_back({x, 2.0 * std::sin(0.7 * x), 0.5 * std::cos(0.3 * x)});
  }
  return pts;
}

}  // namespace

TEST_CASE("vector algebra basics") {
  Vec2 v{3.0, 4.0};
  CHECK(v.norm() == doctest::Approx(5.0));
  CHECK(v.perp().dot(v) == doctest::Approx(0.0));
  CHECK(v.normalized().norm() == doctest::Approx(1.0));

  Point3 a{1, 0, 0}, b{0, 1, 0};
  Point3 c = a.cross(b);
  CHECK(c.x == doctest::Approx(0.0));
  CHECK(c.y == doctest::Approx(0.0));
  CHECK(c.z == doctest::Approx(1.0));
  CHECK(geom::distance({0, 0, 0}, {1, 2, 2}) == doctest::Approx(3.0));
}

TEST_CASE("line segment spline") {
  auto line = SplineCurve::line({1, 2, 3}, {4, 6, 3});
  CHECK(geom::distance(line.evaluate(0.0), {1, 2, 3}) < 1e-12);
  CHECK(geom::distance(line.evaluate(1.0), {4, 6, 3}) < 1e-12);
  CHECK(geom::distance(line.evaluate(0.5), {2.5, 4, 3}) < 1e-12);
  // Constant first derivative, vanishing second.
  Point3 d1 = line.derivative(0.3, 1);
  CHECK(geom::distance(d1, {3, 4, 0}) < 1e-9);
  CHECK(line.derivative(0.7, 2).norm() < 1e-9);
}

TEST_CASE("spline constructor validates the knot vector") {
  std::vector<Point3> ctrl{{0, 0, 0}, {1, 1, 0}};
  CHECK_THROWS_AS(SplineCurve(1, ctrl, {0.0, 0.0, 1.0}), Error);
  CHECK_THROWS_AS(SplineCurve(1, ctrl, {0.0, 1.0, 0.0, 1.0}), Error);
  CHECK_NOTHROW(SplineCurve(1, ctrl, {0.0, 0.0, 1.0, 1.0}));
}

TEST_CASE("interpolation passes through every input point") {
  auto pts = wavy_points(30);
  auto curve = geom::fit_spline(pts, 5);
  CHECK(curve.degree() == 5);
  // Endpoints are pinned exactly.
  CHECK(geom::distance(curve.evaluate(0.0), pts.front()) < 1e-12);
  CHECK(geom::distance(curve.evaluate(1.0), pts.back()) < 1e-12);
  // Interior points: the curve is x-monotone here, so the station query at a
  // point's x must return exactly that point.
  for (const auto& p : pts) {
    auto q = geom::curve_plane_point(curve, {p.x, {1.0, 0.0}});
    CHECK(geom::distance(p, q) < 1e-9);
  }
}

TEST_CASE("fit degree falls back to point count minus one") {
  std::vector<Point3> three{{0, 0, 0}, {1, 1, 0}, {2, 0, 0}};
  CHECK(geom::fit_spline(three, 5).degree() == 2);
  std::vector<Point3> two{{0, 0, 0}, {1, 1, 0}};
  CHECK(geom::fit_spline(two, 5).degree() == 1);
  CHECK_THROWS_AS(geom::fit_spline(std::vector<Point3>{{0, 0, 0}}, 5), Error);
}

TEST_CASE("control polygon mode keeps the points as control net") {
  auto pts = wavy_points(12);
  auto curve = geom::fit_spline(pts, 5, geom::FitMode::control_polygon);
  REQUIRE(curve.control_points().size() == pts.size());
  for (size_t i = 0; i < pts.size(); ++i)
    CHECK(geom::distance(curve.control_points()[i], pts[i]) < 1e-12);
}

TEST_CASE("plane intersection lies on the plane") {
  auto curve = geom::fit_spline(wavy_points(25), 5);
  for (double s : {0.3, 4.2, 9.9, 15.5, 19.7}) {
    auto p = geom::curve_plane_point(curve, {s, {1.0, 0.0}});
    CHECK(std::abs(p.xy().dot(Vec2{1.0, 0.0}) - s) < 1e-9);
  }
}

TEST_CASE("plane outside the curve extent is out of range") {
  auto curve = geom::fit_spline(wavy_points(10), 5);
  CHECK_THROWS_AS(geom::curve_plane_point(curve, {-1.0, {1.0, 0.0}}), Error);
  try {
    geom::curve_plane_point(curve, {25.0, {1.0, 0.0}});
    FAIL("expected out_of_range");
  } catch (const Error& e) {
    CHECK(e.code() == Error::Code::out_of_range);
  }
}

TEST_CASE("a plane cutting the curve twice is ambiguous") {
  // C-shaped curve: x rises to 8 and falls back to 0.
  std::vector<Point3> pts{
      {0, 0, 0}, {5, 1, 0}, {8, 5, 0}, {5, 9, 0}, {0, 10, 0}};
  auto curve = geom::fit_spline(pts, 3);
  try {
    geom::curve_plane_point(curve, {4.0, {1.0, 0.0}});
    FAIL("expected ambiguous");
  } catch (const Error& e) {
    CHECK(e.code() == Error::Code::ambiguous);
  }
}

TEST_CASE("min distance is symmetric and matches converging lines") {
  auto a = SplineCurve::line({0, 0, 0}, {20, 0, 0});
  auto b = SplineCurve::line({0, 10, 0}, {20, 2, 0});
  auto planes = uniform_planes(0.0, 20.0, 21);
  auto dab = geom::min_distance(a, b, planes);
  auto dba = geom::min_distance(b, a, planes);
  CHECK(dab.distance == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(dab.distance == doctest::Approx(dba.distance).epsilon(1e-12));
  CHECK(dab.station == doctest::Approx(20.0));
  CHECK_FALSE(dab.crossing);

  auto c = SplineCurve::line({0, -3, 0}, {20, 3, 0});
  auto dac = geom::min_distance(a, c, planes);
  CHECK(dac.crossing);
  CHECK(dac.distance == doctest::Approx(0.0));
}

TEST_CASE("circle fits report curvature within one percent") {
  for (double radius : {2.0, 7.0, 50.0}) {
    std::vector<Point3> pts;
    const int n = 46;  // every 2 degrees over a quarter arc
    for (int i = 0; i < n; ++i) {
      double ang = (M_PI / 2.0) * i / (n - 1);
      pts.push_back({radius * std::cos(ang), radius * std::sin(ang), 0.0});
    }
    auto curve = geom::fit_spline(pts, 5);
    auto profile = geom::curvature_profile(curve, 256);
    for (const auto& sample : profile) {
      REQUIRE(sample.defined);
      CHECK(std::abs(sample.curvature * radius - 1.0) < 0.01);
    }
    CHECK(geom::min_curvature_radius(profile) ==
          doctest::Approx(radius).epsilon(0.01));
  }
}

TEST_CASE("straight curves have infinite minimum curvature radius") {
  auto line = SplineCurve::line({0, 0, 0}, {10, 5, 0});
  auto profile = geom::curvature_profile(line, 64);
  CHECK(std::isinf(geom::min_curvature_radius(profile)));
}

TEST_CASE("inflection stations of sine fits match the analytic count") {
  // Domains anchored at a curvature extremum so no inflection sits on an
  // endpoint; sin(kx) then has 2k interior inflections over one period.
  for (int k : {1, 2, 3}) {
    double a0 = M_PI / (2.0 * k);
    std::vector<Point3> pts;
    for (double x = a0; x <= a0 + 2.0 * M_PI + 1e-9; x += 0.05)
      pts.push_back({x, std::sin(k * x), 0.0});
    auto curve = geom::fit_spline(pts, 5);
    auto stations = geom::inflection_stations(curve, {1.0, 0.0});
    REQUIRE(stations.size() == static_cast<size_t>(2 * k));
    for (int m = 1; m <= 2 * k; ++m)
      CHECK(std::abs(stations[m - 1] - m * M_PI / k) < 5e-3);
  }
}

TEST_CASE("surface projection keeps xy and snaps z") {
  auto surface =
      SurfacePatch::fixture("master-like", {0.0, 140.0, 0.0, 50.0});
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> ux(0.0, 140.0), uy(0.0, 50.0);
  for (int i = 0; i < 50; ++i) {
    Point3 p{ux(rng), uy(rng), 42.0};
    Point3 q = geom::project_to_surface(p, surface);
    CHECK(q.x == doctest::Approx(p.x));
    CHECK(q.y == doctest::Approx(p.y));
    CHECK(q.z == doctest::Approx(surface.height(p.x, p.y)));
  }
}

TEST_CASE("bicubic patch interpolates its grid") {
  std::vector<double> xs{0, 1, 2, 3, 4}, ys{0, 2, 4, 6};
  std::vector<std::vector<double>> z(xs.size(),
                                     std::vector<double>(ys.size()));
  for (size_t i = 0; i < xs.size(); ++i)
    for (size_t j = 0; j < ys.size(); ++j)
      z[i][j] = std::sin(xs[i]) * std::cos(0.5 * ys[j]);
  auto patch = SurfacePatch::bicubic(xs, ys, z);
  CHECK(patch.kind() == "bicubic");
  for (size_t i = 0; i < xs.size(); ++i)
    for (size_t j = 0; j < ys.size(); ++j)
      CHECK(patch.height(xs[i], ys[j]) == doctest::Approx(z[i][j]));
  CHECK_THROWS_AS(patch.height(-0.5, 0.0), Error);
  CHECK(patch.grid_x() == xs);
  CHECK(patch.grid_y() == ys);

  auto fixture = SurfacePatch::fixture("flat", {0, 1, 0, 1});
  CHECK_THROWS_AS(fixture.grid_x(), Error);
  CHECK_THROWS_AS(SurfacePatch::fixture("no-such", {0, 1, 0, 1}), Error);
}

TEST_CASE("feature validation catches broken inputs") {
  std::mt19937 rng(11);
  auto good = testsup::random_wavy_feature(rng);
  CHECK_NOTHROW(geom::validate_feature(good));
  CHECK(good.station_begin() == doctest::Approx(0.0));
  CHECK(good.station_end() == doctest::Approx(20.0));

  auto off_surface = good;
  std::vector<Point3> lifted = good.boundary1.control_points();
  for (auto& p : lifted) p.z += 0.1;
  off_surface.boundary1 =
      SplineCurve(good.boundary1.degree(), lifted, good.boundary1.knots());
  CHECK_THROWS_AS(geom::validate_feature(off_surface), Error);

  auto bad_dir = good;
  bad_dir.machining_dir = {0.0, 0.0};
  CHECK_THROWS_AS(geom::validate_feature(bad_dir), Error);

  auto crossing = good;
  crossing.boundary2 = geom::fit_spline(
      std::vector<Point3>{{0, 1, 0}, {10, 6, 0}, {20, 11, 0}}, 5);
  CHECK_THROWS_AS(geom::validate_feature(crossing), Error);
}
