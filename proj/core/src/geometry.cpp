#include "curveguide/geometry.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <utility>

namespace curveguide::geom {

namespace {

constexpr int kMaxDegree = 15;
constexpr double kInf = std::numeric_limits<double>::infinity();

// ----------------------------------------------------------------------------
// B-spline basis (Cox-de Boor recursion, clamped knot vectors).
// ----------------------------------------------------------------------------

int find_span_impl(int degree, const std::vector<double>& U, double t) {
  const int n = static_cast<int>(U.size()) - degree - 2;  // last control index
  if (t >= U[n + 1]) return n;
  if (t <= U[degree]) return degree;
  int lo = degree, hi = n + 1, mid = (lo + hi) / 2;
  while (t < U[mid] || t >= U[mid + 1]) {
    if (t < U[mid])
      hi = mid;
    else
      lo = mid;
    mid = (lo + hi) / 2;
  }
  return mid;
}

void basis_funs(int span, double t, int degree, const std::vector<double>& U,
                double* N) {
  double left[kMaxDegree + 1], right[kMaxDegree + 1];
  N[0] = 1.0;
  for (int j = 1; j <= degree; ++j) {
    left[j] = t - U[span + 1 - j];
    right[j] = U[span + j] - t;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      double tmp = N[r] / (right[r + 1] + left[j - r]);
      N[r] = saved + right[r + 1] * tmp;
      saved = left[j - r] * tmp;
    }
    N[j] = saved;
  }
}

// Basis derivatives up to `order` (order <= 2 used here).
void ders_basis_funs(int span, double t, int degree, int order,
                     const std::vector<double>& U,
                     double ders[3][kMaxDegree + 1]) {
  double ndu[kMaxDegree + 1][kMaxDegree + 1];
  double left[kMaxDegree + 1], right[kMaxDegree + 1];
  ndu[0][0] = 1.0;
  for (int j = 1; j <= degree; ++j) {
    left[j] = t - U[span + 1 - j];
    right[j] = U[span + j] - t;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu[j][r] = right[r + 1] + left[j - r];
      double tmp = ndu[r][j - 1] / ndu[j][r];
      ndu[r][j] = saved + right[r + 1] * tmp;
      saved = left[j - r] * tmp;
    }
    ndu[j][j] = saved;
  }
  for (int j = 0; j <= degree; ++j) ders[0][j] = ndu[j][degree];

  double a[2][kMaxDegree + 1];
  for (int r = 0; r <= degree; ++r) {
    int s1 = 0, s2 = 1;
    a[0][0] = 1.0;
    for (int k = 1; k <= order; ++k) {
      double d = 0.0;
      int rk = r - k, pk = degree - k;
      if (r >= k) {
        a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
        d = a[s2][0] * ndu[rk][pk];
      }
      int j1 = (rk >= -1) ? 1 : -rk;
      int j2 = (r - 1 <= pk) ? k - 1 : degree - r;
      for (int j = j1; j <= j2; ++j) {
        a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
        d += a[s2][j] * ndu[rk + j][pk];
      }
      if (r <= pk) {
        a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
        d += a[s2][k] * ndu[r][pk];
      }
      ders[k][r] = d;
      std::swap(s1, s2);
    }
  }
  int rr = degree;
  for (int k = 1; k <= order; ++k) {
    for (int j = 0; j <= degree; ++j) ders[k][j] *= rr;
    rr *= (degree - k);
  }
}

// ----------------------------------------------------------------------------
// Natural cubic spline (1D) used by the bicubic surface.
// ----------------------------------------------------------------------------

std::vector<double> nat_spline_m(const std::vector<double>& x,
                                 const double* y, int n) {
  std::vector<double> m(n, 0.0), u(n, 0.0);
  for (int i = 1; i < n - 1; ++i) {
    double sig = (x[i] - x[i - 1]) / (x[i + 1] - x[i - 1]);
    double p = sig * m[i - 1] + 2.0;
    m[i] = (sig - 1.0) / p;
    double du = (y[i + 1] - y[i]) / (x[i + 1] - x[i]) -
                (y[i] - y[i - 1]) / (x[i] - x[i - 1]);
    u[i] = (6.0 * du / (x[i + 1] - x[i - 1]) - sig * u[i - 1]) / p;
  }
  m[n - 1] = 0.0;
  for (int k = n - 2; k >= 0; --k) m[k] = m[k] * m[k + 1] + u[k];
  return m;
}

double nat_spline_eval(const std::vector<double>& x, const double* y,
                       const std::vector<double>& m, double q) {
  const int n = static_cast<int>(x.size());
  int hi =
      static_cast<int>(std::upper_bound(x.begin(), x.end(), q) - x.begin());
  hi = std::clamp(hi, 1, n - 1);
  int lo = hi - 1;
  double h = x[hi] - x[lo];
  double A = (x[hi] - q) / h, B = 1.0 - A;
  return A * y[lo] + B * y[hi] +
         ((A * A * A - A) * m[lo] + (B * B * B - B) * m[hi]) * h * h / 6.0;
}

double fixture_flat(double, double) { return 0.0; }
double fixture_master_like(double x, double y) {
  constexpr double pi = 3.14159265358979323846;
  return 2.0 * std::sin(2.0 * pi * x / 35.0) * std::cos(pi * y / 60.0);
}

}  // namespace

// ----------------------------------------------------------------------------
// Vec2
// ----------------------------------------------------------------------------

Vec2 Vec2::normalized() const {
  double n = norm();
  if (n < 1e-12) throw_degenerate("cannot normalize a zero-length direction");
  return {x / n, y / n};
}

// ----------------------------------------------------------------------------
// SplineCurve
// ----------------------------------------------------------------------------

SplineCurve::SplineCurve(int degree, std::vector<Point3> control_points,
                         std::vector<double> knots)
    : degree_(degree),
      control_(std::move(control_points)),
      knots_(std::move(knots)) {
  if (degree_ < 1 || degree_ > kMaxDegree)
    throw_invalid("spline degree must be in [1, 15]");
  const size_t n = control_.size();
  if (n < static_cast<size_t>(degree_) + 1)
    throw_invalid("spline needs at least degree+1 control points");
  if (knots_.size() != n + degree_ + 1)
    throw_invalid("knot count must equal control points + degree + 1");
  for (size_t i = 1; i < knots_.size(); ++i)
    if (knots_[i] < knots_[i - 1]) throw_invalid("knots must be non-decreasing");
  for (int i = 0; i < degree_; ++i) {
    if (knots_[i] != knots_[i + 1] ||
        knots_[knots_.size() - 1 - i] != knots_[knots_.size() - 2 - i])
      throw_invalid("knot vector must be clamped");
  }
  if (!(knots_[degree_] < knots_[n]))
    throw_invalid("knot vector has an empty parameter range");
}

SplineCurve SplineCurve::line(Point3 a, Point3 b) {
  return SplineCurve(1, {a, b}, {0.0, 0.0, 1.0, 1.0});
}

int SplineCurve::find_span(double t) const {
  return find_span_impl(degree_, knots_, t);
}

Point3 SplineCurve::evaluate(double t) const {
  t = std::clamp(t, knots_[degree_], knots_[control_.size()]);
  // Clamped ends evaluate to the end control points exactly.
  if (t <= knots_[degree_]) return control_.front();
  if (t >= knots_[control_.size()]) return control_.back();
  int span = find_span(t);
  double N[kMaxDegree + 1];
  basis_funs(span, t, degree_, knots_, N);
  Point3 p{};
  for (int j = 0; j <= degree_; ++j)
    p = p + control_[span - degree_ + j] * N[j];
  return p;
}

Point3 SplineCurve::derivative(double t, int order) const {
  if (order < 1 || order > 2) throw_invalid("derivative order must be 1 or 2");
  t = std::clamp(t, knots_[degree_], knots_[control_.size()]);
  int span = find_span(t);
  double ders[3][kMaxDegree + 1];
  ders_basis_funs(span, t, degree_, order, knots_, ders);
  Point3 p{};
  for (int j = 0; j <= degree_; ++j)
    p = p + control_[span - degree_ + j] * ders[order][j];
  return p;
}

// ----------------------------------------------------------------------------
// Fitting
// ----------------------------------------------------------------------------

SplineCurve fit_spline(std::span<const Point3> points, int target_degree,
                       FitMode mode) {
  if (points.size() < 2) throw_invalid("fit_spline needs at least 2 points");
  if (target_degree < 1 || target_degree > kMaxDegree)
    throw_invalid("fit_spline degree must be in [1, 15]");
  const int n = static_cast<int>(points.size()) - 1;
  const int p = std::min(target_degree, n);

  for (int i = 1; i <= n; ++i)
    if (distance(points[i], points[i - 1]) < 1e-12)
      throw_degenerate("fit_spline: duplicate consecutive points");

  if (mode == FitMode::control_polygon) {
    std::vector<double> knots(n + p + 2, 0.0);
    for (int i = 0; i <= p; ++i) knots[n + 1 + i] = 1.0;
    const int interior = n - p;
    for (int j = 1; j <= interior; ++j)
      knots[p + j] = static_cast<double>(j) / (interior + 1);
    return SplineCurve(p, {points.begin(), points.end()}, knots);
  }

  // Chord-length parameters.
  std::vector<double> tp(n + 1, 0.0);
  double total = 0.0;
  for (int i = 1; i <= n; ++i) total += distance(points[i], points[i - 1]);
  double acc = 0.0;
  for (int i = 1; i <= n; ++i) {
    acc += distance(points[i], points[i - 1]);
    tp[i] = acc / total;
  }
  tp[n] = 1.0;

  // Averaged interior knots.
  std::vector<double> knots(n + p + 2, 0.0);
  for (int i = 0; i <= p; ++i) knots[n + 1 + i] = 1.0;
  for (int j = 1; j <= n - p; ++j) {
    double s = 0.0;
    for (int i = j; i <= j + p - 1; ++i) s += tp[i];
    knots[p + j] = s / p;
  }

  std::vector<Point3> ctrl(n + 1);
  ctrl[0] = points[0];
  ctrl[n] = points[n];

  if (n >= 2) {
    // Interior collocation system; end points are pinned so the endpoint
    // interpolation invariant holds exactly.
    const int m = n - 1;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(m, 3);
    double N[kMaxDegree + 1];
    for (int i = 1; i <= n - 1; ++i) {
      int span = find_span_impl(p, knots, tp[i]);
      basis_funs(span, tp[i], p, knots, N);
      Point3 q = points[i];
      for (int j = 0; j <= p; ++j) {
        int col = span - p + j;
        if (col == 0) {
          q = q - points[0] * N[j];
        } else if (col == n) {
          q = q - points[n] * N[j];
        } else {
          A(i - 1, col - 1) = N[j];
        }
      }
      rhs(i - 1, 0) = q.x;
      rhs(i - 1, 1) = q.y;
      rhs(i - 1, 2) = q.z;
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    Eigen::MatrixXd sol = lu.solve(rhs);
    for (int i = 1; i <= n - 1; ++i)
      ctrl[i] = {sol(i - 1, 0), sol(i - 1, 1), sol(i - 1, 2)};
  }

  return SplineCurve(p, std::move(ctrl), std::move(knots));
}

// ----------------------------------------------------------------------------
// SurfacePatch
// ----------------------------------------------------------------------------

struct SurfacePatch::Impl {
  std::string kind;
  Domain2 domain;
  double (*fn)(double, double) = nullptr;
  std::vector<double> xs, ys;
  std::vector<std::vector<double>> z;    // z[ix][iy]
  std::vector<std::vector<double>> mx;   // x-direction second derivs, per iy
};

SurfacePatch::SurfacePatch(std::shared_ptr<const Impl> impl)
    : impl_(std::move(impl)) {}

SurfacePatch SurfacePatch::fixture(const std::string& name, Domain2 domain) {
  auto impl = std::make_shared<Impl>();
  impl->kind = "fixture:" + name;
  impl->domain = domain;
  if (name == "flat")
    impl->fn = fixture_flat;
  else if (name == "master-like")
    impl->fn = fixture_master_like;
  else
    throw_invalid("unknown surface fixture: " + name);
  if (!(domain.x0 < domain.x1 && domain.y0 < domain.y1))
    throw_invalid("surface domain is empty");
  return SurfacePatch(std::move(impl));
}

SurfacePatch SurfacePatch::bicubic(std::vector<double> xs,
                                   std::vector<double> ys,
                                   std::vector<std::vector<double>> z) {
  if (xs.size() < 2 || ys.size() < 2)
    throw_invalid("bicubic surface needs at least a 2x2 grid");
  for (size_t i = 1; i < xs.size(); ++i)
    if (xs[i] <= xs[i - 1]) throw_invalid("grid x must be strictly increasing");
  for (size_t i = 1; i < ys.size(); ++i)
    if (ys[i] <= ys[i - 1]) throw_invalid("grid y must be strictly increasing");
  if (z.size() != xs.size()) throw_invalid("grid z rows must match x count");
  for (const auto& row : z)
    if (row.size() != ys.size()) throw_invalid("grid z cols must match y count");

  auto impl = std::make_shared<Impl>();
  impl->kind = "bicubic";
  impl->domain = {xs.front(), xs.back(), ys.front(), ys.back()};
  impl->xs = std::move(xs);
  impl->ys = std::move(ys);
  impl->z = std::move(z);
  const int nx = static_cast<int>(impl->xs.size());
  const int ny = static_cast<int>(impl->ys.size());
  impl->mx.resize(ny);
  std::vector<double> col(nx);
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) col[ix] = impl->z[ix][iy];
    impl->mx[iy] = nat_spline_m(impl->xs, col.data(), nx);
  }
  return SurfacePatch(std::move(impl));
}

double SurfacePatch::height(double x, double y) const {
  const auto& d = impl_->domain;
  if (!d.contains(x, y))
    throw_out_of_range("surface query outside domain");
  if (impl_->fn) return impl_->fn(x, y);
  const int nx = static_cast<int>(impl_->xs.size());
  const int ny = static_cast<int>(impl_->ys.size());
  std::vector<double> col(nx), v(ny);
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) col[ix] = impl_->z[ix][iy];
    v[iy] = nat_spline_eval(impl_->xs, col.data(), impl_->mx[iy], x);
  }
  auto my = nat_spline_m(impl_->ys, v.data(), ny);
  return nat_spline_eval(impl_->ys, v.data(), my, y);
}

const Domain2& SurfacePatch::domain() const { return impl_->domain; }
const std::string& SurfacePatch::kind() const { return impl_->kind; }

const std::vector<double>& SurfacePatch::grid_x() const {
  if (impl_->fn) throw_invalid("fixture surface has no grid");
  return impl_->xs;
}
const std::vector<double>& SurfacePatch::grid_y() const {
  if (impl_->fn) throw_invalid("fixture surface has no grid");
  return impl_->ys;
}
const std::vector<std::vector<double>>& SurfacePatch::grid_z() const {
  if (impl_->fn) throw_invalid("fixture surface has no grid");
  return impl_->z;
}

Point3 project_to_surface(Point3 p, const SurfacePatch& surface) {
  return {p.x, p.y, surface.height(p.x, p.y)};
}

// ----------------------------------------------------------------------------
// Plane interrogation
// ----------------------------------------------------------------------------

namespace {

struct StationTable {
  std::vector<double> t;
  std::vector<double> f;  // station at t
  double fmin = kInf, fmax = -kInf;
};

StationTable build_station_table(const SplineCurve& c, Vec2 dir, int samples) {
  StationTable tab;
  tab.t.resize(samples);
  tab.f.resize(samples);
  for (int i = 0; i < samples; ++i) {
    double t = static_cast<double>(i) / (samples - 1);
    tab.t[i] = t;
    double f = c.evaluate(t).xy().dot(dir);
    tab.f[i] = f;
    tab.fmin = std::min(tab.fmin, f);
    tab.fmax = std::max(tab.fmax, f);
  }
  return tab;
}

double station_of(const SplineCurve& c, Vec2 dir, double t) {
  return c.evaluate(t).xy().dot(dir);
}

// Refines one bracket [lo, hi] with g(lo), g(hi) of opposite sign, where
// g(t) = station(t) - s.
double refine_root(const SplineCurve& c, Vec2 dir, double s, double lo,
                   double hi, double glo) {
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double gm = station_of(c, dir, mid) - s;
    if (std::abs(gm) < 1e-11 || hi - lo < 1e-15) return mid;
    if ((gm < 0.0) == (glo < 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double plane_param_from_table(const SplineCurve& c, const StationTable& tab,
                              Vec2 dir, double s) {
  if (s < tab.fmin - 1e-9 || s > tab.fmax + 1e-9)
    throw_out_of_range("station plane outside curve extent");
  const int n = static_cast<int>(tab.t.size());
  double found_t = kInf;
  bool found = false;
  for (int i = 0; i + 1 < n; ++i) {
    double a = tab.f[i] - s, b = tab.f[i + 1] - s;
    double root = kInf;
    if (a == 0.0) {
      root = tab.t[i];
    } else if (b == 0.0 && i + 2 == n) {
      root = tab.t[i + 1];
    } else if ((a < 0.0) != (b < 0.0)) {
      root = refine_root(c, dir, s, tab.t[i], tab.t[i + 1], a);
    }
    if (root != kInf) {
      if (found && distance(c.evaluate(root), c.evaluate(found_t)) > 1e-6) {
        throw_ambiguous("plane cuts the curve more than once");
      }
      if (!found) {
        found = true;
        found_t = root;
      }
    }
  }
  if (!found) {
    // Extent check passed but no sign change: the plane grazes an end.
    if (std::abs(tab.f.front() - s) <= std::abs(tab.f.back() - s))
      return tab.t.front();
    return tab.t.back();
  }
  return found_t;
}

}  // namespace

double curve_plane_param(const SplineCurve& curve,
                         const DiscretizationPlane& plane) {
  auto tab = build_station_table(curve, plane.normal, 129);
  return plane_param_from_table(curve, tab, plane.normal, plane.station);
}

Point3 curve_plane_point(const SplineCurve& curve,
                         const DiscretizationPlane& plane) {
  return curve.evaluate(curve_plane_param(curve, plane));
}

std::vector<Point3> curve_station_points(
    const SplineCurve& curve, std::span<const DiscretizationPlane> planes) {
  if (planes.empty()) throw_invalid("no station planes given");
  Vec2 dir = planes.front().normal;
  int samples = std::max<int>(129, static_cast<int>(planes.size()) * 2 + 1);
  auto tab = build_station_table(curve, dir, samples);
  std::vector<Point3> out;
  out.reserve(planes.size());
  for (const auto& pl : planes) {
    double t = plane_param_from_table(curve, tab, dir, pl.station);
    out.push_back(curve.evaluate(t));
  }
  return out;
}

MinDistanceResult min_distance(const SplineCurve& a, const SplineCurve& b,
                               std::span<const DiscretizationPlane> stations) {
  if (stations.empty()) throw_invalid("min_distance needs at least 1 station");
  auto pa = curve_station_points(a, stations);
  auto pb = curve_station_points(b, stations);

  MinDistanceResult res;
  res.distance = kInf;
  double prev_lat = 0.0;
  bool have_prev = false;
  for (size_t i = 0; i < stations.size(); ++i) {
    double d = distance(pa[i], pb[i]);
    double lat = (pb[i] - pa[i]).xy().dot(stations[i].normal.perp());
    if (d < res.distance) {
      res.distance = d;
      res.station = stations[i].station;
    }
    if (std::abs(lat) < 1e-12) {
      return {0.0, stations[i].station, true};
    }
    if (have_prev && (lat < 0.0) != (prev_lat < 0.0)) {
      // Lateral ordering flipped between adjacent stations: curves cross.
      double st = std::abs(lat) < std::abs(prev_lat)
                      ? stations[i].station
                      : stations[i - 1].station;
      return {0.0, st, true};
    }
    prev_lat = lat;
    have_prev = true;
  }
  return res;
}

// ----------------------------------------------------------------------------
// Curvature
// ----------------------------------------------------------------------------

std::vector<CurvatureSample> curvature_profile(const SplineCurve& curve,
                                               int samples) {
  if (samples < 2) throw_invalid("curvature_profile needs >= 2 samples");
  std::vector<CurvatureSample> out(samples);
  for (int i = 0; i < samples; ++i) {
    double t = static_cast<double>(i) / (samples - 1);
    Point3 d1 = curve.derivative(t, 1);
    Point3 d2 = curve.derivative(t, 2);
    double den = d1.norm();
    CurvatureSample s;
    s.param = t;
    if (den < 1e-12) {
      s.defined = false;
      s.curvature = 0.0;
    } else {
      s.curvature = d1.cross(d2).norm() / (den * den * den);
    }
    out[i] = s;
  }
  return out;
}

double min_curvature_radius(std::span<const CurvatureSample> profile) {
  double kmax = 0.0;
  for (const auto& s : profile)
    if (s.defined) kmax = std::max(kmax, s.curvature);
  if (kmax <= 1e-12) return kInf;
  return 1.0 / kmax;
}

std::vector<double> inflection_stations(const SplineCurve& curve,
                                        Vec2 machining_dir) {
  Vec2 dir = machining_dir.normalized();
  const int M = 1024;
  // Signed curvature of the xy projection; magnitudes below the floor are
  // treated as straight (radius beyond 1e10 mm).
  constexpr double kFloor = 1e-10;
  auto signed_k = [&](double t) {
    Point3 d1 = curve.derivative(t, 1);
    Point3 d2 = curve.derivative(t, 2);
    double den = std::pow(d1.x * d1.x + d1.y * d1.y, 1.5);
    if (den < 1e-18) return 0.0;
    return (d1.x * d2.y - d1.y * d2.x) / den;
  };

  std::vector<double> ts(M), ks(M);
  for (int i = 0; i < M; ++i) {
    ts[i] = static_cast<double>(i) / (M - 1);
    double k = signed_k(ts[i]);
    ks[i] = std::abs(k) < kFloor ? 0.0 : k;
  }

  std::vector<double> stations;
  int last = -1;  // index of last sample with a definite sign
  for (int i = 0; i < M; ++i) {
    if (ks[i] == 0.0) continue;
    if (last >= 0 && (ks[i] < 0.0) != (ks[last] < 0.0)) {
      double lo = ts[last], hi = ts[i];
      double klo = ks[last];
      while (std::abs(station_of(curve, dir, hi) -
                      station_of(curve, dir, lo)) > 1e-6) {
        double mid = 0.5 * (lo + hi);
        double km = signed_k(mid);
        if (km == 0.0 || (km < 0.0) == (klo < 0.0)) {
          lo = mid;
          if (km != 0.0) klo = km;
        } else {
          hi = mid;
        }
      }
      stations.push_back(station_of(curve, dir, 0.5 * (lo + hi)));
    }
    last = i;
  }
  return stations;
}

// ----------------------------------------------------------------------------
// FeatureModel
// ----------------------------------------------------------------------------

namespace {

std::pair<double, double> station_extent(const SplineCurve& c, Vec2 dir) {
  double lo = kInf, hi = -kInf;
  const int N = 257;
  for (int i = 0; i < N; ++i) {
    double s = station_of(c, dir, static_cast<double>(i) / (N - 1));
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  return {lo, hi};
}

}  // namespace

double FeatureModel::station_begin() const {
  auto [a0, a1] = station_extent(boundary1, machining_dir);
  auto [b0, b1] = station_extent(boundary2, machining_dir);
  return std::max(a0, b0);
}

double FeatureModel::station_end() const {
  auto [a0, a1] = station_extent(boundary1, machining_dir);
  auto [b0, b1] = station_extent(boundary2, machining_dir);
  return std::min(a1, b1);
}

void validate_feature(const FeatureModel& feature, int samples) {
  if (std::abs(feature.machining_dir.norm() - 1.0) > 1e-9)
    throw_invalid("machining direction must be normalized");
  if (samples < 2) throw_invalid("validate_feature needs >= 2 samples");

  for (const SplineCurve* c : {&feature.boundary1, &feature.boundary2}) {
    for (int i = 0; i < samples; ++i) {
      double t = static_cast<double>(i) / (samples - 1);
      Point3 p = c->evaluate(t);
      if (!feature.surface.domain().contains(p.x, p.y))
        throw_invalid("boundary leaves the surface domain");
      double dz = std::abs(p.z - feature.surface.height(p.x, p.y));
      if (dz > 1e-6)
        throw_invalid("boundary is not on the surface (dz > 1e-6 mm)");
    }
  }

  double s0 = feature.station_begin(), s1 = feature.station_end();
  if (!(s0 < s1)) throw_invalid("boundaries share no station extent");

  // Interior planes must cut each boundary exactly once, and the boundaries
  // must keep a consistent lateral ordering.
  std::vector<DiscretizationPlane> planes;
  const int K = 33;
  for (int i = 0; i < K; ++i) {
    double s = s0 + (s1 - s0) * (i + 0.5) / K;
    planes.push_back({s, feature.machining_dir});
  }
  auto res = min_distance(feature.boundary1, feature.boundary2, planes);
  if (res.crossing || res.distance <= 0.0)
    throw_invalid("boundaries cross inside the feature");
}

}  // namespace curveguide::geom
