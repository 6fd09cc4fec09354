#include <doctest.h>

#include "zollfrei/geodesic.hpp"

using namespace zollfrei;
using namespace zollfrei::manifold;
using namespace zollfrei::geodesic;

namespace {

Point4 safe_point(std::mt19937_64& rng) {
  for (;;) {
    Point4 p = Point4::random(rng);
    if (std::fabs(p.x[2] - p.y[2]) > 0.4) return p;
  }
}

// Distance from an ambient point to the trace, refined by a cubic Hermite
// interpolant between samples so chord error does not dominate.
double trace_point_distance(const GeodesicTrace& tr, const Vec6& q) {
  const auto& ss = tr.samples;
  std::size_t jb = 0;
  double db = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < ss.size(); ++j) {
    double d = (ss[j].p.ambient() - q).norm();
    if (d < db) {
      db = d;
      jb = j;
    }
  }
  auto hermite_min = [&](std::size_t j0) {
    const auto& A = ss[j0];
    const auto& B = ss[j0 + 1];
    double h = B.t - A.t;
    Vec6 p0 = A.p.ambient(), p1 = B.p.ambient();
    Vec6 v0 = A.v.ambient() * h, v1 = B.v.ambient() * h;
    auto at = [&](double s) {
      double s2 = s * s, s3 = s2 * s;
      return (2 * s3 - 3 * s2 + 1) * p0 + (s3 - 2 * s2 + s) * v0 +
             (-2 * s3 + 3 * s2) * p1 + (s3 - s2) * v1;
    };
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 90; ++it) {
      double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
      if ((at(m1) - q).norm() < (at(m2) - q).norm()) hi = m2; else lo = m1;
    }
    return (at(0.5 * (lo + hi)) - q).norm();
  };
  double best = db;
  if (jb > 0) best = std::min(best, hermite_min(jb - 1));
  if (jb + 1 < ss.size()) best = std::min(best, hermite_min(jb));
  return best;
}

// One-sided point-set deviation of a from b.
double trace_deviation(const GeodesicTrace& a, const GeodesicTrace& b) {
  double worst = 0.0;
  for (const auto& s : a.samples) {
    worst = std::max(worst, trace_point_distance(b, s.p.ambient()));
  }
  return worst;
}

}  // namespace

TEST_CASE("null geodesics of the round product run on paired great circles") {
  MetricField g = make_g0();
  std::mt19937_64 rng = make_rng(41, 0);
  Point4 p = safe_point(rng);
  Vec3 u = Vec3(0.3, -1.1, 0.7).cross(p.x).normalized();
  Vec3 w = Vec3(-0.9, 0.4, 1.3).cross(p.y).normalized();
  Tangent4 v(u, w);
  REQUIRE(std::fabs(g.g(p, v, v)) < 1e-14);

  GeodesicTrace tr = integrate_null_geodesic(g, p, v, 4.0 * kPi, 1e-11);
  CHECK(tr.complete);
  double worst = 0.0;
  for (const auto& s : tr.samples) {
    Vec3 xe = std::cos(s.t) * p.x + std::sin(s.t) * u;
    Vec3 ye = std::cos(s.t) * p.y + std::sin(s.t) * w;
    worst = std::max(worst, (s.p.x - xe).norm() + (s.p.y - ye).norm());
  }
  CHECK(worst < 1e-8);
  CHECK(tr.max_null_drift < 1e-8);
}

TEST_CASE("non-null initial data is rejected") {
  MetricField g = make_g0();
  std::mt19937_64 rng = make_rng(41, 1);
  Point4 p = safe_point(rng);
  Vec3 u = Vec3(0, 0, 1).cross(p.x).normalized();
  Vec3 w = 0.5 * Vec3(1, 0, 0).cross(p.y).normalized();
  CHECK_THROWS_AS(integrate_null_geodesic(g, p, Tangent4(u, w), 1.0, 1e-10),
                  domain_error);
}

TEST_CASE("flat-chart geodesics are straight coordinate lines") {
  MetricField g = make_flat_chart_metric();
  std::mt19937_64 rng = make_rng(41, 2);
  Point4 p = safe_point(rng);
  Frame4 f = stereographic_coordinate_frame(p);
  Tangent4 v = f.e[0] + f.e[2] * 1.0 + f.e[1] * 0.25 + f.e[3] * 0.25;
  REQUIRE(std::fabs(g.g(p, v, v)) < 1e-12);
  v = normalize_affine(v);

  Vec4 q0 = stereographic_chart(p);
  Vec4 dq = stereographic_push(p, v);
  GeodesicTrace tr = integrate_null_geodesic(g, p, v, 2.0, 1e-11);
  CHECK(tr.complete);
  double worst = 0.0;
  for (const auto& s : tr.samples) {
    Vec4 q = stereographic_chart(s.p);
    worst = std::max(worst, (q - (q0 + s.t * dq)).norm());
  }
  CHECK(worst < 1e-7);
}

TEST_CASE("round product closure: every random null geodesic closes at 2 pi") {
  MetricField g = make_g0();
  auto reports = zollfrei_closure_test(g, 100, 90210, 1e-6);
  REQUIRE(reports.size() == 100);
  for (const auto& r : reports) {
    CHECK(r.closed);
    CHECK(r.endpoint_gap < 1e-6);
    CHECK(std::fabs(r.period_estimate - 2.0 * kPi) < 1e-6);
    if (r.closed) CHECK(r.endpoint_gap < 1e-6);
  }
}

TEST_CASE("flat-chart closure: nothing closes") {
  MetricField g = make_flat_chart_metric();
  auto reports = zollfrei_closure_test(g, 20, 777, 1e-6);
  for (const auto& r : reports) CHECK_FALSE(r.closed);
}

TEST_CASE("round product beta-surface is a linear-graph sphere") {
  MetricField g = make_g0();
  std::mt19937_64 rng = make_rng(41, 3);
  Point4 p = safe_point(rng);
  BetaSurfacePatch patch = integrate_beta_surface(g, p, 0.0, kPi, 14);
  CHECK(patch.max_isotropy_defect < 1e-7);

  // Fit y = A x over the grid nodes; a beta-surface of the product of round
  // spheres is the graph of a single linear map of the factors.
  Eigen::Matrix<double, Eigen::Dynamic, 3> X;
  Eigen::Matrix<double, Eigen::Dynamic, 3> Y;
  int rows = 0;
  for (const auto& ray : patch.grid) rows += static_cast<int>(ray.size());
  X.resize(rows, 3);
  Y.resize(rows, 3);
  int r = 0;
  for (const auto& ray : patch.grid) {
    for (const auto& node : ray) {
      X.row(r) = node.p.x.transpose();
      Y.row(r) = node.p.y.transpose();
      ++r;
    }
  }
  Eigen::Matrix3d A = (X.transpose() * X).ldlt().solve(X.transpose() * Y).transpose();
  double worst = 0.0;
  for (int i = 0; i < rows; ++i) {
    worst = std::max(worst, (Y.row(i).transpose() - A * X.row(i).transpose()).norm());
  }
  CHECK(worst < 1e-5);
  CHECK(std::fabs(std::fabs(A.determinant()) - 1.0) < 1e-6);
}

TEST_CASE("flat-chart beta-surface is an affine coordinate 2-plane") {
  MetricField g = make_flat_chart_metric();
  std::mt19937_64 rng = make_rng(41, 4);
  Point4 p = safe_point(rng);
  BetaSurfacePatch patch = integrate_beta_surface(g, p, 0.4, 0.8, 10);
  CHECK(patch.max_isotropy_defect < 1e-7);

  Vec4 q0 = stereographic_chart(patch.base);
  Eigen::Matrix<double, 4, 2> B;
  B.col(0) = stereographic_push(patch.base, patch.base_plane[0]);
  B.col(1) = stereographic_push(patch.base, patch.base_plane[1]);
  double worst = 0.0;
  for (const auto& ray : patch.grid) {
    for (const auto& node : ray) {
      Vec4 d = stereographic_chart(node.p) - q0;
      Eigen::Vector2d c = (B.transpose() * B).ldlt().solve(B.transpose() * d);
      worst = std::max(worst, (d - B * c).norm());
    }
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("beta-surface integration detects a non-self-dual metric") {
  MetricField g = make_product_nonround(0.3);
  Point4 p(Vec3(0.2, 0.3, 0.933).normalized(), Vec3(0.5, -0.5, -0.707).normalized());
  CHECK_THROWS_AS(integrate_beta_surface(g, p, 0.2, 1.2, 8), convergence_error);
}

TEST_CASE("two distinct round beta-surfaces meet in exactly two points") {
  MetricField g = make_g0();
  std::mt19937_64 rng = make_rng(41, 5);
  Point4 p1 = safe_point(rng);
  Point4 p2 = safe_point(rng);
  BetaSurfacePatch s1 = integrate_beta_surface(g, p1, 0.0, kPi, 20);
  BetaSurfacePatch s2 = integrate_beta_surface(g, p2, 0.3, kPi, 20);
  CHECK(surface_intersection_count(s1, s2, 1e-4) == 2);
  CHECK_THROWS_AS(surface_intersection_count(s1, s1, 1e-4), domain_error);
}

TEST_CASE("wronskian of the plane Jacobi equation stays constant") {
  MetricField g = make_g0();
  std::mt19937_64 rng = make_rng(41, 6);
  Point4 p = safe_point(rng);
  BetaSurfacePatch patch = integrate_beta_surface(g, p, 0.0, 2.5, 8);
  GeodesicTrace tr =
      integrate_null_geodesic(g, patch.base, patch.base_plane[0], 2.5, 1e-10);
  CHECK(wronskian_check(g, patch, tr) < 1e-8);

  MetricField flat = make_flat_chart_metric();
  Point4 pf = safe_point(rng);
  BetaSurfacePatch fpatch = integrate_beta_surface(flat, pf, 0.1, 1.0, 8);
  GeodesicTrace ftr =
      integrate_null_geodesic(flat, fpatch.base, fpatch.base_plane[0], 1.0, 1e-10);
  CHECK(wronskian_check(flat, fpatch, ftr) < 1e-12);

  // A geodesic that leaves the plane is rejected.
  GeodesicTrace off = integrate_null_geodesic(
      g, patch.base, random_null_direction(g, patch.base, rng), 1.0, 1e-10);
  CHECK_THROWS_AS(wronskian_check(g, patch, off), domain_error);
}

TEST_CASE("null constraint drift stays within the integrator budget") {
  MetricField g = make_perturbed(12345, 1e-3);
  std::mt19937_64 rng = make_rng(41, 7);
  Point4 p = safe_point(rng);
  Tangent4 v = random_null_direction(g, p, rng);
  double length = 5.0;
  GeodesicTrace tr = integrate_null_geodesic(g, p, v, length, 1e-10);
  CHECK(tr.complete);
  CHECK(tr.max_null_drift <= 10.0 * tr.tolerance * length);
}

TEST_CASE("doubling the velocity halves the period but keeps the curve") {
  MetricField g = make_g0();
  std::mt19937_64 rng = make_rng(41, 8);
  Point4 p = safe_point(rng);
  Tangent4 v = random_null_direction(g, p, rng);
  GeodesicTrace a = integrate_null_geodesic(g, p, v, 2.0 * kPi, 1e-12);
  GeodesicTrace b = integrate_null_geodesic(g, p, v * 2.0, kPi, 1e-12);
  CHECK((a.samples.back().p.ambient() - b.samples.back().p.ambient()).norm() < 1e-8);
  CHECK(trace_deviation(a, b) < 1e-8);
  CHECK(trace_deviation(b, a) < 1e-8);
}

TEST_CASE("null geodesics only depend on the conformal class") {
  MetricField g = make_g0();
  MetricField fg = make_g0();
  auto base_ambient = g.ambient;
  fg.eval = [g](const Point4& p, const Tangent4& a, const Tangent4& b) {
    return (1.0 + 0.3 * p.x[2]) * g.eval(p, a, b);
  };
  fg.ambient = [base_ambient](const Point4& p) {
    MetricField::AmbientJet jet = base_ambient(p);
    double f = 1.0 + 0.3 * p.x[2];
    MetricField::AmbientJet out;
    out.G = f * jet.G;
    for (int k = 0; k < 6; ++k) out.dG[k] = f * jet.dG[k];
    out.dG[2] += 0.3 * jet.G;
    return out;
  };

  std::mt19937_64 rng = make_rng(41, 9);
  Point4 p = safe_point(rng);
  Tangent4 v = random_null_direction(g, p, rng);
  GeodesicTrace a = integrate_null_geodesic(g, p, v, 5.0, 1e-10);
  GeodesicTrace b = integrate_null_geodesic(fg, p, v, 8.0, 1e-10);
  CHECK(trace_deviation(a, b) < 1e-6);
}
