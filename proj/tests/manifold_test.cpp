#include "doctest.h"
#include "zollfrei/manifold.hpp"

using namespace zollfrei;
using namespace zollfrei::manifold;

namespace {

Point4 domain_point(std::mt19937_64& rng) {
  // Point kept away from the x3 = y3 locus so chart-based metrics apply.
  for (;;) {
    Point4 p = Point4::random(rng);
    if (std::fabs(p.x.z() - p.y.z()) > 0.3) return p;
  }
}

// Gauss curvature of (1 + eps*t) * round metric at height t, by the
// conformal-change formula on the sphere.
double conformal_gauss(double eps, double t) {
  double f = 1.0 + eps * t;
  double lap_u = (1.0 - t * t) * (-eps * eps / (2.0 * f * f)) - t * eps / f;
  return (1.0 - lap_u) / f;
}

}  // namespace

TEST_CASE("points, tangents, charts") {
  std::mt19937_64 rng = make_rng(11);
  Point4 p = Point4::random(rng);
  CHECK(p.embedding_defect() < 1e-14);

  Tangent4 t = Tangent4::project(p, Vec6::Random());
  CHECK(t.tangency_defect(p) < 1e-14);

  ChartFrame chart = ChartFrame::at(p);
  CHECK(chart.point(Vec4::Zero()).ambient().isApprox(p.ambient(), 1e-14));

  Vec4 s(0.02, -0.07, 0.05, 0.01);
  Point4 q = chart.point(s);
  CHECK(q.embedding_defect() < 1e-14);

  // Pushforward against differencing of the chart map.
  double h = 1e-6;
  for (int i = 0; i < 4; ++i) {
    Vec4 e = Vec4::Zero();
    e[i] = 1.0;
    Vec6 fd = (chart.point(s + h * e).ambient() - chart.point(s - h * e).ambient()) / (2.0 * h);
    CHECK((chart.coordinate_vector(s, i).ambient() - fd).norm() < 1e-9);
    Vec6 fd2 = (chart.point(s + h * e).ambient() - 2.0 * q.ambient() +
                chart.point(s - h * e).ambient()) / (h * h);
    for (int k = 0; k < 4; ++k) {
      Vec6 fdk = (chart.coordinate_vector(s + h * e, k).ambient() -
                  chart.coordinate_vector(s - h * e, k).ambient()) / (2.0 * h);
      CHECK((chart.second(s, k, i).ambient() - fdk).norm() < 1e-8);
    }
    (void)fd2;
  }

  // Component extraction inverts push at the base point.
  Vec4 comp(0.3, -1.1, 0.7, 0.2);
  Tangent4 v = chart.push(Vec4::Zero(), comp);
  CHECK((chart.components(v) - comp).norm() < 1e-14);
}

TEST_CASE("stereographic chart reference value") {
  Point4 p(Vec3(1, 0, 0), Vec3(0, 0, -1));
  Vec4 c = stereographic_chart(p);
  CHECK(c[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(c[1] == doctest::Approx(0.0));
  CHECK(c[2] == doctest::Approx(0.0));
  CHECK(c[3] == doctest::Approx(0.0));

  // Differential against differencing along chart curves.
  std::mt19937_64 rng = make_rng(3);
  Point4 q = domain_point(rng);
  ChartFrame chart = ChartFrame::at(q);
  double h = 1e-6;
  for (int i = 0; i < 4; ++i) {
    Vec4 e = Vec4::Zero();
    e[i] = 1.0;
    Vec4 fd = (stereographic_chart(chart.point(h * e)) -
               stereographic_chart(chart.point(-h * e))) / (2.0 * h);
    Vec4 an = stereographic_push(q, chart.coordinate_vector(Vec4::Zero(), i));
    CHECK((fd - an).norm() < 1e-8);
  }

  // Coordinate frame is dual to the chart differential.
  Frame4 f = stereographic_coordinate_frame(q);
  for (int i = 0; i < 4; ++i) {
    Vec4 img = stereographic_push(q, f.e[i]);
    for (int j = 0; j < 4; ++j) {
      CHECK(img[j] == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-10));
    }
  }

  CHECK_THROWS_AS(stereographic_chart(Point4(Vec3(0, 0, 1), Vec3(0, 0, 1))),
                  domain_error);
}

TEST_CASE("two-form bases: pairings and star") {
  std::mt19937_64 rng = make_rng(5);
  MetricField g = make_g0();
  Point4 p = Point4::random(rng);
  Frame4 frame = standard_frame(g, p);
  auto phi = asd_basis(frame).phi;
  auto psi = sd_basis_components();

  Mat3 lor = kLorentz3;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      CHECK(form_pairing(phi[i], phi[j]) == doctest::Approx(lor(i, j)).epsilon(1e-13));
      CHECK(form_pairing(psi[i], psi[j]) == doctest::Approx(lor(i, j)).epsilon(1e-13));
      CHECK(form_pairing(psi[i], phi[j]) == doctest::Approx(0.0));
    }
  }
  for (int i = 0; i < 3; ++i) {
    CHECK((hodge_star(phi[i]) + phi[i]).norm() < 1e-13);
    CHECK((hodge_star(psi[i]) - psi[i]).norm() < 1e-13);
    CHECK((hodge_star(hodge_star(phi[i])) - phi[i]).norm() < 1e-13);
  }
}

TEST_CASE("null anti-self-dual planes from the parameterized span") {
  std::mt19937_64 rng = make_rng(17);
  MetricField g = make_g0();
  for (double zeta : {0.0, 0.5, -1.25, 3.0}) {
    Point4 p = Point4::random(rng);
    Frame4 frame = standard_frame(g, p);
    auto span = beta_plane_span(frame, zeta);
    CHECK(std::fabs(g.g(p, span[0], span[0])) < 1e-12 * (1 + zeta * zeta) * (1 + zeta * zeta));
    CHECK(std::fabs(g.g(p, span[0], span[1])) < 1e-12 * (1 + zeta * zeta) * (1 + zeta * zeta));
    CHECK(std::fabs(g.g(p, span[1], span[1])) < 1e-12 * (1 + zeta * zeta) * (1 + zeta * zeta));

    // The spanned bivector has no self-dual part and the stated ASD components.
    auto c = beta_plane_coeffs(zeta);
    Mat4 Fup = c[0] * c[1].transpose() - c[1] * c[0].transpose();
    Mat4 F = kEta4 * Fup * kEta4;  // lower both legs before pairing with forms
    auto phi = asd_basis(frame).phi;
    auto psi = sd_basis_components();
    for (int i = 0; i < 3; ++i) CHECK(std::fabs(form_pairing(psi[i], F)) < 1e-11);
    Vec3 asd;
    for (int i = 0; i < 3; ++i) asd[i] = kLorentz3(i, i) * form_pairing(phi[i], F);
    Vec3 expected(1 + zeta * zeta, 1 - zeta * zeta, -2 * zeta);
    // Proportional with ratio sqrt(2)(1 + zeta^2), quadratic in the span scale.
    double ratio = std::sqrt(2.0) * (1 + zeta * zeta);
    CHECK((asd - ratio * expected).norm() < 1e-10 * ratio * expected.norm());
  }
}

TEST_CASE("indefinite orthonormalization") {
  std::mt19937_64 rng = make_rng(23);
  MetricField g = make_perturbed(41, 0.05);
  Point4 p = Point4::random(rng);

  std::array<Tangent4, 4> seed;
  for (auto& t : seed) t = Tangent4::project(p, Vec6::Random());
  Frame4 f = gram_schmidt_frame(g, p, seed);

  Mat4 gram;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) gram(i, j) = g.g(p, f.e[i], f.e[j]);
  }
  CHECK((gram - kEta4).norm() < 1e-10);

  // Feeding the result back reproduces it.
  Frame4 f2 = gram_schmidt_frame(g, p, f.e);
  for (int i = 0; i < 4; ++i) {
    CHECK((f2.e[i].ambient() - f.e[i].ambient()).norm() < 1e-10);
  }

  // Degenerate seed rejected.
  std::array<Tangent4, 4> bad = seed;
  bad[1] = bad[0];
  CHECK_THROWS_AS(gram_schmidt_frame(g, p, bad), degeneracy_error);
}

TEST_CASE("expression metric reproduces the built-in flat and round forms") {
  std::mt19937_64 rng = make_rng(31);
  MetricField flat = make_flat_chart_metric();
  MetricField flat_expr = metric_from_expression_text(
      "g11 = 1\n"
      "g22 = 1\n"
      "g33 = -1\n"
      "g44 = -1\n");
  MetricField g0 = make_g0();
  MetricField g0_expr = metric_from_expression_text(
      "# conformal factor of the product metric in the double stereographic chart\n"
      "g11 = 1/(x1^2 + x2^2 + (y1^2 + y2^2 - x1^2 - x2^2 + 0.25)^2)\n"
      "g22 = 1/(x1^2 + x2^2 + (y1^2 + y2^2 - x1^2 - x2^2 + 0.25)^2)\n"
      "g33 = -1/(x1^2 + x2^2 + (y1^2 + y2^2 - x1^2 - x2^2 + 0.25)^2)\n"
      "g44 = -1/(x1^2 + x2^2 + (y1^2 + y2^2 - x1^2 - x2^2 + 0.25)^2)\n");

  for (int trial = 0; trial < 20; ++trial) {
    Point4 p = domain_point(rng);
    Tangent4 a = Tangent4::project(p, Vec6::Random());
    Tangent4 b = Tangent4::project(p, Vec6::Random());
    CHECK(flat_expr.g(p, a, b) ==
          doctest::Approx(flat.g(p, a, b)).epsilon(1e-12));
    CHECK(g0_expr.g(p, a, b) == doctest::Approx(g0.g(p, a, b)).epsilon(1e-9));
  }
}

TEST_CASE("curvature blocks of the product metric") {
  std::mt19937_64 rng = make_rng(7);
  MetricField g = make_g0();
  for (int trial = 0; trial < 3; ++trial) {
    Point4 p = Point4::random(rng);
    CurvatureDecomp d = curvature_decompose(g, p);
    CHECK(std::fabs(d.scalar) < 1e-7);
    CHECK(d.wplus_norm() < 1e-7);
    CHECK(d.wminus_norm() < 1e-7);
    // Mixed block diag(1,0,0): both factors are round unit spheres.
    Mat3 expected = Mat3::Zero();
    expected(0, 0) = 1.0;
    CHECK((d.ricci_traceless - expected).norm() < 1e-7);
  }
}

TEST_CASE("curvature blocks of the flat representative") {
  std::mt19937_64 rng = make_rng(19);
  MetricField g = make_flat_chart_metric();
  for (int trial = 0; trial < 3; ++trial) {
    Point4 p = domain_point(rng);
    CurvatureDecomp d = curvature_decompose(g, p);
    CHECK(std::fabs(d.scalar) < 1e-8);
    CHECK(d.wplus_norm() < 1e-8);
    CHECK(d.wminus_norm() < 1e-8);
    CHECK(d.mixed_norm() < 1e-8);
  }
}

TEST_CASE("curvature blocks of the non-round product control metric") {
  std::mt19937_64 rng = make_rng(29);
  double eps = 0.3;
  MetricField g = make_product_nonround(eps);
  for (int trial = 0; trial < 3; ++trial) {
    Point4 p = Point4::random(rng);
    double k1 = conformal_gauss(eps, p.x.z());
    double k2 = conformal_gauss(eps, p.y.z());
    CurvatureDecomp d = curvature_decompose(g, p);
    CHECK(d.scalar == doctest::Approx(2.0 * (k1 - k2)).epsilon(1e-6));
    double wnorm = std::fabs(k1 - k2) * std::sqrt(6.0) / 6.0;
    CHECK(d.wminus_norm() == doctest::Approx(wnorm).epsilon(1e-5));
    CHECK(d.wplus_norm() == doctest::Approx(wnorm).epsilon(1e-5));
    CHECK(d.ricci_traceless(0, 0) == doctest::Approx(0.5 * (k1 + k2)).epsilon(1e-5));
  }

  // The analytic ambient path and plain differencing agree.
  MetricField fd_only = g;
  fd_only.ambient = nullptr;
  Point4 p = Point4::random(rng);
  CurvatureDecomp a = curvature_decompose(g, p);
  CurvatureDecomp b = curvature_decompose(fd_only, p);
  CHECK((a.full - b.full).norm() < 1e-7);
}

TEST_CASE("curvature symmetries for a generic metric") {
  std::mt19937_64 rng = make_rng(37);
  MetricField g = make_perturbed(5, 0.08);
  Point4 p = Point4::random(rng);
  Frame4 frame = standard_frame(g, p);
  RiemannData rd = riemann_frame(g, p, frame, 0.0);

  double worst_pair = 0.0, worst_bianchi = 0.0, scale = 0.0;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      for (int c = 0; c < 4; ++c) {
        for (int d = 0; d < 4; ++d) {
          double r = rd.R[a][b](c, d);
          scale = std::max(scale, std::fabs(r));
          worst_pair = std::max(worst_pair, std::fabs(r - rd.R[c][d](a, b)));
          double cyc = rd.R[a][b](c, d) + rd.R[a][c](d, b) + rd.R[a][d](b, c);
          worst_bianchi = std::max(worst_bianchi, std::fabs(cyc));
        }
      }
    }
  }
  CHECK(scale > 0.1);  // the round factors dominate
  CHECK(worst_pair < 1e-6 * scale);
  CHECK(worst_bianchi < 1e-6 * scale);

  // Signature check accepts the perturbed metric and rejects a degenerate one.
  check_signature(g, p);
  MetricField degen;
  degen.eval = [](const Point4& q, const Tangent4& s, const Tangent4& t) {
    return s.u.dot(t.u) - (q.x.dot(q.x)) * s.w.dot(t.w) + s.w.dot(t.w);
  };
  CHECK_THROWS_AS(check_signature(degen, p), signature_error);
}

TEST_CASE("conformal covariance of the trace-free blocks") {
  std::mt19937_64 rng = make_rng(43);
  MetricField g = make_perturbed(13, 0.06);
  auto factor = [](const Point4& p) {
    return std::exp(0.4 * p.x.x() - 0.3 * p.y.z());
  };
  MetricField cg;
  cg.eval = [g, factor](const Point4& p, const Tangent4& a, const Tangent4& b) {
    return factor(p) * g.eval(p, a, b);
  };

  for (int trial = 0; trial < 2; ++trial) {
    Point4 p = Point4::random(rng);
    CurvatureDecomp d0 = curvature_decompose(g, p);
    CurvatureDecomp d1 = curvature_decompose(cg, p);
    double f = factor(p);
    CHECK(f * d1.wminus_norm() == doctest::Approx(d0.wminus_norm()).epsilon(2e-5));
    CHECK(f * d1.wplus_norm() == doctest::Approx(d0.wplus_norm()).epsilon(2e-5));
  }
}

TEST_CASE("anti-self-duality residual separates the examples") {
  std::mt19937_64 rng = make_rng(47);
  std::vector<Point4> samples;
  for (int i = 0; i < 6; ++i) samples.push_back(Point4::random(rng));

  CHECK(selfdual_residual(make_g0(), samples) < 1e-7);
  CHECK(selfdual_residual(make_product_nonround(0.3), samples) > 1e-3);

  std::vector<Point4> chart_samples;
  std::mt19937_64 rng2 = make_rng(48);
  for (int i = 0; i < 6; ++i) chart_samples.push_back(domain_point(rng2));
  CHECK(selfdual_residual(make_flat_chart_metric(), chart_samples) < 1e-7);
}

TEST_CASE("metric selection by name") {
  CHECK_NOTHROW(metric_by_name("g0"));
  CHECK_NOTHROW(metric_by_name("flat"));
  CHECK_NOTHROW(metric_by_name("product-nonround:0.25"));
  CHECK_NOTHROW(metric_by_name("perturbed:7:0.05"));
  CHECK_THROWS_AS(metric_by_name("unknown"), domain_error);
  CHECK_THROWS_AS(metric_by_name("product-nonround:2.0"), domain_error);

  // Determinism of the seeded perturbation.
  MetricField a = metric_by_name("perturbed:9:0.05");
  MetricField b = metric_by_name("perturbed:9:0.05");
  std::mt19937_64 rng = make_rng(53);
  Point4 p = Point4::random(rng);
  Tangent4 s = Tangent4::project(p, Vec6::Random());
  Tangent4 t = Tangent4::project(p, Vec6::Random());
  CHECK(a.g(p, s, t) == b.g(p, s, t));
}
