#include <doctest.h>

#include "zollfrei/distribution.hpp"

using namespace zollfrei;
using namespace zollfrei::manifold;
using namespace zollfrei::twistor;

namespace {

// Chart-safe and away from the reference-axis switch of the chart legs, so
// pointwise frame fields stay smooth across the differencing stencils.
Point4 gauge_safe_point(std::mt19937_64& rng) {
  for (;;) {
    Point4 p = Point4::random(rng);
    if (std::fabs(p.x[2] - p.y[2]) < 0.4) continue;
    if (std::fabs(std::fabs(p.x[2]) - 0.9) < 0.05) continue;
    if (std::fabs(std::fabs(p.y[2]) - 0.9) < 0.05) continue;
    return p;
  }
}

double theta_scale(const ConnectionForms& cf) {
  double m = 0.0;
  for (int k = 0; k < 3; ++k) {
    for (int j = 0; j < 3; ++j) {
      m = std::max(m, cf.theta[k][j].cwiseAbs().maxCoeff());
    }
  }
  return m;
}

}  // namespace

TEST_CASE("connection forms vanish for the coordinate frame of the flat representative") {
  auto flat = make_flat_chart_metric();
  auto rng = make_rng(101);
  for (int i = 0; i < 6; ++i) {
    Point4 p = gauge_safe_point(rng);
    auto cf = connection_forms(flat, coordinate_frame_field(), p);
    CHECK(theta_scale(cf) < 1e-9);
    CHECK(cf.symmetry_defect < 1e-9);
  }
}

TEST_CASE("connection forms match a leg-level covariant derivative oracle") {
  auto g0 = make_g0();
  auto field = standard_frame_field(g0);
  auto rng = make_rng(202);
  const double eta[3] = {1.0, -1.0, -1.0};
  const auto phi = asd_basis(Frame4{}).phi;

  for (int trial = 0; trial < 5; ++trial) {
    Point4 p = gauge_safe_point(rng);
    auto cf = connection_forms(g0, field, p);
    CHECK(cf.symmetry_defect < 1e-9);

    // Oracle: difference the leg components, form the connection coefficient
    // matrices W_l with column a = frame components of the derivative of e_a
    // along e_l, and expand the derivative of each two-form through them.
    ChartFrame chart = ChartFrame::at(p);
    auto components_at = [&](const Vec4& s) {
      Eigen::Matrix<double, 6, 4> T, L;
      Frame4 f = field(chart.point(s));
      for (int i = 0; i < 4; ++i) {
        T.col(i) = chart.coordinate_vector(s, i).ambient();
        L.col(i) = f.e[i].ambient();
      }
      return Mat4(T.householderQr().solve(L));
    };
    Mat4 E0 = components_at(Vec4::Zero());
    Mat4 E0inv = E0.inverse();
    auto Gam = christoffel(g0, chart, Vec4::Zero(), 0.0);
    std::array<Mat4, 4> dE;
    for (int d = 0; d < 4; ++d) {
      Vec4 e = Vec4::Zero();
      e[d] = 1.0;
      Mat4 lev[3];
      for (int lv = 0; lv < 3; ++lv) {
        double hh = g0.fd_step / (1 << lv);
        lev[lv] = (components_at(hh * e) - components_at(-hh * e)) / (2.0 * hh);
      }
      dE[d] = (64.0 * lev[2] - 20.0 * lev[1] + lev[0]) / 45.0;
    }
    for (int l = 0; l < 4; ++l) {
      Mat4 covch = Mat4::Zero();
      for (int d = 0; d < 4; ++d) {
        Mat4 Gd;
        for (int c = 0; c < 4; ++c) {
          for (int a = 0; a < 4; ++a) Gd(c, a) = Gam[c](d, a);
        }
        covch += E0(d, l) * (dE[d] + Gd * E0);
      }
      Mat4 W = E0inv * covch;
      for (int j = 0; j < 3; ++j) {
        Mat4 nab = -(W.transpose() * phi[j] + phi[j] * W);
        Mat4 span_residual = nab;
        for (int k = 0; k < 3; ++k) {
          double th = eta[k] * form_pairing(phi[k], nab);
          CHECK(std::fabs(th - cf.theta[k][j][l]) < 1e-8);
          span_residual -= th * phi[k];
        }
        // the derivative never leaves the span of the basis forms
        CHECK(span_residual.cwiseAbs().maxCoeff() < 1e-8);
      }
    }
  }
}

TEST_CASE("horizontal pair of the flat representative") {
  auto flat = make_flat_chart_metric();
  auto coord = coordinate_frame_field();
  auto rng = make_rng(303);
  Point4 p = gauge_safe_point(rng);

  auto hp = horizontal_fields(flat, coord, p, cdouble(0.0, 0.0));
  Vec4 w1r = hp.w1.real(), w2r = hp.w2.real();
  Vec4 e1m4(1.0, 0.0, 0.0, -1.0), e2m3(0.0, 1.0, -1.0, 0.0);
  for (int a = 0; a < 4; ++a) {
    CHECK(w1r[a] == e1m4[a]);
    CHECK(w2r[a] == e2m3[a]);
    CHECK(hp.w1.imag()[a] == 0.0);
    CHECK(hp.w2.imag()[a] == 0.0);
  }
  CHECK(std::abs(hp.q1) < 1e-9);
  CHECK(std::abs(hp.q2) < 1e-9);

  CHECK_THROWS_AS((void)horizontal_fields(flat, coord, p, cdouble(0.0, 1.0)),
                  domain_error);
  CHECK_THROWS_AS((void)horizontal_fields(flat, coord, p, cdouble(2e-4, -1.0001)),
                  domain_error);
}

TEST_CASE("q components are real along the real parameter locus") {
  auto g0 = make_g0();
  auto field = standard_frame_field(g0);
  auto rng = make_rng(404);
  const double zetas[5] = {-1.5, -0.6, 0.0, 0.8, 1.3};
  double scale = 0.0;
  for (int i = 0; i < 5; ++i) {
    Point4 p = gauge_safe_point(rng);
    for (double z : zetas) {
      auto hp = horizontal_fields(g0, field, p, cdouble(z, 0.0));
      CHECK(std::fabs(hp.q1.imag()) < 1e-10);
      CHECK(std::fabs(hp.q2.imag()) < 1e-10);
      scale = std::max({scale, std::fabs(hp.q1.real()), std::fabs(hp.q2.real())});
    }
  }
  // the gauge is curved, so the check is not vacuous
  CHECK(scale > 1e-4);
}

TEST_CASE("coefficient functions are polynomial in the parameter") {
  auto g0 = make_g0();
  auto field = standard_frame_field(g0);
  auto rng = make_rng(505);
  const double nodes[5] = {-2.0, -1.0, 0.0, 1.0, 2.0};
  const double probes[2] = {0.37, 2.6};

  for (int trial = 0; trial < 2; ++trial) {
    Point4 p = gauge_safe_point(rng);
    // 10 scalar coefficient functions: 4 + 4 frame components and q1, q2
    auto coeffs = [&](double z) {
      auto hp = horizontal_fields(g0, field, p, cdouble(z, 0.0));
      Eigen::Matrix<double, 10, 1> v;
      v << hp.w1.real(), hp.w2.real(), hp.q1.real(), hp.q2.real();
      return v;
    };
    Eigen::Matrix<double, 5, 5> V;
    Eigen::Matrix<double, 5, 10> Y;
    for (int i = 0; i < 5; ++i) {
      for (int d = 0; d < 5; ++d) V(i, d) = std::pow(nodes[i], d);
      Y.row(i) = coeffs(nodes[i]).transpose();
    }
    Eigen::Matrix<double, 5, 10> C = V.fullPivLu().solve(Y);
    for (double z : probes) {
      Eigen::Matrix<double, 1, 5> row;
      for (int d = 0; d < 5; ++d) row(0, d) = std::pow(z, d);
      Eigen::Matrix<double, 10, 1> pred = (row * C).transpose();
      Eigen::Matrix<double, 10, 1> got = coeffs(z);
      CHECK((pred - got).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
}

TEST_CASE("involutivity separates self-dual metrics from the control") {
  auto rng = make_rng(606);

  SUBCASE("flat representative") {
    auto flat = make_flat_chart_metric();
    const double zetas[3] = {0.0, 0.5, -1.1};
    for (int i = 0; i < 5; ++i) {
      Point4 p = gauge_safe_point(rng);
      for (double z : zetas) {
        CHECK(involutivity_residual(flat, p, z, 0.0) < 1e-10);
      }
    }
  }
  SUBCASE("round product") {
    auto g0 = make_g0();
    std::uniform_real_distribution<double> uz(-1.2, 1.2);
    Point4 first = Point4::random(rng);
    CHECK(curvature_decompose(g0, first).wminus_norm() < 1e-8);
    for (int i = 0; i < 20; ++i) {
      Point4 p = Point4::random(rng);
      CHECK(involutivity_residual(g0, p, uz(rng), 0.0) < 1e-6);
    }
  }
  SUBCASE("non-self-dual control") {
    auto ctrl = make_product_nonround(0.3);
    std::uniform_real_distribution<double> uz(-1.2, 1.2);
    int above = 0;
    for (int i = 0; i < 20; ++i) {
      Point4 p = Point4::random(rng);
      if (involutivity_residual(ctrl, p, uz(rng), 0.0) > 1e-3) ++above;
    }
    CHECK(above >= 18);
  }
}

TEST_CASE("conformal rescaling preserves the horizontal fields") {
  auto g0 = make_g0();
  auto flat = make_flat_chart_metric();
  auto rng = make_rng(707);
  auto one = [](const Point4&) { return 1.0; };
  auto four = [](const Point4&) { return 4.0; };
  auto fx = [](const Point4& q) { return 1.0 + 0.1 * q.x.z(); };
  const double zetas[2] = {0.0, 0.7};

  for (int i = 0; i < 4; ++i) {
    Point4 p = Point4::random(rng);
    for (double z : zetas) {
      CHECK(conformal_invariance_check(g0, one, p, z) == 0.0);
      CHECK(conformal_invariance_check(g0, four, p, z) < 1e-10);
      CHECK(conformal_invariance_check(g0, fx, p, z) < 1e-7);
    }
  }
  for (int i = 0; i < 2; ++i) {
    Point4 p = gauge_safe_point(rng);
    CHECK(conformal_invariance_check(flat, fx, p, 0.3) < 1e-7);
  }
}

TEST_CASE("affine twistor functions are annihilated by the horizontal fields") {
  auto flat = make_flat_chart_metric();
  auto coord = coordinate_frame_field();
  auto rng = make_rng(808);

  CHECK(flat_twistor_map(0, 0, 0, 0, cdouble(0.0, 1.0)) ==
        std::array<cdouble, 3>{cdouble(0.0), cdouble(0.0), cdouble(0.0, 1.0)});
  CHECK(flat_twistor_map(1, 0, 0, 0, cdouble(0.0, 0.0)) ==
        std::array<cdouble, 3>{cdouble(1.0), cdouble(0.0), cdouble(0.0)});

  const cdouble zetas[3] = {cdouble(0.3, 0.2), cdouble(-1.1, 0.8), cdouble(2.0, 0.0)};
  for (int i = 0; i < 5; ++i) {
    Point4 p = gauge_safe_point(rng);
    Vec4 s = stereographic_chart(p);
    for (cdouble z : zetas) {
      auto hp = horizontal_fields(flat, coord, p, z);
      // gradients of the three functions in chart coordinates, plus their
      // derivative in the parameter
      CVec4 grad[3] = {CVec4(1.0, -z, z, cdouble(1.0)),
                       CVec4(z, cdouble(1.0), cdouble(1.0), -z),
                       CVec4::Zero()};
      cdouble dz[3] = {cdouble(s[2] - s[1]), cdouble(s[0] - s[3]), cdouble(1.0)};
      for (int m = 0; m < 3; ++m) {
        cdouble a1 = hp.w1.cwiseProduct(grad[m]).sum() + hp.q1 * dz[m];
        cdouble a2 = hp.w2.cwiseProduct(grad[m]).sum() + hp.q2 * dz[m];
        CHECK(std::abs(a1) < 1e-10);
        CHECK(std::abs(a2) < 1e-10);
      }
      // holomorphy in the parameter: conjugate-direction derivative vanishes
      double d = 1e-4;
      auto at = [&](cdouble zz) { return flat_twistor_map(s[0], s[1], s[2], s[3], zz); };
      auto z0 = at(z), zr = at(z + d), zi = at(z + cdouble(0.0, d));
      for (int m = 0; m < 3; ++m) {
        cdouble dre = (zr[m] - z0[m]) / d;
        cdouble dim = (zi[m] - z0[m]) / cdouble(0.0, d);
        CHECK(std::abs(dre - dim) < 1e-10);
      }
    }
  }
}

TEST_CASE("projection of the horizontal pair recovers the null plane coefficients") {
  auto g0 = make_g0();
  auto field = standard_frame_field(g0);
  auto rng = make_rng(909);
  Point4 p = gauge_safe_point(rng);
  const double zetas[3] = {0.0, 0.35, -1.2};
  for (double z : zetas) {
    auto hp = horizontal_fields(g0, field, p, cdouble(z, 0.0));
    auto c = beta_plane_coeffs(z);
    for (int a = 0; a < 4; ++a) {
      CHECK(hp.w1.real()[a] == c[0][a]);
      CHECK(hp.w2.real()[a] == c[1][a]);
    }
  }
}

TEST_CASE("flat ambient jet is consistent with its evaluation rule") {
  auto flat = make_flat_chart_metric();
  auto rng = make_rng(111);
  for (int i = 0; i < 5; ++i) {
    Point4 p = gauge_safe_point(rng);
    auto jet = flat.ambient(p);
    ChartFrame ch = ChartFrame::at(p);
    Tangent4 a = ch.coordinate_vector(Vec4::Zero(), 0) * 0.7 +
                 ch.coordinate_vector(Vec4::Zero(), 3) * 0.4;
    Tangent4 b = ch.coordinate_vector(Vec4::Zero(), 1) * 1.1 +
                 ch.coordinate_vector(Vec4::Zero(), 2) * 0.2;
    CHECK(std::fabs(a.ambient().dot(jet.G * b.ambient()) - flat.eval(p, a, b)) < 1e-12);

    double h = 1e-5;
    Vec6 pp = p.ambient() + h * a.ambient(), pm = p.ambient() - h * a.ambient();
    Point4 qp(pp.head<3>(), pp.tail<3>()), qm(pm.head<3>(), pm.tail<3>());
    Mat6 num = (flat.ambient(qp).G - flat.ambient(qm).G) / (2.0 * h);
    Mat6 ana = Mat6::Zero();
    for (int k = 0; k < 6; ++k) ana += a.ambient()[k] * jet.dG[k];
    CHECK((num - ana).cwiseAbs().maxCoeff() < 1e-7);
  }
}

TEST_CASE("connection extraction rejects a frame that is not orthonormal") {
  auto g0 = make_g0();
  auto rng = make_rng(222);
  Point4 p = gauge_safe_point(rng);
  CHECK_THROWS_AS((void)connection_forms(g0, coordinate_frame_field(), p),
                  convergence_error);
}
