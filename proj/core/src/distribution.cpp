#include <algorithm>
#include <cmath>
#include <utility>

#include "zollfrei/distribution.hpp"

namespace zollfrei::twistor {

using manifold::asd_basis;
using manifold::beta_plane_coeffs;
using manifold::ChartFrame;
using manifold::christoffel;
using manifold::form_pairing;
using manifold::gram_schmidt_frame;
using manifold::standard_frame;

namespace {

// Stencil step for the anchored-gauge evaluations inside the bracket.  The
// anchored legs are tame in their own chart, so the smooth truncation part of
// the stencil error cancels in the outer differences; what remains is roundoff
// scaled by 1/h, which favors a step well above the metric differencing one.
constexpr double kBracketStencil = 2e-2;

double richardson6(double e1, double e2, double e3) {
  return (64.0 * e3 - 20.0 * e2 + e1) / 45.0;
}

Mat4 richardson6(const Mat4& e1, const Mat4& e2, const Mat4& e3) {
  return (64.0 * e3 - 20.0 * e2 + e1) / 45.0;
}

const std::array<Mat4, 3>& phi_components() {
  static const std::array<Mat4, 3> phi = asd_basis(Frame4{}).phi;
  return phi;
}

// Gnomonic chart position of a point near the chart base.
Vec4 chart_position(const ChartFrame& chart, const Point4& q) {
  double cx = q.x.dot(chart.base.x);
  double cy = q.y.dot(chart.base.y);
  if (cx < 0.1 || cy < 0.1) {
    throw domain_error("frame gauge: point left the anchored chart hemispheres");
  }
  return Vec4(q.x.dot(chart.a1) / cx, q.x.dot(chart.a2) / cx,
              q.y.dot(chart.b1) / cy, q.y.dot(chart.b2) / cy);
}

// Chart components of the frame legs at chart position s; column a holds e_a.
Mat4 frame_components(const ChartFrame& chart, const Vec4& s, const Frame4& f) {
  Eigen::Matrix<double, 6, 4> T, L;
  for (int i = 0; i < 4; ++i) {
    T.col(i) = chart.coordinate_vector(s, i).ambient();
    L.col(i) = f.e[i].ambient();
  }
  return T.householderQr().solve(L);
}

// d/ds_d of the leg-component matrix, three-level extrapolation at base step h.
std::array<Mat4, 4> leg_component_derivatives(const ChartFrame& chart,
                                              const FrameField& frames,
                                              double h) {
  std::array<Mat4, 4> dE;
  for (int d = 0; d < 4; ++d) {
    Vec4 e = Vec4::Zero();
    e[d] = 1.0;
    Mat4 lev[3];
    for (int lv = 0; lv < 3; ++lv) {
      double hh = h / (1 << lv);
      Vec4 sp = hh * e, sm = -hh * e;
      Mat4 Ep = frame_components(chart, sp, frames(chart.point(sp)));
      Mat4 Em = frame_components(chart, sm, frames(chart.point(sm)));
      lev[lv] = (Ep - Em) / (2.0 * hh);
    }
    dE[d] = richardson6(lev[0], lev[1], lev[2]);
  }
  return dE;
}

HorizontalPair assemble_pair(const ConnectionForms& cf, cdouble zeta) {
  auto c = beta_plane_coeffs(zeta);
  CVec4 dc1(2.0 * zeta, cdouble(0.0), cdouble(-2.0), 2.0 * zeta);
  CVec4 dc2(cdouble(0.0), 2.0 * zeta, 2.0 * zeta, cdouble(2.0));
  cdouble z2 = zeta * zeta;
  cdouble p1 = 0.5 * (1.0 - z2);
  cdouble p2 = zeta;
  cdouble p3 = -0.5 * (1.0 + z2);
  cdouble dp1 = -zeta;
  cdouble dp2 = 1.0;
  cdouble dp3 = -zeta;

  HorizontalPair hp;
  hp.zeta = zeta;
  hp.w1 = c[0];
  hp.w2 = c[1];
  // q_j = (1-z^2)/2 theta^3_1(w_j) + z theta^2_1(w_j) - (1+z^2)/2 theta^2_3(w_j)
  auto q_of = [&cf, &p1, &p2, &p3](const CVec4& v) {
    return p1 * cf.pair(2, 0, v) + p2 * cf.pair(1, 0, v) + p3 * cf.pair(1, 2, v);
  };
  auto dq_of = [&](const CVec4& v, const CVec4& dv) {
    return dp1 * cf.pair(2, 0, v) + p1 * cf.pair(2, 0, dv) +
           dp2 * cf.pair(1, 0, v) + p2 * cf.pair(1, 0, dv) +
           dp3 * cf.pair(1, 2, v) + p3 * cf.pair(1, 2, dv);
  };
  hp.q1 = q_of(c[0]);
  hp.q2 = q_of(c[1]);
  hp.dq1 = dq_of(c[0], dc1);
  hp.dq2 = dq_of(c[1], dc2);
  return hp;
}

void check_parameter(cdouble zeta) {
  if (std::abs(zeta - cdouble(0.0, 1.0)) < 1e-3 ||
      std::abs(zeta + cdouble(0.0, 1.0)) < 1e-3) {
    throw domain_error("horizontal_fields: affine parameterization degenerates at zeta = +/-i");
  }
}

}  // namespace

FrameField standard_frame_field(const MetricField& g) {
  MetricField gc = g;
  return [gc](const Point4& q) { return standard_frame(gc, q); };
}

FrameField anchored_frame_field(const MetricField& g, const Point4& p) {
  MetricField gc = g;
  ChartFrame chart = ChartFrame::at(p);
  return [gc, chart](const Point4& q) {
    Vec4 s = chart_position(chart, q);
    std::array<Tangent4, 4> seed;
    for (int i = 0; i < 4; ++i) seed[i] = chart.coordinate_vector(s, i);
    return gram_schmidt_frame(gc, q, seed);
  };
}

FrameField coordinate_frame_field() {
  return [](const Point4& q) { return manifold::stereographic_coordinate_frame(q); };
}

ConnectionForms connection_forms(const MetricField& g, const FrameField& frames,
                                 const Point4& p, double step) {
  double h = step > 0.0 ? step : g.fd_step;
  ChartFrame chart = ChartFrame::at(p);
  auto Gam = christoffel(g, chart, Vec4::Zero(), step);
  Frame4 f0 = frames(p);
  Mat4 E0 = frame_components(chart, Vec4::Zero(), f0);

  const auto& phi = phi_components();
  auto chart_forms = [&](const Vec4& s) {
    Mat4 Einv = frame_components(chart, s, frames(chart.point(s))).inverse();
    std::array<Mat4, 3> out;
    for (int j = 0; j < 3; ++j) out[j] = Einv.transpose() * phi[j] * Einv;
    return out;
  };
  std::array<Mat4, 3> phi0 = chart_forms(Vec4::Zero());

  std::array<std::array<Mat4, 3>, 4> dphi;
  for (int d = 0; d < 4; ++d) {
    Vec4 e = Vec4::Zero();
    e[d] = 1.0;
    std::array<Mat4, 3> lev[3];
    for (int lv = 0; lv < 3; ++lv) {
      double hh = h / (1 << lv);
      auto fp = chart_forms(hh * e);
      auto fm = chart_forms(-hh * e);
      for (int j = 0; j < 3; ++j) lev[lv][j] = (fp[j] - fm[j]) / (2.0 * hh);
    }
    for (int j = 0; j < 3; ++j) {
      dphi[d][j] = richardson6(lev[0][j], lev[1][j], lev[2][j]);
    }
  }

  std::array<Mat4, 4> Gd;  // (G_d)(c,a) = Gamma^c_{d a}
  for (int d = 0; d < 4; ++d) {
    for (int c = 0; c < 4; ++c) {
      for (int a = 0; a < 4; ++a) Gd[d](c, a) = Gam[c](d, a);
    }
  }

  const double eta[3] = {1.0, -1.0, -1.0};
  ConnectionForms out;
  out.frame = f0;
  for (int l = 0; l < 4; ++l) {
    for (int j = 0; j < 3; ++j) {
      Mat4 nab = Mat4::Zero();
      for (int d = 0; d < 4; ++d) {
        nab += E0(d, l) *
               (dphi[d][j] - Gd[d].transpose() * phi0[j] - phi0[j] * Gd[d]);
      }
      Mat4 nf = E0.transpose() * nab * E0;
      for (int k = 0; k < 3; ++k) {
        out.theta[k][j][l] = eta[k] * form_pairing(phi[k], nf);
      }
    }
  }

  // so(1,2): eta-lowered theta is antisymmetric in (k,j).
  double defect = 0.0, scale = 0.0;
  for (int l = 0; l < 4; ++l) {
    Mat3 a;
    for (int k = 0; k < 3; ++k) {
      for (int j = 0; j < 3; ++j) a(k, j) = eta[k] * out.theta[k][j][l];
    }
    scale = std::max(scale, a.cwiseAbs().maxCoeff());
    for (int k = 0; k < 3; ++k) {
      for (int j = k; j < 3; ++j) {
        defect = std::max(defect, std::fabs(a(k, j) + a(j, k)));
      }
    }
    Mat3 anti = 0.5 * (a - Mat3(a.transpose()));
    for (int k = 0; k < 3; ++k) {
      for (int j = 0; j < 3; ++j) out.theta[k][j][l] = eta[k] * anti(k, j);
    }
  }
  out.symmetry_defect = defect;
  if (defect > 1e-8 * std::max(1.0, scale)) {
    throw convergence_error("connection_forms: so(1,2) symmetry violated; frame field is not pseudo-orthonormal for this metric");
  }
  return out;
}

HorizontalPair horizontal_fields(const MetricField& g, const FrameField& frames,
                                 const Point4& p, cdouble zeta, double step) {
  check_parameter(zeta);
  return assemble_pair(connection_forms(g, frames, p, step), zeta);
}

double involutivity_residual(const MetricField& g, const Point4& p, double zeta,
                             double step) {
  check_parameter(cdouble(zeta, 0.0));
  // Outer step for differencing the q coefficient fields.  The q values carry
  // the inner pipeline's noise floor, so this step stays above the inner one;
  // the smooth part of that noise differentiates harmlessly.
  double hq = step > 0.0 ? step : 5e-2;
  FrameField gauge = anchored_frame_field(g, p);
  ChartFrame chart = ChartFrame::at(p);

  ConnectionForms cf0 = connection_forms(g, gauge, p, kBracketStencil);
  HorizontalPair hp = assemble_pair(cf0, cdouble(zeta, 0.0));
  auto c = beta_plane_coeffs(zeta);
  Mat4 E0 = frame_components(chart, Vec4::Zero(), cf0.frame);
  Mat4 E0inv = E0.inverse();

  // Frame commutators of the gauge field, frame components.
  auto dE = leg_component_derivatives(chart, gauge, kBracketStencil);
  std::array<std::array<Vec4, 4>, 4> lie;
  for (int a = 0; a < 4; ++a) {
    for (int b = a + 1; b < 4; ++b) {
      Vec4 ch = Vec4::Zero();
      for (int d = 0; d < 4; ++d) {
        ch += E0(d, a) * dE[d].col(b) - E0(d, b) * dE[d].col(a);
      }
      lie[a][b] = E0inv * ch;
      lie[b][a] = -lie[a][b];
    }
  }

  // Directional derivatives of (q1, q2) along the two frame parts.
  auto q_values = [&](const Point4& q) {
    auto hpq = assemble_pair(connection_forms(g, gauge, q, kBracketStencil),
                             cdouble(zeta, 0.0));
    return std::pair<double, double>(hpq.q1.real(), hpq.q2.real());
  };
  auto dir_deriv = [&](const Vec4& coeff) {
    Vec4 vch = E0 * coeff;
    double n = vch.norm();
    if (n < 1e-14) return std::pair<double, double>(0.0, 0.0);
    Vec4 u = vch / n;
    double l1[3], l2[3];
    for (int lv = 0; lv < 3; ++lv) {
      double hh = hq / (1 << lv);
      auto qp = q_values(chart.point(hh * u));
      auto qm = q_values(chart.point(-hh * u));
      l1[lv] = (qp.first - qm.first) / (2.0 * hh);
      l2[lv] = (qp.second - qm.second) / (2.0 * hh);
    }
    return std::pair<double, double>(n * richardson6(l1[0], l1[1], l1[2]),
                                     n * richardson6(l2[0], l2[1], l2[2]));
  };
  auto along1 = dir_deriv(c[0]);
  auto along2 = dir_deriv(c[1]);

  double q1 = hp.q1.real(), q2 = hp.q2.real();
  double dq1 = hp.dq1.real(), dq2 = hp.dq2.real();
  Vec4 dc1(2.0 * zeta, 0.0, -2.0, 2.0 * zeta);
  Vec4 dc2(0.0, 2.0 * zeta, 2.0 * zeta, 2.0);

  // [w1, w2] = sum c1^a c2^b [e_a, e_b]
  //          + (q1 dzeta(c2^a) - q2 dzeta(c1^a)) e_a
  //          + (w1hat(q2) - w2hat(q1) + q1 dzeta(q2) - q2 dzeta(q1)) dzeta.
  Vec4 bracket_frame = q1 * dc2 - q2 * dc1;
  for (int a = 0; a < 4; ++a) {
    for (int b = a + 1; b < 4; ++b) {
      bracket_frame += (c[0][a] * c[1][b] - c[0][b] * c[1][a]) * lie[a][b];
    }
  }
  double bracket_zeta = along1.second - along2.first + q1 * dq2 - q2 * dq1;

  Eigen::Matrix<double, 5, 1> v;
  v << bracket_frame, bracket_zeta;
  Eigen::Matrix<double, 5, 2> M;
  M.col(0) << c[0], q1;
  M.col(1) << c[1], q2;
  Eigen::Matrix2d N = M.transpose() * M;
  Eigen::Vector2d sol = N.ldlt().solve(M.transpose() * v);
  double transverse = (v - M * sol).norm();
  double n1 = std::sqrt(c[0].squaredNorm() + q1 * q1);
  double n2 = std::sqrt(c[1].squaredNorm() + q2 * q2);
  return transverse / (n1 * n2);
}

double conformal_invariance_check(const MetricField& g,
                                  const std::function<double(const Point4&)>& f,
                                  const Point4& p, double zeta) {
  MetricField fg;
  fg.orientation = g.orientation;
  fg.fd_step = g.fd_step;
  auto feval = f;
  auto geval = g.eval;
  fg.eval = [feval, geval](const Point4& q, const Tangent4& a, const Tangent4& b) {
    return feval(q) * geval(q, a, b);
  };
  if (g.ambient) {
    auto gamb = g.ambient;
    fg.ambient = [feval, gamb](const Point4& q) {
      auto jet = gamb(q);
      double fv = feval(q);
      MetricField::AmbientJet out;
      out.G = fv * jet.G;
      for (int k = 0; k < 6; ++k) {
        // Tangential derivative of f through the radial extension; only
        // tangential components of dG survive the chart contraction.
        double lev[3];
        for (int lv = 0; lv < 3; ++lv) {
          double hh = 2e-3 / (1 << lv);
          Vec6 vp = q.ambient(), vm = q.ambient();
          vp[k] += hh;
          vm[k] -= hh;
          Point4 qp(vp.head<3>(), vp.tail<3>());
          Point4 qm(vm.head<3>(), vm.tail<3>());
          qp.renormalize();
          qm.renormalize();
          lev[lv] = (feval(qp) - feval(qm)) / (2.0 * hh);
        }
        double dfk = richardson6(lev[0], lev[1], lev[2]);
        out.dG[k] = dfk * jet.G + fv * jet.dG[k];
      }
      return out;
    };
  }

  double fp = feval(p);
  if (!(fp > 0.0)) {
    throw domain_error("conformal_invariance_check: factor must be positive");
  }
  cdouble z(zeta, 0.0);
  HorizontalPair a = horizontal_fields(g, anchored_frame_field(g, p), p, z);
  HorizontalPair b = horizontal_fields(fg, anchored_frame_field(fg, p), p, z);
  double sf = std::sqrt(fp);
  double acc = (a.w1 - b.w1).squaredNorm() + (a.w2 - b.w2).squaredNorm();
  acc += std::norm(a.q1 - sf * b.q1) + std::norm(a.q2 - sf * b.q2);
  return std::sqrt(acc);
}

std::array<cdouble, 3> flat_twistor_map(double fx1, double fx2, double fy1,
                                        double fy2, cdouble zeta) {
  cdouble z1 = cdouble(fx1 + fy2) + cdouble(fy1 - fx2) * zeta;
  cdouble z2 = cdouble(fy1 + fx2) + cdouble(fx1 - fy2) * zeta;
  return {z1, z2, zeta};
}

}  // namespace zollfrei::twistor
