#include <algorithm>

#include "zollfrei/manifold.hpp"

namespace zollfrei::manifold {

Mat4 chart_gram(const MetricField& g, const ChartFrame& chart, const Vec4& s) {
  Point4 p = chart.point(s);
  std::array<Tangent4, 4> t;
  for (int i = 0; i < 4; ++i) t[i] = chart.coordinate_vector(s, i);
  Mat4 G;
  if (g.ambient) {
    auto jet = g.ambient(p);
    Eigen::Matrix<double, 6, 4> T;
    for (int i = 0; i < 4; ++i) T.col(i) = t[i].ambient();
    G = T.transpose() * jet.G * T;
  } else {
    for (int i = 0; i < 4; ++i) {
      for (int j = i; j < 4; ++j) {
        G(i, j) = g.g(p, t[i], t[j]);
        G(j, i) = G(i, j);
      }
    }
  }
  return 0.5 * (G + Mat4(G.transpose()));
}

namespace {

// d(chart gram)/ds_k via the ambient jet; differencing-free.
std::array<Mat4, 4> gram_d1_ambient(const MetricField& g, const ChartFrame& chart,
                                    const Vec4& s) {
  Point4 p = chart.point(s);
  auto jet = g.ambient(p);
  Eigen::Matrix<double, 6, 4> T;
  for (int i = 0; i < 4; ++i) T.col(i) = chart.coordinate_vector(s, i).ambient();
  std::array<Mat4, 4> d;
  for (int k = 0; k < 4; ++k) {
    Vec6 tk = T.col(k);
    Mat6 dGk = Mat6::Zero();
    for (int m = 0; m < 6; ++m) {
      if (tk[m] != 0.0) dGk += tk[m] * jet.dG[m];
    }
    Eigen::Matrix<double, 6, 4> S;
    for (int i = 0; i < 4; ++i) S.col(i) = chart.second(s, k, i).ambient();
    Mat4 A = S.transpose() * jet.G * T;
    Mat4 dk = A + Mat4(A.transpose()) + Mat4(T.transpose() * dGk * T);
    d[k] = 0.5 * (dk + Mat4(dk.transpose()));
  }
  return d;
}

// Extrapolates three centered second-order estimates at steps h, h/2, h/4 to
// sixth order.
Mat4 richardson6(const Mat4& e1, const Mat4& e2, const Mat4& e3) {
  return (64.0 * e3 - 20.0 * e2 + e1) / 45.0;
}

std::array<Mat4, 4> gram_d1(const MetricField& g, const ChartFrame& chart,
                            const Vec4& s, double h) {
  if (g.ambient) return gram_d1_ambient(g, chart, s);
  std::array<Mat4, 4> d;
  for (int k = 0; k < 4; ++k) {
    Vec4 e = Vec4::Zero();
    e[k] = 1.0;
    auto centered = [&](double hh) {
      return Mat4(
          (chart_gram(g, chart, s + hh * e) - chart_gram(g, chart, s - hh * e)) /
          (2.0 * hh));
    };
    d[k] = richardson6(centered(h), centered(0.5 * h), centered(0.25 * h));
  }
  return d;
}

struct GramJet {
  Mat4 G;
  std::array<Mat4, 4> d;
  std::array<std::array<Mat4, 4>, 4> dd;  // dd[k][l] = d^2 G / ds_k ds_l
};

GramJet gram_jet(const MetricField& g, const ChartFrame& chart, const Vec4& s,
                 double h) {
  GramJet out;
  out.G = chart_gram(g, chart, s);
  if (g.ambient) {
    out.d = gram_d1_ambient(g, chart, s);
    for (int l = 0; l < 4; ++l) {
      Vec4 e = Vec4::Zero();
      e[l] = 1.0;
      std::array<std::array<Mat4, 4>, 3> est;
      for (int lev = 0; lev < 3; ++lev) {
        double hh = h / (1 << lev);
        auto dp = gram_d1_ambient(g, chart, s + hh * e);
        auto dm = gram_d1_ambient(g, chart, s - hh * e);
        for (int k = 0; k < 4; ++k) est[lev][k] = (dp[k] - dm[k]) / (2.0 * hh);
      }
      for (int k = 0; k < 4; ++k) {
        out.dd[l][k] = richardson6(est[0][k], est[1][k], est[2][k]);
      }
    }
  } else {
    for (int k = 0; k < 4; ++k) {
      Vec4 e = Vec4::Zero();
      e[k] = 1.0;
      Mat4 d1est[3], d2est[3];
      for (int lev = 0; lev < 3; ++lev) {
        double hh = h / (1 << lev);
        Mat4 gp = chart_gram(g, chart, s + hh * e);
        Mat4 gm = chart_gram(g, chart, s - hh * e);
        d1est[lev] = (gp - gm) / (2.0 * hh);
        d2est[lev] = (gp - 2.0 * out.G + gm) / (hh * hh);
      }
      out.d[k] = richardson6(d1est[0], d1est[1], d1est[2]);
      out.dd[k][k] = richardson6(d2est[0], d2est[1], d2est[2]);
    }
    for (int k = 0; k < 4; ++k) {
      for (int l = k + 1; l < 4; ++l) {
        Vec4 ek = Vec4::Zero(), el = Vec4::Zero();
        ek[k] = 1.0;
        el[l] = 1.0;
        auto cross = [&](double hh) {
          return Mat4((chart_gram(g, chart, s + hh * ek + hh * el) -
                       chart_gram(g, chart, s + hh * ek - hh * el) -
                       chart_gram(g, chart, s - hh * ek + hh * el) +
                       chart_gram(g, chart, s - hh * ek - hh * el)) /
                      (4.0 * hh * hh));
        };
        out.dd[k][l] = richardson6(cross(h), cross(0.5 * h), cross(0.25 * h));
        out.dd[l][k] = out.dd[k][l];
      }
    }
  }
  // Enforce the symmetry of mixed partials exactly.
  for (int k = 0; k < 4; ++k) {
    for (int l = k + 1; l < 4; ++l) {
      Mat4 m = 0.5 * (out.dd[k][l] + out.dd[l][k]);
      out.dd[k][l] = m;
      out.dd[l][k] = m;
    }
  }
  return out;
}

}  // namespace

std::array<Mat4, 4> christoffel(const MetricField& g, const ChartFrame& chart,
                                const Vec4& s, double step) {
  double h = step > 0.0 ? step : g.fd_step;
  Mat4 G = chart_gram(g, chart, s);
  auto d = gram_d1(g, chart, s, h);
  Mat4 Ginv = G.inverse();
  std::array<Mat4, 4> Gam;
  for (auto& m : Gam) m.setZero();
  for (int k = 0; k < 4; ++k) {
    for (int l = k; l < 4; ++l) {
      Vec4 v;
      for (int n = 0; n < 4; ++n) {
        v[n] = 0.5 * (d[k](n, l) + d[l](n, k) - d[n](k, l));
      }
      Vec4 up = Ginv * v;
      for (int m = 0; m < 4; ++m) {
        Gam[m](k, l) = up[m];
        Gam[m](l, k) = up[m];
      }
    }
  }
  return Gam;
}

RiemannData riemann_frame(const MetricField& g, const Point4& p,
                          const Frame4& frame, double step) {
  double h = step > 0.0 ? step : g.fd_step;
  ChartFrame chart = ChartFrame::at(p);
  GramJet jet = gram_jet(g, chart, Vec4::Zero(), h);
  Mat4 Ginv = jet.G.inverse();
  std::array<Mat4, 4> dGinv;
  for (int i = 0; i < 4; ++i) dGinv[i] = -Ginv * jet.d[i] * Ginv;

  double Gam[4][4][4];    // Gam[m][j][k] = Gamma^m_{jk}
  double dGam[4][4][4][4];  // dGam[i][m][j][k] = d_i Gamma^m_{jk}
  for (int j = 0; j < 4; ++j) {
    for (int k = 0; k < 4; ++k) {
      Vec4 v, dv[4];
      for (int n = 0; n < 4; ++n) {
        v[n] = 0.5 * (jet.d[j](n, k) + jet.d[k](n, j) - jet.d[n](j, k));
        for (int i = 0; i < 4; ++i) {
          dv[i][n] = 0.5 * (jet.dd[i][j](n, k) + jet.dd[i][k](n, j) -
                            jet.dd[i][n](j, k));
        }
      }
      Vec4 up = Ginv * v;
      for (int m = 0; m < 4; ++m) Gam[m][j][k] = up[m];
      for (int i = 0; i < 4; ++i) {
        Vec4 dup = dGinv[i] * v + Ginv * dv[i];
        for (int m = 0; m < 4; ++m) dGam[i][m][j][k] = dup[m];
      }
    }
  }

  double Rlow[4][4][4][4];  // R_{mkij}, chart components
  for (int m = 0; m < 4; ++m) {
    for (int k = 0; k < 4; ++k) {
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
          double up = dGam[i][m][j][k] - dGam[j][m][i][k];
          for (int t = 0; t < 4; ++t) {
            up += Gam[m][i][t] * Gam[t][j][k] - Gam[m][j][t] * Gam[t][i][k];
          }
          Rlow[m][k][i][j] = up;  // reused as R^m below, lowered next
        }
      }
    }
  }
  double Rup[4][4][4][4];
  std::copy(&Rlow[0][0][0][0], &Rlow[0][0][0][0] + 256, &Rup[0][0][0][0]);
  for (int m = 0; m < 4; ++m) {
    for (int k = 0; k < 4; ++k) {
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
          double v = 0.0;
          for (int n = 0; n < 4; ++n) v += jet.G(m, n) * Rup[n][k][i][j];
          Rlow[m][k][i][j] = v;
        }
      }
    }
  }

  Mat4 ric_chart = Mat4::Zero();
  for (int k = 0; k < 4; ++k) {
    for (int j = 0; j < 4; ++j) {
      double v = 0.0;
      for (int i = 0; i < 4; ++i) v += Rup[i][k][i][j];
      ric_chart(k, j) = v;
    }
  }
  double scalar = (Ginv * ric_chart).trace();

  // Convert to frame components by successive contraction with the frame's
  // chart-component matrix.
  Mat4 E;
  for (int a = 0; a < 4; ++a) E.col(a) = chart.components(frame.e[a]);
  double T1[4][4][4][4], T2[4][4][4][4];
  auto contract = [&E](const double (&in)[4][4][4][4], double (&out)[4][4][4][4],
                       int axis) {
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        for (int c = 0; c < 4; ++c) {
          for (int d = 0; d < 4; ++d) {
            double v = 0.0;
            for (int i = 0; i < 4; ++i) {
              switch (axis) {
                case 0: v += E(i, a) * in[i][b][c][d]; break;
                case 1: v += E(i, b) * in[a][i][c][d]; break;
                case 2: v += E(i, c) * in[a][b][i][d]; break;
                default: v += E(i, d) * in[a][b][c][i]; break;
              }
            }
            out[a][b][c][d] = v;
          }
        }
      }
    }
  };
  contract(Rlow, T1, 0);
  contract(T1, T2, 1);
  contract(T2, T1, 2);
  contract(T1, T2, 3);

  RiemannData out;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      for (int c = 0; c < 4; ++c) {
        for (int d = 0; d < 4; ++d) out.R[a][b](c, d) = T2[a][b][c][d];
      }
    }
  }
  out.scalar = scalar;
  out.ricci = E.transpose() * ric_chart * E;
  return out;
}

CurvatureDecomp curvature_decompose(const MetricField& g, const Point4& p,
                                    double step) {
  Frame4 frame = standard_frame(g, p);
  RiemannData rd = riemann_frame(g, p, frame, step);
  auto psi = sd_basis_components();
  auto phi = asd_basis(frame).phi;
  std::array<Mat4, 6> F;
  for (int i = 0; i < 3; ++i) {
    F[i] = psi[i];
    F[3 + i] = phi[i];
  }
  std::array<Mat4, 6> RF;
  for (int J = 0; J < 6; ++J) {
    Mat4 up = kEta4 * F[J] * kEta4;
    Mat4 acted = Mat4::Zero();
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        double v = 0.0;
        for (int c = 0; c < 4; ++c) {
          for (int d = 0; d < 4; ++d) v += rd.R[a][b](c, d) * up(c, d);
        }
        acted(a, b) = 0.5 * v;
      }
    }
    RF[J] = acted;
  }
  Mat6 B;
  for (int I = 0; I < 6; ++I) {
    for (int J = 0; J < 6; ++J) B(I, J) = form_pairing(F[I], RF[J]);
  }
  B = 0.5 * (B + Mat6(B.transpose()));

  CurvatureDecomp out;
  out.full = B;
  out.scalar = rd.scalar;
  Mat3 shift = (rd.scalar / 12.0) * kLorentz3;
  out.Wplus = B.topLeftCorner<3, 3>() - shift;
  out.Wminus = B.bottomRightCorner<3, 3>() - shift;
  out.ricci_traceless = B.topRightCorner<3, 3>();
  return out;
}

double selfdual_residual(const MetricField& g, const std::vector<Point4>& samples,
                         double step, double eps) {
  double worst = 0.0;
  for (const auto& p : samples) {
    CurvatureDecomp d = curvature_decompose(g, p, step);
    double denom = d.wplus_norm() + d.mixed_norm() + std::fabs(d.scalar) + eps;
    worst = std::max(worst, d.wminus_norm() / denom);
  }
  return worst;
}

}  // namespace zollfrei::manifold
