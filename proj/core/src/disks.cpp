#include "zollfrei/disks.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

namespace zollfrei::disks {
namespace {

using rp3::QuadricPoint;
using rp3::TotallyRealEmbedding;

struct Stencil {
  int N = 0, M = 0;
  std::vector<double> theta;
  std::vector<Vec4> x0;
  std::vector<std::array<Vec4, 3>> frame;
  MatX trig;   // M x (2N+1), series evaluation at the nodes
  CMatX dft;   // M x M, row k+N is the mode-k analysis row
};

Stencil make_stencil(const QuadricPoint& q, int N) {
  Stencil st;
  st.N = N;
  st.M = 2 * N + 1;
  st.theta.resize(st.M);
  st.x0.resize(st.M);
  st.frame.resize(st.M);
  st.trig.resize(st.M, st.M);
  st.dft.resize(st.M, st.M);
  const auto& E = rp3::tangent_frames();
  for (int m = 0; m < st.M; ++m) {
    double th = 2 * kPi * m / st.M;
    st.theta[m] = th;
    st.x0[m] = rp3::round_boundary_lift(q, th);
    for (int i = 0; i < 3; ++i) st.frame[m][i] = E[i] * st.x0[m];
    st.trig(m, 0) = 1.0;
    for (int k = 1; k <= N; ++k) {
      st.trig(m, 2 * k - 1) = std::cos(k * th);
      st.trig(m, 2 * k) = std::sin(k * th);
    }
    for (int k = -N; k <= N; ++k)
      st.dft(k + N, m) = std::polar(1.0 / st.M, -k * th);
  }
  return st;
}

struct Forward {
  std::vector<Vec4> x;                  // boundary lifts at the nodes
  std::vector<CVec3> chart;             // chart image of the embedded curve
  std::vector<Eigen::Matrix3cd> dchart; // columns: d(chart)/du_i
  double min_chart_norm = 0.0;
};

Forward evaluate_curve(const TotallyRealEmbedding& P, const Stencil& st,
                       const Eigen::Matrix<cdouble, 4, 4>& Rc, const VecX& c,
                       const SolveConfig& cfg, bool with_jacobian) {
  Forward f;
  f.x.resize(st.M);
  f.chart.resize(st.M);
  if (with_jacobian) f.dchart.resize(st.M);
  f.min_chart_norm = 1e300;
  const cdouble I(0, 1);
  for (int m = 0; m < st.M; ++m) {
    Vec3 u;
    for (int i = 0; i < 3; ++i)
      u(i) = st.trig.row(m).dot(c.segment(i * st.M, st.M));
    Vec4 S = st.x0[m];
    for (int i = 0; i < 3; ++i) S += u(i) * st.frame[m][i];
    double n2 = 1.0 + u.squaredNorm();
    double n = std::sqrt(n2);
    Vec4 x = S / n;
    f.x[m] = x;
    Vec4 y = P.value(x);
    double s = std::sqrt(1.0 + y.squaredNorm());
    CVec4 w;
    for (int j = 0; j < 4; ++j) w(j) = cdouble(x(j), y(j) / s);
    CVec4 z = Rc * w;
    cdouble den = z(0) + I * z(1);
    if (std::abs(den) < cfg.min_denominator * z.norm())
      throw degeneracy_error("disk solve: boundary hit the chart edge");
    f.chart[m] = rp3::affine_chart(z);
    f.min_chart_norm = std::min(f.min_chart_norm, f.chart[m].norm());
    if (!with_jacobian) continue;

    Mat4 Jv = P.jacobian(x);
    auto Jchart = rp3::affine_chart_derivative(z);
    for (int i = 0; i < 3; ++i) {
      Vec4 dx = st.frame[m][i] / n - (u(i) / n2) * x;
      Vec4 dy = Jv * dx;
      Vec4 dys = dy / s - y * (y.dot(dy) / (s * s * s));
      CVec4 dw;
      for (int j = 0; j < 4; ++j) dw(j) = cdouble(dx(j), dys(j));
      f.dchart[m].col(i) = Jchart * (Rc * dw);
    }
  }
  return f;
}

// Residual layout: for k = 1..N the mode -k coefficients (three complex
// entries as Re/Im pairs), then the anchor mode, then the phase condition
// on the first positive mode of the first chart component.
VecX assemble_residual(const Stencil& st, const Forward& f, CMatX* modes_out) {
  CMatX Z(st.M, 3);
  for (int m = 0; m < st.M; ++m) Z.row(m) = f.chart[m].transpose();
  CMatX modes = st.dft * Z;
  if (modes_out) *modes_out = modes;
  int N = st.N;
  VecX r(6 * N + 7);
  for (int k = 1; k <= N; ++k)
    for (int j = 0; j < 3; ++j) {
      cdouble v = modes(N - k, j);
      r(((k - 1) * 3 + j) * 2) = v.real();
      r(((k - 1) * 3 + j) * 2 + 1) = v.imag();
    }
  for (int j = 0; j < 3; ++j) {
    cdouble v = modes(N, j);
    r(6 * N + 2 * j) = v.real();
    r(6 * N + 2 * j + 1) = v.imag();
  }
  r(6 * N + 6) = modes(N + 1, 0).imag();
  return r;
}

MatX assemble_jacobian(const Stencil& st, const Forward& f) {
  int N = st.N, M = st.M;
  // Analysis rows for modes -N..-1, 0, +1.
  CMatX sel(N + 2, M);
  sel.topRows(N + 1) = st.dft.topRows(N + 1);
  sel.row(N + 1) = st.dft.row(N + 1);
  MatX J(6 * N + 7, 3 * M);
  for (int i = 0; i < 3; ++i) {
    CMatX H(M, 3);
    for (int m = 0; m < M; ++m) H.row(m) = f.dchart[m].col(i).transpose();
    for (int cidx = 0; cidx < M; ++cidx) {
      CMatX col_modes = sel * (st.trig.col(cidx).asDiagonal() * H);
      int col = i * M + cidx;
      for (int k = 1; k <= N; ++k)
        for (int j = 0; j < 3; ++j) {
          cdouble v = col_modes(N - k, j);
          J(((k - 1) * 3 + j) * 2, col) = v.real();
          J(((k - 1) * 3 + j) * 2 + 1, col) = v.imag();
        }
      for (int j = 0; j < 3; ++j) {
        cdouble v = col_modes(N, j);
        J(6 * N + 2 * j, col) = v.real();
        J(6 * N + 2 * j + 1, col) = v.imag();
      }
      J(6 * N + 6, col) = col_modes(N + 1, 0).imag();
    }
  }
  return J;
}

VecX seed_coefficients(const QuadricPoint& q, const Stencil& st,
                       const DiskSolution* seed) {
  VecX c = VecX::Zero(3 * st.M);
  if (!seed) return c;
  double shift = 0.0;
  try {
    shift = -2.0 * rp3::alignment_angle(q, seed->q);
  } catch (const degeneracy_error&) {
    return c;
  }
  MatX u(st.M, 3);
  for (int m = 0; m < st.M; ++m) {
    Vec4 g = seed->boundary_lift(st.theta[m] + shift);
    double dot = g.dot(st.x0[m]);
    if (std::abs(dot) < 0.35) return VecX::Zero(3 * st.M);
    for (int i = 0; i < 3; ++i) u(m, i) = g.dot(st.frame[m][i]) / dot;
  }
  for (int i = 0; i < 3; ++i) {
    c(i * st.M) = u.col(i).mean();
    for (int k = 1; k <= st.N; ++k) {
      double a = 0.0, b = 0.0;
      for (int m = 0; m < st.M; ++m) {
        a += u(m, i) * st.trig(m, 2 * k - 1);
        b += u(m, i) * st.trig(m, 2 * k);
      }
      c(i * st.M + 2 * k - 1) = 2.0 * a / st.M;
      c(i * st.M + 2 * k) = 2.0 * b / st.M;
    }
  }
  return c;
}

// Total continuous-phase increment of vals around the loop, in turns.
// Requires the sampling to resolve the phase to steps below pi/2.
int phase_winding(const std::vector<cdouble>& vals, const char* what) {
  double total = 0.0;
  int n = static_cast<int>(vals.size());
  for (int m = 0; m < n; ++m) {
    cdouble a = vals[m], b = vals[(m + 1) % n];
    if (std::abs(a) == 0.0 || std::abs(b) == 0.0)
      throw degeneracy_error(std::string(what) + ": vanishing sample");
    double step = std::arg(b / a);
    if (std::abs(step) > 0.5 * kPi)
      throw degeneracy_error(std::string(what) + ": under-resolved winding");
    total += step;
  }
  double turns = total / (2 * kPi);
  int w = static_cast<int>(std::lround(turns));
  if (std::abs(turns - w) > 1e-6)
    throw degeneracy_error(std::string(what) + ": non-integer winding");
  return w;
}

}  // namespace

CVec3 DiskSolution::eval_chart(cdouble zeta) const {
  CVec3 acc = CVec3::Zero();
  for (int k = modes; k >= 0; --k) acc = acc * zeta + fourier[k];
  return acc;
}

CVec4 DiskSolution::eval(cdouble zeta) const {
  CVec4 z = rp3::affine_lift(eval_chart(zeta));
  return rotation.transpose().cast<cdouble>() * z;
}

Vec4 DiskSolution::boundary_lift(double theta) const {
  int M = 2 * modes + 1;
  Vec3 u;
  for (int i = 0; i < 3; ++i) {
    double acc = gauge(i * M);
    for (int k = 1; k <= modes; ++k) {
      acc += gauge(i * M + 2 * k - 1) * std::cos(k * theta);
      acc += gauge(i * M + 2 * k) * std::sin(k * theta);
    }
    u(i) = acc;
  }
  Vec4 x0 = rp3::round_boundary_lift(q, theta);
  const auto& E = rp3::tangent_frames();
  Vec4 S = x0;
  for (int i = 0; i < 3; ++i) S += u(i) * (E[i] * x0);
  return S / std::sqrt(1.0 + u.squaredNorm());
}

DiskSolution round_disk(const QuadricPoint& q, int modes) {
  DiskSolution d;
  d.q = q;
  d.rotation = rp3::anchor_rotation(q);
  d.modes = modes;
  d.fourier.assign(modes + 1, CVec3::Zero());
  d.fourier[1](0) = 1.0;
  d.gauge = VecX::Zero(3 * (2 * modes + 1));
  d.gamma.resize(2 * modes + 1);
  for (int m = 0; m < d.nodes(); ++m)
    d.gamma[m] = rp3::round_boundary_lift(q, 2 * kPi * m / d.nodes());
  d.residual = 0.0;
  return d;
}

DiskSolution solve_disk(const TotallyRealEmbedding& P, const QuadricPoint& q,
                        const DiskSolution* seed, const SolveConfig& cfg) {
  if (cfg.modes < 4) throw domain_error("disk solve: needs at least 4 modes");
  Stencil st = make_stencil(q, cfg.modes);
  Mat4 R = rp3::anchor_rotation(q);
  Eigen::Matrix<cdouble, 4, 4> Rc = R.cast<cdouble>();
  VecX c = seed_coefficients(q, st, seed);

  Forward f = evaluate_curve(P, st, Rc, c, cfg, false);
  VecX r = assemble_residual(st, f, nullptr);
  double best = r.cwiseAbs().maxCoeff();
  int steps = 0;
  while (best >= cfg.tol) {
    if (steps >= cfg.max_newton) {
      std::ostringstream msg;
      msg << "disk solve: no convergence, residual " << best;
      throw convergence_error(msg.str());
    }
    Forward fj = evaluate_curve(P, st, Rc, c, cfg, true);
    MatX J = assemble_jacobian(st, fj);
    VecX step = Eigen::ColPivHouseholderQR<MatX>(J).solve(r);
    double lambda = 1.0;
    bool accepted = false;
    for (int tries = 0; tries < 7; ++tries, lambda *= 0.5) {
      VecX trial = c - lambda * step;
      try {
        Forward ft = evaluate_curve(P, st, Rc, trial, cfg, false);
        VecX rt = assemble_residual(st, ft, nullptr);
        double vt = rt.cwiseAbs().maxCoeff();
        if (vt < best) {
          c = trial;
          f = ft;
          r = rt;
          best = vt;
          accepted = true;
          break;
        }
      } catch (const degeneracy_error&) {
        // Shrink the step away from the chart edge.
      }
    }
    ++steps;
    if (!accepted) {
      std::ostringstream msg;
      msg << "disk solve: stalled, residual " << best;
      throw convergence_error(msg.str());
    }
  }

  if (f.min_chart_norm < cfg.min_boundary_gap)
    throw degeneracy_error("disk solve: anchor too close to the real slice");

  CMatX modes;
  (void)assemble_residual(st, f, &modes);
  DiskSolution d;
  d.q = q;
  d.rotation = R;
  d.modes = cfg.modes;
  d.fourier.resize(cfg.modes + 1);
  for (int k = 0; k <= cfg.modes; ++k)
    d.fourier[k] = modes.row(st.N + k).transpose();
  d.gauge = c;
  d.gamma = f.x;
  d.newton_steps = steps;
  double worst = 0.0;
  for (int m = 0; m < st.M; ++m) {
    CVec3 ext = d.eval_chart(std::polar(1.0, st.theta[m]));
    worst = std::max(worst, (ext - f.chart[m]).norm());
  }
  d.residual = worst;
  return d;
}

int maslov_index(const DiskSolution& disk, const TotallyRealEmbedding& P) {
  int n = std::max(256, 8 * disk.modes);
  const auto& E = rp3::tangent_frames();
  Eigen::Matrix<cdouble, 4, 4> Rc = disk.rotation.cast<cdouble>();
  std::vector<cdouble> det2(n);
  for (int m = 0; m < n; ++m) {
    double th = 2 * kPi * m / n;
    Vec4 x = disk.boundary_lift(th);
    Vec4 y = P.value(x);
    double s = std::sqrt(1.0 + y.squaredNorm());
    CVec4 w;
    for (int j = 0; j < 4; ++j) w(j) = cdouble(x(j), y(j) / s);
    CVec4 z = Rc * w;
    auto Jchart = rp3::affine_chart_derivative(z);
    Mat4 Jv = P.jacobian(x);
    Eigen::Matrix3cd G;
    double scale = 1.0;
    for (int i = 0; i < 3; ++i) {
      Vec4 dx = E[i] * x;
      Vec4 dy = Jv * dx;
      Vec4 dys = dy / s - y * (y.dot(dy) / (s * s * s));
      CVec4 dw;
      for (int j = 0; j < 4; ++j) dw(j) = cdouble(dx(j), dys(j));
      G.col(i) = Jchart * (Rc * dw);
      scale *= G.col(i).norm();
    }
    cdouble det = G.determinant();
    if (std::abs(det) < 1e-12 * scale)
      throw degeneracy_error("maslov: boundary frame is not totally real");
    det2[m] = det * det;
  }
  return phase_winding(det2, "maslov");
}

std::array<int, 3> round_partial_indices(int samples) {
  const auto& E = rp3::tangent_frames();
  std::array<std::vector<cdouble>, 3> diag2;
  for (auto& v : diag2) v.resize(samples);
  for (int m = 0; m < samples; ++m) {
    double th = 2 * kPi * m / samples;
    Vec4 x(std::cos(th / 2), -std::sin(th / 2), 0.0, 0.0);
    CVec4 z = x.cast<cdouble>();
    auto Jchart = rp3::affine_chart_derivative(z);
    Eigen::Matrix3cd G;
    for (int i = 0; i < 3; ++i)
      G.col(i) = Jchart * (E[i] * x).cast<cdouble>();
    // Coordinate-aligned directions: real combinations of the frame that
    // keep only one chart component.
    for (int j = 0; j < 3; ++j) {
      MatX sys(4, 3);
      int rr = 0;
      for (int k = 0; k < 3; ++k) {
        if (k == j) continue;
        for (int i = 0; i < 3; ++i) {
          sys(rr, i) = G(k, i).real();
          sys(rr + 1, i) = G(k, i).imag();
        }
        rr += 2;
      }
      Eigen::JacobiSVD<MatX> svd(sys, Eigen::ComputeFullV);
      if (svd.singularValues()(2) > 1e-8 * svd.singularValues()(0))
        throw degeneracy_error("partial indices: no coordinate direction");
      VecX lambda = svd.matrixV().col(2);
      cdouble d = 0.0;
      for (int i = 0; i < 3; ++i) d += G(j, i) * lambda(i);
      diag2[j][m] = d * d;
    }
  }
  return {phase_winding(diag2[0], "partial index 1"),
          phase_winding(diag2[1], "partial index 2"),
          phase_winding(diag2[2], "partial index 3")};
}

int quadric_winding(const DiskSolution& disk) {
  int n = std::max(512, 16 * disk.modes);
  std::vector<cdouble> vals(n);
  for (int m = 0; m < n; ++m) {
    CVec3 a = disk.eval_chart(std::polar(1.0, 2 * kPi * m / n));
    vals[m] = 4.0 * (a(0) + a(1) * a(1) + a(2) * a(2));
  }
  return phase_winding(vals, "quadric meeting count");
}

double spectral_decay(const DiskSolution& disk) {
  std::vector<double> ks, logs;
  for (int k = 1; k <= disk.modes; ++k) {
    double a = disk.fourier[k].norm();
    if (a > 1e-13) {
      ks.push_back(k);
      logs.push_back(std::log(a));
    }
  }
  if (ks.size() < 3) return 0.0;
  double n = static_cast<double>(ks.size());
  double sk = 0, sl = 0, skk = 0, skl = 0;
  for (size_t i = 0; i < ks.size(); ++i) {
    sk += ks[i];
    sl += logs[i];
    skk += ks[i] * ks[i];
    skl += ks[i] * logs[i];
  }
  double slope = (n * skl - sk * sl) / (n * skk - sk * sk);
  return std::exp(slope);
}

}  // namespace zollfrei::disks
