#include <limits>
#include <map>
#include <numeric>

#include "zollfrei/geodesic.hpp"

namespace zollfrei::geodesic {

namespace {

using manifold::chart_gram;
using manifold::riemann_frame;

// Euclidean-orthonormal spanning pair of the seed plane; combinations stay
// null because the plane is totally isotropic.
std::array<Tangent4, 2> orthonormal_plane_pair(const std::array<Tangent4, 2>& span) {
  Vec6 a = span[0].ambient();
  Vec6 b = span[1].ambient();
  a.normalize();
  b -= a * a.dot(b);
  b.normalize();
  std::array<Tangent4, 2> out;
  out[0] = Tangent4(a.head<3>(), a.tail<3>());
  out[1] = Tangent4(b.head<3>(), b.tail<3>());
  return out;
}

Tangent4 plane_direction(const std::array<Tangent4, 2>& pair, double theta) {
  return pair[0] * std::cos(theta) + pair[1] * std::sin(theta);
}

double isotropy_defect(const MetricField& g, const Point4& p, const Tangent4& v,
                       const Tangent4& j) {
  double num = std::fabs(g.g(p, v, v)) + 2.0 * std::fabs(g.g(p, v, j)) +
               std::fabs(g.g(p, j, j));
  double den = 1.0 + v.ambient().squaredNorm() + j.ambient().squaredNorm();
  return num / den;
}

}  // namespace

BetaSurfacePatch integrate_beta_surface(const MetricField& g, const Point4& p,
                                        double zeta, double extent, int n,
                                        double tol) {
  if (n < 4) throw domain_error("integrate_beta_surface: need n >= 4");
  if (extent <= 0.0) throw domain_error("integrate_beta_surface: extent <= 0");

  Point4 base = p;
  base.renormalize();
  Frame4 frame = manifold::standard_frame(g, base);
  auto span = manifold::beta_plane_span(frame, zeta);
  auto pair = orthonormal_plane_pair(span);

  BetaSurfacePatch patch;
  patch.base = base;
  patch.base_plane = pair;
  patch.zeta = zeta;
  patch.extent = extent;

  const int n_dir = n;
  const int n_r = n;
  const double dr = extent / n_r;
  // Offset of the variation stencil: the theta-derivative of the geodesic
  // family is formed from five neighboring radial geodesics, which realizes
  // the surface tangent plane without differentiating the curvature.
  const double delta = 2e-3;
  static const double kStencil[5] = {1.0, -8.0, 0.0, 8.0, -1.0};

  Flow flow(g, tol);
  patch.grid.assign(n_dir, std::vector<SurfaceNode>(n_r + 1));

  for (int i = 0; i < n_dir; ++i) {
    double theta = 2.0 * kPi * i / n_dir;
    std::array<Flow::State, 5> fam;
    for (int j = 0; j < 5; ++j) {
      fam[j] = Flow::State{base, plane_direction(pair, theta + (j - 2) * delta)};
    }

    SurfaceNode& root = patch.grid[i][0];
    root.p = base;
    root.plane = {fam[2].v, plane_direction(pair, theta + 0.5 * kPi)};
    root.r = 0.0;
    root.theta = theta;

    for (int k = 1; k <= n_r; ++k) {
      for (int j = 0; j < 5; ++j) {
        if (!flow.advance(fam[j], dr)) {
          throw convergence_error("integrate_beta_surface: radial integration stalled");
        }
      }
      Vec6 jamb = Vec6::Zero();
      for (int j = 0; j < 5; ++j) jamb += kStencil[j] * fam[j].p.ambient();
      jamb /= 12.0 * delta;
      Tangent4 jvar = Tangent4::project(fam[2].p, jamb);

      SurfaceNode& node = patch.grid[i][k];
      node.p = fam[2].p;
      node.plane = {fam[2].v, jvar};
      node.r = k * dr;
      node.theta = theta;
      patch.max_isotropy_defect = std::max(
          patch.max_isotropy_defect, isotropy_defect(g, node.p, fam[2].v, jvar));
    }
  }

  if (patch.max_isotropy_defect > 1e-5) {
    throw convergence_error(
        "integrate_beta_surface: tangent-plane isotropy drift " +
        std::to_string(patch.max_isotropy_defect) +
        " exceeds 1e-5; the plane family is not integrable here, which is the "
        "signature of a metric that is not self-dual");
  }
  return patch;
}

namespace {

struct GridInterp {
  const BetaSurfacePatch* patch;
  int n_dir, n_r;

  explicit GridInterp(const BetaSurfacePatch& s)
      : patch(&s),
        n_dir(static_cast<int>(s.grid.size())),
        n_r(static_cast<int>(s.grid.front().size()) - 1) {}

  // Bilinear position at continuous grid index (u in direction, w in radius);
  // u wraps, w clamps.  The chord is renormalized back onto the product of
  // spheres: the intersection problem is posed inside the 4-manifold, where
  // two surfaces meet in points; raw chords in 6-space would generically miss.
  Vec6 at(double u, double w) const {
    u -= n_dir * std::floor(u / n_dir);
    w = std::min(std::max(w, 0.0), static_cast<double>(n_r));
    int i0 = std::min(static_cast<int>(u), n_dir - 1);
    int k0 = std::min(static_cast<int>(w), n_r - 1);
    double fu = u - i0;
    double fw = w - k0;
    int i1 = (i0 + 1) % n_dir;
    const auto& gr = patch->grid;
    Vec6 v = (1 - fu) * (1 - fw) * gr[i0][k0].p.ambient() +
             fu * (1 - fw) * gr[i1][k0].p.ambient() +
             (1 - fu) * fw * gr[i0][k0 + 1].p.ambient() +
             fu * fw * gr[i1][k0 + 1].p.ambient();
    v.head<3>().normalize();
    v.tail<3>().normalize();
    return v;
  }
};

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int i) { return parent[i] == i ? i : parent[i] = find(parent[i]); }
  void join(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

int surface_intersection_count(const BetaSurfacePatch& S1,
                               const BetaSurfacePatch& S2, double tol) {
  if (S1.grid.empty() || S2.grid.empty()) {
    throw domain_error("surface_intersection_count: empty grid");
  }
  bool same_base =
      (S1.base.ambient() - S2.base.ambient()).norm() < 1e-10 &&
      std::fabs(S1.zeta - S2.zeta) < 1e-10;
  if (same_base) {
    throw domain_error("surface_intersection_count: identical seed data; "
                       "self-comparison is not a transverse intersection");
  }

  GridInterp g1(S1), g2(S2);

  // Coarse node-proximity pass.
  double spacing = 0.0;
  for (const auto* s : {&S1, &S2}) {
    for (const auto& ray : s->grid) {
      for (std::size_t k = 0; k + 1 < ray.size(); ++k) {
        spacing = std::max(spacing,
                           (ray[k + 1].p.ambient() - ray[k].p.ambient()).norm());
      }
    }
  }
  double r_coarse = std::max(4.0 * spacing, 10.0 * tol);

  struct Hit {
    int i1, k1, i2, k2;
    double d;
    Vec6 mid;
  };
  std::vector<Hit> hits;
  for (int i1 = 0; i1 < g1.n_dir; ++i1) {
    for (int k1 = 0; k1 <= g1.n_r; ++k1) {
      Vec6 p1 = S1.grid[i1][k1].p.ambient();
      for (int i2 = 0; i2 < g2.n_dir; ++i2) {
        for (int k2 = 0; k2 <= g2.n_r; ++k2) {
          Vec6 p2 = S2.grid[i2][k2].p.ambient();
          double d = (p1 - p2).norm();
          if (d < r_coarse) hits.push_back({i1, k1, i2, k2, d, 0.5 * (p1 + p2)});
        }
      }
    }
  }
  if (hits.empty()) return 0;

  UnionFind uf(static_cast<int>(hits.size()));
  for (std::size_t a = 0; a < hits.size(); ++a) {
    for (std::size_t b = a + 1; b < hits.size(); ++b) {
      if ((hits[a].mid - hits[b].mid).norm() < 2.0 * r_coarse) {
        uf.join(static_cast<int>(a), static_cast<int>(b));
      }
    }
  }
  std::map<int, std::size_t> best_in_cluster;
  for (std::size_t a = 0; a < hits.size(); ++a) {
    int root = uf.find(static_cast<int>(a));
    auto it = best_in_cluster.find(root);
    if (it == best_in_cluster.end() || hits[a].d < hits[it->second].d) {
      best_in_cluster[root] = a;
    }
  }

  // Gauss-Newton refinement of each cluster on the interpolated grids.
  std::vector<Vec6> points;
  for (const auto& [root, idx] : best_in_cluster) {
    const Hit& h = hits[idx];
    Eigen::Vector4d q(h.i1, h.k1, h.i2, h.k2);
    double gap = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 80; ++it) {
      Vec6 F = g1.at(q[0], q[1]) - g2.at(q[2], q[3]);
      gap = F.norm();
      if (gap < 0.2 * tol) break;
      Eigen::Matrix<double, 6, 4> J;
      const double hstep = 1e-4;
      for (int c = 0; c < 4; ++c) {
        Eigen::Vector4d qp = q, qm = q;
        qp[c] += hstep;
        qm[c] -= hstep;
        Vec6 Fp = (c < 2 ? g1.at(qp[0], qp[1]) : -g2.at(qp[2], qp[3]));
        Vec6 Fm = (c < 2 ? g1.at(qm[0], qm[1]) : -g2.at(qm[2], qm[3]));
        J.col(c) = (Fp - Fm) / (2.0 * hstep);
      }
      Eigen::Matrix4d N = J.transpose() * J + 1e-12 * Eigen::Matrix4d::Identity();
      Eigen::Vector4d step = N.ldlt().solve(J.transpose() * F);
      double cap = 2.0;
      if (step.norm() > cap) step *= cap / step.norm();
      q -= step;
      q[1] = std::min(std::max(q[1], 0.0), static_cast<double>(g1.n_r));
      q[3] = std::min(std::max(q[3], 0.0), static_cast<double>(g2.n_r));
    }
    if (!(gap < 10.0 * tol)) {
      throw domain_error(
          "surface_intersection_count: a proximity cluster did not refine "
          "below tolerance; the grids are too coarse to separate it");
    }
    points.push_back(g1.at(q[0], q[1]));
  }

  double dedup = std::max(10.0 * tol, 2.0 * r_coarse);
  std::vector<Vec6> distinct;
  for (const Vec6& pt : points) {
    bool fresh = true;
    for (const Vec6& q : distinct) {
      if ((pt - q).norm() < dedup) fresh = false;
    }
    if (fresh) distinct.push_back(pt);
  }
  return static_cast<int>(distinct.size());
}

namespace {

// Tangential curvature coefficient: R(w,v)v = alpha v + kappa w in the chart
// basis at p, solved in the least-squares sense.
double kappa_at(const MetricField& g, const Point4& p, const Tangent4& v,
                const Tangent4& w) {
  ChartFrame chart = ChartFrame::at(p);
  Frame4 legs;
  legs.base = p;
  legs.e = {Tangent4(chart.a1, Vec3::Zero()), Tangent4(chart.a2, Vec3::Zero()),
            Tangent4(Vec3::Zero(), chart.b1), Tangent4(Vec3::Zero(), chart.b2)};
  manifold::RiemannData rd = riemann_frame(g, p, legs, 0.0);

  Vec4 vc = chart.components(v);
  Vec4 wc = chart.components(w);
  Vec4 low = Vec4::Zero();
  for (int a = 0; a < 4; ++a) {
    double acc = 0.0;
    for (int b = 0; b < 4; ++b) {
      double inner = vc.dot(rd.R[a][b] * wc);  // R_{ab cd} v^c w^d
      acc += inner * vc[b];
    }
    low[a] = acc;
  }
  Mat4 G = chart_gram(g, chart, Vec4::Zero());
  Vec4 rv = G.ldlt().solve(low);  // components of R(v,w)v

  Eigen::Matrix<double, 4, 2> M;
  M.col(0) = vc;
  M.col(1) = wc;
  Eigen::Vector2d ab = (M.transpose() * M)
                           .ldlt()
                           .solve(M.transpose() * rv);
  return -ab[1];  // R(w,v)v = -R(v,w)v
}

}  // namespace

double wronskian_check(const MetricField& g, const BetaSurfacePatch& patch,
                       const GeodesicTrace& geodesic) {
  if (geodesic.samples.size() < 2) {
    throw domain_error("wronskian_check: trace has no extent");
  }
  const Point4& p0 = geodesic.samples.front().p;
  const Tangent4& v0 = geodesic.samples.front().v;
  if ((p0.ambient() - patch.base.ambient()).norm() > 1e-8) {
    throw domain_error("wronskian_check: geodesic does not start at the patch base");
  }
  Eigen::Matrix<double, 6, 2> M;
  M.col(0) = patch.base_plane[0].ambient();
  M.col(1) = patch.base_plane[1].ambient();
  Eigen::Vector2d c = (M.transpose() * M).ldlt().solve(M.transpose() * v0.ambient());
  double resid = (M * c - v0.ambient()).norm();
  if (resid > 1e-6 * std::max(1.0, v0.ambient().norm())) {
    throw domain_error("wronskian_check: geodesic velocity leaves the patch plane");
  }
  Tangent4 w0 = patch.base_plane[0] * (-c[1]) + patch.base_plane[1] * c[0];
  w0 = w0 * (1.0 / w0.ambient().norm());

  // Parallel-transport w along the geodesic, collecting kappa at accepted
  // steps; the trace itself is reproduced by the same flow.
  struct Node {
    double t;
    double kappa;
  };
  std::vector<Node> nodes;
  nodes.push_back({0.0, kappa_at(g, p0, v0, w0)});

  using Y = Eigen::Matrix<double, 12, 1>;
  Point4 p = p0;
  Tangent4 v = v0, w = w0;
  double T = geodesic.samples.back().t;
  double t = 0.0;
  double h_ctrl = 0.05;
  const double tol = geodesic.tolerance;
  while (t < T * (1.0 - 1e-15)) {
    double h = std::min(h_ctrl, T - t);
    ChartFrame chart = ChartFrame::at(p);
    Y y0;
    y0.head<4>().setZero();
    y0.segment<4>(4) = chart.components(v);
    y0.tail<4>() = chart.components(w);
    auto rhs = [&](const Y& y) {
      Vec4 s = y.head<4>();
      Vec4 u = y.segment<4>(4);
      Vec4 cw = y.tail<4>();
      auto Gam = manifold::christoffel(g, chart, s, 0.0);
      Y dy;
      dy.head<4>() = u;
      for (int m = 0; m < 4; ++m) {
        dy[4 + m] = -u.dot(Gam[m] * u);
        dy[8 + m] = -u.dot(Gam[m] * cw);
      }
      return dy;
    };
    // Embedded 5(4) pair, same tableau as the geodesic flow.
    static const double A[7][6] = {
        {},
        {1.0 / 5},
        {3.0 / 40, 9.0 / 40},
        {44.0 / 45, -56.0 / 15, 32.0 / 9},
        {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
        {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
        {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
    static const double B5[7] = {35.0 / 384,     0.0,       500.0 / 1113,
                                 125.0 / 192,    -2187.0 / 6784,
                                 11.0 / 84,      0.0};
    static const double B4[7] = {5179.0 / 57600, 0.0,       7571.0 / 16695,
                                 393.0 / 640,    -92097.0 / 339200,
                                 187.0 / 2100,   1.0 / 40};
    Y k[7];
    k[0] = rhs(y0);
    for (int i = 1; i < 7; ++i) {
      Y yi = y0;
      for (int j = 0; j < i; ++j) yi += h * A[i][j] * k[j];
      k[i] = rhs(yi);
    }
    Y y5 = y0, y4 = y0;
    for (int i = 0; i < 7; ++i) {
      y5 += h * B5[i] * k[i];
      y4 += h * B4[i] * k[i];
    }
    double err = 0.0;
    for (int i = 0; i < 12; ++i) {
      double scale = tol * (1.0 + std::max(std::fabs(y0[i]), std::fabs(y5[i])));
      err += sqr((y5[i] - y4[i]) / scale);
    }
    err = std::sqrt(err / 12.0);
    if (err <= 1.0) {
      p = chart.point(y5.head<4>());
      p.renormalize();
      v = chart.push(y5.head<4>(), y5.segment<4>(4));
      w = chart.push(y5.head<4>(), y5.tail<4>());
      t += h;
      nodes.push_back({t, kappa_at(g, p, v, w)});
    }
    double factor = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
    h_ctrl = h * std::min(5.0, std::max(0.2, factor));
    if (h_ctrl < 1e-12 * std::max(1.0, T)) {
      throw convergence_error("wronskian_check: transport step size collapsed");
    }
  }

  // Two solutions of f'' + kappa f = 0, advanced together so both see the
  // identical interpolated coefficient; the Wronskian of the pair must hold
  // its initial value 1.
  Eigen::Vector4d f(1.0, 0.0, 0.0, 1.0);  // (f1, f1', f2, f2')
  double drift = 0.0;
  for (std::size_t j = 0; j + 1 < nodes.size(); ++j) {
    double t0 = nodes[j].t, t1 = nodes[j + 1].t;
    double k0 = nodes[j].kappa, k1 = nodes[j + 1].kappa;
    int m = std::max(1, static_cast<int>(std::ceil((t1 - t0) / 0.004)));
    double h = (t1 - t0) / m;
    auto kap = [&](double tt) {
      double s = (tt - t0) / (t1 - t0);
      return (1 - s) * k0 + s * k1;
    };
    auto frhs = [&](double tt, const Eigen::Vector4d& y) {
      double kk = kap(tt);
      return Eigen::Vector4d(y[1], -kk * y[0], y[3], -kk * y[2]);
    };
    double tt = t0;
    for (int step = 0; step < m; ++step) {
      Eigen::Vector4d k1v = frhs(tt, f);
      Eigen::Vector4d k2v = frhs(tt + 0.5 * h, f + 0.5 * h * k1v);
      Eigen::Vector4d k3v = frhs(tt + 0.5 * h, f + 0.5 * h * k2v);
      Eigen::Vector4d k4v = frhs(tt + h, f + h * k3v);
      f += (h / 6.0) * (k1v + 2 * k2v + 2 * k3v + k4v);
      tt += h;
    }
    double W = f[0] * f[3] - f[1] * f[2];
    drift = std::max(drift, std::fabs(W - 1.0));
  }
  return drift;
}

}  // namespace zollfrei::geodesic
