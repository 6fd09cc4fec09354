#include "zollfrei/manifold.hpp"

namespace zollfrei::manifold {

Point4 Point4::random(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  auto draw = [&] {
    Vec3 v;
    do {
      v << n(rng), n(rng), n(rng);
    } while (v.norm() < 1e-6);
    return Vec3(v.normalized());
  };
  return Point4(draw(), draw());
}

Tangent4 Tangent4::project(const Point4& p, const Vec6& ambient) {
  Vec3 u = ambient.head<3>();
  Vec3 w = ambient.tail<3>();
  u -= p.x * p.x.dot(u);
  w -= p.y * p.y.dot(w);
  return Tangent4(u, w);
}

namespace {

// Orthonormal pair spanning the tangent plane of S^2 at x, positively
// oriented for the outward normal: det[a1 a2 x] = +1.
void sphere_tangent_pair(const Vec3& x, Vec3& a1, Vec3& a2) {
  Vec3 ref = std::fabs(x.z()) < 0.9 ? Vec3(0, 0, 1) : Vec3(1, 0, 0);
  a1 = ref.cross(x).normalized();
  a2 = x.cross(a1);
}

Vec3 gnomonic_point(const Vec3& x0, const Vec3& a1, const Vec3& a2, double s0,
                    double s1) {
  return Vec3((x0 + s0 * a1 + s1 * a2).normalized());
}

// d/ds_k of gnomonic_point, k in {0,1}.
Vec3 gnomonic_d1(const Vec3& x0, const Vec3& a1, const Vec3& a2, double s0,
                 double s1, int k) {
  Vec3 v = x0 + s0 * a1 + s1 * a2;
  double r = v.norm();
  Vec3 xh = v / r;
  const Vec3& a = (k == 0) ? a1 : a2;
  return (a - xh * xh.dot(a)) / r;
}

// d^2/ds_k ds_l of gnomonic_point.
Vec3 gnomonic_d2(const Vec3& x0, const Vec3& a1, const Vec3& a2, double s0,
                 double s1, int k, int l) {
  Vec3 v = x0 + s0 * a1 + s1 * a2;
  double r = v.norm();
  Vec3 xh = v / r;
  const Vec3& ak = (k == 0) ? a1 : a2;
  const Vec3& al = (l == 0) ? a1 : a2;
  Vec3 dk = (ak - xh * xh.dot(ak)) / r;
  Vec3 dl = (al - xh * xh.dot(al)) / r;
  return -(dl * xh.dot(ak) + xh * dl.dot(ak) + dk * xh.dot(al)) / r;
}

}  // namespace

ChartFrame ChartFrame::at(const Point4& p) {
  ChartFrame c;
  c.base = p;
  sphere_tangent_pair(p.x, c.a1, c.a2);
  sphere_tangent_pair(p.y, c.b1, c.b2);
  return c;
}

Point4 ChartFrame::point(const Vec4& s) const {
  return Point4(gnomonic_point(base.x, a1, a2, s[0], s[1]),
                gnomonic_point(base.y, b1, b2, s[2], s[3]));
}

Tangent4 ChartFrame::coordinate_vector(const Vec4& s, int i) const {
  Tangent4 t;
  if (i < 2) {
    t.u = gnomonic_d1(base.x, a1, a2, s[0], s[1], i);
  } else {
    t.w = gnomonic_d1(base.y, b1, b2, s[2], s[3], i - 2);
  }
  return t;
}

Tangent4 ChartFrame::push(const Vec4& s, const Vec4& ds) const {
  Tangent4 t;
  for (int i = 0; i < 4; ++i) {
    if (ds[i] == 0.0) continue;
    t = t + coordinate_vector(s, i) * ds[i];
  }
  return t;
}

Tangent4 ChartFrame::second(const Vec4& s, int k, int l) const {
  Tangent4 t;
  if (k < 2 && l < 2) {
    t.u = gnomonic_d2(base.x, a1, a2, s[0], s[1], k, l);
  } else if (k >= 2 && l >= 2) {
    t.w = gnomonic_d2(base.y, b1, b2, s[2], s[3], k - 2, l - 2);
  }
  return t;
}

Vec4 ChartFrame::components(const Tangent4& t) const {
  return Vec4(t.u.dot(a1), t.u.dot(a2), t.w.dot(b1), t.w.dot(b2));
}

Frame4 gram_schmidt_frame(const MetricField& g, const Point4& p,
                          const std::array<Tangent4, 4>& seed) {
  std::array<Tangent4, 4> e;
  std::array<int, 4> sign{};
  double scale = 0.0;
  for (const auto& t : seed) scale = std::max(scale, t.ambient().norm());
  if (scale == 0.0) throw degeneracy_error("gram_schmidt_frame: zero seed");

  for (int k = 0; k < 4; ++k) {
    Tangent4 v = seed[k];
    for (int j = 0; j < k; ++j) {
      v = v - e[j] * (sign[j] * g.g(p, v, e[j]));
    }
    double n = g.g(p, v, v);
    if (std::fabs(n) < 1e-10 * scale * scale) {
      throw degeneracy_error("gram_schmidt_frame: seed spans a degenerate subspace");
    }
    sign[k] = n > 0 ? +1 : -1;
    e[k] = v * (1.0 / std::sqrt(std::fabs(n)));
  }

  int plus = sign[0] + sign[1] + sign[2] + sign[3];
  if (plus != 0) {
    throw signature_error("gram_schmidt_frame: metric is not split signature here");
  }

  // Stable reorder to the pattern (+,+,-,-).
  std::array<Tangent4, 4> ordered;
  int ip = 0, im = 2;
  for (int k = 0; k < 4; ++k) {
    if (sign[k] > 0) {
      ordered[ip++] = e[k];
    } else {
      ordered[im++] = e[k];
    }
  }

  // Orientation fix: chart components of the frame should have determinant of
  // the sign the metric declares; a swap of the two negative legs flips it.
  ChartFrame chart = ChartFrame::at(p);
  Mat4 comp;
  for (int k = 0; k < 4; ++k) comp.col(k) = chart.components(ordered[k]);
  if (comp.determinant() * g.orientation < 0) std::swap(ordered[2], ordered[3]);

  Frame4 out;
  out.e = ordered;
  out.base = p;
  return out;
}

Frame4 standard_frame(const MetricField& g, const Point4& p) {
  ChartFrame chart = ChartFrame::at(p);
  std::array<Tangent4, 4> seed;
  Vec4 zero = Vec4::Zero();
  for (int i = 0; i < 4; ++i) seed[i] = chart.coordinate_vector(zero, i);
  return gram_schmidt_frame(g, p, seed);
}

namespace {

Mat4 wedge(int i, int j) {
  Mat4 m = Mat4::Zero();
  m(i, j) = 1.0;
  m(j, i) = -1.0;
  return m;
}

}  // namespace

ASDBasis asd_basis(const Frame4& frame) {
  const double r = 1.0 / std::sqrt(2.0);
  ASDBasis b;
  b.frame = frame;
  b.phi[0] = (wedge(0, 1) - wedge(2, 3)) * r;
  b.phi[1] = (wedge(0, 2) - wedge(1, 3)) * r;
  b.phi[2] = (wedge(0, 3) + wedge(1, 2)) * r;
  return b;
}

std::array<Mat4, 3> sd_basis_components() {
  const double r = 1.0 / std::sqrt(2.0);
  std::array<Mat4, 3> psi;
  psi[0] = (wedge(0, 1) + wedge(2, 3)) * r;
  psi[1] = (wedge(0, 2) + wedge(1, 3)) * r;
  psi[2] = (wedge(0, 3) - wedge(1, 2)) * r;
  return psi;
}

double form_pairing(const Mat4& a, const Mat4& b) {
  Mat4 b_up = kEta4 * b * kEta4;
  return 0.5 * (a.transpose() * b_up).trace();
}

Mat4 hodge_star(const Mat4& a) {
  // (*a)_{ab} = 1/2 eps_{abcd} a^{cd}, eps_{1234} = +1 on oriented frames.
  Mat4 up = kEta4 * a * kEta4;
  Mat4 out = Mat4::Zero();
  static const int perm[24][5] = {
      {0, 1, 2, 3, +1}, {0, 1, 3, 2, -1}, {0, 2, 1, 3, -1}, {0, 2, 3, 1, +1},
      {0, 3, 1, 2, +1}, {0, 3, 2, 1, -1}, {1, 0, 2, 3, -1}, {1, 0, 3, 2, +1},
      {1, 2, 0, 3, +1}, {1, 2, 3, 0, -1}, {1, 3, 0, 2, -1}, {1, 3, 2, 0, +1},
      {2, 0, 1, 3, +1}, {2, 0, 3, 1, -1}, {2, 1, 0, 3, -1}, {2, 1, 3, 0, +1},
      {2, 3, 0, 1, +1}, {2, 3, 1, 0, -1}, {3, 0, 1, 2, -1}, {3, 0, 2, 1, +1},
      {3, 1, 0, 2, +1}, {3, 1, 2, 0, -1}, {3, 2, 0, 1, -1}, {3, 2, 1, 0, +1}};
  for (const auto& p : perm) {
    out(p[0], p[1]) += 0.5 * p[4] * up(p[2], p[3]);
  }
  return out;
}

std::array<CVec4, 2> beta_plane_coeffs(cdouble zeta) {
  cdouble z2 = zeta * zeta;
  CVec4 c1(z2 + 1.0, cdouble(0.0), -2.0 * zeta, z2 - 1.0);
  CVec4 c2(cdouble(0.0), z2 + 1.0, z2 - 1.0, 2.0 * zeta);
  return {c1, c2};
}

std::array<Vec4, 2> beta_plane_coeffs(double zeta) {
  auto c = beta_plane_coeffs(cdouble(zeta, 0.0));
  return {c[0].real(), c[1].real()};
}

std::array<Tangent4, 2> beta_plane_span(const Frame4& frame, double zeta) {
  auto c = beta_plane_coeffs(zeta);
  std::array<Tangent4, 2> span;
  for (int k = 0; k < 2; ++k) {
    Tangent4 t;
    for (int i = 0; i < 4; ++i) t = t + frame.e[i] * c[k][i];
    span[k] = t;
  }
  return span;
}

}  // namespace zollfrei::manifold
