#include "zollfrei/rp3.hpp"

#include <cmath>
#include <complex>
#include <fstream>
#include <random>
#include <vector>

#include <json.hpp>

namespace zollfrei::rp3 {
namespace {

using poly::Poly4;

std::array<Mat4, 3> build_frames() {
  std::array<Mat4, 3> E;
  for (auto& m : E) m.setZero();
  // i: (x0, x1, x2, x3) -> (-x1, x0, -x3, x2)
  E[0](0, 1) = -1; E[0](1, 0) = 1; E[0](2, 3) = -1; E[0](3, 2) = 1;
  // j: -> (-x2, x3, x0, -x1)
  E[1](0, 2) = -1; E[1](1, 3) = 1; E[1](2, 0) = 1; E[1](3, 1) = -1;
  // k: -> (-x3, -x2, x1, x0)
  E[2](0, 3) = -1; E[2](1, 2) = -1; E[2](2, 1) = 1; E[2](3, 0) = 1;
  return E;
}

// Fixed sample set shared by the norm surrogate and the defect checks, so
// the reported numbers are reproducible functionals of the field.
const std::vector<Vec4>& sample_points() {
  static const std::vector<Vec4> pts = [] {
    std::vector<Vec4> out;
    auto rng = make_rng(0x5f3c6a92u, 0);
    std::normal_distribution<double> n;
    for (int k = 0; k < 160; ++k) {
      Vec4 x(n(rng), n(rng), n(rng), n(rng));
      if (x.norm() < 1e-3) { --k; continue; }
      out.push_back(x.normalized());
    }
    return out;
  }();
  return pts;
}

Vec4 eval_on_sphere(const PolyField4& v, const Vec4& x, double t,
                    const Vec4& dir) {
  Vec4 p = (x + t * dir).normalized();
  return v.eval(p);
}

// Anti-self-dual and self-dual basis 2-forms as matrices, normalized so a
// unit decomposable plane form has coefficients of size 1/2 in each half.
struct SigmaBases {
  std::array<Mat4, 3> plus, minus;
};

const SigmaBases& sigma_bases() {
  static const SigmaBases s = [] {
    SigmaBases b;
    auto wedge = [](int i, int j) {
      Mat4 m = Mat4::Zero();
      m(i, j) = 1.0;
      m(j, i) = -1.0;
      return m;
    };
    b.plus[0] = wedge(0, 1) + wedge(2, 3);
    b.plus[1] = wedge(0, 2) - wedge(1, 3);
    b.plus[2] = wedge(0, 3) + wedge(1, 2);
    b.minus[0] = wedge(0, 1) - wedge(2, 3);
    b.minus[1] = wedge(0, 2) + wedge(1, 3);
    b.minus[2] = wedge(0, 3) - wedge(1, 2);
    return b;
  }();
  return s;
}

// <u^v, a^b> = (u.a)(v.b) - (u.b)(v.a), the half-trace pairing.
double plane_pair(const Vec4& u, const Vec4& v, const Mat4& form) {
  Mat4 uv = u * v.transpose() - v * u.transpose();
  return 0.5 * (uv.transpose() * form).trace();
}

nlohmann::json field_to_json(const PolyField4& f) {
  nlohmann::json comps = nlohmann::json::array();
  for (int i = 0; i < 4; ++i) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [mono, coeff] : f.c[i].terms()) {
      terms.push_back({{"powers", {mono[0], mono[1], mono[2], mono[3]}},
                       {"coeff", coeff}});
    }
    comps.push_back(terms);
  }
  return comps;
}

PolyField4 field_from_json(const nlohmann::json& comps) {
  if (!comps.is_array() || comps.size() != 4)
    throw domain_error("embedding file: components must be 4 term arrays");
  PolyField4 f;
  for (int i = 0; i < 4; ++i) {
    for (const auto& term : comps[i]) {
      const auto& p = term.at("powers");
      if (p.size() != 4)
        throw domain_error("embedding file: powers must have 4 entries");
      Poly4::Monomial m{p[0].get<std::uint8_t>(), p[1].get<std::uint8_t>(),
                        p[2].get<std::uint8_t>(), p[3].get<std::uint8_t>()};
      f.c[i].set_term(m, term.at("coeff").get<double>());
    }
  }
  return f;
}

}  // namespace

const std::array<Mat4, 3>& tangent_frames() {
  static const std::array<Mat4, 3> E = build_frames();
  return E;
}

TotallyRealEmbedding make_embedding(const PolyField4& ambient) {
  Poly4 radial;
  for (int j = 0; j < 4; ++j) radial += Poly4::variable(j) * ambient.c[j];
  PolyField4 v;
  for (int i = 0; i < 4; ++i) {
    v.c[i] = ambient.c[i];
    v.c[i] -= radial * Poly4::variable(i);
  }
  double odd = oddness_defect(v);
  if (odd > 1e-10)
    throw domain_error("embedding field does not descend to the quotient");
  TotallyRealEmbedding P;
  P.v = v;
  P.norm_estimate = norm_surrogate(v);
  return P;
}

TotallyRealEmbedding random_embedding(std::uint64_t seed, double target_norm) {
  auto rng = make_rng(seed, 7);
  std::normal_distribution<double> n;
  PolyField4 ambient;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      Poly4::Monomial m{0, 0, 0, 0};
      m[j] = 1;
      ambient.c[i].set_term(m, n(rng));
    }
    for (int a = 0; a < 4; ++a)
      for (int b = a; b < 4; ++b)
        for (int c = b; c < 4; ++c) {
          Poly4::Monomial m{0, 0, 0, 0};
          ++m[a]; ++m[b]; ++m[c];
          ambient.c[i].set_term(m, 0.35 * n(rng));
        }
  }
  TotallyRealEmbedding P = make_embedding(ambient);
  if (P.norm_estimate <= 0.0)
    throw degeneracy_error("random embedding field degenerated to zero");
  double scale = target_norm / P.norm_estimate;
  for (int i = 0; i < 4; ++i) P.v.c[i] = scale * P.v.c[i];
  P.norm_estimate = norm_surrogate(P.v);
  return P;
}

TotallyRealEmbedding load_embedding(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw domain_error("cannot open embedding file: " + path);
  nlohmann::json j;
  in >> j;
  if (j.value("schema", "") != "polyfield4-v1")
    throw domain_error("embedding file: unknown schema");
  PolyField4 v = field_from_json(j.at("components"));
  if (tangency_defect(v) > 1e-10)
    throw domain_error("embedding file: field is not tangent to the sphere");
  if (oddness_defect(v) > 1e-10)
    throw domain_error("embedding file: field does not descend");
  TotallyRealEmbedding P;
  P.v = v;
  P.norm_estimate = norm_surrogate(v);
  return P;
}

void save_embedding(const TotallyRealEmbedding& P, const std::string& path) {
  nlohmann::json j;
  j["schema"] = "polyfield4-v1";
  j["degree"] = P.v.degree();
  j["norm_estimate"] = P.norm_estimate;
  j["components"] = field_to_json(P.v);
  std::ofstream out(path);
  if (!out) throw domain_error("cannot write embedding file: " + path);
  out << j.dump(2) << "\n";
}

double norm_surrogate(const PolyField4& v) {
  const auto& E = tangent_frames();
  const double h = 0.05;
  double worst = 0.0;
  for (const Vec4& x : sample_points()) {
    worst = std::max(worst, v.eval(x).norm());
    for (const auto& m : E) {
      Vec4 dir = m * x;
      Vec4 f2m = eval_on_sphere(v, x, -2 * h, dir);
      Vec4 f1m = eval_on_sphere(v, x, -h, dir);
      Vec4 f0 = v.eval(x);
      Vec4 f1 = eval_on_sphere(v, x, h, dir);
      Vec4 f2 = eval_on_sphere(v, x, 2 * h, dir);
      worst = std::max(worst, ((f1 - f1m) / (2 * h)).norm());
      worst = std::max(worst, ((f1 - 2 * f0 + f1m) / (h * h)).norm());
      worst = std::max(
          worst, ((f2 - 2 * f1 + 2 * f1m - f2m) / (2 * h * h * h)).norm());
    }
  }
  return worst;
}

double tangency_defect(const PolyField4& v) {
  double worst = 0.0;
  for (const Vec4& x : sample_points())
    worst = std::max(worst, std::abs(v.eval(x).dot(x)));
  return worst;
}

double oddness_defect(const PolyField4& v) {
  double worst = 0.0;
  for (const Vec4& x : sample_points())
    worst = std::max(worst, (v.eval(-x) + v.eval(x)).norm());
  return worst;
}

CVec4 graph_embed(const Vec4& x, const Vec4& y) {
  if (std::abs(x.norm() - 1.0) > 1e-9)
    throw domain_error("graph_embed: base point must be a unit vector");
  if (std::abs(x.dot(y)) > 1e-9 * (1.0 + y.norm()))
    throw domain_error("graph_embed: displacement must be tangent");
  double s = std::sqrt(1.0 + y.squaredNorm());
  CVec4 z;
  for (int j = 0; j < 4; ++j) z(j) = cdouble(x(j), y(j) / s);
  return z;
}

CVec4 embed_point(const TotallyRealEmbedding& P, const Vec4& x) {
  return graph_embed(x, P.value(x));
}

cdouble quadric_value(const CVec4& z) {
  cdouble s = 0.0;
  for (int j = 0; j < 4; ++j) s += z(j) * z(j);
  return s;
}

CVec3 affine_chart(const CVec4& z) {
  cdouble d = z(0) + cdouble(0, 1) * z(1);
  if (std::abs(d) < 1e-12 * z.norm())
    throw degeneracy_error("affine chart: point on the excluded line");
  CVec3 a;
  a(0) = (z(0) - cdouble(0, 1) * z(1)) / d;
  a(1) = z(2) / d;
  a(2) = z(3) / d;
  return a;
}

Eigen::Matrix<cdouble, 3, 4> affine_chart_derivative(const CVec4& z) {
  cdouble d = z(0) + cdouble(0, 1) * z(1);
  if (std::abs(d) < 1e-12 * z.norm())
    throw degeneracy_error("affine chart: point on the excluded line");
  CVec3 a = affine_chart(z);
  const cdouble i(0, 1);
  Eigen::Matrix<cdouble, 3, 4> J;
  J.setZero();
  J(0, 0) = (1.0 - a(0)) / d;
  J(0, 1) = -i * (1.0 + a(0)) / d;
  J(1, 0) = -a(1) / d;
  J(1, 1) = -i * a(1) / d;
  J(1, 2) = 1.0 / d;
  J(2, 0) = -a(2) / d;
  J(2, 1) = -i * a(2) / d;
  J(2, 3) = 1.0 / d;
  return J;
}

CVec4 affine_lift(const CVec3& a) {
  const cdouble i(0, 1);
  CVec4 z;
  z(0) = 1.0 + a(0);
  z(1) = i * (a(0) - 1.0);
  z(2) = 2.0 * a(1);
  z(3) = 2.0 * a(2);
  return z;
}

CVec4 QuadricPoint::representative() const {
  CVec4 w;
  for (int j = 0; j < 4; ++j) w(j) = cdouble(u(j), v(j));
  return w;
}

QuadricPoint quadric_point(const CVec4& w) {
  double scale = w.squaredNorm();
  if (scale < 1e-300) throw degeneracy_error("quadric point: zero vector");
  if (std::abs(quadric_value(w)) > 1e-8 * scale)
    throw degeneracy_error("quadric point: representative off the quadric");
  Vec4 a = w.real(), b = w.imag();
  QuadricPoint q;
  q.u = a.normalized();
  Vec4 b_perp = b - b.dot(q.u) * q.u;
  if (b_perp.norm() < 1e-10 * std::sqrt(scale))
    throw degeneracy_error("quadric point: degenerate plane data");
  q.v = b_perp.normalized();
  return q;
}

QuadricPoint quadric_from_spheres(const Vec3& x, const Vec3& y) {
  if (std::abs(x.norm() - 1.0) > 1e-9 || std::abs(y.norm() - 1.0) > 1e-9)
    throw domain_error("sphere labels must be unit vectors");
  const auto& s = sigma_bases();
  Mat4 M = Mat4::Zero();
  for (int i = 0; i < 3; ++i)
    M += 0.5 * (x(i) * s.plus[i] + y(i) * s.minus[i]);
  int pivot = 0;
  for (int c = 1; c < 4; ++c)
    if (M.col(c).norm() > M.col(pivot).norm()) pivot = c;
  QuadricPoint q;
  q.u = M.col(pivot).normalized();
  Vec4 b = -(M * q.u);
  b -= b.dot(q.u) * q.u;
  q.v = b.normalized();
  // Unit decomposable input: the pairing with the oriented span is +-1.
  if (plane_pair(q.u, q.v, M) < 0.5)
    throw degeneracy_error("sphere labels: orientation extraction failed");
  return q;
}

std::pair<Vec3, Vec3> spheres_from_quadric(const QuadricPoint& q) {
  const auto& s = sigma_bases();
  Vec3 x, y;
  for (int i = 0; i < 3; ++i) {
    x(i) = plane_pair(q.u, q.v, s.plus[i]);
    y(i) = plane_pair(q.u, q.v, s.minus[i]);
  }
  if (std::abs(x.norm() - 1.0) > 1e-8 || std::abs(y.norm() - 1.0) > 1e-8)
    throw degeneracy_error("plane data is not orthonormal");
  return {x.normalized(), y.normalized()};
}

double alignment_angle(const QuadricPoint& q, const QuadricPoint& r) {
  cdouble c = 0.0;
  CVec4 wq = q.representative(), wr = r.representative();
  for (int j = 0; j < 4; ++j) c += std::conj(wq(j)) * wr(j);
  if (std::abs(c) < 1e-8)
    throw degeneracy_error("alignment: planes are nearly orthogonal");
  return -std::arg(c);
}

QuadricPoint rotate_in_plane(const QuadricPoint& q, double phi) {
  QuadricPoint r;
  r.u = std::cos(phi) * q.u + std::sin(phi) * q.v;
  r.v = -std::sin(phi) * q.u + std::cos(phi) * q.v;
  return r;
}

Mat4 anchor_rotation(const QuadricPoint& q) {
  std::array<Vec4, 2> rest;
  std::array<bool, 4> used{};
  for (int pick = 0; pick < 2; ++pick) {
    int best = -1;
    double best_norm = -1.0;
    Vec4 best_res = Vec4::Zero();
    for (int j = 0; j < 4; ++j) {
      if (used[j]) continue;
      Vec4 r = Vec4::Unit(j);
      r -= r.dot(q.u) * q.u;
      r -= r.dot(q.v) * q.v;
      for (int p = 0; p < pick; ++p) r -= r.dot(rest[p]) * rest[p];
      if (r.norm() > best_norm) {
        best_norm = r.norm();
        best = j;
        best_res = r;
      }
    }
    used[best] = true;
    rest[pick] = best_res.normalized();
  }
  Mat4 R;
  R.row(0) = q.u;
  R.row(1) = -q.v;
  R.row(2) = rest[0];
  R.row(3) = rest[1];
  if (R.determinant() < 0) R.row(3) = -R.row(3);
  return R;
}

CVec4 round_disk_point(const QuadricPoint& q, cdouble zeta) {
  CVec4 z;
  const cdouble i(0, 1);
  for (int j = 0; j < 4; ++j)
    z(j) = (1.0 + zeta) * q.u(j) + i * (1.0 - zeta) * q.v(j);
  return z;
}

Vec4 round_boundary_lift(const QuadricPoint& q, double theta) {
  return std::cos(theta / 2) * q.u + std::sin(theta / 2) * q.v;
}

}  // namespace zollfrei::rp3
