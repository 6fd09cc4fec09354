#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>

#include "zollfrei/util.hpp"

namespace zollfrei::manifold {

// Point of S^2 x S^2 embedded as {|x|=1} x {|y|=1} in R^3 x R^3.
struct Point4 {
  Vec3 x = Vec3(0, 0, 1);
  Vec3 y = Vec3(0, 0, 1);

  Point4() = default;
  Point4(const Vec3& x_, const Vec3& y_) : x(x_), y(y_) {}

  void renormalize() {
    x.normalize();
    y.normalize();
  }
  double embedding_defect() const {
    return std::max(std::fabs(x.norm() - 1.0), std::fabs(y.norm() - 1.0));
  }
  Vec6 ambient() const {
    Vec6 v;
    v << x, y;
    return v;
  }
  static Point4 random(std::mt19937_64& rng);
};

// Tangent vector at a Point4: (u, w) with u . x = 0, w . y = 0.
struct Tangent4 {
  Vec3 u = Vec3::Zero();
  Vec3 w = Vec3::Zero();

  Tangent4() = default;
  Tangent4(const Vec3& u_, const Vec3& w_) : u(u_), w(w_) {}

  Vec6 ambient() const {
    Vec6 v;
    v << u, w;
    return v;
  }
  Tangent4 operator+(const Tangent4& o) const { return {u + o.u, w + o.w}; }
  Tangent4 operator-(const Tangent4& o) const { return {u - o.u, w - o.w}; }
  Tangent4 operator*(double s) const { return {s * u, s * w}; }
  double tangency_defect(const Point4& p) const {
    return std::max(std::fabs(u.dot(p.x)), std::fabs(w.dot(p.y)));
  }
  static Tangent4 project(const Point4& p, const Vec6& ambient);
};

// Gnomonic tangent-plane chart centered at `base`; the workhorse local
// coordinate system for every finite-difference computation.  s = (s0,s1)
// moves the first factor along (a1,a2), (s2,s3) the second along (b1,b2):
//   x(s) = (x0 + s0 a1 + s1 a2)/|...|,  y(s) likewise.
struct ChartFrame {
  Point4 base;
  Vec3 a1, a2, b1, b2;

  static ChartFrame at(const Point4& p);

  Point4 point(const Vec4& s) const;
  // Pushforward of d/ds_i at chart position s.
  Tangent4 coordinate_vector(const Vec4& s, int i) const;
  Tangent4 push(const Vec4& s, const Vec4& ds) const;
  // d^2(point)/ds_k ds_l as an ambient displacement pair.  Mixed-factor
  // pairs vanish; closed form, no differencing.
  Tangent4 second(const Vec4& s, int k, int l) const;
  // Chart components of a tangent vector at the base point (exact there).
  Vec4 components(const Tangent4& t) const;
};

// Bilinear-form field of signature (+,+,-,-).  `eval` is the only mandatory
// piece; `ambient` supplies closed-form ambient components with first
// derivatives when the construction has them (reconstructed fields do),
// which lets the curvature and geodesic code difference one order less.
struct MetricField {
  std::function<double(const Point4&, const Tangent4&, const Tangent4&)> eval;
  int orientation = +1;  // +1 product orientation, -1 reversed convention
  double fd_step = 6e-3;  // chart step for derivative differencing

  struct AmbientJet {
    Mat6 G;                  // symmetric ambient components
    std::array<Mat6, 6> dG;  // d/d(ambient coord k), k over (x1..x3,y1..y3)
  };
  std::function<AmbientJet(const Point4&)> ambient;

  double g(const Point4& p, const Tangent4& a, const Tangent4& b) const {
    return eval(p, a, b);
  }
};

struct Frame4 {
  std::array<Tangent4, 4> e;
  Point4 base;
};

// Anti-self-dual two-form basis attached to a frame, stored as antisymmetric
// matrices of frame components.  Wedge pairing of the basis is
// diag(1,-1,-1); each element has Hodge star eigenvalue -1.
struct ASDBasis {
  std::array<Mat4, 3> phi;
  Frame4 frame;
};

// Curvature operator blocks on Lambda^2 = Lambda^+ (+) Lambda^-, stored as
// quadratic forms in the pseudo-orthonormal bases (pairing diag(1,-1,-1) on
// each summand).  "trace" for the W blocks means the Lorentz trace
// sum eta^{IJ} W_{IJ}; the plain matrix trace is not the invariant one here.
struct CurvatureDecomp {
  Mat3 Wplus = Mat3::Zero();
  Mat3 Wminus = Mat3::Zero();
  Mat3 ricci_traceless = Mat3::Zero();  // mixed Lambda^+ x Lambda^- block
  double scalar = 0.0;
  Mat6 full = Mat6::Zero();  // assembled operator form, basis (psi, phi)

  double wplus_norm() const { return Wplus.norm(); }
  double wminus_norm() const { return Wminus.norm(); }
  double mixed_norm() const { return ricci_traceless.norm(); }
};

inline const Mat3 kLorentz3 = (Mat3() << 1, 0, 0, 0, -1, 0, 0, 0, -1).finished();
inline const Mat4 kEta4 = (Mat4() << 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, -1, 0, 0, 0, 0, -1).finished();

inline double lorentz_trace(const Mat3& q) { return q(0, 0) - q(1, 1) - q(2, 2); }

// ---- basic metric operations ----

double eval_g0(const Point4& p, const Tangent4& a, const Tangent4& b);
MetricField make_g0();
MetricField make_flat_chart_metric();
MetricField make_product_nonround(double eps);
MetricField make_perturbed(std::uint64_t seed, double eps);
MetricField metric_from_expression_text(const std::string& text);
MetricField metric_from_expression_file(const std::string& path);
// Parses "g0", "flat", "product-nonround:<eps>", "perturbed:<seed>:<eps>",
// or "file:<path>".
MetricField metric_by_name(const std::string& name);

// Stereographic double chart; defined for x3 != y3.
Vec4 stereographic_chart(const Point4& p);
// Differential of the chart at p applied to t.
Vec4 stereographic_push(const Point4& p, const Tangent4& t);
// Coordinate frame d/dfx1, d/dfx2, d/dfy1, d/dfy2 of the chart at p.
Frame4 stereographic_coordinate_frame(const Point4& p);

// ---- frames and two-forms ----

// Indefinite Gram-Schmidt in seed order, then a stable reorder to signature
// pattern (+,+,-,-) and an orientation fix (swap of the last two legs) so the
// frame matches the metric's orientation convention.  A seed that is already
// pseudo-orthonormal in the required pattern and orientation returns
// unchanged.
Frame4 gram_schmidt_frame(const MetricField& g, const Point4& p,
                          const std::array<Tangent4, 4>& seed);
// Deterministic frame from the chart coordinate basis at p.
Frame4 standard_frame(const MetricField& g, const Point4& p);

ASDBasis asd_basis(const Frame4& frame);
std::array<Mat4, 3> sd_basis_components();

// Wedge pairing of two-forms in frame components: <a,b> = 1/2 a_{ij} b^{ij}.
double form_pairing(const Mat4& a, const Mat4& b);
Mat4 hodge_star(const Mat4& a);

// Null anti-self-dual plane at real parameter zeta, spanned by
//   (zeta^2+1) e1 - 2 zeta e3 + (zeta^2-1) e4,
//   (zeta^2+1) e2 + (zeta^2-1) e3 + 2 zeta e4.
// Shared formula path for the surface integrator and the horizontal lift;
// the real overload takes real parts of the complex one so both agree
// bitwise at real zeta.
std::array<CVec4, 2> beta_plane_coeffs(cdouble zeta);
std::array<Vec4, 2> beta_plane_coeffs(double zeta);
std::array<Tangent4, 2> beta_plane_span(const Frame4& frame, double zeta);

// ---- curvature ----

// Metric Gram matrix in chart coordinates at chart position s.
Mat4 chart_gram(const MetricField& g, const ChartFrame& chart, const Vec4& s);
// Christoffel symbols Gamma[m](k,l) at chart position s.
std::array<Mat4, 4> christoffel(const MetricField& g, const ChartFrame& chart,
                                const Vec4& s, double step);

struct RiemannData {
  // R[a][b](c,d) = R_{abcd}, frame components, pairs (ab),(cd) antisymmetric.
  std::array<std::array<Mat4, 4>, 4> R;
  double scalar = 0.0;
  Mat4 ricci = Mat4::Zero();  // frame components
};
RiemannData riemann_frame(const MetricField& g, const Point4& p,
                          const Frame4& frame, double step);

CurvatureDecomp curvature_decompose(const MetricField& g, const Point4& p,
                                    double step = 0.0);

// max over samples of |W-| / (|W+| + |ricci0| + |s| + eps).
double selfdual_residual(const MetricField& g, const std::vector<Point4>& samples,
                         double step = 0.0, double eps = 1.0);

void check_signature(const MetricField& g, const Point4& p);

}  // namespace zollfrei::manifold
