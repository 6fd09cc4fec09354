#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>

#include "zollfrei/poly.hpp"
#include "zollfrei/util.hpp"

namespace zollfrei::rp3 {

using poly::PolyField4;

// Left quaternion multiplication by i, j, k as matrices on R^4.  Each is
// orthogonal and antisymmetric; at a unit x the triple (E1 x, E2 x, E3 x)
// is an orthonormal tangent basis of the unit sphere, odd in x, so the
// frame descends to the projective quotient.
const std::array<Mat4, 3>& tangent_frames();

// Polynomial vector field tangent to the unit three-sphere and odd under
// the antipodal map, the graph datum of a perturbed real slice.  Built by
// tangential projection of an odd ambient field, so tangency at unit x is
// an identity rather than a fitted property.
struct TotallyRealEmbedding {
  PolyField4 v;
  double norm_estimate = 0.0;

  Vec4 value(const Vec4& x) const { return v.eval(x); }
  Mat4 jacobian(const Vec4& x) const { return v.jacobian(x); }
};

// p(x) - (x . p(x)) x for odd ambient p; degree grows by two.
TotallyRealEmbedding make_embedding(const PolyField4& ambient);
// Odd ambient field with degree 1 and 3 terms, coefficients drawn from the
// seeded generator, scaled so norm_estimate lands on target exactly.
TotallyRealEmbedding random_embedding(std::uint64_t seed, double target_norm);

TotallyRealEmbedding load_embedding(const std::string& path);
void save_embedding(const TotallyRealEmbedding& P, const std::string& path);

// Percent-level sampled surrogate for a third-order norm: max over a fixed
// grid of the field value and its first three directional differences.
double norm_surrogate(const PolyField4& v);
// max |v(x) . x| over sampled unit x; identically at rounding level for
// projected fields.
double tangency_defect(const PolyField4& v);
// max |v(-x) + v(x)| over sampled unit x.
double oddness_defect(const PolyField4& v);

// Graph embedding of the real slice: a unit x and a tangent displacement y
// map to the projective class of x + i y / sqrt(1 + |y|^2).  The sum of
// squared entries of that representative is 1/(1 + |y|^2) > 0, so images
// stay clear of the quadric.
CVec4 graph_embed(const Vec4& x, const Vec4& y);
CVec4 embed_point(const TotallyRealEmbedding& P, const Vec4& x);

// Sum of squared (unconjugated) entries; zero exactly on the quadric.
cdouble quadric_value(const CVec4& z);

// Affine chart on the complement of the line z1 + i z2 = 0:
//   a1 = (z1 - i z2)/(z1 + i z2),  a2 = z3/(z1 + i z2),  a3 = z4/(z1 + i z2).
// The standard real slice lands on |a1| = 1 with a2, a3 reflected through
// a1; the quadric becomes a1 + a2^2 + a3^2 = 0.
CVec3 affine_chart(const CVec4& z);
// Derivative of the chart at z, a 3x4 complex matrix.
Eigen::Matrix<cdouble, 3, 4> affine_chart_derivative(const CVec4& z);
// Homogeneous representative (1 + a1, i(a1 - 1), 2 a2, 2 a3) whose quadric
// value is 4 (a1 + a2^2 + a3^2).
CVec4 affine_lift(const CVec3& a);

// A quadric point [w] with sum w^2 = 0 carries an oriented 2-plane of R^4:
// w = u + i v forces |u| = |v| and u . v = 0, and the oriented span (u, v)
// does not depend on the representative.  Stored orthonormal.
struct QuadricPoint {
  Vec4 u = Vec4::Zero();
  Vec4 v = Vec4::Zero();

  CVec4 representative() const;
};

// Orthonormalizes a homogeneous representative; rejects inputs whose
// quadric value is not small against |w|^2.
QuadricPoint quadric_point(const CVec4& w);
// Product-sphere labels through the split of the plane's 2-form into the
// self-dual and anti-self-dual unit bases.
QuadricPoint quadric_from_spheres(const Vec3& x, const Vec3& y);
std::pair<Vec3, Vec3> spheres_from_quadric(const QuadricPoint& q);

// In-plane rotation angle aligning q's basis with r's, from the phase of
// the complex overlap of representatives.  Rotating (u, v) by phi shifts
// the boundary parameter below by 2 phi.
double alignment_angle(const QuadricPoint& q, const QuadricPoint& r);
QuadricPoint rotate_in_plane(const QuadricPoint& q, double phi);

// Rotation with R u = e1, R v = -e2, determinant +1, completed from the
// coordinate axes deterministically.  It moves the anchor to the chart
// origin and the round disk through q to a1 = zeta, a2 = a3 = 0.
Mat4 anchor_rotation(const QuadricPoint& q);

// Closed-form leaves of the unperturbed family: the disk through q is
// zeta -> [(1 + zeta) u + i (1 - zeta) v], with boundary lift
// theta -> cos(theta/2) u + sin(theta/2) v (antiperiodic; the projective
// boundary circle is closed).
CVec4 round_disk_point(const QuadricPoint& q, cdouble zeta);
Vec4 round_boundary_lift(const QuadricPoint& q, double theta);

}  // namespace zollfrei::rp3
