#pragma once

#include <array>
#include <functional>

#include "zollfrei/manifold.hpp"

namespace zollfrei::twistor {

using manifold::Frame4;
using manifold::MetricField;
using manifold::Point4;
using manifold::Tangent4;

// Local pseudo-orthonormal frame field; connection components depend on the
// field through its first derivatives, so operations take the field rather
// than a single frame value.
using FrameField = std::function<Frame4(const Point4&)>;

// Deterministic Gram-Schmidt frame at every point (the default gauge).
// Pointwise rule; the chart-leg convention switches reference axis along
// |x3| = 0.9, so this field is not differentiable there.
FrameField standard_frame_field(const MetricField& g);
// Gauge that orthonormalizes the coordinate basis of one chart anchored at
// p: smooth on the anchor's hemispheres and equal to the standard frame at
// p itself.  Differencing operations use this internally.
FrameField anchored_frame_field(const MetricField& g, const Point4& p);
// Stereographic coordinate frame; pseudo-orthonormal for the flat chart
// metric only.
FrameField coordinate_frame_field();

// Connection 1-form of the anti-self-dual form bundle in a given frame
// gauge: nabla phi_j = theta^k_j (x) phi_k with values in so(1,2):
//   theta^1_2 = theta^2_1,  theta^1_3 = theta^3_1,  theta^2_3 = -theta^3_2,
// zero diagonal.  Stored symmetrized; symmetry_defect records the measured
// violation before symmetrization.
struct ConnectionForms {
  std::array<std::array<Vec4, 3>, 3> theta{};  // theta[k][j][l] = theta^k_j(e_l)
  Frame4 frame;
  double symmetry_defect = 0.0;

  double at(int k, int j, int l) const { return theta[k][j][l]; }
  // 1-form theta^k_j contracted with a frame-component vector.
  cdouble pair(int k, int j, const CVec4& c) const {
    cdouble acc = 0.0;
    for (int l = 0; l < 4; ++l) acc += theta[k][j][l] * c[l];
    return acc;
  }
};

ConnectionForms connection_forms(const MetricField& g, const FrameField& frames,
                                 const Point4& p, double step = 0.0);

// Horizontal pair at (p, zeta): frame and d/dzeta components of
//   w1 = (zeta^2+1) e1 - 2 zeta e3 + (zeta^2-1) e4 + Q1 d/dzeta,
//   w2 = (zeta^2+1) e2 + (zeta^2-1) e3 + 2 zeta e4 + Q2 d/dzeta.
struct HorizontalPair {
  CVec4 w1 = CVec4::Zero();
  CVec4 w2 = CVec4::Zero();
  cdouble q1 = 0.0;
  cdouble q2 = 0.0;
  cdouble dq1 = 0.0;  // d/dzeta of the q components, analytic
  cdouble dq2 = 0.0;
  cdouble zeta = 0.0;
};

HorizontalPair horizontal_fields(const MetricField& g, const FrameField& frames,
                                 const Point4& p, cdouble zeta,
                                 double step = 0.0);

// Norm of the component of [w1, w2] transverse to span{w1, w2} inside the
// real locus, normalized by |w1| |w2|.  Vanishes exactly when the plane
// distribution is integrable, i.e. when the metric is self-dual.
double involutivity_residual(const MetricField& g, const Point4& p, double zeta,
                             double step = 0.0);

// || w_j(g) - f^{1/2} w_j(f g) || over j, comparing component vectors in the
// mutually rescaled frame gauges.
double conformal_invariance_check(const MetricField& g,
                                  const std::function<double(const Point4&)>& f,
                                  const Point4& p, double zeta);

// Affine twistor chart of the flat model:
//   z1 = (fx1 + fy2) + (fy1 - fx2) zeta,
//   z2 = (fy1 + fx2) + (fx1 - fy2) zeta,
//   z3 = zeta.
std::array<cdouble, 3> flat_twistor_map(double fx1, double fx2, double fy1,
                                        double fy2, cdouble zeta);

}  // namespace zollfrei::twistor
