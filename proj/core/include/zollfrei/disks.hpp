#pragma once

#include <array>
#include <vector>

#include "zollfrei/rp3.hpp"
#include "zollfrei/util.hpp"

namespace zollfrei::disks {

struct SolveConfig {
  int modes = 32;        // Fourier truncation of the boundary gauge curves
  double tol = 1e-10;    // max-norm target for the collocation residual
  int max_newton = 30;
  double min_denominator = 1e-6;   // chart degeneracy guard
  double min_boundary_gap = 0.05;  // boundary curve must stay off the anchor
};

// One holomorphic disk with boundary on the embedded real slice.  The
// extension is stored through its nonnegative Fourier modes only, so it is
// holomorphic by representation; the boundary curve is carried separately
// as a curve in the real slice, and the quality of the solution is the gap
// between the two along the boundary circle.
struct DiskSolution {
  rp3::QuadricPoint q;         // interior anchor, the value at zeta = 0
  Mat4 rotation;               // chart-moving rotation stored with the disk
  int modes = 0;
  std::vector<CVec3> fourier;  // extension modes k = 0..modes, rotated chart
  std::vector<Vec4> gamma;     // boundary lifts at the collocation nodes
  VecX gauge;                  // three real series driving the boundary curve
  double residual = 0.0;       // max boundary distance, extension vs curve
  int newton_steps = 0;

  int nodes() const { return 2 * modes + 1; }
  // Value of the stored extension in the rotated chart, |zeta| <= 1.
  CVec3 eval_chart(cdouble zeta) const;
  // Homogeneous coordinates in the original frame.
  CVec4 eval(cdouble zeta) const;
  // Gauge curve between collocation nodes (trigonometric evaluation).
  Vec4 boundary_lift(double theta) const;
};

// The closed-form disk of the unperturbed slice packaged as a solution.
DiskSolution round_disk(const rp3::QuadricPoint& q, int modes);

// Newton iteration on the boundary gauge curves; the residual is the
// negative-frequency content of the chart image plus the anchor and phase
// conditions.  seed == nullptr starts from the round disk.
DiskSolution solve_disk(const rp3::TotallyRealEmbedding& P,
                        const rp3::QuadricPoint& q, const DiskSolution* seed,
                        const SolveConfig& cfg);

// Winding number of det^2 of a frame of the embedded slice's tangent
// spaces along the boundary, pushed to the rotated chart.
int maslov_index(const DiskSolution& disk, const rp3::TotallyRealEmbedding& P);

// Windings of the squared diagonal entries of the coordinate-aligned
// boundary frame of the standard disk in the unperturbed slice.
std::array<int, 3> round_partial_indices(int samples = 256);

// Argument-principle count of quadric meetings inside the disk; 1 means
// the disk crosses the quadric at its anchor only.
int quadric_winding(const DiskSolution& disk);

// Fitted geometric decay rate of the extension modes; below 1 certifies
// resolution of an analytic disk.
double spectral_decay(const DiskSolution& disk);

}  // namespace zollfrei::disks
