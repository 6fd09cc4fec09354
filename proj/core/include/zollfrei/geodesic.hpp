#pragma once

#include <cstdint>
#include <vector>

#include "zollfrei/manifold.hpp"

namespace zollfrei::geodesic {

using manifold::ChartFrame;
using manifold::Frame4;
using manifold::MetricField;
using manifold::Point4;
using manifold::Tangent4;

struct TraceSample {
  double t = 0.0;
  Point4 p;
  Tangent4 v;
};

// Sampled geodesic; one sample per accepted integrator step.
struct GeodesicTrace {
  std::vector<TraceSample> samples;
  double tolerance = 1e-10;
  bool complete = true;          // false when the step size collapsed
  double max_null_drift = 0.0;   // max |g(v,v)| over the samples
};

struct ClosureReport {
  double period_estimate = 0.0;
  double endpoint_gap = 0.0;
  bool closed = false;
};

struct SurfaceNode {
  Point4 p;
  std::array<Tangent4, 2> plane;  // transported spanning pair
  double r = 0.0;
  double theta = 0.0;
};

// Geodesic polar grid swept out by the radial null geodesics of a null
// plane; grid[i][k] is direction i, radius step k (k = 0 is the base point).
struct BetaSurfacePatch {
  std::vector<std::vector<SurfaceNode>> grid;
  std::array<Tangent4, 2> base_plane;
  Point4 base;
  double zeta = 0.0;
  double extent = 0.0;
  double max_isotropy_defect = 0.0;
};

// One adaptive embedded RK5(4) step per tangent chart.  `advance` moves the
// state by dt; `step_sink` (when set) receives every accepted step.
class Flow {
 public:
  Flow(const MetricField& g, double tol);

  struct State {
    Point4 p;
    Tangent4 v;
  };

  // Advances by dt > 0.  Returns false when the step size collapses before
  // reaching the target; `state` then holds the furthest point reached.
  bool advance(State& state, double dt,
               const std::function<void(double, const State&)>& step_sink = nullptr,
               double t0 = 0.0);

 private:
  const MetricField& g_;
  double tol_;
};

// Scales v so the first-factor Euclidean speed is 1 (the affine gauge all
// reported periods use).
Tangent4 normalize_affine(const Tangent4& v);

// Random null tangent at p: a positive first-factor direction combined with a
// second-factor direction, balanced to g(v,v) = 0 and put in the affine gauge.
Tangent4 random_null_direction(const MetricField& g, const Point4& p,
                               std::mt19937_64& rng);

GeodesicTrace integrate_null_geodesic(const MetricField& g, const Point4& p,
                                      const Tangent4& v, double length,
                                      double tol = 1e-10);

// For each seeded random null initial condition: integrate up to max_length,
// locate the best return to the initial (position, oriented direction) state,
// and report the gap and the parameter of closest return.
std::vector<ClosureReport> zollfrei_closure_test(const MetricField& g,
                                                 int n_samples,
                                                 std::uint64_t seed, double tol,
                                                 double max_length = 25.0,
                                                 double integrator_tol = 1e-10,
                                                 int workers = 1);

BetaSurfacePatch integrate_beta_surface(const MetricField& g, const Point4& p,
                                        double zeta, double extent, int n,
                                        double tol = 1e-10);

int surface_intersection_count(const BetaSurfacePatch& S1,
                               const BetaSurfacePatch& S2, double tol);

// Solves f'' + kappa f = 0 along a radial geodesic of the patch for two
// independent initial conditions and returns the relative drift of the
// Wronskian f1 f2' - f1' f2, which the projective-flatness argument requires
// to be constant.  kappa is the tangential curvature coefficient of
// R(v,w)v in the transported plane basis.
double wronskian_check(const MetricField& g, const BetaSurfacePatch& patch,
                       const GeodesicTrace& geodesic);

}  // namespace zollfrei::geodesic
