#include <algorithm>
#include <limits>

#include "zollfrei/geodesic.hpp"

namespace zollfrei::geodesic {

namespace internal {

// Dormand-Prince 5(4) tableau.
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
constexpr double kB5[7] = {35.0 / 384,      0.0,        500.0 / 1113, 125.0 / 192,
                           -2187.0 / 6784,  11.0 / 84,  0.0};
constexpr double kB4[7] = {5179.0 / 57600,  0.0,        7571.0 / 16695,
                           393.0 / 640,     -92097.0 / 339200,
                           187.0 / 2100,    1.0 / 40};

}  // namespace internal

Tangent4 normalize_affine(const Tangent4& v) {
  double speed = v.u.norm();
  if (speed < 1e-14) {
    throw degeneracy_error("normalize_affine: first-factor speed vanishes");
  }
  return v * (1.0 / speed);
}

Tangent4 random_null_direction(const MetricField& g, const Point4& p,
                               std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  for (int attempt = 0; attempt < 64; ++attempt) {
    Vec3 u(n(rng), n(rng), n(rng));
    Vec3 w(n(rng), n(rng), n(rng));
    u -= p.x * p.x.dot(u);
    w -= p.y * p.y.dot(w);
    if (u.norm() < 1e-6 || w.norm() < 1e-6) continue;
    Tangent4 a(u.normalized(), Vec3::Zero());
    Tangent4 b(Vec3::Zero(), w.normalized());
    double A = g.g(p, a, a);
    double B = g.g(p, a, b);
    double C = g.g(p, b, b);
    double disc = B * B - A * C;
    if (disc <= 0.0 || std::fabs(C) < 1e-12) continue;
    double tau = (-B + std::sqrt(disc)) / C;
    if (std::fabs(tau) < 1e-8) tau = (-B - std::sqrt(disc)) / C;
    if (std::fabs(tau) < 1e-8) continue;
    return normalize_affine(a + b * tau);
  }
  throw degeneracy_error("random_null_direction: no null combination found");
}

Flow::Flow(const MetricField& g, double tol) : g_(g), tol_(tol) {}

bool Flow::advance(State& state, double dt,
                   const std::function<void(double, const State&)>& step_sink,
                   double t0) {
  using Y = Eigen::Matrix<double, 8, 1>;
  double t = 0.0;
  double h_ctrl = std::min(0.05, dt);
  const double h_min = 1e-12 * std::max(1.0, dt);

  while (t < dt * (1.0 - 1e-15)) {
    double h = std::min(h_ctrl, dt - t);
    ChartFrame chart = ChartFrame::at(state.p);
    Y y0;
    y0.head<4>().setZero();
    y0.tail<4>() = chart.components(state.v);

    auto rhs = [&](const Y& y) {
      Vec4 s = y.head<4>();
      Vec4 u = y.tail<4>();
      auto Gam = manifold::christoffel(g_, chart, s, 0.0);
      Y dy;
      dy.head<4>() = u;
      for (int m = 0; m < 4; ++m) dy[4 + m] = -u.dot(Gam[m] * u);
      return dy;
    };

    Y k[7];
    Y y5 = y0, y4 = y0;
    double err = std::numeric_limits<double>::infinity();
    try {
      k[0] = rhs(y0);
      for (int i = 1; i < 7; ++i) {
        Y yi = y0;
        for (int j = 0; j < i; ++j) yi += h * internal::kA[i][j] * k[j];
        k[i] = rhs(yi);
      }
      for (int i = 0; i < 7; ++i) {
        y5 += h * internal::kB5[i] * k[i];
        y4 += h * internal::kB4[i] * k[i];
      }
      err = 0.0;
      for (int i = 0; i < 8; ++i) {
        double scale = tol_ * (1.0 + std::max(std::fabs(y0[i]), std::fabs(y5[i])));
        err += sqr((y5[i] - y4[i]) / scale);
      }
      err = std::sqrt(err / 8.0);
      if (!std::isfinite(err)) err = std::numeric_limits<double>::infinity();
    } catch (const domain_error&) {
      // Metric evaluated outside its chart domain; treat as a rejected step.
    }

    if (err <= 1.0) {
      state.p = chart.point(y5.head<4>());
      state.p.renormalize();
      state.v = chart.push(y5.head<4>(), y5.tail<4>());
      t += h;
      if (step_sink) step_sink(t0 + t, state);
    }
    double factor = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
    h_ctrl = h * std::min(5.0, std::max(0.2, factor));
    if (h_ctrl < h_min) return false;
  }
  return true;
}

GeodesicTrace integrate_null_geodesic(const MetricField& g, const Point4& p,
                                      const Tangent4& v, double length,
                                      double tol) {
  double scale = std::max(1.0, v.ambient().squaredNorm());
  if (std::fabs(g.g(p, v, v)) > 1e-10 * scale) {
    throw domain_error("integrate_null_geodesic: initial vector is not null");
  }
  GeodesicTrace trace;
  trace.tolerance = tol;
  trace.samples.push_back({0.0, p, v});

  Flow flow(g, tol);
  Flow::State st{p, v};
  auto sink = [&](double t, const Flow::State& s) {
    trace.samples.push_back({t, s.p, s.v});
    trace.max_null_drift =
        std::max(trace.max_null_drift, std::fabs(g.g(s.p, s.v, s.v)));
  };
  trace.complete = flow.advance(st, length, sink);
  return trace;
}

namespace {

// Position plus oriented-direction gap between two states.
double state_distance(const Flow::State& a, const Flow::State& b) {
  Vec6 dp = a.p.ambient() - b.p.ambient();
  Vec6 da = a.v.ambient().normalized() - b.v.ambient().normalized();
  return std::sqrt(dp.squaredNorm() + da.squaredNorm());
}

}  // namespace

std::vector<ClosureReport> zollfrei_closure_test(const MetricField& g,
                                                 int n_samples,
                                                 std::uint64_t seed, double tol,
                                                 double max_length,
                                                 double integrator_tol,
                                                 int workers) {
  if (n_samples < 1) throw domain_error("zollfrei_closure_test: n_samples < 1");
  std::vector<ClosureReport> reports(n_samples);

  parallel_for(n_samples, workers, [&](std::size_t i) {
    std::mt19937_64 rng = make_rng(seed, i);
    Point4 p = Point4::random(rng);
    Tangent4 v = random_null_direction(g, p, rng);

    GeodesicTrace trace = integrate_null_geodesic(g, p, v, max_length, integrator_tol);
    Flow::State start{p, v};

    const double t_min = 1.0;
    std::vector<double> dist(trace.samples.size(),
                             std::numeric_limits<double>::infinity());
    for (std::size_t j = 1; j < trace.samples.size(); ++j) {
      if (trace.samples[j].t < t_min) continue;
      Flow::State s{trace.samples[j].p, trace.samples[j].v};
      dist[j] = state_distance(s, start);
    }

    // Candidate returns: every local minimum of the sampled distance.  The
    // earliest one that refines below tolerance is the period; a closed
    // geodesic re-closes at every multiple, so the global minimum alone may
    // land on a later lap.
    std::vector<std::size_t> candidates;
    for (std::size_t j = 1; j < trace.samples.size(); ++j) {
      if (!std::isfinite(dist[j])) continue;
      double left = j > 0 ? dist[j - 1] : std::numeric_limits<double>::infinity();
      double right = j + 1 < dist.size() ? dist[j + 1]
                                         : std::numeric_limits<double>::infinity();
      if (dist[j] <= left && dist[j] <= right) candidates.push_back(j);
    }
    // Screen plateau wiggles: keep near-return minima, or failing that the
    // global minimum alone.
    std::vector<std::size_t> close_by;
    for (std::size_t j : candidates) {
      if (dist[j] < 0.5) close_by.push_back(j);
    }
    if (close_by.empty() && !candidates.empty()) {
      close_by.push_back(*std::min_element(
          candidates.begin(), candidates.end(),
          [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; }));
    }
    candidates.swap(close_by);

    ClosureReport rep;
    if (candidates.empty()) {
      reports[i] = rep;
      return;
    }

    Flow flow(g, integrator_tol);
    auto refine = [&](std::size_t best_j) {
      std::size_t lo_j = best_j > 1 ? best_j - 1 : best_j;
      std::size_t hi_j = std::min(best_j + 1, trace.samples.size() - 1);
      double lo = trace.samples[lo_j].t;
      double hi = trace.samples[hi_j].t;
      Flow::State base{trace.samples[lo_j].p, trace.samples[lo_j].v};
      auto dist_at = [&](double t) {
        Flow::State s = base;
        if (t > lo) flow.advance(s, t - lo);
        return state_distance(s, start);
      };
      const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
      double a = lo, b = hi;
      double c = b - gr * (b - a), d = a + gr * (b - a);
      double fc = dist_at(c), fd = dist_at(d);
      for (int it = 0; it < 60 && (b - a) > 1e-13 * std::max(1.0, hi); ++it) {
        if (fc < fd) {
          b = d;
          d = c;
          fd = fc;
          c = b - gr * (b - a);
          fc = dist_at(c);
        } else {
          a = c;
          c = d;
          fc = fd;
          d = a + gr * (b - a);
          fd = dist_at(d);
        }
      }
      double t_star = 0.5 * (a + b);
      return std::pair<double, double>(t_star, dist_at(t_star));
    };

    for (std::size_t j : candidates) {
      auto [t_star, gap] = refine(j);
      if (gap < tol) {
        rep.period_estimate = t_star;
        rep.endpoint_gap = gap;
        rep.closed = trace.complete;
        reports[i] = rep;
        return;
      }
      if (rep.period_estimate == 0.0 || gap < rep.endpoint_gap) {
        rep.period_estimate = t_star;
        rep.endpoint_gap = gap;
      }
    }
    rep.closed = false;
    reports[i] = rep;
  });
  return reports;
}

}  // namespace zollfrei::geodesic
