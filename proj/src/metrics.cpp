#include "contactdyn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/minima.hpp>

#include "contactdyn/parallel.hpp"

namespace contactdyn {

namespace {

// Brent search for the maximum of sign * f on [a, b].
double brent_extremum(const std::function<double(double)>& f, double a, double b, double sign,
                      int iterations, double& best_x) {
  std::uintmax_t it = static_cast<std::uintmax_t>(iterations);
  const auto r = boost::math::tools::brent_find_minima([&](double s) { return -sign * f(s); }, a, b,
                                                       std::numeric_limits<double>::digits / 2, it);
  best_x = r.first;
  return -sign * r.second;
}

// Coordinate-wise refinement of an extremum found at grid node x0.
double refine_extremum(const TimeScalarField& H, const QuadratureGrid& grid, double t, Point x,
                       double v0, double sign, int iterations) {
  double best = v0;
  for (std::size_t a = 0; a < grid.axes.size(); ++a) {
    const double lo = std::max(x[a] - grid.spacing[a], grid.limits[a].first);
    const double hi = std::min(x[a] + grid.spacing[a], grid.limits[a].second);
    if (!(hi > lo)) continue;
    Point p = x;
    auto f = [&](double s) {
      p[a] = s;
      return H(t, p);
    };
    double xs = x[a];
    const double v = brent_extremum(f, lo, hi, sign, iterations, xs);
    if (sign * v > sign * best) {
      best = v;
      x[a] = xs;
    }
  }
  return best;
}

std::vector<double> volume_weights(const ChartedManifold& M, const QuadratureGrid& grid,
                                   const NormOptions& opts) {
  if (!opts.form_scale) return grid.weights;
  std::vector<double> w(grid.size());
  double total = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    w[i] = grid.weights[i] * std::exp(M.n() * (*opts.form_scale)(0.0, grid.nodes[i]));
    total += w[i];
  }
  for (double& v : w) v /= total;
  return w;
}

TimeSlice slice_from_values(const TimeScalarField& H, const QuadratureGrid& grid,
                            const std::vector<double>& weights, const std::vector<double>& vals,
                            double t, const NormOptions& opts) {
  TimeSlice s;
  s.t = t;
  std::size_t imax = 0, imin = 0;
  double mean = 0.0;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    mean += weights[i] * vals[i];
    if (vals[i] > vals[imax]) imax = i;
    if (vals[i] < vals[imin]) imin = i;
  }
  s.mean = mean;
  s.grid_max = s.max = vals[imax];
  s.grid_min = s.min = vals[imin];
  if (opts.refine) {
    s.max = refine_extremum(H, grid, t, grid.nodes[imax], vals[imax], 1.0, opts.refine_iterations);
    s.min = refine_extremum(H, grid, t, grid.nodes[imin], vals[imin], -1.0, opts.refine_iterations);
  }
  return s;
}

TimeSlice constant_slice(const TimeScalarField& H, const QuadratureGrid& grid, double t) {
  TimeSlice s;
  s.t = t;
  const double v = H(t, grid.nodes.front());
  s.max = s.min = s.grid_max = s.grid_min = s.mean = v;
  return s;
}

TimeSlice slice_with_weights(const TimeScalarField& H, const QuadratureGrid& grid,
                             const std::vector<double>& weights, double t, const NormOptions& opts) {
  if (H.space_constant()) return constant_slice(H, grid, t);
  std::vector<double> vals(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { vals[i] = H(t, grid.nodes[i]); });
  return slice_from_values(H, grid, weights, vals, t, opts);
}

// Natural cubic spline through (x_i, y_i).
class CubicSpline {
 public:
  CubicSpline(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    m_.assign(n, 0.0);
    if (n < 3) return;
    std::vector<double> a(n, 0.0), b(n, 1.0), c(n, 0.0), r(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
      a[i] = h0;
      b[i] = 2.0 * (h0 + h1);
      c[i] = h1;
      r[i] = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
    }
    for (std::size_t i = 1; i < n; ++i) {
      const double w = a[i] / b[i - 1];
      b[i] -= w * c[i - 1];
      r[i] -= w * r[i - 1];
    }
    m_[n - 1] = r[n - 1] / b[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) m_[i] = (r[i] - c[i] * m_[i + 1]) / b[i];
  }

  double operator()(double t) const {
    if (x_.size() == 1) return y_[0];
    std::size_t i = static_cast<std::size_t>(
        std::upper_bound(x_.begin(), x_.end(), t) - x_.begin());
    i = std::clamp<std::size_t>(i, 1, x_.size() - 1) - 1;
    const double h = x_[i + 1] - x_[i];
    const double A = (x_[i + 1] - t) / h, B = (t - x_[i]) / h;
    return A * y_[i] + B * y_[i + 1] +
           ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[i + 1]) * h * h / 6.0;
  }

 private:
  std::vector<double> x_, y_, m_;
};

}  // namespace

TimeSlice field_slice(const ChartedManifold& M, const TimeScalarField& H, const QuadratureGrid& grid,
                      double t, const NormOptions& opts) {
  if (grid.size() == 0) throw Error(ErrorKind::ResolutionTooCoarse, "empty grid");
  return slice_with_weights(H, grid, volume_weights(M, grid, opts), t, opts);
}

std::vector<std::pair<double, double>> time_quadrature(int intervals,
                                                       const std::vector<double>& breakpoints) {
  std::vector<double> cuts = {0.0};
  for (double b : breakpoints)
    if (b > 0.0 && b < 1.0) cuts.push_back(b);
  cuts.push_back(1.0);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<std::pair<double, double>> out;
  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
    const double a = cuts[p], b = cuts[p + 1];
    int n = static_cast<int>(std::ceil(intervals * (b - a) - 1e-9));
    n = std::max(2, n + (n % 2));
    const double h = (b - a) / n;
    for (int i = 0; i <= n; ++i) {
      const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      const double t = (i == n) ? b : a + i * h;
      if (i == 0 && !out.empty()) {
        out.back().second += w * h / 3.0;
        continue;
      }
      out.push_back({t, w * h / 3.0});
    }
  }
  return out;
}

NormReport contact_norm(const ChartedManifold& M, const TimeScalarField& H, const QuadratureGrid& grid,
                        const NormOptions& opts) {
  if (opts.t_samples < 64 || opts.t_samples % 2 != 0)
    throw Error(ErrorKind::ConfigError, "t_samples must be even and at least 64");
  if (grid.size() == 0) throw Error(ErrorKind::ResolutionTooCoarse, "empty grid");
  const std::vector<double> weights = volume_weights(M, grid, opts);
  const auto quad = time_quadrature(opts.t_samples, H.time_breakpoints());

  NormReport r;
  r.t_samples = opts.t_samples;
  for (const auto& ax : grid.axes) r.grid_shape.push_back(static_cast<int>(ax.size()));
  r.series.resize(quad.size());
  if (H.autonomous()) {
    const TimeSlice s = slice_with_weights(H, grid, weights, 0.0, opts);
    for (std::size_t i = 0; i < quad.size(); ++i) {
      r.series[i] = s;
      r.series[i].t = quad[i].first;
    }
  } else if (H.space_constant()) {
    for (std::size_t i = 0; i < quad.size(); ++i) r.series[i] = constant_slice(H, grid, quad[i].first);
  } else {
    std::vector<double> times(quad.size());
    for (std::size_t i = 0; i < quad.size(); ++i) times[i] = quad[i].first;
    std::vector<std::vector<double>> table(grid.size());  // [node][time]
    parallel_for(grid.size(), [&](std::size_t n) { table[n] = H.series(grid.nodes[n], times); });
    std::vector<double> vals(grid.size());
    for (std::size_t i = 0; i < quad.size(); ++i) {
      for (std::size_t n = 0; n < grid.size(); ++n) vals[n] = table[n][i];
      r.series[i] = slice_from_values(H, grid, weights, vals, times[i], opts);
    }
  }

  double grid_total = 0.0;
  for (std::size_t i = 0; i < quad.size(); ++i) {
    const TimeSlice& s = r.series[i];
    const double w = quad[i].second;
    r.osc_integral += w * s.osc();
    r.mean_abs_integral += w * std::abs(s.mean);
    r.mean_integral += w * s.mean;
    grid_total += w * ((s.grid_max - s.grid_min) + std::abs(s.mean));
    r.sup_variant = std::max(r.sup_variant, s.osc() + std::abs(s.mean));
  }
  r.total = r.osc_integral + r.mean_abs_integral;
  r.refinement_delta = r.total > 0.0 ? (r.total - grid_total) / r.total : 0.0;
  if (r.refinement_delta > opts.max_refinement_delta)
    throw Error(ErrorKind::ResolutionTooCoarse,
                "refinement changed the norm by " + std::to_string(100.0 * r.refinement_delta) + "%");
  return r;
}

double sup_norm(const std::vector<std::vector<double>>& conformal) {
  double m = 0.0;
  for (const auto& row : conformal)
    for (double h : row) m = std::max(m, std::abs(h));
  return m;
}

double sup_norm(const ContactDynamicalSystem& A) { return sup_norm(A.conformal); }

C0Distance c0_distance(const ContactDynamicalSystem& A, const ContactDynamicalSystem& B,
                       const std::vector<Point>& probes, const std::vector<double>& times) {
  if (!A.manifold.same_chart(B.manifold))
    throw Error(ErrorKind::ManifoldMismatch, "systems live on different manifolds");
  if (!A.engine || !B.engine) throw Error(ErrorKind::FlowQueryFailure, "system has no flow engine");
  const ChartedManifold& M = A.manifold;
  std::vector<double> fwd(times.size(), 0.0), bwd(times.size(), 0.0);
  parallel_for(times.size(), [&](std::size_t k) {
    const double t = times[k];
    const FlowMap fa(A, t), fb(B, t);
    for (const Point& p : probes) {
      fwd[k] = std::max(fwd[k], M.chart_distance(fa(p).point, fb(p).point));
      bwd[k] = std::max(bwd[k], M.chart_distance(fa.inverse(p).point, fb.inverse(p).point));
    }
  });
  C0Distance d;
  for (std::size_t k = 0; k < times.size(); ++k) {
    d.d_M = std::max(d.d_M, fwd[k]);
    d.d_bar_M = std::max(d.d_bar_M, fwd[k] + bwd[k]);
  }
  return d;
}

C0Distance c0_distance(const ContactDynamicalSystem& A, const ContactDynamicalSystem& B) {
  return c0_distance(A, B, A.seeds, A.times);
}

DistanceReport contact_distance(const ContactDynamicalSystem& A, const ContactDynamicalSystem& B,
                                const QuadratureGrid& grid, const DistanceOptions& opts) {
  if (!A.manifold.same_chart(B.manifold))
    throw Error(ErrorKind::ManifoldMismatch, "systems live on different manifolds");
  const std::vector<Point>& probes = opts.probes ? *opts.probes : A.seeds;
  DistanceReport r;
  const C0Distance c0 = c0_distance(A, B, probes, A.times);
  r.d_M = c0.d_M;
  r.d_bar_M = c0.d_bar_M;
  for (double t : A.times) {
    const FlowMap fa(A, t), fb(B, t);
    for (const Point& p : probes)
      r.conf_sup = std::max(r.conf_sup, std::abs(fa(p).log_factor - fb(p).log_factor));
  }
  NormOptions no = opts.norm;
  if (A.form_scale && !no.form_scale) no.form_scale = A.form_scale;
  r.ham_norm = contact_norm(A.manifold, difference(A.hamiltonian, B.hamiltonian), grid, no).total;
  r.d_alpha = r.d_bar_M + r.conf_sup + r.ham_norm;
  return r;
}

BDReport bd_length_and_energy(const ChartedManifold& M, const TimeScalarField& H,
                              const QuadratureGrid& grid, const NormOptions& opts,
                              const std::vector<TimeScalarField>& other_generators,
                              const FlowOptions& flow) {
  BDReport r;
  const NormReport n = contact_norm(M, H, grid, opts);
  r.norm = n.total;
  r.ell_bd = n.osc_integral + std::abs(n.mean_integral);

  // basic-ness on the grid at a few times
  for (int k = 0; k <= 8; ++k) {
    const double t = k / 8.0;
    for (const Point& x : grid.nodes)
      r.max_reeb_derivative = std::max(r.max_reeb_derivative, std::abs(eval_jet(H, M, t, x, false).reeb_deriv));
  }
  r.basic = r.max_reeb_derivative < 1e-8;

  // F_t = cbar - c_t removes the time-varying mean
  std::vector<double> ts, cs;
  for (const TimeSlice& s : n.series) {
    if (!ts.empty() && s.t <= ts.back()) continue;
    ts.push_back(s.t);
    cs.push_back(s.mean);
  }
  auto spline = std::make_shared<CubicSpline>(ts, cs);
  const double cbar = n.mean_integral;
  const TimeScalarField F = time_function_field(
      M, [spline, cbar](double t) { return cbar - (*spline)(t); }, "mean_removal");
  ContactDynamicalSystem A = integrate_system(M, H, {}, flow);
  ContactDynamicalSystem B = integrate_system(M, F, {}, flow);
  const TimeScalarField HF = compose_hamiltonian(A, B);
  r.reduction_norm = contact_norm(M, HF, grid, opts).total;
  r.reduction_check = std::abs(r.reduction_norm - r.ell_bd);

  r.energy_upper = r.ell_bd;
  for (const TimeScalarField& G : other_generators) {
    const NormReport g = contact_norm(M, G, grid, opts);
    r.energy_upper = std::min(r.energy_upper, g.osc_integral + std::abs(g.mean_integral));
  }
  return r;
}

DisplacementReport displacement_energy_functional(const ContactDynamicalSystem& A,
                                                  const std::vector<Point>& K,
                                                  const QuadratureGrid& grid,
                                                  std::optional<double> margin, double t,
                                                  const NormOptions& opts) {
  if (!A.engine) throw Error(ErrorKind::FlowQueryFailure, "system has no flow engine");
  DisplacementReport r;
  r.margin = margin ? *margin : std::max(10.0 * A.meta.richardson_error, 1e-8);
  const FlowMap phi(A, t);
  double dmin = std::numeric_limits<double>::infinity();
  for (const Point& k : K) {
    const Point img = phi(k).point;
    for (const Point& q : K) dmin = std::min(dmin, A.manifold.chart_distance(img, q));
  }
  r.min_distance = dmin;
  r.displaced = dmin > r.margin;
  r.functional = std::exp(-sup_norm(A)) * contact_norm(A.manifold, A.hamiltonian, grid, opts).total;
  return r;
}

}  // namespace contactdyn
