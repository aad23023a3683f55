#include "contactdyn/flow.hpp"

#include <algorithm>
#include <cmath>

#include "contactdyn/parallel.hpp"

namespace contactdyn {

namespace {

constexpr double kExplosion = 1e8;

}  // namespace

std::vector<FlowResult> FlowEngine::trajectory(const Point& x, const std::vector<double>& times) const {
  std::vector<FlowResult> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(advance(x, 0.0, t));
  return out;
}

IntegratingEngine::IntegratingEngine(ChartedManifold M, TimeScalarField H, double dt,
                                     int min_steps_per_piece)
    : M_(std::move(M)), H_(std::move(H)), dt_(dt), min_steps_(min_steps_per_piece) {
  if (!(dt_ > 0.0)) throw Error(ErrorKind::ConfigError, "dt must be positive");
  if (H_.dim() != M_.dim()) throw Error(ErrorKind::ManifoldMismatch, "field and manifold disagree");
  breakpoints_ = H_.time_breakpoints();
  std::sort(breakpoints_.begin(), breakpoints_.end());
}

std::string IntegratingEngine::describe() const { return "rk4[" + H_.describe() + "]"; }

void IntegratingEngine::rk4_step(Point& x, double& h, double t, double dt) const {
  auto f = [&](const Point& p, double tt, Vec& dx) {
    const JetValue j = eval_jet(H_, M_, tt, p, false);
    dx = contact_vector_field(M_, p, j);
    return j.reeb_deriv;
  };
  Vec k1, k2, k3, k4;
  const double h1 = f(x, t, k1);
  const double h2 = f(x + 0.5 * dt * k1, t + 0.5 * dt, k2);
  const double h3 = f(x + 0.5 * dt * k2, t + 0.5 * dt, k3);
  const double h4 = f(x + dt * k3, t + dt, k4);
  x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  h += (dt / 6.0) * (h1 + 2.0 * h2 + 2.0 * h3 + h4);
}

void IntegratingEngine::integrate(Point& x, double& h, double s, double t) const {
  if (s == t) return;
  std::vector<double> cuts = {s};
  const double lo = std::min(s, t), hi = std::max(s, t);
  std::vector<double> inner;
  for (double b : breakpoints_)
    if (b > lo && b < hi) inner.push_back(b);
  if (t < s) std::reverse(inner.begin(), inner.end());
  cuts.insert(cuts.end(), inner.begin(), inner.end());
  cuts.push_back(t);

  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
    const double a = cuts[p], b = cuts[p + 1];
    const double len = b - a;
    int n = static_cast<int>(std::ceil(std::abs(len) / dt_ - 1e-9));
    n = std::max(n, breakpoints_.empty() ? 1 : min_steps_);
    const double step = len / n;
    for (int i = 0; i < n; ++i) {
      try {
        rk4_step(x, h, a + i * step, step);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::PoleSingularity)
          throw Error(ErrorKind::PoleCrossing, "trajectory entered the pole margin near t = " +
                                                   std::to_string(a + i * step));
        // an RK stage left the chart: the state blew up inside the step
        if (e.kind() == ErrorKind::DomainError)
          throw Error(ErrorKind::StepExplosion, "stage state diverged near t = " + std::to_string(a + i * step));
        throw;
      }
      x = M_.wrap(x);
      if (!std::isfinite(h) || !x.allFinite() || x.norm() > kExplosion || std::abs(h) > kExplosion)
        throw Error(ErrorKind::StepExplosion, "state diverged near t = " + std::to_string(a + i * step));
    }
  }
  if (M_.kind() == ManifoldKind::HopfSphere) {
    try {
      M_.check_domain(x);
    } catch (const Error&) {
      throw Error(ErrorKind::PoleCrossing, "trajectory ended inside the pole margin");
    }
  }
}

FlowResult IntegratingEngine::advance(const Point& x, double s, double t) const {
  Point p = x;
  double h = 0.0;
  integrate(p, h, s, t);
  return {p, h};
}

std::vector<FlowResult> IntegratingEngine::trajectory(const Point& x,
                                                      const std::vector<double>& times) const {
  std::vector<FlowResult> out;
  out.reserve(times.size());
  Point p = x;
  double h = 0.0, t = 0.0;
  for (double ti : times) {
    integrate(p, h, t, ti);
    t = ti;
    out.push_back({p, h});
  }
  return out;
}

int ContactDynamicalSystem::time_index(double t) const {
  for (std::size_t i = 0; i < times.size(); ++i)
    if (std::abs(times[i] - t) < 1e-12) return static_cast<int>(i);
  return -1;
}

FlowMap ContactDynamicalSystem::at(double t) const { return FlowMap(*this, t); }

FlowMap::FlowMap(const ContactDynamicalSystem& sys, double t, OffSeedMode mode)
    : M_(sys.manifold), engine_(sys.engine), t_(t), mode_(mode) {
  const int k = sys.time_index(t);
  if (k >= 0) {
    seeds_ = sys.seeds;
    images_.reserve(seeds_.size());
    for (std::size_t i = 0; i < seeds_.size(); ++i)
      images_.push_back({sys.trajectories[i][static_cast<std::size_t>(k)],
                         sys.conformal[i][static_cast<std::size_t>(k)]});
  } else if (mode_ == OffSeedMode::Interpolate) {
    throw Error(ErrorKind::FlowQueryFailure, "interpolation needs a stored time sample");
  }
}

FlowResult FlowMap::operator()(const Point& x) const {
  for (std::size_t i = 0; i < seeds_.size(); ++i)
    if (seeds_[i].size() == x.size() && seeds_[i] == x) return images_[i];
  if (mode_ == OffSeedMode::Interpolate && !seeds_.empty()) {
    // inverse-distance weighting of seed displacements
    Vec disp = Vec::Zero(x.size());
    double fac = 0.0, wsum = 0.0;
    for (std::size_t i = 0; i < seeds_.size(); ++i) {
      const double d = M_.chart_distance(x, seeds_[i]);
      const double w = 1.0 / (d * d * d * d);
      disp += w * M_.chart_difference(images_[i].point, seeds_[i]);
      fac += w * images_[i].log_factor;
      wsum += w;
    }
    return {M_.wrap(x + disp / wsum), fac / wsum};
  }
  if (!engine_) throw Error(ErrorKind::FlowQueryFailure, "system has no flow engine");
  return engine_->advance(x, 0.0, t_);
}

FlowResult FlowMap::inverse(const Point& x) const {
  if (!engine_) throw Error(ErrorKind::FlowQueryFailure, "system has no flow engine");
  return engine_->advance(x, t_, 0.0);
}

std::vector<double> uniform_times(int samples) {
  if (samples < 1) throw Error(ErrorKind::ConfigError, "need at least one time interval");
  std::vector<double> t(static_cast<std::size_t>(samples) + 1);
  for (int i = 0; i <= samples; ++i) t[static_cast<std::size_t>(i)] = static_cast<double>(i) / samples;
  return t;
}

namespace {

void fill_from_engine(ContactDynamicalSystem& sys) {
  const std::size_t n = sys.seeds.size();
  sys.trajectories.assign(n, {});
  sys.conformal.assign(n, {});
  parallel_for(n, [&](std::size_t i) {
    const auto traj = sys.engine->trajectory(sys.seeds[i], sys.times);
    auto& pts = sys.trajectories[i];
    auto& hs = sys.conformal[i];
    pts.reserve(traj.size());
    hs.reserve(traj.size());
    for (const FlowResult& r : traj) {
      pts.push_back(r.point);
      hs.push_back(r.log_factor);
    }
  });
  sys.meta.box_leavers.clear();
  if (sys.manifold.kind() == ManifoldKind::Darboux) {
    for (std::size_t i = 0; i < n; ++i)
      for (const Point& p : sys.trajectories[i])
        if (!sys.manifold.in_box(p)) {
          sys.meta.box_leavers.push_back(static_cast<int>(i));
          break;
        }
  }
}

}  // namespace

ContactDynamicalSystem integrate_system(const ChartedManifold& M, const TimeScalarField& H,
                                        const std::vector<Point>& seeds, const FlowOptions& opts) {
  if (!(opts.dt > 0.0) || opts.dt > 1e-2) throw Error(ErrorKind::ConfigError, "dt must lie in (0, 1e-2]");
  for (const Point& s : seeds) M.check_domain(s);
  ContactDynamicalSystem sys;
  sys.manifold = M;
  sys.hamiltonian = H;
  auto engine = std::make_shared<IntegratingEngine>(M, H, opts.dt, opts.min_steps_per_piece);
  sys.engine = engine;
  sys.times = uniform_times(opts.t_samples);
  sys.seeds.reserve(seeds.size());
  for (const Point& s : seeds) sys.seeds.push_back(M.wrap(s));
  sys.meta.dt = opts.dt;
  sys.meta.seed_route = "integrated";
  sys.meta.description = engine->describe();
  fill_from_engine(sys);

  const std::size_t probes = std::min<std::size_t>(static_cast<std::size_t>(std::max(0, opts.richardson_probes)),
                                                   sys.seeds.size());
  if (probes > 0) {
    const IntegratingEngine fine(M, H, opts.dt / 2, opts.min_steps_per_piece);
    double err = 0.0;
    for (std::size_t i = 0; i < probes; ++i) {
      const FlowResult a = engine->advance(sys.seeds[i], 0.0, 1.0);
      const FlowResult b = fine.advance(sys.seeds[i], 0.0, 1.0);
      err = std::max(err, M.chart_distance(a.point, b.point) + std::abs(a.log_factor - b.log_factor));
    }
    sys.meta.richardson_error = err;
  }
  return sys;
}

ContactDynamicalSystem system_from_engine(const ChartedManifold& M, const TimeScalarField& H,
                                          std::shared_ptr<const FlowEngine> engine,
                                          const std::vector<Point>& seeds,
                                          const std::vector<double>& times,
                                          const std::string& route) {
  ContactDynamicalSystem sys;
  sys.manifold = M;
  sys.hamiltonian = H;
  sys.engine = std::move(engine);
  sys.times = times;
  sys.seeds = seeds;
  sys.meta.seed_route = route;
  sys.meta.description = sys.engine->describe();
  fill_from_engine(sys);
  return sys;
}

ContactDynamicalSystem identity_system(const ChartedManifold& M, const std::vector<Point>& seeds,
                                       const std::vector<double>& times) {
  return system_from_engine(M, constant_field(M, 0.0), std::make_shared<IdentityEngine>(M), seeds,
                            times, "identity");
}

Mat map_jacobian(const ChartedManifold& M, const std::function<Point(const Point&)>& f,
                 const Point& x, double step) {
  const int d = M.dim();
  Mat J(d, d);
  Point p = x;
  for (int j = 0; j < d; ++j) {
    p[j] = x[j] + step;
    const Point fp = f(p);
    p[j] = x[j] - step;
    const Point fm = f(p);
    p[j] = x[j];
    J.col(j) = M.chart_difference(fp, fm) / (2.0 * step);
  }
  return J;
}

double pullback_conformal_factor(const ChartedManifold& M,
                                 const std::function<Point(const Point&)>& phi, const Point& x) {
  const Mat J = map_jacobian(M, phi, x);
  const Vec ax = M.exterior_data_at(x).alpha;
  const Vec ay = M.exterior_data_at(phi(x)).alpha;
  const Vec pb = J.transpose() * ay;

  const double amax = ax.cwiseAbs().maxCoeff();
  double lo = 1e300, hi = -1e300, num = 0.0, den = 0.0;
  for (int i = 0; i < ax.size(); ++i) {
    if (std::abs(ax[i]) <= 1e-3 * amax) continue;
    const double r = pb[i] / ax[i];
    lo = std::min(lo, r);
    hi = std::max(hi, r);
    num += pb[i] * ax[i];
    den += ax[i] * ax[i];
  }
  const double lambda = num / den;
  if (!(lambda > 0.0)) throw Error(ErrorKind::NotContact, "pullback of alpha is not a positive multiple");
  if ((hi - lo) / lambda > 1e-3) throw Error(ErrorKind::NotContact, "pullback ratios spread too far");
  for (int i = 0; i < ax.size(); ++i)
    if (std::abs(pb[i] - lambda * ax[i]) > 1e-3 * lambda * amax)
      throw Error(ErrorKind::NotContact, "pullback has components outside alpha");
  return std::log(lambda);
}

double pullback_conformal_factor(const ChartedManifold& M, const FlowMap& phi, const Point& x) {
  // force re-integration around x: the stencil points are never seeds
  return pullback_conformal_factor(M, [&phi](const Point& p) { return phi(p).point; }, x);
}

}  // namespace contactdyn
