#include "contactdyn/symplectization.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>

#include "contactdyn/builtins.hpp"
#include "contactdyn/parallel.hpp"

namespace contactdyn {

namespace {

constexpr double kExplosion = 1e8;

Vec pack(const SymplectizationPoint& p) {
  Vec v(p.base.size() + 1);
  v.head(p.base.size()) = p.base;
  v[p.base.size()] = p.theta;
  return v;
}

SymplectizationPoint unpack(const Vec& v) {
  const Eigen::Index d = v.size() - 1;
  return {v.head(d), v[d]};
}

void rk4_w(const ChartedManifold& M, const WHamiltonian& K, Vec& s, double t, double h) {
  auto f = [&](double tt, const Vec& v) { return w_hamiltonian_vector_field(M, K, tt, unpack(v)); };
  const Vec k1 = f(t, s);
  const Vec k2 = f(t + 0.5 * h, s + 0.5 * h * k1);
  const Vec k3 = f(t + 0.5 * h, s + 0.5 * h * k2);
  const Vec k4 = f(t + h, s + h * k3);
  s += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void integrate_w(const ChartedManifold& M, const WHamiltonian& K, Vec& s, double a, double b, double dt,
                 int min_steps) {
  std::vector<double> cuts = {a};
  for (double bp : K.breakpoints)
    if (bp > a && bp < b) cuts.push_back(bp);
  cuts.push_back(b);
  const Eigen::Index d = s.size() - 1;
  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
    const double len = cuts[p + 1] - cuts[p];
    int n = static_cast<int>(std::ceil(len / dt - 1e-9));
    n = std::max(n, K.breakpoints.empty() ? 1 : min_steps);
    const double h = len / n;
    for (int i = 0; i < n; ++i) {
      const double t = cuts[p] + i * h;
      try {
        rk4_w(M, K, s, t, h);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::PoleSingularity)
          throw Error(ErrorKind::PoleCrossing, "lifted trajectory entered the pole margin");
        throw;
      }
      s.head(d) = M.wrap(s.head(d));
      if (!s.allFinite() || s.norm() > kExplosion)
        throw Error(ErrorKind::StepExplosion, "lifted state diverged near t = " + std::to_string(t));
    }
  }
}

}  // namespace

Mat omega_at(const ChartedManifold& M, const SymplectizationPoint& p) {
  const CovectorData cd = M.exterior_data_at(p.base);
  const Eigen::Index d = M.dim();
  const double e = std::exp(p.theta);
  Mat W = Mat::Zero(d + 1, d + 1);
  W.topLeftCorner(d, d) = -e * cd.d_alpha;
  for (Eigen::Index j = 0; j < d; ++j) {
    W(d, j) = -e * cd.alpha[j];  // -(dtheta ^ alpha)(d_theta, e_j)
    W(j, d) = e * cd.alpha[j];
  }
  return W;
}

Vec w_hamiltonian_vector_field(const ChartedManifold& M, const WHamiltonian& K, double t,
                               const SymplectizationPoint& p) {
  const Mat W = omega_at(M, p);
  const Vec g = K.gradient(t, p);
  // (iota(X) omega)_j = sum_i X_i omega_ij
  Eigen::PartialPivLU<Mat> lu(W.transpose());
  return lu.solve(g);
}

std::vector<SymplectizationPoint> integrate_on_w(const ChartedManifold& M, const WHamiltonian& K,
                                                 const SymplectizationPoint& p,
                                                 const std::vector<double>& times, double dt,
                                                 int min_steps_per_piece) {
  if (!(dt > 0.0)) throw Error(ErrorKind::ConfigError, "dt must be positive");
  M.check_domain(p.base);
  std::vector<SymplectizationPoint> out;
  out.reserve(times.size());
  Vec s = pack(p);
  double now = 0.0;
  for (double t : times) {
    if (t < now) throw Error(ErrorKind::ConfigError, "times must be increasing");
    integrate_w(M, K, s, now, t, dt, min_steps_per_piece);
    now = t;
    out.push_back(unpack(s));
  }
  return out;
}

AdmissibleSystem::AdmissibleSystem(ContactDynamicalSystem parent) : parent_(std::move(parent)) {
  if (!parent_.engine) throw Error(ErrorKind::FlowQueryFailure, "lift needs a flow engine");
}

SymplectizationPoint AdmissibleSystem::map(const SymplectizationPoint& p, double t) const {
  const FlowResult r = FlowMap(parent_, t)(p.base);
  return {r.point, p.theta - r.log_factor};
}

SymplectizationPoint AdmissibleSystem::inverse_map(const SymplectizationPoint& p, double t) const {
  // phi_hat^{-1}(y, s) = (phi^{-1} y, s + h(phi^{-1} y)) and log factor of phi^{-1} at y is -h(phi^{-1} y)
  const FlowResult r = parent_.engine->advance(p.base, t, 0.0);
  return {r.point, p.theta - r.log_factor};
}

WHamiltonian AdmissibleSystem::hamiltonian() const {
  const ChartedManifold M = parent_.manifold;
  const TimeScalarField H = parent_.hamiltonian;
  WHamiltonian K;
  K.value = [H](double t, const SymplectizationPoint& p) { return std::exp(p.theta) * H(t, p.base); };
  K.gradient = [M, H](double t, const SymplectizationPoint& p) {
    const JetValue j = eval_jet(H, M, t, p.base, false);
    const double e = std::exp(p.theta);
    Vec g(j.grad.size() + 1);
    g.head(j.grad.size()) = e * j.grad;
    g[j.grad.size()] = e * j.value;
    return g;
  };
  K.breakpoints = H.time_breakpoints();
  return K;
}

AdmissibleSystem lift_system(const ContactDynamicalSystem& A) { return AdmissibleSystem(A); }

LiftCheck verify_lift(const AdmissibleSystem& L, const std::vector<double>& theta0, double dt) {
  const ContactDynamicalSystem& A = L.parent();
  const ChartedManifold& M = A.manifold;
  if (theta0.size() != A.seeds.size())
    throw Error(ErrorKind::ConfigError, "need one initial theta per seed");
  const WHamiltonian K = L.hamiltonian();
  LiftCheck out;
  out.direct.resize(A.seeds.size());
  std::vector<double> err(A.seeds.size(), 0.0);
  parallel_for(A.seeds.size(), [&](std::size_t i) {
    try {
      out.direct[i] = integrate_on_w(M, K, {A.seeds[i], theta0[i]}, A.times, dt);
    } catch (const Error& e) {
      throw Error(ErrorKind::FlowQueryFailure, std::string("lifted integration failed: ") + e.what());
    }
    for (std::size_t k = 0; k < A.times.size(); ++k) {
      const SymplectizationPoint& w = out.direct[i][k];
      const double dx = M.chart_distance(w.base, A.trajectories[i][k]);
      const double dth = std::abs(w.theta - (theta0[i] - A.conformal[i][k]));
      err[i] = std::max(err[i], std::max(dx, dth));
    }
  });
  for (double e : err) out.max_error = std::max(out.max_error, e);
  return out;
}

AdmissibleNorm admissible_norm(const ChartedManifold& M, const TimeScalarField& H,
                               const QuadratureGrid& grid, double a, double b, const NormOptions& opts) {
  if (!(a < b)) throw Error(ErrorKind::ConfigError, "admissible norm needs a < b");
  const NormReport n = contact_norm(M, H, grid, opts);
  const auto quad = time_quadrature(opts.t_samples, H.time_breakpoints());
  const double ea = std::exp(a), eb = std::exp(b);
  AdmissibleNorm r;
  for (std::size_t i = 0; i < quad.size(); ++i) {
    const TimeSlice& s = n.series[i];
    // e^theta H is monotone in theta, so extrema sit on theta = a or b
    const double hi = s.max >= 0.0 ? eb * s.max : ea * s.max;
    const double lo = s.min >= 0.0 ? ea * s.min : eb * s.min;
    r.norm += quad[i].second * (hi - lo);
  }
  r.contact = n.total;
  r.lower = std::min(eb - ea, ea) * n.total;
  r.upper = eb * n.total;
  return r;
}

AdmissibleNorm admissible_norm(const AdmissibleSystem& L, const QuadratureGrid& grid, double a, double b,
                               const NormOptions& opts) {
  return admissible_norm(L.manifold(), L.parent().hamiltonian, grid, a, b, opts);
}

WHamiltonian cutoff_hamiltonian(const AdmissibleSystem& L, double a, double b, double c) {
  if (a > b) throw Error(ErrorKind::ConfigError, "cutoff needs a <= b");
  const double h = sup_norm(L.parent());
  if (c < h)
    throw Error(ErrorKind::CutoffTooTight,
                "c = " + std::to_string(c) + " is below sup|h| = " + std::to_string(h));
  const WHamiltonian K = L.hamiltonian();
  const double lo = a - c, hi = b + c;
  WHamiltonian out;
  out.breakpoints = K.breakpoints;
  out.value = [K, lo, hi](double t, const SymplectizationPoint& p) {
    return plateau(p.theta, lo, hi, 1.0) * K.value(t, p);
  };
  out.gradient = [K, lo, hi](double t, const SymplectizationPoint& p) {
    const Jet th = Jet::variable(p.theta, 0);
    const Jet r = plateau(th, lo, hi, 1.0);
    Vec g = K.gradient(t, p);
    const Eigen::Index d = g.size() - 1;
    // K = e^theta H, so K itself is the theta-derivative of K
    const double k = K.value(t, p);
    g.head(d) *= r.v;
    g[d] = r.v * g[d] + r.d[0] * k;
    return g;
  };
  return out;
}

double symplectic_defect(const ChartedManifold& M, const WMap& phi,
                         const std::vector<SymplectizationPoint>& probes, double step) {
  double worst = 0.0;
  const Eigen::Index d = M.dim();
  for (const SymplectizationPoint& p : probes) {
    const SymplectizationPoint img = phi(p);
    Mat J(d + 1, d + 1);
    for (Eigen::Index j = 0; j <= d; ++j) {
      SymplectizationPoint pp = p, pm = p;
      if (j < d) {
        pp.base[j] += step;
        pm.base[j] -= step;
      } else {
        pp.theta += step;
        pm.theta -= step;
      }
      const SymplectizationPoint fp = phi(pp), fm = phi(pm);
      J.block(0, j, d, 1) = M.chart_difference(fp.base, fm.base) / (2.0 * step);
      J(d, j) = (fp.theta - fm.theta) / (2.0 * step);
    }
    const Mat pulled = J.transpose() * omega_at(M, img) * J;
    worst = std::max(worst, (pulled - omega_at(M, p)).cwiseAbs().maxCoeff());
  }
  return worst;
}

double w_distance(const ContactDynamicalSystem& A, const ContactDynamicalSystem& B,
                  const std::vector<Point>& probes, const std::vector<double>& times) {
  if (!A.manifold.same_chart(B.manifold))
    throw Error(ErrorKind::ManifoldMismatch, "systems live on different manifolds");
  double dm = 0.0, dh = 0.0;
  for (double t : times) {
    const FlowMap fa(A, t), fb(B, t);
    for (const Point& p : probes) {
      const FlowResult ra = fa(p), rb = fb(p);
      dm = std::max(dm, A.manifold.chart_distance(ra.point, rb.point));
      dh = std::max(dh, std::abs(ra.log_factor - rb.log_factor));
    }
  }
  return dm + dh;
}

}  // namespace contactdyn
