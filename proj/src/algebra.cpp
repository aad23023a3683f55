#include "contactdyn/algebra.hpp"

#include <algorithm>
#include <cmath>

#include "contactdyn/parallel.hpp"

namespace contactdyn {

namespace {

using EnginePtr = std::shared_ptr<const FlowEngine>;

std::vector<double> merged(std::vector<double> a, const std::vector<double>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

// ---- derived Hamiltonians -------------------------------------------------

class ComposeField final : public FieldImpl {
 public:
  ComposeField(TimeScalarField H, TimeScalarField F, EnginePtr a)
      : H_(std::move(H)), F_(std::move(F)), a_(std::move(a)) {}
  double value(double t, const Point& x) const override {
    const FlowResult y = a_->advance(x, t, 0.0);  // log factor is -h_t(y)
    return H_(t, x) + std::exp(-y.log_factor) * F_(t, y.point);
  }
  std::vector<double> series(const Point& x, const std::vector<double>& times) const override {
    if (!H_.autonomous()) return FieldImpl::series(x, times);
    // one-parameter group: phi_{t_k}^{-1} = phi_{t_k - t_{k-1}}^{-1} o phi_{t_{k-1}}^{-1}
    std::vector<double> out;
    out.reserve(times.size());
    FlowResult y{x, 0.0};
    double prev = 0.0;
    for (double t : times) {
      if (t < prev) return FieldImpl::series(x, times);
      if (t > prev) {
        const FlowResult step = a_->advance(y.point, t - prev, 0.0);
        y = {step.point, y.log_factor + step.log_factor};
      }
      prev = t;
      out.push_back(H_(t, x) + std::exp(-y.log_factor) * F_(t, y.point));
    }
    return out;
  }
  std::vector<double> time_breakpoints() const override {
    return merged(H_.time_breakpoints(), F_.time_breakpoints());
  }
  std::string describe() const override { return "[" + H_.describe() + "]#[" + F_.describe() + "]"; }
  int dim() const override { return H_.dim(); }

 private:
  TimeScalarField H_, F_;
  EnginePtr a_;
};

class InverseField final : public FieldImpl {
 public:
  InverseField(TimeScalarField H, EnginePtr a) : H_(std::move(H)), a_(std::move(a)) {}
  double value(double t, const Point& x) const override {
    const FlowResult y = a_->advance(x, 0.0, t);
    return -std::exp(-y.log_factor) * H_(t, y.point);
  }
  std::vector<double> series(const Point& x, const std::vector<double>& times) const override {
    if (!std::is_sorted(times.begin(), times.end()) || (!times.empty() && times.front() < 0.0))
      return FieldImpl::series(x, times);
    const auto traj = a_->trajectory(x, times);
    std::vector<double> out(times.size());
    for (std::size_t k = 0; k < times.size(); ++k)
      out[k] = -std::exp(-traj[k].log_factor) * H_(times[k], traj[k].point);
    return out;
  }
  std::vector<double> time_breakpoints() const override { return H_.time_breakpoints(); }
  std::string describe() const override { return "inv[" + H_.describe() + "]"; }
  int dim() const override { return H_.dim(); }

 private:
  TimeScalarField H_;
  EnginePtr a_;
};

class ConjugateField final : public FieldImpl {
 public:
  ConjugateField(TimeScalarField H, ContactDiffeo phi) : H_(std::move(H)), phi_(std::move(phi)) {}
  double value(double t, const Point& x) const override {
    const FlowResult y = phi_.forward(x);
    return std::exp(-y.log_factor) * H_(t, y.point);
  }
  bool autonomous() const override { return H_.autonomous(); }
  std::vector<double> time_breakpoints() const override { return H_.time_breakpoints(); }
  std::string describe() const override {
    return "conj[" + H_.describe() + "; " + phi_.description + "]";
  }
  int dim() const override { return H_.dim(); }

 private:
  TimeScalarField H_;
  ContactDiffeo phi_;
};

class ReparamField final : public FieldImpl {
 public:
  ReparamField(TimeScalarField H, Reparameterization z) : H_(std::move(H)), z_(std::move(z)) {}
  double value(double t, const Point& x) const override { return z_.dzeta(t) * H_(z_.zeta(t), x); }
  void derivatives(double t, const Point& x, Vec& grad, double* dt) const override {
    const double s = z_.zeta(t), ds = z_.dzeta(t);
    H_.impl().derivatives(s, x, grad, nullptr);
    grad *= ds;
    if (dt) *dt = (value(t + kFdStep, x) - value(t - kFdStep, x)) / (2.0 * kFdStep);
  }
  bool space_constant() const override { return H_.space_constant(); }
  std::vector<double> time_breakpoints() const override { return z_.breakpoints; }
  std::string describe() const override {
    return "reparam[" + H_.describe() + "; " + z_.description + "]";
  }
  int dim() const override { return H_.dim(); }

 private:
  TimeScalarField H_;
  Reparameterization z_;
};

// ---- group-law engines ----------------------------------------------------

class CompositeEngine final : public FlowEngine {
 public:
  CompositeEngine(EnginePtr a, EnginePtr b) : a_(std::move(a)), b_(std::move(b)) {}
  FlowResult advance(const Point& x, double s, double t) const override {
    const FlowResult p1 = a_->advance(x, s, 0.0);
    const FlowResult p2 = b_->advance(p1.point, s, t);
    const FlowResult p3 = a_->advance(p2.point, 0.0, t);
    return {p3.point, p1.log_factor + p2.log_factor + p3.log_factor};
  }
  std::vector<FlowResult> trajectory(const Point& x, const std::vector<double>& times) const override {
    auto inner = b_->trajectory(x, times);
    for (std::size_t i = 0; i < times.size(); ++i) {
      const FlowResult outer = a_->advance(inner[i].point, 0.0, times[i]);
      inner[i] = {outer.point, inner[i].log_factor + outer.log_factor};
    }
    return inner;
  }
  const ChartedManifold& manifold() const override { return a_->manifold(); }
  std::string describe() const override { return a_->describe() + " o " + b_->describe(); }

 private:
  EnginePtr a_, b_;
};

class InverseEngine final : public FlowEngine {
 public:
  explicit InverseEngine(EnginePtr a) : a_(std::move(a)) {}
  FlowResult advance(const Point& x, double s, double t) const override {
    const FlowResult p1 = a_->advance(x, 0.0, s);
    const FlowResult p2 = a_->advance(p1.point, t, 0.0);
    return {p2.point, p1.log_factor + p2.log_factor};
  }
  const ChartedManifold& manifold() const override { return a_->manifold(); }
  std::string describe() const override { return "inverse(" + a_->describe() + ")"; }

 private:
  EnginePtr a_;
};

class ConjugateEngine final : public FlowEngine {
 public:
  ConjugateEngine(EnginePtr a, ContactDiffeo phi) : a_(std::move(a)), phi_(std::move(phi)) {}
  FlowResult advance(const Point& x, double s, double t) const override {
    const FlowResult p1 = phi_.forward(x);
    const FlowResult p2 = a_->advance(p1.point, s, t);
    const FlowResult p3 = phi_.inverse(p2.point);
    return {p3.point, p1.log_factor + p2.log_factor + p3.log_factor};
  }
  const ChartedManifold& manifold() const override { return a_->manifold(); }
  std::string describe() const override {
    return "conj(" + a_->describe() + "; " + phi_.description + ")";
  }

 private:
  EnginePtr a_;
  ContactDiffeo phi_;
};

class ReparamEngine final : public FlowEngine {
 public:
  ReparamEngine(EnginePtr a, Reparameterization z) : a_(std::move(a)), z_(std::move(z)) {}
  FlowResult advance(const Point& x, double s, double t) const override {
    return a_->advance(x, z_.zeta(s), z_.zeta(t));
  }
  const ChartedManifold& manifold() const override { return a_->manifold(); }
  std::string describe() const override { return "reparam(" + a_->describe() + ")"; }

 private:
  EnginePtr a_;
  Reparameterization z_;
};

class FormChangeEngine final : public FlowEngine {
 public:
  FormChangeEngine(EnginePtr a, TimeScalarField f) : a_(std::move(a)), f_(std::move(f)) {}
  FlowResult advance(const Point& x, double s, double t) const override {
    FlowResult r = a_->advance(x, s, t);
    r.log_factor += f_(0.0, r.point) - f_(0.0, x);
    return r;
  }
  std::vector<FlowResult> trajectory(const Point& x, const std::vector<double>& times) const override {
    auto out = a_->trajectory(x, times);
    const double fx = f_(0.0, x);
    for (auto& r : out) r.log_factor += f_(0.0, r.point) - fx;
    return out;
  }
  const ChartedManifold& manifold() const override { return a_->manifold(); }
  std::string describe() const override { return "form(" + a_->describe() + ")"; }

 private:
  EnginePtr a_;
  TimeScalarField f_;
};

// ---- assembly --------------------------------------------------------------

void require_same(const ContactDynamicalSystem& A, const ContactDynamicalSystem& B) {
  if (!A.manifold.same_chart(B.manifold))
    throw Error(ErrorKind::ManifoldMismatch, "systems live on different manifolds");
  if (A.form_scale.has_value() != B.form_scale.has_value())
    throw Error(ErrorKind::ManifoldMismatch, "systems use different contact forms");
  if (A.times != B.times) throw Error(ErrorKind::DomainError, "systems use different time grids");
}

ContactDynamicalSystem derive(const ContactDynamicalSystem& parent, TimeScalarField field,
                              EnginePtr group_law, const AlgebraOptions& opts) {
  const std::vector<Point> seeds = opts.seeds ? *opts.seeds : parent.seeds;
  const ChartedManifold& M = parent.manifold;
  ContactDynamicalSystem sys;
  try {
    if (opts.integrate_derived && !parent.form_scale) {
      FlowOptions fo = opts.flow;
      fo.t_samples = static_cast<int>(parent.times.size()) - 1;
      fo.richardson_probes = 0;
      if (parent.times != uniform_times(fo.t_samples))
        throw Error(ErrorKind::DomainError, "re-integration needs a uniform time grid");
      sys = integrate_system(M, field, seeds, fo);
      sys.engine = group_law;
      double dist = 0.0, fac = 0.0;
      std::vector<double> dists(seeds.size()), facs(seeds.size());
      parallel_for(seeds.size(), [&](std::size_t i) {
        const auto ref = group_law->trajectory(sys.seeds[i], sys.times);
        for (std::size_t k = 0; k < ref.size(); ++k) {
          dists[i] = std::max(dists[i], M.chart_distance(ref[k].point, sys.trajectories[i][k]));
          facs[i] = std::max(facs[i], std::abs(ref[k].log_factor - sys.conformal[i][k]));
        }
      });
      for (std::size_t i = 0; i < seeds.size(); ++i) {
        dist = std::max(dist, dists[i]);
        fac = std::max(fac, facs[i]);
      }
      sys.meta.route_residual = dist;
      sys.meta.route_factor_residual = fac;
    } else {
      sys = system_from_engine(M, field, group_law, seeds, parent.times, "group_law");
      sys.meta.dt = parent.meta.dt;
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::PoleCrossing || e.kind() == ErrorKind::StepExplosion ||
        e.kind() == ErrorKind::PoleSingularity)
      throw Error(ErrorKind::FlowQueryFailure, e.what());
    throw;
  }
  sys.form_scale = parent.form_scale;
  sys.meta.description = field.describe();
  return sys;
}

}  // namespace

ContactDiffeo ContactDiffeo::identity(const ChartedManifold& M) {
  ContactDiffeo d;
  d.manifold = M;
  d.forward = [](const Point& x) { return FlowResult{x, 0.0}; };
  d.inverse = d.forward;
  d.description = "id";
  return d;
}

ContactDiffeo ContactDiffeo::time_slice(const ContactDynamicalSystem& A, double t) {
  if (!A.engine) throw Error(ErrorKind::FlowQueryFailure, "system has no flow engine");
  ContactDiffeo d;
  d.manifold = A.manifold;
  EnginePtr e = A.engine;
  d.forward = [e, t](const Point& x) { return e->advance(x, 0.0, t); };
  d.inverse = [e, t](const Point& x) { return e->advance(x, t, 0.0); };
  d.description = "slice(" + A.meta.description + ", t=" + std::to_string(t) + ")";
  return d;
}

Reparameterization Reparameterization::linear(double s) {
  Reparameterization z;
  z.zeta = [s](double t) { return s * t; };
  z.dzeta = [s](double) { return s; };
  z.description = "zeta(t) = " + std::to_string(s) + " t";
  return z;
}

TimeScalarField compose_hamiltonian(const ContactDynamicalSystem& A, const ContactDynamicalSystem& B) {
  if (!A.manifold.same_chart(B.manifold))
    throw Error(ErrorKind::ManifoldMismatch, "systems live on different manifolds");
  return TimeScalarField(std::make_shared<ComposeField>(A.hamiltonian, B.hamiltonian, A.engine));
}

TimeScalarField inverse_hamiltonian(const ContactDynamicalSystem& A) {
  return TimeScalarField(std::make_shared<InverseField>(A.hamiltonian, A.engine));
}

TimeScalarField conjugate_hamiltonian(const ContactDynamicalSystem& A, const ContactDiffeo& phi) {
  return TimeScalarField(std::make_shared<ConjugateField>(A.hamiltonian, phi));
}

TimeScalarField reparameterized_hamiltonian(const TimeScalarField& H, const Reparameterization& zeta) {
  if (!zeta.dzeta) throw Error(ErrorKind::ConfigError, "reparameterized Hamiltonian needs zeta'");
  return TimeScalarField(std::make_shared<ReparamField>(H, zeta));
}

ContactDynamicalSystem compose(const ContactDynamicalSystem& A, const ContactDynamicalSystem& B,
                               const AlgebraOptions& opts) {
  require_same(A, B);
  return derive(A, compose_hamiltonian(A, B), std::make_shared<CompositeEngine>(A.engine, B.engine),
                opts);
}

ContactDynamicalSystem inverse(const ContactDynamicalSystem& A, const AlgebraOptions& opts) {
  return derive(A, inverse_hamiltonian(A), std::make_shared<InverseEngine>(A.engine), opts);
}

ContactDynamicalSystem conjugate(const ContactDynamicalSystem& A, const ContactDiffeo& phi,
                                 const AlgebraOptions& opts) {
  if (!A.manifold.same_chart(phi.manifold))
    throw Error(ErrorKind::ManifoldMismatch, "diffeomorphism lives on a different manifold");
  const std::vector<Point>& probes = opts.seeds ? *opts.seeds : A.seeds;
  for (const Point& p : probes) {
    const FlowResult y = phi.forward(p);
    const FlowResult z = phi.inverse(y.point);
    if (A.manifold.chart_distance(z.point, p) > 1e-6 || std::abs(y.log_factor + z.log_factor) > 1e-6)
      throw Error(ErrorKind::NotInvertible, "diffeomorphism does not invert on the probes");
  }
  return derive(A, conjugate_hamiltonian(A, phi), std::make_shared<ConjugateEngine>(A.engine, phi),
                opts);
}

ContactDynamicalSystem change_of_form(const ContactDynamicalSystem& A, const TimeScalarField& f) {
  ContactDynamicalSystem sys = A;
  sys.hamiltonian = exp_scaled(f, A.hamiltonian);
  sys.form_scale = A.form_scale ? linear_combination(1.0, *A.form_scale, 1.0, f) : f;
  sys.engine = std::make_shared<FormChangeEngine>(A.engine, f);
  for (std::size_t i = 0; i < sys.seeds.size(); ++i) {
    const double f0 = f(0.0, sys.seeds[i]);
    for (std::size_t k = 0; k < sys.times.size(); ++k)
      sys.conformal[i][k] += f(0.0, sys.trajectories[i][k]) - f0;
  }
  sys.meta.description = "form[" + A.meta.description + "]";
  return sys;
}

ContactDynamicalSystem reparameterize(const ContactDynamicalSystem& A, const Reparameterization& zeta,
                                      const AlgebraOptions& opts) {
  if (std::abs(zeta.zeta(0.0)) > 1e-12) throw Error(ErrorKind::DomainError, "zeta(0) must be 0");
  EnginePtr engine = std::make_shared<ReparamEngine>(A.engine, zeta);
  const std::vector<Point> seeds = opts.seeds ? *opts.seeds : A.seeds;
  const TimeScalarField field = zeta.dzeta ? reparameterized_hamiltonian(A.hamiltonian, zeta)
                                           : TimeScalarField{};
  ContactDynamicalSystem sys =
      system_from_engine(A.manifold, field.valid() ? field : A.hamiltonian, engine, seeds, A.times,
                         "resample");
  sys.form_scale = A.form_scale;
  sys.meta.dt = A.meta.dt;

  if (opts.integrate_derived && !A.form_scale) {
    if (!zeta.dzeta) throw Error(ErrorKind::ConfigError, "re-integration needs zeta'");
    std::vector<double> probe_t = uniform_times(1000);
    probe_t.insert(probe_t.end(), zeta.breakpoints.begin(), zeta.breakpoints.end());
    bool pos = false, neg = false;
    for (double t : probe_t) {
      const double d = zeta.dzeta(t);
      pos = pos || d > 1e-12;
      neg = neg || d < -1e-12;
    }
    if (pos && neg) throw Error(ErrorKind::NotMonotone, "zeta' changes sign");

    FlowOptions fo = opts.flow;
    fo.t_samples = static_cast<int>(A.times.size()) - 1;
    fo.richardson_probes = 0;
    const ContactDynamicalSystem direct = integrate_system(A.manifold, field, seeds, fo);
    double dist = 0.0, fac = 0.0;
    for (std::size_t i = 0; i < seeds.size(); ++i)
      for (std::size_t k = 0; k < sys.times.size(); ++k) {
        dist = std::max(dist, A.manifold.chart_distance(direct.trajectories[i][k], sys.trajectories[i][k]));
        fac = std::max(fac, std::abs(direct.conformal[i][k] - sys.conformal[i][k]));
      }
    sys.meta.route_residual = dist;
    sys.meta.route_factor_residual = fac;
  }
  sys.meta.description = field.valid() ? field.describe() : "reparam[" + A.meta.description + "]";
  return sys;
}

}  // namespace contactdyn
