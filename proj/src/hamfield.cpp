#include "contactdyn/hamfield.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>

#include <Eigen/LU>

namespace contactdyn {

std::vector<double> FieldImpl::series(const Point& x, const std::vector<double>& times) const {
  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(value(t, x));
  return out;
}

void FieldImpl::derivatives(double t, const Point& x, Vec& grad, double* dt) const {
  const int d = static_cast<int>(x.size());
  grad.resize(d);
  Point p = x;
  for (int i = 0; i < d; ++i) {
    p[i] = x[i] + kFdStep;
    const double fp = value(t, p);
    p[i] = x[i] - kFdStep;
    const double fm = value(t, p);
    p[i] = x[i];
    grad[i] = (fp - fm) / (2.0 * kFdStep);
  }
  if (dt) {
    *dt = autonomous() ? 0.0 : (value(t + kFdStep, x) - value(t - kFdStep, x)) / (2.0 * kFdStep);
  }
}

namespace {

class ExprField final : public FieldImpl {
 public:
  ExprField(Expr e, int dim) : e_(std::move(e)), dim_(dim), autonomous_(!e_.uses(dim)) {
    bool any_space = false;
    for (int i = 0; i < dim_; ++i) any_space = any_space || e_.uses(i);
    space_constant_ = !any_space;
  }

  double value(double t, const Point& x) const override {
    double v[kMaxDim];
    for (int i = 0; i < dim_; ++i) v[i] = x[i];
    v[dim_] = t;
    return e_.eval(v);
  }

  void derivatives(double t, const Point& x, Vec& grad, double* dt) const override {
    Jet v[kMaxDim];
    for (int i = 0; i < dim_; ++i) v[i] = Jet::variable(x[i], i);
    v[dim_] = Jet::variable(t, dim_);
    const Jet r = e_.eval(v);
    grad.resize(dim_);
    for (int i = 0; i < dim_; ++i) grad[i] = r.d[static_cast<std::size_t>(i)];
    if (dt) *dt = r.d[static_cast<std::size_t>(dim_)];
  }

  bool autonomous() const override { return autonomous_; }
  bool space_constant() const override { return space_constant_; }
  std::string describe() const override { return e_.print(); }
  int dim() const override { return dim_; }

 private:
  Expr e_;
  int dim_;
  bool autonomous_;
  bool space_constant_ = false;
};

class ConstantField final : public FieldImpl {
 public:
  ConstantField(double c, int dim) : c_(c), dim_(dim) {}
  double value(double, const Point&) const override { return c_; }
  void derivatives(double, const Point&, Vec& grad, double* dt) const override {
    grad = Vec::Zero(dim_);
    if (dt) *dt = 0.0;
  }
  bool autonomous() const override { return true; }
  bool space_constant() const override { return true; }
  std::string describe() const override {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", c_);
    return buf;
  }
  int dim() const override { return dim_; }

 private:
  double c_;
  int dim_;
};

class LambdaField final : public FieldImpl {
 public:
  LambdaField(ValueFn f, std::string desc, bool autonomous, int dim)
      : f_(std::move(f)), desc_(std::move(desc)), autonomous_(autonomous), dim_(dim) {}
  double value(double t, const Point& x) const override { return f_(t, x); }
  bool autonomous() const override { return autonomous_; }
  std::string describe() const override { return desc_; }
  int dim() const override { return dim_; }

 private:
  ValueFn f_;
  std::string desc_;
  bool autonomous_;
  int dim_;
};

class TimeFunctionField final : public FieldImpl {
 public:
  TimeFunctionField(std::function<double(double)> c, std::string desc, std::vector<double> bp,
                    int dim)
      : c_(std::move(c)), desc_(std::move(desc)), bp_(std::move(bp)), dim_(dim) {}
  double value(double t, const Point&) const override { return c_(t); }
  void derivatives(double t, const Point&, Vec& grad, double* dt) const override {
    grad = Vec::Zero(dim_);
    if (dt) *dt = (c_(t + kFdStep) - c_(t - kFdStep)) / (2.0 * kFdStep);
  }
  bool space_constant() const override { return true; }
  std::vector<double> time_breakpoints() const override { return bp_; }
  std::string describe() const override { return desc_; }
  int dim() const override { return dim_; }

 private:
  std::function<double(double)> c_;
  std::string desc_;
  std::vector<double> bp_;
  int dim_;
};

std::vector<double> merge_breakpoints(std::vector<double> a, const std::vector<double>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

class LinearCombination final : public FieldImpl {
 public:
  LinearCombination(double a, TimeScalarField H, double b, TimeScalarField F)
      : a_(a), b_(b), H_(std::move(H)), F_(std::move(F)) {}
  double value(double t, const Point& x) const override { return a_ * H_(t, x) + b_ * F_(t, x); }
  void derivatives(double t, const Point& x, Vec& grad, double* dt) const override {
    Vec gh, gf;
    double th = 0.0, tf = 0.0;
    H_.impl().derivatives(t, x, gh, dt ? &th : nullptr);
    F_.impl().derivatives(t, x, gf, dt ? &tf : nullptr);
    grad = a_ * gh + b_ * gf;
    if (dt) *dt = a_ * th + b_ * tf;
  }
  bool autonomous() const override { return H_.autonomous() && F_.autonomous(); }
  bool space_constant() const override { return H_.space_constant() && F_.space_constant(); }
  std::vector<double> time_breakpoints() const override {
    return merge_breakpoints(H_.time_breakpoints(), F_.time_breakpoints());
  }
  std::string describe() const override {
    return "(" + std::to_string(a_) + "*[" + H_.describe() + "] + " + std::to_string(b_) + "*[" +
           F_.describe() + "])";
  }
  int dim() const override { return H_.dim(); }

 private:
  double a_, b_;
  TimeScalarField H_, F_;
};

class ExpScaled final : public FieldImpl {
 public:
  ExpScaled(TimeScalarField f, std::optional<TimeScalarField> H) : f_(std::move(f)), H_(std::move(H)) {}
  double value(double t, const Point& x) const override {
    const double e = std::exp(f_(t, x));
    return H_ ? e * (*H_)(t, x) : e;
  }
  void derivatives(double t, const Point& x, Vec& grad, double* dt) const override {
    Vec gf;
    double tf = 0.0;
    f_.impl().derivatives(t, x, gf, dt ? &tf : nullptr);
    const double e = std::exp(f_(t, x));
    if (!H_) {
      grad = e * gf;
      if (dt) *dt = e * tf;
      return;
    }
    Vec gh;
    double th = 0.0;
    H_->impl().derivatives(t, x, gh, dt ? &th : nullptr);
    const double h = (*H_)(t, x);
    grad = e * (gh + h * gf);
    if (dt) *dt = e * (th + h * tf);
  }
  bool autonomous() const override { return f_.autonomous() && (!H_ || H_->autonomous()); }
  std::vector<double> time_breakpoints() const override {
    return H_ ? merge_breakpoints(f_.time_breakpoints(), H_->time_breakpoints())
              : f_.time_breakpoints();
  }
  std::string describe() const override {
    return "exp[" + f_.describe() + "]" + (H_ ? "*[" + H_->describe() + "]" : "");
  }
  int dim() const override { return f_.dim(); }

 private:
  TimeScalarField f_;
  std::optional<TimeScalarField> H_;
};

}  // namespace

TimeScalarField parse_hamiltonian(const ChartedManifold& M, std::string_view text) {
  std::vector<std::string> vars = M.coordinate_names();
  vars.push_back("t");
  return TimeScalarField(std::make_shared<ExprField>(Expr::parse(text, vars), M.dim()));
}

TimeScalarField constant_field(const ChartedManifold& M, double c) {
  return TimeScalarField(std::make_shared<ConstantField>(c, M.dim()));
}

TimeScalarField function_field(const ChartedManifold& M, ValueFn f, std::string description,
                               bool autonomous) {
  return TimeScalarField(
      std::make_shared<LambdaField>(std::move(f), std::move(description), autonomous, M.dim()));
}

TimeScalarField time_function_field(const ChartedManifold& M, std::function<double(double)> c,
                                    std::string description, std::vector<double> breakpoints) {
  return TimeScalarField(std::make_shared<TimeFunctionField>(
      std::move(c), std::move(description), std::move(breakpoints), M.dim()));
}

TimeScalarField linear_combination(double a, const TimeScalarField& H, double b,
                                   const TimeScalarField& F) {
  if (H.dim() != F.dim()) throw Error(ErrorKind::ManifoldMismatch, "fields on different charts");
  return TimeScalarField(std::make_shared<LinearCombination>(a, H, b, F));
}

TimeScalarField difference(const TimeScalarField& H, const TimeScalarField& F) {
  return linear_combination(1.0, H, -1.0, F);
}

TimeScalarField exp_scaled(const TimeScalarField& f, const TimeScalarField& H) {
  if (H.dim() != f.dim()) throw Error(ErrorKind::ManifoldMismatch, "fields on different charts");
  return TimeScalarField(std::make_shared<ExpScaled>(f, H));
}

TimeScalarField exp_field(const TimeScalarField& f) {
  return TimeScalarField(std::make_shared<ExpScaled>(f, std::nullopt));
}

JetValue eval_jet(const TimeScalarField& field, const ChartedManifold& M, double t, const Point& x,
                  bool with_time_derivative) {
  const Vec R = M.reeb_at(x);
  JetValue j;
  j.value = field(t, x);
  field.impl().derivatives(t, x, j.grad, with_time_derivative ? &j.dt : nullptr);
  j.reeb_deriv = j.grad.dot(R);
  return j;
}

Vec contact_vector_field(const ChartedManifold& M, const Point& x, const JetValue& jet) {
  const int d = M.dim();
  Vec X(d);
  const Vec& g = jet.grad;
  if (M.kind() == ManifoldKind::Darboux) {
    const int m = M.n() - 1;
    double ydy = 0.0;
    for (int i = 0; i < m; ++i) {
      const double y = x[m + i];
      X[i] = -g[m + i];
      X[m + i] = g[i] + y * g[d - 1];
      ydy += y * g[m + i];
    }
    X[d - 1] = jet.value - ydy;
  } else {
    M.check_domain(x);
    const double pi = std::numbers::pi;
    const double tn = std::tan(x[2]);
    const double ct = 1.0 / tn;
    X[0] = 2.0 * pi * jet.value + pi * g[2] * ct;
    X[1] = 2.0 * pi * jet.value - pi * g[2] * tn;
    X[2] = pi * (g[1] * tn - g[0] * ct);
  }
  return X;
}

Vec contact_vector_field(const ChartedManifold& M, const TimeScalarField& field, double t,
                         const Point& x) {
  return contact_vector_field(M, x, eval_jet(field, M, t, x, false));
}

Vec contact_vector_field_generic(const ChartedManifold& M, const Point& x, const JetValue& jet) {
  const int d = M.dim();
  const CovectorData e = M.exterior_data_at(x);
  int p = 0;
  for (int i = 1; i < d; ++i)
    if (std::abs(e.alpha[i]) > std::abs(e.alpha[p])) p = i;

  Mat A(d, d);
  Vec rhs(d);
  A.row(0) = e.alpha.transpose();
  rhs[0] = jet.value;
  int row = 1;
  for (int j = 0; j < d; ++j) {
    if (j == p) continue;
    Vec w = Vec::Zero(d);
    w[j] = 1.0;
    w[p] = -e.alpha[j] / e.alpha[p];
    // dalpha(X, w) = X . (Omega w); alpha(w) = 0 so the R.H term drops out
    A.row(row) = (e.d_alpha * w).transpose();
    rhs[row] = -jet.grad.dot(w);
    ++row;
  }
  Eigen::PartialPivLU<Mat> lu(A);
  const double rc = lu.rcond();
  if (!(rc > 1e-12)) throw Error(ErrorKind::SingularSystem, "contact system is ill-conditioned");
  return lu.solve(rhs);
}

Vec contact_vector_field_generic(const ChartedManifold& M, const TimeScalarField& field, double t,
                                 const Point& x) {
  return contact_vector_field_generic(M, x, eval_jet(field, M, t, x, false));
}

}  // namespace contactdyn
