#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "contactdyn/expr.hpp"
#include "contactdyn/manifold.hpp"

namespace contactdyn {

/// Value and first derivatives of H at (t, x).
struct JetValue {
  double value = 0.0;
  Vec grad;                 ///< spatial differential dH_t in chart coordinates
  double dt = 0.0;          ///< partial derivative in t
  double reeb_deriv = 0.0;  ///< R.H_t = dH_t(R)
};

/// Finite-difference step used for fields without exact derivatives.
inline constexpr double kFdStep = 1e-5;

class FieldImpl {
 public:
  virtual ~FieldImpl() = default;
  virtual double value(double t, const Point& x) const = 0;
  /// Spatial gradient and, if `dt` is non-null, the time derivative.
  /// Default: central differences.
  virtual void derivatives(double t, const Point& x, Vec& grad, double* dt) const;
  virtual bool autonomous() const { return false; }
  /// True if H_t is constant in space for every t.
  virtual bool space_constant() const { return false; }
  /// Times where the field is only piecewise smooth; integrators step on them.
  virtual std::vector<double> time_breakpoints() const { return {}; }
  virtual std::string describe() const = 0;
  /// Chart dimension the field expects.
  virtual int dim() const = 0;
  /// H(t_i, x) for increasing times; derived fields override this to reuse
  /// one trajectory instead of integrating per sample.
  virtual std::vector<double> series(const Point& x, const std::vector<double>& times) const;
};

/**
 * A time-dependent Hamiltonian H(t, x). Cheap to copy; the implementation is
 * shared and immutable.
 */
class TimeScalarField {
 public:
  TimeScalarField() = default;
  explicit TimeScalarField(std::shared_ptr<const FieldImpl> impl) : impl_(std::move(impl)) {}

  double operator()(double t, const Point& x) const { return impl_->value(t, x); }
  bool autonomous() const { return impl_->autonomous(); }
  bool space_constant() const { return impl_->space_constant(); }
  std::vector<double> time_breakpoints() const { return impl_->time_breakpoints(); }
  std::string describe() const { return impl_->describe(); }
  int dim() const { return impl_->dim(); }
  std::vector<double> series(const Point& x, const std::vector<double>& times) const {
    return impl_->series(x, times);
  }
  const FieldImpl& impl() const { return *impl_; }
  bool valid() const { return static_cast<bool>(impl_); }

 private:
  std::shared_ptr<const FieldImpl> impl_;
};

/// Parses an expression over the coordinate names of M and `t`.
TimeScalarField parse_hamiltonian(const ChartedManifold& M, std::string_view text);
TimeScalarField constant_field(const ChartedManifold& M, double c);

using ValueFn = std::function<double(double, const Point&)>;
/// Wraps a plain function; derivatives by central differences.
TimeScalarField function_field(const ChartedManifold& M, ValueFn f, std::string description,
                               bool autonomous = false);
/// Space-constant field c(t) with optional exact derivative.
TimeScalarField time_function_field(const ChartedManifold& M, std::function<double(double)> c,
                                    std::string description,
                                    std::vector<double> breakpoints = {});

TimeScalarField linear_combination(double a, const TimeScalarField& H, double b,
                                   const TimeScalarField& F);
TimeScalarField difference(const TimeScalarField& H, const TimeScalarField& F);
/// e^{f} H for a spatial field f (its time argument is ignored).
TimeScalarField exp_scaled(const TimeScalarField& f, const TimeScalarField& H);
/// e^{f} as a field.
TimeScalarField exp_field(const TimeScalarField& f);

JetValue eval_jet(const TimeScalarField& field, const ChartedManifold& M, double t, const Point& x,
                  bool with_time_derivative = true);

/// Contact vector field of H from the closed chart formulas.
Vec contact_vector_field(const ChartedManifold& M, const TimeScalarField& field, double t,
                         const Point& x);
Vec contact_vector_field(const ChartedManifold& M, const Point& x, const JetValue& jet);
/// Same field from a generic linear solve of the defining equations.
Vec contact_vector_field_generic(const ChartedManifold& M, const TimeScalarField& field, double t,
                                 const Point& x);
Vec contact_vector_field_generic(const ChartedManifold& M, const Point& x, const JetValue& jet);

}  // namespace contactdyn
