#pragma once

#include <functional>
#include <vector>

#include "contactdyn/flow.hpp"
#include "contactdyn/metrics.hpp"

namespace contactdyn {

/// A point (x, theta) of W = M x R.
struct SymplectizationPoint {
  Point base;
  double theta = 0.0;
};

/// omega(e_i, e_j) for omega = -d(e^theta alpha) = -e^theta (dtheta ^ alpha + dalpha).
/// Coordinates are the chart coordinates of M followed by theta.
Mat omega_at(const ChartedManifold& M, const SymplectizationPoint& p);

/// A time-dependent function on W with its gradient (chart coordinates, then theta).
struct WHamiltonian {
  std::function<double(double, const SymplectizationPoint&)> value;
  std::function<Vec(double, const SymplectizationPoint&)> gradient;
  std::vector<double> breakpoints;
};

/// X with iota(X) omega = dK, by a linear solve.
Vec w_hamiltonian_vector_field(const ChartedManifold& M, const WHamiltonian& K, double t,
                               const SymplectizationPoint& p);

/// RK4 flow of K on W from p, sampled at increasing `times` (starting at 0).
std::vector<SymplectizationPoint> integrate_on_w(const ChartedManifold& M, const WHamiltonian& K,
                                                 const SymplectizationPoint& p,
                                                 const std::vector<double>& times, double dt = 1e-3,
                                                 int min_steps_per_piece = 16);

/// Admissible lift of a contact dynamical system:
///   phi_hat_t(x, theta) = (phi_t(x), theta - h_t(x)),  H_hat = e^theta H.
class AdmissibleSystem {
 public:
  explicit AdmissibleSystem(ContactDynamicalSystem parent);
  const ContactDynamicalSystem& parent() const noexcept { return parent_; }
  const ChartedManifold& manifold() const noexcept { return parent_.manifold; }

  SymplectizationPoint map(const SymplectizationPoint& p, double t) const;
  SymplectizationPoint inverse_map(const SymplectizationPoint& p, double t) const;
  /// e^theta H_t(x) with its exact factorized gradient.
  WHamiltonian hamiltonian() const;

 private:
  ContactDynamicalSystem parent_;
};

AdmissibleSystem lift_system(const ContactDynamicalSystem& A);

struct LiftCheck {
  double max_error = 0.0;  ///< max over seeds and stored times of the W-space chart distance
  std::vector<std::vector<SymplectizationPoint>> direct;  ///< [seed][time], from the flow of H_hat
};

/// Integrates the flow of H_hat on W from (seed, theta0) and compares with the lift rule
/// at every stored time of the parent.
LiftCheck verify_lift(const AdmissibleSystem& L, const std::vector<double>& theta0, double dt = 1e-3);

struct AdmissibleNorm {
  double norm = 0.0;        ///< ||H_hat||_{a,b}
  double contact = 0.0;     ///< ||H||
  double lower = 0.0;       ///< min(e^b - e^a, e^a) ||H||
  double upper = 0.0;       ///< e^b ||H||
};

/// int (max - min) of e^theta H_t over [a, b] x M, from the slices of H.
AdmissibleNorm admissible_norm(const ChartedManifold& M, const TimeScalarField& H,
                               const QuadratureGrid& grid, double a, double b,
                               const NormOptions& opts = {});
AdmissibleNorm admissible_norm(const AdmissibleSystem& L, const QuadratureGrid& grid, double a, double b,
                               const NormOptions& opts = {});

/// rho(theta) H_hat with rho = 1 on [a - c, b + c] and 0 outside (a - c - 1, b + c + 1).
/// Throws CutoffTooTight if c is below the parent's sampled sup |h|.
WHamiltonian cutoff_hamiltonian(const AdmissibleSystem& L, double a, double b, double c);

using WMap = std::function<SymplectizationPoint(const SymplectizationPoint&)>;

/// max over probes of |Phi^* omega - omega| (entrywise), with central-difference Jacobians.
double symplectic_defect(const ChartedManifold& M, const WMap& phi,
                         const std::vector<SymplectizationPoint>& probes, double step = kFdStep);

/// d_W(phi_hat, psi_hat) = d_M(phi, psi) + |h - g| on probes at the given times.
double w_distance(const ContactDynamicalSystem& A, const ContactDynamicalSystem& B,
                  const std::vector<Point>& probes, const std::vector<double>& times);

}  // namespace contactdyn
