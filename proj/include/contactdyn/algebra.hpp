#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "contactdyn/flow.hpp"

namespace contactdyn {

/// A contact diffeomorphism with its inverse; both return the log conformal
/// factor of the respective map at the input point.
struct ContactDiffeo {
  ChartedManifold manifold;
  std::function<FlowResult(const Point&)> forward;
  std::function<FlowResult(const Point&)> inverse;
  std::string description;

  static ContactDiffeo identity(const ChartedManifold& M);
  /// phi_t of a system, inverted by integrating back from t to 0.
  static ContactDiffeo time_slice(const ContactDynamicalSystem& A, double t = 1.0);
};

/// A time change zeta: [0, 1] -> R with zeta(0) = 0.
struct Reparameterization {
  std::function<double(double)> zeta;
  /// Derivative; required for the re-integration route.
  std::function<double(double)> dzeta;
  std::vector<double> breakpoints;
  std::string description;

  /// zeta(t) = s t.
  static Reparameterization linear(double s);
};

struct AlgebraOptions {
  /// Also integrate the derived Hamiltonian from the seeds and store that
  /// trajectory; the group-law route is then kept as a cross-check.
  bool integrate_derived = true;
  FlowOptions flow{};
  /// Seeds for the derived system; defaults to the first operand's seeds.
  std::optional<std::vector<Point>> seeds;
};

/// (H#F)_t = H_t + (e^{h_t} F_t) o (phi_H^t)^{-1}
TimeScalarField compose_hamiltonian(const ContactDynamicalSystem& A, const ContactDynamicalSystem& B);
/// Hbar_t = -e^{-h_t} (H_t o phi_H^t)
TimeScalarField inverse_hamiltonian(const ContactDynamicalSystem& A);
/// K_t = e^{-g} (H_t o phi)
TimeScalarField conjugate_hamiltonian(const ContactDynamicalSystem& A, const ContactDiffeo& phi);
/// H^zeta(t, x) = zeta'(t) H(zeta(t), x)
TimeScalarField reparameterized_hamiltonian(const TimeScalarField& H, const Reparameterization& zeta);

/// Generated by H#F; its flow is phi_H^t o phi_F^t.
ContactDynamicalSystem compose(const ContactDynamicalSystem& A, const ContactDynamicalSystem& B,
                               const AlgebraOptions& opts = {});
ContactDynamicalSystem inverse(const ContactDynamicalSystem& A, const AlgebraOptions& opts = {});
/// Flow phi^{-1} o phi_H^t o phi.
ContactDynamicalSystem conjugate(const ContactDynamicalSystem& A, const ContactDiffeo& phi,
                                 const AlgebraOptions& opts = {});
/// The same isotopy described for alpha' = e^f alpha (f is read at t = 0).
ContactDynamicalSystem change_of_form(const ContactDynamicalSystem& A, const TimeScalarField& f);
/// phi^t = phi_A^{zeta(t)} by resampling; with integrate_derived the formula
/// Hamiltonian is integrated too and the route residual recorded.
ContactDynamicalSystem reparameterize(const ContactDynamicalSystem& A, const Reparameterization& zeta,
                                      const AlgebraOptions& opts = {});

}  // namespace contactdyn
