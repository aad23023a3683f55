#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "contactdyn/hamfield.hpp"
#include "contactdyn/manifold.hpp"

namespace contactdyn {

/// Image of a point and the log conformal factor of the map at that point.
struct FlowResult {
  Point point;
  double log_factor = 0.0;
};

/**
 * Two-time flow evaluator: advance(x, s, t) applies phi_t o phi_s^{-1} to x and
 * returns its conformal factor at x. advance(x, 0, t) is phi_t and
 * advance(x, t, 0) is phi_t^{-1}.
 */
class FlowEngine {
 public:
  virtual ~FlowEngine() = default;
  virtual FlowResult advance(const Point& x, double s, double t) const = 0;
  /// phi_{t_i}(x) for increasing times starting anywhere >= 0.
  virtual std::vector<FlowResult> trajectory(const Point& x, const std::vector<double>& times) const;
  virtual const ChartedManifold& manifold() const = 0;
  virtual std::string describe() const = 0;
};

struct FlowOptions {
  double dt = 1e-3;
  /// Number of stored time intervals; samples are t_i = i / t_samples.
  int t_samples = 100;
  /// Seeds used for the dt vs dt/2 error estimate (0 disables it).
  int richardson_probes = 4;
  /// Minimum RK4 steps on each piece between field breakpoints.
  int min_steps_per_piece = 16;
};

/// Classical RK4 on (x, h) with x' = X_H(t, x), h' = (R.H_t)(x).
class IntegratingEngine final : public FlowEngine {
 public:
  IntegratingEngine(ChartedManifold M, TimeScalarField H, double dt, int min_steps_per_piece = 16);
  FlowResult advance(const Point& x, double s, double t) const override;
  std::vector<FlowResult> trajectory(const Point& x, const std::vector<double>& times) const override;
  const ChartedManifold& manifold() const override { return M_; }
  std::string describe() const override;
  double dt() const noexcept { return dt_; }
  const TimeScalarField& hamiltonian() const noexcept { return H_; }

 private:
  void integrate(Point& x, double& h, double s, double t) const;
  void rk4_step(Point& x, double& h, double t, double dt) const;

  ChartedManifold M_;
  TimeScalarField H_;
  double dt_;
  int min_steps_;
  std::vector<double> breakpoints_;
};

class IdentityEngine final : public FlowEngine {
 public:
  explicit IdentityEngine(ChartedManifold M) : M_(std::move(M)) {}
  FlowResult advance(const Point& x, double, double) const override { return {x, 0.0}; }
  const ChartedManifold& manifold() const override { return M_; }
  std::string describe() const override { return "identity"; }

 private:
  ChartedManifold M_;
};

struct SystemMeta {
  double dt = 0.0;
  /// max over probe seeds of |state(dt) - state(dt/2)| at t = 1
  double richardson_error = 0.0;
  /// "integrated": stored samples come from RK4 on the system's own Hamiltonian;
  /// "group_law": from composing parent flow maps.
  std::string seed_route = "integrated";
  /// Max chart distance between the two routes on seeds when both were run.
  std::optional<double> route_residual;
  std::optional<double> route_factor_residual;
  /// Seeds whose trajectory leaves the Darboux sampling box.
  std::vector<int> box_leavers;
  std::string description;
};

class FlowMap;

/// The triple (isotopy, Hamiltonian, conformal factor) sampled on seeds.
struct ContactDynamicalSystem {
  ChartedManifold manifold;
  TimeScalarField hamiltonian;
  /// f with alpha' = e^f alpha when the system is described for a rescaled form.
  std::optional<TimeScalarField> form_scale;
  std::shared_ptr<const FlowEngine> engine;
  std::vector<double> times;
  std::vector<Point> seeds;
  std::vector<std::vector<Point>> trajectories;  ///< [seed][time]
  std::vector<std::vector<double>> conformal;    ///< [seed][time]
  SystemMeta meta;

  FlowMap at(double t) const;
  /// Index of t in the time grid, or -1.
  int time_index(double t) const;
};

enum class OffSeedMode { Reintegrate, Interpolate };

/// The time-t map of a system. Seeds are answered from stored samples; other
/// points are re-integrated (default) or interpolated from nearby seeds.
class FlowMap {
 public:
  FlowMap(const ContactDynamicalSystem& sys, double t, OffSeedMode mode = OffSeedMode::Reintegrate);
  FlowResult operator()(const Point& x) const;
  FlowResult inverse(const Point& x) const;
  double time() const noexcept { return t_; }
  const ChartedManifold& manifold() const noexcept { return M_; }

 private:
  ChartedManifold M_;
  std::shared_ptr<const FlowEngine> engine_;
  double t_;
  OffSeedMode mode_;
  std::vector<Point> seeds_;
  std::vector<FlowResult> images_;
};

std::vector<double> uniform_times(int samples);

ContactDynamicalSystem integrate_system(const ChartedManifold& M, const TimeScalarField& H,
                                        const std::vector<Point>& seeds,
                                        const FlowOptions& opts = {});

/// Fills trajectories by querying an engine.
ContactDynamicalSystem system_from_engine(const ChartedManifold& M, const TimeScalarField& H,
                                          std::shared_ptr<const FlowEngine> engine,
                                          const std::vector<Point>& seeds,
                                          const std::vector<double>& times,
                                          const std::string& route);

ContactDynamicalSystem identity_system(const ChartedManifold& M, const std::vector<Point>& seeds,
                                       const std::vector<double>& times);

/// Central-difference Jacobian of a chart map at x (periodic differences unwrapped).
Mat map_jacobian(const ChartedManifold& M, const std::function<Point(const Point&)>& f,
                 const Point& x, double step = kFdStep);

/// log of lambda in (phi^* alpha)_x = lambda alpha_x, from a finite-difference
/// Jacobian. Throws NotContact if the pulled-back covector is not proportional.
double pullback_conformal_factor(const ChartedManifold& M, const FlowMap& phi, const Point& x);
double pullback_conformal_factor(const ChartedManifold& M,
                                 const std::function<Point(const Point&)>& phi, const Point& x);

}  // namespace contactdyn
