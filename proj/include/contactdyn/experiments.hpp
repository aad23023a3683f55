#pragma once

#include <optional>
#include <string>
#include <vector>

#include "contactdyn/algebra.hpp"
#include "contactdyn/metrics.hpp"
#include "contactdyn/report.hpp"

namespace contactdyn {

/// Knobs shared by the reproduction runs. Unset grids fall back to per-experiment defaults.
struct ExperimentOptions {
  double dt = 1e-3;
  /// Step of the flows that derived Hamiltonians re-run on every evaluation.
  double derived_dt = 2.5e-3;
  int flow_samples = 100;
  int t_samples = 64;
  std::optional<std::vector<int>> grid;
  /// Also compute norms of derived Hamiltonians that need one integration per evaluation.
  bool derived_norms = true;
};

/// Closed-form flow of H = cos(xi1)/2 on the sphere.
struct SphereClosedForm {
  /// Flow of a chart point and the conformal factor h_t at that point.
  static Point point(const Point& x0, double t);
  static double conformal(const Point& x0, double t);
  /// Mean over the sphere of exp(3 h_t); equals the mean of the composed
  /// Hamiltonian if the chart flow were a diffeomorphism of the sphere.
  static double exp3h_mean(double t);
  static double exp3h_mean_integral();
  /// Mean of the composed Hamiltonian at time t in the chart, cosh(pi t).
  static double chart_mean(double t);
};

/// The 32 seeds xi1 = 2 pi (i + 1/2) / 32, xi2 = 0, eta = 1.45.
std::vector<Point> sphere_seeds();

Report example_divergent_factors(int k, const ExperimentOptions& opts = {});
Report example_divergent_isotopies(int k, const ExperimentOptions& opts = {});
Report example_cantor(int k, const ExperimentOptions& opts = {});
Report example_sphere(const ExperimentOptions& opts = {});
Report example_triangle_failure(int k, const ExperimentOptions& opts = {});

/// Flow of e^{-g} against phi^{-1} o (Reeb flow) o phi on probes.
Report reeb_conjugation_check(const ContactDiffeo& phi, const std::vector<Point>& probes,
                              const ExperimentOptions& opts = {});

struct CauchyOptions {
  NormOptions norm{};
  /// Probe points; defaults to the first system's seeds.
  std::optional<std::vector<Point>> probes;
  /// Times at which maps are compared; defaults to 0, 0.1, ..., 1.
  std::optional<std::vector<double>> times;
};

/// Pairwise d_bar_M, |h_i - h_j|, ||H_i - H_j|| and d_alpha, with trend flags
/// saying which component fails to be Cauchy.
Report cauchy_table(const std::vector<ContactDynamicalSystem>& systems, const QuadratureGrid& grid,
                    const CauchyOptions& opts = {});

/// Ready-made families for the table.
Report cauchy_divergent_factors(const std::vector<int>& ks, const ExperimentOptions& opts = {});
Report cauchy_divergent_isotopies(const std::vector<int>& ks, const ExperimentOptions& opts = {});
Report cauchy_cantor(const std::vector<int>& ks, const ExperimentOptions& opts = {});

/// Names accepted by run_experiment.
std::vector<std::string> experiment_names();
/// Dispatch by name; `k` is ignored by experiments without a parameter.
Report run_experiment(const std::string& name, std::optional<int> k, const ExperimentOptions& opts = {});

}  // namespace contactdyn
