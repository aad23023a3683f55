#pragma once

#include <optional>
#include <vector>

#include "contactdyn/algebra.hpp"
#include "contactdyn/flow.hpp"
#include "contactdyn/manifold.hpp"

namespace contactdyn {

struct NormOptions {
  /// Composite Simpson intervals on [0, 1]; even and >= 64.
  int t_samples = 64;
  /// Brent refinement of the grid extrema along each axis.
  bool refine = true;
  int refine_iterations = 24;
  /// Mean against the normalized volume of e^f alpha instead of alpha.
  std::optional<TimeScalarField> form_scale;
  /// Refinement delta above which ResolutionTooCoarse is raised.
  double max_refinement_delta = 0.05;
};

/// Per-time extrema and mean of a field on a grid.
struct TimeSlice {
  double t = 0.0;
  double max = 0.0;
  double min = 0.0;
  double mean = 0.0;
  double grid_max = 0.0;  ///< before refinement
  double grid_min = 0.0;
  double osc() const { return max - min; }
};

struct NormReport {
  double osc_integral = 0.0;
  double mean_abs_integral = 0.0;  ///< int |c(H_t)| dt
  double mean_integral = 0.0;      ///< int c(H_t) dt
  double total = 0.0;              ///< ||H||
  double sup_variant = 0.0;        ///< max_t (osc + |c|)
  double refinement_delta = 0.0;
  std::vector<int> grid_shape;
  int t_samples = 0;
  std::vector<TimeSlice> series;
};

/// Extrema and mean of H_t on the grid at a single time.
TimeSlice field_slice(const ChartedManifold& M, const TimeScalarField& H, const QuadratureGrid& grid,
                      double t, const NormOptions& opts = {});

/// Simpson nodes on [0, 1] honouring field breakpoints; weights sum to 1.
std::vector<std::pair<double, double>> time_quadrature(int intervals,
                                                       const std::vector<double>& breakpoints = {});

NormReport contact_norm(const ChartedManifold& M, const TimeScalarField& H, const QuadratureGrid& grid,
                        const NormOptions& opts = {});

/// Max over times and seeds of |h|.
double sup_norm(const std::vector<std::vector<double>>& conformal);
double sup_norm(const ContactDynamicalSystem& A);

struct C0Distance {
  double d_M = 0.0;
  double d_bar_M = 0.0;
};

/// Chart distance maximized over probes and times; d_bar adds the inverse maps.
C0Distance c0_distance(const ContactDynamicalSystem& A, const ContactDynamicalSystem& B,
                       const std::vector<Point>& probes, const std::vector<double>& times);
/// Same, using the systems' own seeds and time grid.
C0Distance c0_distance(const ContactDynamicalSystem& A, const ContactDynamicalSystem& B);

struct DistanceReport {
  double d_M = 0.0;
  double d_bar_M = 0.0;
  double conf_sup = 0.0;  ///< |h - f|
  double ham_norm = 0.0;  ///< ||H - F||
  double d_alpha = 0.0;
};

struct DistanceOptions {
  NormOptions norm{};
  /// Probe points; defaults to A's seeds.
  std::optional<std::vector<Point>> probes;
};

DistanceReport contact_distance(const ContactDynamicalSystem& A, const ContactDynamicalSystem& B,
                                const QuadratureGrid& grid, const DistanceOptions& opts = {});

struct BDReport {
  double ell_bd = 0.0;
  double norm = 0.0;             ///< ||H||
  double reduction_norm = 0.0;   ///< ||H#F|| with F_t = cbar - c_t
  double reduction_check = 0.0;  ///< | ||H#F|| - ell_bd |
  double energy_upper = 0.0;     ///< min of ell_bd over the supplied generators
  bool basic = true;
  double max_reeb_derivative = 0.0;
};

/// Banyaga-Donato length int osc + |int c| and the mean-removal reduction.
BDReport bd_length_and_energy(const ChartedManifold& M, const TimeScalarField& H,
                              const QuadratureGrid& grid, const NormOptions& opts = {},
                              const std::vector<TimeScalarField>& other_generators = {},
                              const FlowOptions& flow = {});

struct DisplacementReport {
  bool displaced = false;
  double min_distance = 0.0;
  double margin = 0.0;
  double functional = 0.0;  ///< e^{-|h|} ||H||
};

/// Whether phi^t moves the sample K off itself by more than `margin`
/// (default: 10x the system's Richardson estimate), and e^{-|h|}||H||.
DisplacementReport displacement_energy_functional(const ContactDynamicalSystem& A,
                                                  const std::vector<Point>& K,
                                                  const QuadratureGrid& grid,
                                                  std::optional<double> margin = std::nullopt,
                                                  double t = 1.0, const NormOptions& opts = {});

}  // namespace contactdyn
