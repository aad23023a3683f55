#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "contactdyn/errors.hpp"
#include "contactdyn/linalg.hpp"

namespace contactdyn {

/// Chart coordinates of a point. Periodic angles are kept in [0, 2pi).
using Point = Vec;

enum class ManifoldKind { Darboux, HopfSphere };

/// Contact form and its exterior derivative at a point.
/// d_alpha(i, j) = dalpha(e_i, e_j).
struct CovectorData {
  Vec alpha;
  Mat d_alpha;
};

/**
 * A model contact manifold given in a single chart.
 *
 * Darboux(n): R^{2n-1} with coordinates (x1..x_{n-1}, y1..y_{n-1}, z) and
 * alpha = dz - sum y_i dx_i. The box is only used for quadrature and for
 * flagging trajectories that leave the sampled region.
 *
 * HopfSphere: S^3 in coordinates (xi1, xi2, eta) with
 * alpha = (sin^2 eta dxi1 + cos^2 eta dxi2) / 2pi. The circles eta = 0 and
 * eta = pi/2 are not covered; points closer than pole_margin are rejected.
 */
class ChartedManifold {
 public:
  /// Darboux R^3 with the default box.
  ChartedManifold();
  static ChartedManifold darboux(int n, double half_width = 2.0);
  static ChartedManifold darboux(int n, const Vec& box_lo, const Vec& box_hi);
  static ChartedManifold hopf(double pole_margin = 1e-3);

  ManifoldKind kind() const noexcept { return kind_; }
  int n() const noexcept { return n_; }
  int dim() const noexcept { return 2 * n_ - 1; }
  double pole_margin() const noexcept { return pole_margin_; }
  const Vec& box_lo() const noexcept { return box_lo_; }
  const Vec& box_hi() const noexcept { return box_hi_; }
  std::string name() const;

  const std::vector<std::string>& coordinate_names() const noexcept { return names_; }
  /// Index of a named coordinate, or -1.
  int coordinate_index(std::string_view name) const;
  bool is_periodic(int axis) const;
  /// Same kind, dimension and chart parameters.
  bool same_chart(const ChartedManifold& other) const;

  /// Throws DomainError / PoleSingularity if x is not a valid chart point.
  void check_domain(const Point& x) const;
  bool in_box(const Point& x) const;

  CovectorData exterior_data_at(const Point& x) const;
  Vec reeb_at(const Point& x) const;

  /// Coefficient of alpha ^ (dalpha)^{n-1} against the coordinate volume;
  /// for the sphere this is the normalized density sin(eta)cos(eta)/(2 pi^2).
  double volume_density(const Point& x) const;
  /// det [[0, alpha^T], [-alpha, dalpha]]; nonzero iff alpha is contact at x.
  double nondegeneracy(const Point& x) const;

  /// Wrap periodic coordinates into [0, 2pi).
  Point wrap(Point x) const;
  /// a - b with periodic components reduced to (-pi, pi].
  Vec chart_difference(const Point& a, const Point& b) const;
  double chart_distance(const Point& a, const Point& b) const;

 private:
  struct Raw {};
  explicit ChartedManifold(Raw) {}

  ManifoldKind kind_ = ManifoldKind::Darboux;
  int n_ = 2;
  double pole_margin_ = 1e-3;
  Vec box_lo_;
  Vec box_hi_;
  std::vector<std::string> names_;
};

/// Tensor-product quadrature for the normalized contact volume.
struct QuadratureGrid {
  std::vector<Point> nodes;
  std::vector<double> weights;
  /// Per-axis node coordinates; nodes are ordered with the last axis fastest.
  std::vector<std::vector<double>> axes;
  /// Per-axis search half-width used when refining extrema around a node.
  std::vector<double> spacing;
  /// Per-axis lower/upper limits that refinement must respect.
  std::vector<std::pair<double, double>> limits;

  std::size_t size() const noexcept { return nodes.size(); }
  template <class F>
  double mean(F&& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
    return s;
  }
};

struct GridOptions {
  /// Restrict eta to a sub-band of (0, pi/2). Means of xi-only functions do
  /// not depend on the band.
  std::optional<std::pair<double, double>> eta_range;
};

QuadratureGrid quadrature_grid(const ChartedManifold& M, const std::vector<int>& resolution,
                               const GridOptions& options = {});

/// Gauss-Legendre nodes and weights on [-1, 1] (Golub-Welsch).
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);

}  // namespace contactdyn
