#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "contactdyn/hamfield.hpp"

namespace contactdyn {

/// Normalized odd smooth step: Sigma(u) = int_0^u b / int_0^1 b for the
/// standard bump b, so Sigma(+-1) = +-1 and Sigma'(u) = b(u) / I.
/// Values come from a cubic Hermite table; the derivative is exact.
class OddStep {
 public:
  static const OddStep& instance();
  double operator()(double u) const;
  double derivative(double u) const;
  /// I = int_0^1 exp(1 - 1/(1 - u^2)) du.
  double bump_integral() const noexcept { return integral_; }

  double apply(double u) const { return (*this)(u); }
  Jet apply(const Jet& u) const { return u.chain((*this)(u.v), derivative(u.v)); }

 private:
  OddStep();
  std::vector<double> values_;
  double integral_ = 0.0;
  double h_ = 0.0;
};

/// C-infinity plateau: 1 on [lo, hi], 0 outside (lo - ramp, hi + ramp).
template <class T>
T plateau(const T& s, double lo, double hi, double ramp) {
  return smooth::apply_step((s - (lo - ramp)) / ramp) * smooth::apply_step(((hi + ramp) - s) / ramp);
}

/**
 * Cutoffs for the divergent-conformal-factor family on Darboux R^3:
 *   H_k = (eta_k(x, y) / k^2) sin(k^2 ln k rho_k(z)).
 * eta_k is 1 for r <= eps/2 and 0 for r >= eps; rho_k is odd with rho_k'(0) = 1,
 * |rho_k'| <= 1 and rho_k = +-pi/(k^2 ln k) for |z| >= eps.
 */
struct CutoffFamily {
  int k = 2;
  double eps = 0.0;
  double plateau_value = 0.0;  ///< pi / (k^2 ln k)

  explicit CutoffFamily(int k);

  template <class T>
  T eta(const T& x, const T& y) const {
    const T r2 = (x * x + y * y) / (eps * eps);
    return 1.0 - smooth::apply_step((r2 - 0.25) / 0.75);
  }
  template <class T>
  T rho(const T& z) const {
    return plateau_value * OddStep::instance().apply(z / eps);
  }
  double rho_d(double z) const { return plateau_value / eps * OddStep::instance().derivative(z / eps); }
  template <class T>
  T hamiltonian(const T& x, const T& y, const T& z) const {
    using std::sin;
    const double kk = static_cast<double>(k) * k;
    return eta(x, y) / kk * sin(kk * std::log(static_cast<double>(k)) * rho(z));
  }
};

/// Middle-thirds construction: E_k is a union of 2^k intervals of length 3^-k.
struct CantorStage {
  int k = 0;
  std::vector<std::pair<double, double>> intervals;
  double height = 1.0;  ///< (3/2)^k, so the density integrates to 1
  double width = 0.0;   ///< mollifier width 3^-k / 10

  explicit CantorStage(int k);

  /// Step density (3/2)^k on E_k.
  double step_density(double t) const;
  /// Mollified density: each edge is replaced by a centered smooth ramp.
  double smooth_density(double t) const;
  std::vector<double> breakpoints() const;
  /// F_k(t) = int_0^t of the mollified density.
  double smooth_integral(double t) const;

 private:
  std::vector<double> cuts_;        ///< 0, breakpoints, 1
  std::vector<double> cumulative_;  ///< F_k at cuts_
  double piece_integral(double lo, double hi) const;
};

/// Exact L1 distance of two step densities on [0, 1].
double cantor_step_l1(const CantorStage& a, const CantorStage& b);
/// L1 distance of two mollified densities on [0, 1] (piecewise Gauss-Legendre).
double cantor_smooth_l1(const CantorStage& a, const CantorStage& b);
/// The Cantor function, by recursion on ternary digits (depth 60).
double cantor_function(double t);

TimeScalarField divergent_factors_hamiltonian(const ChartedManifold& M, int k);
/// rho(x, y, z) * (-eps tanh(y / eps)) with eps = 1/k and a plateau around {0 <= x <= 1}.
TimeScalarField divergent_isotopies_hamiltonian(const ChartedManifold& M, int k);
/// Space-constant mollified Cantor density on the sphere (a time change of the Reeb flow).
TimeScalarField cantor_density_hamiltonian(const ChartedManifold& M, int k);

/// Builtin registry: reeb, half_cos, divergent_factors{k}, divergent_isotopies{k},
/// cantor_density{k}.
TimeScalarField make_builtin(const ChartedManifold& M, const std::string& name,
                             const std::map<std::string, double>& params);
std::vector<std::string> builtin_names();

}  // namespace contactdyn
