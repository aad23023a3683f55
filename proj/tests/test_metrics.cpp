#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "contactdyn/builtins.hpp"
#include "contactdyn/metrics.hpp"
#include "support.hpp"

using namespace contactdyn;
using testsupport::Gen;
using testsupport::kPi;

namespace {

const ChartedManifold& sphere() {
  static const ChartedManifold S = ChartedManifold::hopf();
  return S;
}
const QuadratureGrid& sphere_grid() {
  static const QuadratureGrid G = quadrature_grid(sphere(), {16, 8, 8});
  return G;
}

double sup_abs(const TimeSlice& s) { return std::max(std::abs(s.max), std::abs(s.min)); }

}  // namespace

TEST_CASE("norms of the sphere Hamiltonians") {
  const ChartedManifold& S = sphere();
  const NormReport h = contact_norm(S, parse_hamiltonian(S, "0.5*cos(xi1)"), sphere_grid());
  CHECK(h.total == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(h.osc_integral == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(h.mean_integral) < 1e-12);
  const NormReport f = contact_norm(S, constant_field(S, 1.0), sphere_grid());
  CHECK(f.total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f.osc_integral == doctest::Approx(0.0));
  const NormReport g = contact_norm(S, parse_hamiltonian(S, "1-0.5*cos(xi1)"), sphere_grid());
  CHECK(g.total == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(g.series.size() == 65u);
  CHECK(g.grid_shape == std::vector<int>{16, 8, 8});
}

TEST_CASE("space-constant sin(2 pi t)") {
  const ChartedManifold& S = sphere();
  const TimeScalarField H = parse_hamiltonian(S, "sin(2*pi*t)");
  const NormReport n = contact_norm(S, H, sphere_grid());
  CHECK(n.total == doctest::Approx(2 / kPi).epsilon(1e-6));
  CHECK(n.sup_variant == doctest::Approx(1.0).epsilon(1e-9));
  FlowOptions fo;
  fo.dt = 1e-2;
  const BDReport bd = bd_length_and_energy(S, H, sphere_grid(), {}, {}, fo);
  CHECK(std::abs(bd.ell_bd) < 1e-12);
  CHECK(bd.norm == doctest::Approx(2 / kPi).epsilon(1e-6));
  CHECK(bd.reduction_check < 1e-10);
  CHECK(bd.basic);
}

TEST_CASE("time quadrature and option errors") {
  const auto q = time_quadrature(64);
  double s = 0.0;
  for (const auto& [t, w] : q) s += w;
  CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
  double s3 = 0.0;
  for (const auto& [t, w] : time_quadrature(64, {0.3, 0.7})) s3 += w * t * t * t;
  CHECK(s3 == doctest::Approx(0.25).epsilon(1e-13));
  NormOptions bad;
  bad.t_samples = 32;
  try {
    contact_norm(sphere(), constant_field(sphere(), 1.0), sphere_grid(), bad);
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ConfigError);
  }
  bad.t_samples = 65;
  CHECK_THROWS_AS(contact_norm(sphere(), constant_field(sphere(), 1.0), sphere_grid(), bad), Error);
}

TEST_CASE("sup norm") {
  CHECK(sup_norm(std::vector<std::vector<double>>{{0.0, 0.0}}) == 0.0);
  CHECK(sup_norm(std::vector<std::vector<double>>{{0.0, -2.0}, {1.5}}) == 2.0);
  const ChartedManifold D = ChartedManifold::darboux(2, 2.0);
  FlowOptions fo;
  fo.richardson_probes = 0;
  const ContactDynamicalSystem A =
      integrate_system(D, divergent_factors_hamiltonian(D, 4), {make_vec({0, 0, 0})}, fo);
  CHECK(sup_norm(A) == doctest::Approx(std::log(4.0)).epsilon(1e-3));
}

TEST_CASE("c0 distances") {
  const ChartedManifold& S = sphere();
  const std::vector<Point> probes = {make_vec({0.3, 1.0, 0.7}), make_vec({5.0, 2.0, 1.1})};
  FlowOptions fo;
  fo.dt = 1e-2;
  fo.richardson_probes = 0;
  const ContactDynamicalSystem R = integrate_system(S, constant_field(S, 1.0), probes, fo);
  const ContactDynamicalSystem I = identity_system(S, probes, R.times);
  const C0Distance self = c0_distance(R, R);
  CHECK(self.d_M == 0.0);
  CHECK(self.d_bar_M == 0.0);
  const C0Distance half = c0_distance(R, I, probes, {0.5});
  CHECK(half.d_M == doctest::Approx(std::sqrt(2.0) * kPi).epsilon(1e-9));
  CHECK(half.d_bar_M == doctest::Approx(2 * std::sqrt(2.0) * kPi).epsilon(1e-9));
  // a full Reeb period wraps back onto the start
  CHECK(c0_distance(R, I, probes, {1.0}).d_M < 1e-9);
}

TEST_CASE("contact distance is zero on the diagonal and symmetric") {
  Gen g(3);
  for (const ChartedManifold& M : {ChartedManifold::darboux(2), sphere()}) {
    const QuadratureGrid grid = M.kind() == ManifoldKind::HopfSphere ? sphere_grid() : quadrature_grid(M, {25, 25, 25});
    const std::vector<Point> seeds = {testsupport::random_flow_seed(g, M), testsupport::random_flow_seed(g, M)};
    FlowOptions fo;
    fo.dt = 1e-2;
    fo.richardson_probes = 0;
    const ContactDynamicalSystem A = integrate_system(M, parse_hamiltonian(M, testsupport::random_hamiltonian(g, M, true, 0.15)), seeds, fo);
    const ContactDynamicalSystem B = integrate_system(M, parse_hamiltonian(M, testsupport::random_hamiltonian(g, M, true, 0.15)), seeds, fo);
    const DistanceReport aa = contact_distance(A, A, grid);
    CHECK(aa.d_alpha == doctest::Approx(0.0));
    const DistanceReport ab = contact_distance(A, B, grid);
    const DistanceReport ba = contact_distance(B, A, grid);
    CHECK(ab.d_alpha > 0.0);
    CHECK(std::abs(ab.d_alpha - ba.d_alpha) < 1e-10);
    CHECK(ab.d_alpha == doctest::Approx(ab.d_bar_M + ab.conf_sup + ab.ham_norm).epsilon(1e-14));
  }
}

TEST_CASE("property: max norm sandwich and exponential rescaling bounds") {
  Gen g(5);
  // Extrema on the edge of the Darboux box sit between grid midpoints and the
  // boundary; the refined values are the ones the bounds are checked against.
  NormOptions no;
  no.max_refinement_delta = 1.0;
  int checked = 0;
  for (const ChartedManifold& M : {ChartedManifold::darboux(2), sphere()}) {
    const QuadratureGrid grid = M.kind() == ManifoldKind::HopfSphere ? sphere_grid() : quadrature_grid(M, {25, 25, 25});
    for (int i = 0; i < 60; ++i) {
      const TimeScalarField H = parse_hamiltonian(M, testsupport::random_hamiltonian(g, M, false, 1.0));
      const NormReport n = contact_norm(M, H, grid, no);
      const double absH = sup_abs(field_slice(M, H, grid, 0.0, no));
      CAPTURE(H.describe());
      CHECK(absH <= n.total * (1 + 1e-12));
      CHECK(n.total < 3 * absH);
      CHECK(n.total <= n.sup_variant * (1 + 1e-12));

      const TimeScalarField f = parse_hamiltonian(M, testsupport::random_hamiltonian(g, M, false, 1.0));
      const double absf = sup_abs(field_slice(M, f, grid, 0.0, no));
      const double scaled = contact_norm(M, exp_scaled(f, H), grid, no).total;
      CHECK(scaled >= std::exp(-absf) * n.total / 3);
      CHECK(scaled <= 3 * std::exp(absf) * n.total);
      ++checked;
    }
  }
  CHECK(checked == 120);
}

TEST_CASE("property: basic fields: BD length, mean-removal reduction and sup variant") {
  Gen g(8);
  const ChartedManifold& S = sphere();
  // the Reeb-invariant xi1 - xi2 term moves eta fast near the poles, so stay on a band
  GridOptions band;
  band.eta_range = {0.45, 1.12};
  // every grid value of H#F costs a backward flow, so the grid is small here
  const QuadratureGrid grid = quadrature_grid(S, {8, 6, 6}, band);
  FlowOptions fo;
  fo.dt = 1e-2;
  for (int i = 0; i < 4; ++i) {
    const TimeScalarField H = parse_hamiltonian(S, testsupport::random_basic_hamiltonian(g, S));
    const BDReport bd = bd_length_and_energy(S, H, grid, {}, {}, fo);
    CAPTURE(H.describe());
    CHECK(bd.basic);
    CHECK(bd.ell_bd <= bd.norm * (1 + 1e-12));
    CHECK(bd.reduction_check < 1e-5);
    const NormReport n = contact_norm(S, H, grid);
    CHECK(n.total <= n.sup_variant);
  }
}

TEST_CASE("displacement functional") {
  const ChartedManifold D = ChartedManifold::darboux(2, 3.0);
  const QuadratureGrid grid = quadrature_grid(D, {25, 25, 25});
  std::vector<Point> ball;
  Gen g(11);
  while (ball.size() < 40) {
    const Point p = make_vec({g.uniform(-0.4, 0.4), g.uniform(-0.4, 0.4), g.uniform(-0.4, 0.4)});
    if (p.norm() <= 0.4) ball.push_back(p);
  }
  const ContactDynamicalSystem A = integrate_system(D, parse_hamiltonian(D, "y1"), ball);
  const DisplacementReport d = displacement_energy_functional(A, ball, grid);
  CHECK(d.displaced);
  CHECK(d.min_distance > 0.1);
  CHECK(d.functional == doctest::Approx(contact_norm(D, parse_hamiltonian(D, "y1"), grid).total));
  CHECK(d.functional > 0.0);
  const ContactDynamicalSystem I = identity_system(D, ball, A.times);
  CHECK_FALSE(displacement_energy_functional(I, ball, grid, 1e-6).displaced);

  const ChartedManifold& S = sphere();
  const std::vector<Point> small = {make_vec({1.0, 1.0, 0.8}), make_vec({1.05, 1.0, 0.8}), make_vec({1.0, 1.05, 0.82})};
  const ContactDynamicalSystem R = integrate_system(S, constant_field(S, 1.0), small);
  CHECK(displacement_energy_functional(R, small, sphere_grid(), std::nullopt, 0.25).displaced);
  // period wrapping: the time-1 Reeb map is the identity
  CHECK_FALSE(displacement_energy_functional(R, small, sphere_grid(), 1e-6, 1.0).displaced);
}
