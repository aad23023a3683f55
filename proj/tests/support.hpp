#pragma once

// Hand-rolled generators and small oracles shared by the test executables.

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "contactdyn/manifold.hpp"

namespace testsupport {

using contactdyn::ChartedManifold;
using contactdyn::ManifoldKind;
using contactdyn::Point;

inline constexpr double kPi = std::numbers::pi;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng_); }
  bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }
  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(integer(0, static_cast<int>(v.size()) - 1))];
  }

 private:
  std::mt19937_64 rng_;
};

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  std::string s = buf;
  return v < 0 ? "(" + s + ")" : s;
}

/// Interior chart point. Hopf points keep away from the poles.
inline Point random_point(Gen& g, const ChartedManifold& M, double half = 1.0) {
  Point p(M.dim());
  if (M.kind() == ManifoldKind::HopfSphere) {
    p[0] = g.uniform(0.0, 2 * kPi);
    p[1] = g.uniform(0.0, 2 * kPi);
    p[2] = g.uniform(0.35, 1.22);
    return p;
  }
  for (int i = 0; i < M.dim(); ++i) p[i] = g.uniform(-half, half);
  return p;
}

/// Seed for unit-time flows: Hopf seeds sit in the middle of the eta range.
inline Point random_flow_seed(Gen& g, const ChartedManifold& M, double half = 0.5) {
  Point p = random_point(g, M, half);
  if (M.kind() == ManifoldKind::HopfSphere) p[2] = g.uniform(0.6, 1.0);
  return p;
}

/// Smooth bounded Hamiltonian text with small derivatives, so unit-time flows
/// from the interior stay well inside the chart.
inline std::string random_hamiltonian(Gen& g, const ChartedManifold& M, bool time_dependent = true,
                                      double amplitude = 0.3) {
  std::vector<std::string> basis;
  const auto a = [&] { return num(g.uniform(0.3, 1.5)); };
  const auto b = [&] { return num(g.uniform(-kPi, kPi)); };
  if (M.kind() == ManifoldKind::HopfSphere) {
    // Real polynomials in z1 = sin(eta) e^{i xi1}, z2 = cos(eta) e^{i xi2}: smooth on S^3,
    // including the circles eta = 0 and eta = pi/2 where one angle degenerates.
    basis = {"sin(eta)*cos(xi1+" + b() + ")",
             "cos(eta)*sin(xi2+" + b() + ")",
             "sin(eta)^2",
             "cos(2*eta)",
             "sin(eta)*cos(eta)*cos(xi1-xi2+" + b() + ")",
             "sin(eta)*cos(eta)*sin(xi1+xi2+" + b() + ")",
             "sin(eta)^2*cos(2*xi1+" + b() + ")"};
  } else {
    const auto& names = M.coordinate_names();
    const std::string x = names[0], y = names[static_cast<std::size_t>(M.n() - 1)], z = names.back();
    basis = {"sin(" + a() + "*" + x + "+" + b() + ")",
             "cos(" + a() + "*" + y + "+" + b() + ")",
             "tanh(" + a() + "*" + z + "+" + b() + ")",
             "exp(-(" + x + "^2+" + y + "^2))",
             y + "*cos(" + z + ")",
             "sin(" + x + ")*cos(" + y + "+" + z + ")"};
  }
  // chart angular speeds carry cot(eta) and tan(eta) factors, so keep the sphere amplitudes small
  const double amp = M.kind() == ManifoldKind::HopfSphere ? amplitude / 3 : amplitude;
  std::string s = num(g.uniform(-0.5, 0.5));
  const int terms = g.integer(1, 3);
  for (int i = 0; i < terms; ++i) {
    std::string term = num(g.uniform(-amp, amp)) + "*" + g.pick(basis);
    if (time_dependent && g.coin()) term += "*(1+" + num(g.uniform(-0.5, 0.5)) + "*sin(2*pi*t))";
    s += "+" + term;
  }
  return s;
}

/// Basic (R.H = 0) time-dependent Hamiltonian text.
inline std::string random_basic_hamiltonian(Gen& g, const ChartedManifold& M) {
  std::string s = num(g.uniform(-0.6, 0.6)) + "+" + num(g.uniform(-0.8, 0.8)) + "*sin(2*pi*t+" +
                  num(g.uniform(0, 2 * kPi)) + ")";
  if (M.kind() == ManifoldKind::HopfSphere) {
    // R = 2 pi (d/dxi1 + d/dxi2): |z1|^2 and z1 conj(z2) are Reeb invariant
    s += "+" + num(g.uniform(-0.1, 0.1)) + "*sin(eta)*cos(eta)*cos(xi1-xi2+" + num(g.uniform(0, 2 * kPi)) + ")";
    s += "+" + num(g.uniform(-0.3, 0.3)) + "*cos(2*eta)*(1+t)";
  } else {
    const auto& names = M.coordinate_names();
    s += "+" + num(g.uniform(-0.4, 0.4)) + "*sin(" + names[0] + "+" + num(g.uniform(0, 2 * kPi)) + ")";
    s += "+" + num(g.uniform(-0.3, 0.3)) + "*cos(" + names[static_cast<std::size_t>(M.n() - 1)] + ")*t";
  }
  return s;
}

/// Random well-formed text in the full grammar (may be numerically wild).
inline std::string random_grammar_text(Gen& g, const std::vector<std::string>& vars, int depth) {
  if (depth <= 0 || g.coin(0.25)) {
    const int c = g.integer(0, 3);
    if (c == 0) return num(g.uniform(-5, 5));
    if (c == 1) return "pi";
    return g.pick(vars);
  }
  static const std::vector<std::string> fns = {"sin", "cos", "tan", "exp", "log", "tanh", "sqrt", "bump", "sigmoid"};
  switch (g.integer(0, 6)) {
    case 0: return "(" + random_grammar_text(g, vars, depth - 1) + "+" + random_grammar_text(g, vars, depth - 1) + ")";
    case 1: return random_grammar_text(g, vars, depth - 1) + "-" + random_grammar_text(g, vars, depth - 1);
    case 2: return random_grammar_text(g, vars, depth - 1) + "*" + random_grammar_text(g, vars, depth - 1);
    case 3: return random_grammar_text(g, vars, depth - 1) + "/" + random_grammar_text(g, vars, depth - 1);
    case 4: return random_grammar_text(g, vars, depth - 1) + "^" + random_grammar_text(g, vars, depth - 1);
    case 5: return "-" + random_grammar_text(g, vars, depth - 1);
    default: return g.pick(fns) + "(" + random_grammar_text(g, vars, depth - 1) + ")";
  }
}

/// Closed-form flow for H = cos(xi1)/2, written out independently of the library.
struct HalfCosOracle {
  static double xi1(double xi0, double t) {
    const double A = std::tan(xi0 / 2 + kPi / 4);
    return 2 * std::atan(A * std::exp(kPi * t)) - kPi / 2;
  }
  static double h(double xi0, double t) {
    const double A = std::tan(xi0 / 2 + kPi / 4);
    return kPi * t + std::log((1 + A * A) / (1 + A * A * std::exp(2 * kPi * t)));
  }
};

}  // namespace testsupport
