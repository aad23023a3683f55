#pragma once

#include <array>
#include <cmath>

#include "contactdyn/linalg.hpp"

namespace contactdyn {

/// First-order forward-mode dual number over at most kMaxDim variables
/// (chart coordinates followed by time).
struct Jet {
  double v = 0.0;
  std::array<double, kMaxDim> d{};

  Jet() = default;
  explicit Jet(double value) : v(value) {}

  static Jet variable(double value, int index) {
    Jet j(value);
    j.d[static_cast<std::size_t>(index)] = 1.0;
    return j;
  }

  // Chain rule helper: f(v) with derivative f'(v).
  Jet chain(double fv, double dfv) const {
    Jet r(fv);
    for (std::size_t i = 0; i < d.size(); ++i) r.d[i] = dfv * d[i];
    return r;
  }
};

inline Jet operator+(const Jet& a, const Jet& b) {
  Jet r(a.v + b.v);
  for (std::size_t i = 0; i < r.d.size(); ++i) r.d[i] = a.d[i] + b.d[i];
  return r;
}
inline Jet operator-(const Jet& a, const Jet& b) {
  Jet r(a.v - b.v);
  for (std::size_t i = 0; i < r.d.size(); ++i) r.d[i] = a.d[i] - b.d[i];
  return r;
}
inline Jet operator-(const Jet& a) { return a.chain(-a.v, -1.0); }
inline Jet operator*(const Jet& a, const Jet& b) {
  Jet r(a.v * b.v);
  for (std::size_t i = 0; i < r.d.size(); ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
  return r;
}
inline Jet operator/(const Jet& a, const Jet& b) {
  const double inv = 1.0 / b.v;
  Jet r(a.v * inv);
  for (std::size_t i = 0; i < r.d.size(); ++i) r.d[i] = (a.d[i] - r.v * b.d[i]) * inv;
  return r;
}
inline Jet operator+(const Jet& a, double b) { Jet r = a; r.v += b; return r; }
inline Jet operator+(double a, const Jet& b) { return b + a; }
inline Jet operator-(const Jet& a, double b) { Jet r = a; r.v -= b; return r; }
inline Jet operator-(double a, const Jet& b) { return (-b) + a; }
inline Jet operator*(const Jet& a, double b) { return a.chain(a.v * b, b); }
inline Jet operator*(double a, const Jet& b) { return b * a; }
inline Jet operator/(const Jet& a, double b) { return a.chain(a.v / b, 1.0 / b); }
inline Jet operator/(double a, const Jet& b) { return b.chain(a / b.v, -a / (b.v * b.v)); }

inline Jet sin(const Jet& a) { return a.chain(std::sin(a.v), std::cos(a.v)); }
inline Jet cos(const Jet& a) { return a.chain(std::cos(a.v), -std::sin(a.v)); }
inline Jet tan(const Jet& a) {
  const double t = std::tan(a.v);
  return a.chain(t, 1.0 + t * t);
}
inline Jet exp(const Jet& a) {
  const double e = std::exp(a.v);
  return a.chain(e, e);
}
inline Jet log(const Jet& a) { return a.chain(std::log(a.v), 1.0 / a.v); }
inline Jet tanh(const Jet& a) {
  const double t = std::tanh(a.v);
  return a.chain(t, 1.0 - t * t);
}
inline Jet sqrt(const Jet& a) {
  const double s = std::sqrt(a.v);
  return a.chain(s, 0.5 / s);
}

inline bool is_constant(const Jet& a) {
  for (double x : a.d)
    if (x != 0.0) return false;
  return true;
}

inline Jet pow(const Jet& a, const Jet& b) {
  const double p = std::pow(a.v, b.v);
  if (is_constant(b)) {
    if (b.v == 0.0) return Jet(1.0);
    return a.chain(p, b.v * std::pow(a.v, b.v - 1.0));
  }
  // a^b = exp(b log a); only meaningful for a > 0
  Jet r(p);
  const double da = b.v * std::pow(a.v, b.v - 1.0);
  const double db = p * std::log(a.v);
  for (std::size_t i = 0; i < r.d.size(); ++i) r.d[i] = da * a.d[i] + db * b.d[i];
  return r;
}

// Scalar overloads so templated formulas work for both double and Jet.
inline double value_of(double x) { return x; }
inline double value_of(const Jet& x) { return x.v; }

}  // namespace contactdyn
