#include "contactdyn/builtins.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace contactdyn {

namespace {

constexpr int kStepTable = 4096;

// Wraps a functor `T f(const T* x, const T& t)` with exact forward-mode derivatives.
template <class F>
class TemplateField final : public FieldImpl {
 public:
  TemplateField(F f, int dim, std::string desc, bool autonomous)
      : f_(std::move(f)), dim_(dim), desc_(std::move(desc)), autonomous_(autonomous) {}

  double value(double t, const Point& x) const override {
    double v[kMaxDim];
    for (int i = 0; i < dim_; ++i) v[i] = x[i];
    return f_(v, t);
  }
  void derivatives(double t, const Point& x, Vec& grad, double* dt) const override {
    Jet v[kMaxDim];
    for (int i = 0; i < dim_; ++i) v[i] = Jet::variable(x[i], i);
    const Jet r = f_(v, Jet::variable(t, dim_));
    grad.resize(dim_);
    for (int i = 0; i < dim_; ++i) grad[i] = r.d[static_cast<std::size_t>(i)];
    if (dt) *dt = r.d[static_cast<std::size_t>(dim_)];
  }
  bool autonomous() const override { return autonomous_; }
  std::string describe() const override { return desc_; }
  int dim() const override { return dim_; }

 private:
  F f_;
  int dim_;
  std::string desc_;
  bool autonomous_;
};

template <class F>
TimeScalarField make_template_field(F f, int dim, std::string desc, bool autonomous) {
  return TimeScalarField(
      std::make_shared<TemplateField<F>>(std::move(f), dim, std::move(desc), autonomous));
}

void require_darboux3(const ChartedManifold& M, const char* what) {
  if (M.kind() != ManifoldKind::Darboux || M.n() != 2)
    throw Error(ErrorKind::ConfigError, std::string(what) + " is defined on Darboux R^3 only");
}

}  // namespace

OddStep::OddStep() {
  const auto [gx, gw] = gauss_legendre(8);
  h_ = 1.0 / kStepTable;
  values_.assign(kStepTable + 1, 0.0);
  double acc = 0.0;
  for (int i = 0; i < kStepTable; ++i) {
    const double a = i * h_;
    double s = 0.0;
    for (std::size_t q = 0; q < gx.size(); ++q) s += gw[q] * smooth::bump(a + 0.5 * h_ * (gx[q] + 1.0));
    acc += 0.5 * h_ * s;
    values_[i + 1] = acc;
  }
  integral_ = acc;
  for (double& v : values_) v /= integral_;
  values_[kStepTable] = 1.0;
}

const OddStep& OddStep::instance() {
  static const OddStep s;
  return s;
}

double OddStep::derivative(double u) const { return smooth::bump(u) / integral_; }

double OddStep::operator()(double u) const {
  if (u < 0.0) return -(*this)(-u);
  if (u >= 1.0) return 1.0;
  const int i = std::min(static_cast<int>(u / h_), kStepTable - 1);
  const double s = (u - i * h_) / h_;
  const double d0 = derivative(i * h_) * h_;
  const double d1 = derivative((i + 1) * h_) * h_;
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * values_[i] + (s3 - 2 * s2 + s) * d0 +
         (-2 * s3 + 3 * s2) * values_[i + 1] + (s3 - s2) * d1;
}

CutoffFamily::CutoffFamily(int k_) : k(k_) {
  if (k < 2) throw Error(ErrorKind::DomainError, "cutoff family needs k >= 2");
  const double kk = static_cast<double>(k) * k * std::log(static_cast<double>(k));
  plateau_value = std::numbers::pi / kk;
  // rho_k'(0) = plateau_value * Sigma'(0) / eps = 1
  eps = plateau_value * OddStep::instance().derivative(0.0);
}

CantorStage::CantorStage(int k_) : k(k_) {
  if (k < 0 || k > 12) throw Error(ErrorKind::DomainError, "Cantor stage must be in [0, 12]");
  intervals = {{0.0, 1.0}};
  for (int s = 0; s < k; ++s) {
    std::vector<std::pair<double, double>> next;
    next.reserve(intervals.size() * 2);
    for (auto [a, b] : intervals) {
      const double L = (b - a) / 3.0;
      next.push_back({a, a + L});
      next.push_back({b - L, b});
    }
    intervals = std::move(next);
  }
  height = std::pow(1.5, k);
  width = std::pow(3.0, -k) / 10.0;

  cuts_ = breakpoints();
  cuts_.insert(cuts_.begin(), 0.0);
  cuts_.push_back(1.0);
  cumulative_.assign(cuts_.size(), 0.0);
  for (std::size_t i = 1; i < cuts_.size(); ++i)
    cumulative_[i] = cumulative_[i - 1] + piece_integral(cuts_[i - 1], cuts_[i]);
}

double CantorStage::piece_integral(double lo, double hi) const {
  static const auto gl = gauss_legendre(16);
  constexpr int kSub = 4;
  double total = 0.0;
  for (int s = 0; s < kSub; ++s) {
    const double l = lo + (hi - lo) * s / kSub, r = lo + (hi - lo) * (s + 1) / kSub;
    double acc = 0.0;
    for (std::size_t q = 0; q < gl.first.size(); ++q)
      acc += gl.second[q] * smooth_density(0.5 * (l + r) + 0.5 * (r - l) * gl.first[q]);
    total += 0.5 * (r - l) * acc;
  }
  return total;
}

double CantorStage::smooth_integral(double t) const {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return cumulative_.back();
  const std::size_t i =
      static_cast<std::size_t>(std::upper_bound(cuts_.begin(), cuts_.end(), t) - cuts_.begin()) - 1;
  return cumulative_[i] + piece_integral(cuts_[i], t);
}

double CantorStage::step_density(double t) const {
  auto it = std::upper_bound(intervals.begin(), intervals.end(), t,
                             [](double v, const std::pair<double, double>& iv) { return v < iv.second; });
  if (it == intervals.end()) return 0.0;
  return (t >= it->first) ? height : 0.0;
}

double CantorStage::smooth_density(double t) const {
  const double hw = 0.5 * width;
  auto it = std::upper_bound(intervals.begin(), intervals.end(), t,
                             [hw](double v, const std::pair<double, double>& iv) {
                               return v < iv.second + hw;
                             });
  if (it == intervals.end()) return 0.0;
  const auto [a, b] = *it;
  if (t <= a - hw) return 0.0;
  // E_k always touches 0 and 1; no ramp there, so the density keeps unit mass on [0, 1]
  const double rise = a <= 0.0 ? 1.0 : smooth::step((t - a) / width + 0.5);
  const double fall = b >= 1.0 ? 0.0 : smooth::step((t - b) / width + 0.5);
  return height * (rise - fall);
}

std::vector<double> CantorStage::breakpoints() const {
  std::vector<double> out;
  const double hw = 0.5 * width;
  for (auto [a, b] : intervals)
    for (double v : {a - hw, a + hw, b - hw, b + hw})
      if (v > 0.0 && v < 1.0) out.push_back(v);
  std::sort(out.begin(), out.end());
  return out;
}

double cantor_step_l1(const CantorStage& a, const CantorStage& b) {
  std::vector<double> cuts = {0.0, 1.0};
  for (const CantorStage* s : {&a, &b})
    for (auto [lo, hi] : s->intervals) {
      cuts.push_back(lo);
      cuts.push_back(hi);
    }
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double len = cuts[i + 1] - cuts[i];
    if (len <= 0.0) continue;
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    total += std::abs(a.step_density(mid) - b.step_density(mid)) * len;
  }
  return total;
}

double cantor_smooth_l1(const CantorStage& a, const CantorStage& b) {
  std::vector<double> cuts = {0.0, 1.0};
  for (const CantorStage* s : {&a, &b}) {
    auto bp = s->breakpoints();
    cuts.insert(cuts.end(), bp.begin(), bp.end());
  }
  std::sort(cuts.begin(), cuts.end());
  const auto [gx, gw] = gauss_legendre(16);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1];
    if (hi <= lo) continue;
    // sign changes inside overlapping ramps: split each piece further
    constexpr int kSub = 4;
    for (int s = 0; s < kSub; ++s) {
      const double l = lo + (hi - lo) * s / kSub, r = lo + (hi - lo) * (s + 1) / kSub;
      double acc = 0.0;
      for (std::size_t q = 0; q < gx.size(); ++q) {
        const double t = 0.5 * (l + r) + 0.5 * (r - l) * gx[q];
        acc += gw[q] * std::abs(a.smooth_density(t) - b.smooth_density(t));
      }
      total += 0.5 * (r - l) * acc;
    }
  }
  return total;
}

double cantor_function(double t) {
  double result = 0.0, scale = 1.0;
  for (int depth = 0; depth < 60; ++depth) {
    if (t <= 0.0) return result;
    if (t >= 1.0) return result + scale;
    scale *= 0.5;
    if (t < 1.0 / 3.0) {
      t *= 3.0;
    } else if (t > 2.0 / 3.0) {
      result += scale;
      t = 3.0 * t - 2.0;
    } else {
      return result + scale;
    }
  }
  return result;
}

TimeScalarField divergent_factors_hamiltonian(const ChartedManifold& M, int k) {
  require_darboux3(M, "divergent_factors");
  const CutoffFamily fam(k);
  auto f = [fam](const auto* x, const auto&) { return fam.hamiltonian(x[0], x[1], x[2]); };
  return make_template_field(f, 3, "divergent_factors(k=" + std::to_string(k) + ")", true);
}

TimeScalarField divergent_isotopies_hamiltonian(const ChartedManifold& M, int k) {
  require_darboux3(M, "divergent_isotopies");
  if (k < 1) throw Error(ErrorKind::DomainError, "divergent_isotopies needs k >= 1");
  const double eps = 1.0 / k;
  auto f = [eps](const auto* x, const auto&) {
    using std::tanh;
    const auto rho = plateau(x[0], -0.2, 1.2, 0.3) * plateau(x[1], -0.2, 0.2, 0.3) *
                     plateau(x[2], -1.5, 1.5, 1.0);
    return rho * (-eps * tanh(x[1] / eps));
  };
  return make_template_field(f, 3, "divergent_isotopies(k=" + std::to_string(k) + ")", true);
}

TimeScalarField cantor_density_hamiltonian(const ChartedManifold& M, int k) {
  auto stage = std::make_shared<const CantorStage>(k);
  return time_function_field(
      M, [stage](double t) { return stage->smooth_density(t); },
      "cantor_density(k=" + std::to_string(k) + ")", stage->breakpoints());
}

std::vector<std::string> builtin_names() {
  return {"reeb", "half_cos", "divergent_factors", "divergent_isotopies", "cantor_density"};
}

TimeScalarField make_builtin(const ChartedManifold& M, const std::string& name,
                             const std::map<std::string, double>& params) {
  auto int_param = [&](const char* key) {
    auto it = params.find(key);
    if (it == params.end()) throw Error(ErrorKind::ConfigError, name + " needs parameter " + key);
    const double v = it->second;
    if (v != std::floor(v)) throw Error(ErrorKind::ConfigError, std::string(key) + " must be an integer");
    return static_cast<int>(v);
  };
  if (name == "reeb") return constant_field(M, 1.0);
  if (name == "half_cos") {
    if (M.kind() != ManifoldKind::HopfSphere)
      throw Error(ErrorKind::ConfigError, "half_cos is defined on the sphere only");
    return parse_hamiltonian(M, "0.5*cos(xi1)");
  }
  if (name == "divergent_factors") return divergent_factors_hamiltonian(M, int_param("k"));
  if (name == "divergent_isotopies") return divergent_isotopies_hamiltonian(M, int_param("k"));
  if (name == "cantor_density") return cantor_density_hamiltonian(M, int_param("k"));
  throw Error(ErrorKind::UnknownIdentifier, "unknown builtin '" + name + "'");
}

}  // namespace contactdyn
