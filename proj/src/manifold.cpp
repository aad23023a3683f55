#include "contactdyn/manifold.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

namespace contactdyn {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r -= kTwoPi;
  return r;
}

double wrap_difference(double d) {
  double r = std::remainder(d, kTwoPi);
  if (r <= -std::numbers::pi) r += kTwoPi;
  return r;
}

}  // namespace

ChartedManifold::ChartedManifold() : ChartedManifold(darboux(2)) {}

ChartedManifold ChartedManifold::darboux(int n, double half_width) {
  const int d = 2 * n - 1;
  if (n < 2 || d > kMaxChartDim) throw Error(ErrorKind::DomainError, "Darboux n must be in [2, 4]");
  Vec lo = Vec::Constant(d, -half_width);
  Vec hi = Vec::Constant(d, half_width);
  return darboux(n, lo, hi);
}

ChartedManifold ChartedManifold::darboux(int n, const Vec& box_lo, const Vec& box_hi) {
  const int d = 2 * n - 1;
  if (n < 2 || d > kMaxChartDim) throw Error(ErrorKind::DomainError, "Darboux n must be in [2, 4]");
  if (box_lo.size() != d || box_hi.size() != d)
    throw Error(ErrorKind::DomainError, "box dimension does not match chart");
  for (int i = 0; i < d; ++i)
    if (!(box_lo[i] < box_hi[i])) throw Error(ErrorKind::DomainError, "empty box");
  ChartedManifold M{Raw{}};
  M.kind_ = ManifoldKind::Darboux;
  M.n_ = n;
  M.box_lo_ = box_lo;
  M.box_hi_ = box_hi;
  for (int i = 1; i < n; ++i) M.names_.push_back("x" + std::to_string(i));
  for (int i = 1; i < n; ++i) M.names_.push_back("y" + std::to_string(i));
  M.names_.push_back("z");
  return M;
}

ChartedManifold ChartedManifold::hopf(double pole_margin) {
  if (!(pole_margin > 0.0) || pole_margin >= std::numbers::pi / 4)
    throw Error(ErrorKind::DomainError, "pole margin must lie in (0, pi/4)");
  ChartedManifold M{Raw{}};
  M.kind_ = ManifoldKind::HopfSphere;
  M.n_ = 2;
  M.pole_margin_ = pole_margin;
  M.box_lo_ = make_vec({0.0, 0.0, pole_margin});
  M.box_hi_ = make_vec({kTwoPi, kTwoPi, std::numbers::pi / 2 - pole_margin});
  M.names_ = {"xi1", "xi2", "eta"};
  return M;
}

std::string ChartedManifold::name() const {
  if (kind_ == ManifoldKind::HopfSphere) return "hopf";
  return "darboux" + std::to_string(n_);
}

int ChartedManifold::coordinate_index(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return static_cast<int>(i);
  return -1;
}

bool ChartedManifold::is_periodic(int axis) const {
  return kind_ == ManifoldKind::HopfSphere && axis < 2;
}

bool ChartedManifold::same_chart(const ChartedManifold& other) const {
  return kind_ == other.kind_ && n_ == other.n_ &&
         (kind_ == ManifoldKind::Darboux || pole_margin_ == other.pole_margin_);
}

void ChartedManifold::check_domain(const Point& x) const {
  if (x.size() != dim()) throw Error(ErrorKind::DomainError, "point has wrong dimension");
  for (int i = 0; i < dim(); ++i)
    if (!std::isfinite(x[i])) throw Error(ErrorKind::DomainError, "non-finite coordinate");
  if (kind_ == ManifoldKind::HopfSphere) {
    const double eta = x[2];
    if (eta < pole_margin_ || eta > std::numbers::pi / 2 - pole_margin_)
      throw Error(ErrorKind::PoleSingularity, "eta = " + std::to_string(eta) + " inside pole margin");
  }
}

bool ChartedManifold::in_box(const Point& x) const {
  if (kind_ == ManifoldKind::HopfSphere) return true;
  for (int i = 0; i < dim(); ++i)
    if (x[i] < box_lo_[i] || x[i] > box_hi_[i]) return false;
  return true;
}

CovectorData ChartedManifold::exterior_data_at(const Point& x) const {
  check_domain(x);
  const int d = dim();
  CovectorData out{Vec::Zero(d), Mat::Zero(d, d)};
  if (kind_ == ManifoldKind::Darboux) {
    const int m = n_ - 1;
    for (int i = 0; i < m; ++i) {
      out.alpha[i] = -x[m + i];
      out.d_alpha(i, m + i) = 1.0;
      out.d_alpha(m + i, i) = -1.0;
    }
    out.alpha[d - 1] = 1.0;
  } else {
    const double s = std::sin(x[2]);
    const double c = std::cos(x[2]);
    const double k = s * c / std::numbers::pi;
    out.alpha[0] = s * s / kTwoPi;
    out.alpha[1] = c * c / kTwoPi;
    out.d_alpha(2, 0) = k;
    out.d_alpha(0, 2) = -k;
    out.d_alpha(2, 1) = -k;
    out.d_alpha(1, 2) = k;
  }
  return out;
}

Vec ChartedManifold::reeb_at(const Point& x) const {
  check_domain(x);
  Vec r = Vec::Zero(dim());
  if (kind_ == ManifoldKind::Darboux) {
    r[dim() - 1] = 1.0;
  } else {
    r[0] = kTwoPi;
    r[1] = kTwoPi;
  }
  return r;
}

double ChartedManifold::volume_density(const Point& x) const {
  check_domain(x);
  if (kind_ == ManifoldKind::Darboux) return 1.0;
  return std::sin(x[2]) * std::cos(x[2]) / (2.0 * std::numbers::pi * std::numbers::pi);
}

double ChartedManifold::nondegeneracy(const Point& x) const {
  const CovectorData e = exterior_data_at(x);
  const int d = dim();
  Mat B = Mat::Zero(d + 1, d + 1);
  for (int i = 0; i < d; ++i) {
    B(0, i + 1) = e.alpha[i];
    B(i + 1, 0) = -e.alpha[i];
  }
  B.bottomRightCorner(d, d) = e.d_alpha;
  return B.determinant();
}

Point ChartedManifold::wrap(Point x) const {
  if (kind_ == ManifoldKind::HopfSphere) {
    x[0] = wrap_angle(x[0]);
    x[1] = wrap_angle(x[1]);
  }
  return x;
}

Vec ChartedManifold::chart_difference(const Point& a, const Point& b) const {
  Vec d = a - b;
  if (kind_ == ManifoldKind::HopfSphere) {
    d[0] = wrap_difference(d[0]);
    d[1] = wrap_difference(d[1]);
  }
  return d;
}

double ChartedManifold::chart_distance(const Point& a, const Point& b) const {
  return chart_difference(a, b).norm();
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    const double b = i / std::sqrt(4.0 * i * i - 1.0);
    J(i, i - 1) = b;
    J(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  std::vector<double> x(n), w(n);
  for (int i = 0; i < n; ++i) {
    x[i] = es.eigenvalues()[i];
    const double v = es.eigenvectors()(0, i);
    w[i] = 2.0 * v * v;
  }
  return {x, w};
}

QuadratureGrid quadrature_grid(const ChartedManifold& M, const std::vector<int>& resolution,
                               const GridOptions& options) {
  const int d = M.dim();
  if (static_cast<int>(resolution.size()) != d)
    throw Error(ErrorKind::ResolutionTooCoarse, "resolution needs one count per axis");
  for (int r : resolution)
    if (r < 4) throw Error(ErrorKind::ResolutionTooCoarse, "need at least 4 nodes per axis");

  QuadratureGrid g;
  std::vector<std::vector<double>> axis_w(d);
  g.axes.resize(d);
  g.spacing.resize(d);
  g.limits.resize(d);

  if (M.kind() == ManifoldKind::HopfSphere) {
    for (int a = 0; a < 2; ++a) {
      const int N = resolution[a];
      for (int i = 0; i < N; ++i) {
        g.axes[a].push_back(kTwoPi * i / N);
        axis_w[a].push_back(1.0 / N);
      }
      g.spacing[a] = kTwoPi / N;
      g.limits[a] = {-1e300, 1e300};
    }
    double lo = M.pole_margin();
    double hi = std::numbers::pi / 2 - M.pole_margin();
    if (options.eta_range) {
      lo = std::max(lo, options.eta_range->first);
      hi = std::min(hi, options.eta_range->second);
      if (!(lo < hi)) throw Error(ErrorKind::DomainError, "empty eta band");
    }
    const auto [x, w] = gauss_legendre(resolution[2]);
    double total = 0.0;
    for (int i = 0; i < resolution[2]; ++i) {
      const double eta = 0.5 * (lo + hi) + 0.5 * (hi - lo) * x[i];
      const double wi = w[i] * std::sin(eta) * std::cos(eta);
      g.axes[2].push_back(eta);
      axis_w[2].push_back(wi);
      total += wi;
    }
    for (double& wi : axis_w[2]) wi /= total;
    g.spacing[2] = (hi - lo) / resolution[2];
    g.limits[2] = {lo, hi};
  } else {
    for (int a = 0; a < d; ++a) {
      const int N = resolution[a];
      const double lo = M.box_lo()[a];
      const double hi = M.box_hi()[a];
      const double h = (hi - lo) / N;
      for (int i = 0; i < N; ++i) {
        g.axes[a].push_back(lo + (i + 0.5) * h);
        axis_w[a].push_back(1.0 / N);
      }
      g.spacing[a] = h;
      g.limits[a] = {lo, hi};
    }
  }

  std::size_t total = 1;
  for (int a = 0; a < d; ++a) total *= g.axes[a].size();
  g.nodes.reserve(total);
  g.weights.reserve(total);
  std::vector<int> idx(d, 0);
  for (std::size_t k = 0; k < total; ++k) {
    Point p(d);
    double w = 1.0;
    for (int a = 0; a < d; ++a) {
      p[a] = g.axes[a][idx[a]];
      w *= axis_w[a][idx[a]];
    }
    g.nodes.push_back(p);
    g.weights.push_back(w);
    for (int a = d - 1; a >= 0; --a) {
      if (++idx[a] < static_cast<int>(g.axes[a].size())) break;
      idx[a] = 0;
    }
  }
  return g;
}

}  // namespace contactdyn
