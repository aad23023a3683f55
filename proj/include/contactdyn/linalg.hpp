#pragma once

#include <Eigen/Dense>

namespace contactdyn {

// Chart dimension 2n-1 is capped at 7 (n <= 4); the symplectization adds one.
inline constexpr int kMaxChartDim = 7;
inline constexpr int kMaxDim = kMaxChartDim + 1;

// Stack-allocated dynamic vectors/matrices; no heap traffic inside integrators.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

inline Vec make_vec(std::initializer_list<double> values) {
  Vec v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

}  // namespace contactdyn
