#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace mlmunmix {

/// Euclidean projection onto the canonical simplex {u >= 0, sum(u) = 1}.
///
/// Sort-based finite method: sort descending, find the largest support size
/// rho with u_rho > (cumsum_rho - 1) / rho, shift by that threshold and clamp.
/// Components strictly below the threshold become exactly zero.
///
/// Points that are already feasible to rounding level are returned unchanged.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> project_simplex(
    const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Eigen::Index m = v.size();
  if (m == 0) throw std::invalid_argument("project_simplex: empty vector");
  if (!v.allFinite()) throw std::invalid_argument("project_simplex: non-finite entry");

  Vec out = v;
  const Scalar feasible_tol = Scalar(16) * std::numeric_limits<Scalar>::epsilon() * Scalar(m);
  if ((out.array() >= Scalar(0)).all() && std::abs(out.sum() - Scalar(1)) <= feasible_tol) return out;

  Vec sorted = out;
  std::sort(sorted.data(), sorted.data() + m, std::greater<Scalar>());
  Scalar cumsum = 0;
  Scalar theta = 0;
  for (Eigen::Index j = 0; j < m; ++j) {
    cumsum += sorted(j);
    const Scalar t = (cumsum - Scalar(1)) / Scalar(j + 1);
    // sorted(0) - (sorted(0) - 1) = 1 > 0, so j = 0 always qualifies.
    if (sorted(j) - t > Scalar(0)) theta = t;
  }
  return (out.array() - theta).max(Scalar(0)).matrix();
}

/// Element-wise clamp to [lo, hi]; works on vectors and matrices alike.
template <typename Derived>
typename Derived::PlainObject project_box(const Eigen::MatrixBase<Derived>& v,
                                          typename Derived::Scalar lo,
                                          typename Derived::Scalar hi) {
  if (lo > hi) throw std::invalid_argument("project_box: lower bound exceeds upper bound");
  return v.cwiseMax(lo).cwiseMin(hi);
}

}  // namespace mlmunmix
