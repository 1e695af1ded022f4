#pragma once

#include "mlmunmix/core.hpp"

#include <Eigen/Dense>

#include <string>

namespace mlmunmix {

/// Margin kept from the pole of the MLM series, P * max(y) = 1.
inline constexpr double kDivergenceMargin = 1e-12;

/// Noiseless MLM spectrum from its linear term y = E a:
/// x_j = (1 - P) y_j / (1 - P y_j), the closed form of the geometric series
/// (1 - P) sum_k P^k y^(k+1), which also solves x = (1 - P) y + P y .* x.
template <typename Derived>
typename Derived::PlainObject mlm_forward_linear(const Eigen::MatrixBase<Derived>& y,
                                                 typename Derived::Scalar P) {
  using Scalar = typename Derived::Scalar;
  if (y.size() > 0 && P * y.maxCoeff() >= Scalar(1) - Scalar(kDivergenceMargin))
    throw DivergenceError("MLM series diverges: P * max(y) = " + std::to_string(double(P * y.maxCoeff())));
  if (P == Scalar(0)) return y;
  return ((Scalar(1) - P) * y.array() / (Scalar(1) - P * y.array())).matrix();
}

template <typename DerivedE, typename DerivedA>
Eigen::Matrix<typename DerivedE::Scalar, Eigen::Dynamic, 1> mlm_forward(
    const Eigen::MatrixBase<DerivedE>& E, const Eigen::MatrixBase<DerivedA>& a,
    typename DerivedE::Scalar P) {
  if (E.cols() != a.size()) throw DimensionError("mlm_forward: E columns do not match abundance length");
  const Eigen::Matrix<typename DerivedE::Scalar, Eigen::Dynamic, 1> y = E * a;
  return mlm_forward_linear(y, P);
}

/// Residual of the bilinear objective for one pixel: x - (1 - P) y - P y .* x.
template <typename DerivedX, typename DerivedY>
Eigen::Matrix<typename DerivedX::Scalar, Eigen::Dynamic, 1> mlm_residual(
    const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y,
    typename DerivedX::Scalar P) {
  using Scalar = typename DerivedX::Scalar;
  if (x.size() != y.size()) throw DimensionError("mlm_residual: x and y lengths differ");
  return (x.array() - (Scalar(1) - P) * y.array() - P * (y.array() * x.array())).matrix();
}

/// Per-band weight (1 - P) + P x that turns the bilinear model into a
/// Hadamard-weighted linear one: (1 - P) y + P y .* x = w .* y.
template <typename DerivedX>
typename DerivedX::PlainObject interaction_weights(const Eigen::MatrixBase<DerivedX>& x,
                                                   typename DerivedX::Scalar P) {
  using Scalar = typename DerivedX::Scalar;
  return ((Scalar(1) - P) + P * x.array()).matrix();
}

/// E .* [(1 - P) 1 1^T + P x 1^T]: the abundance subproblem becomes ||x - E~ a||^2.
template <typename DerivedE, typename DerivedX>
typename DerivedE::PlainObject modified_endmembers(const Eigen::MatrixBase<DerivedE>& E,
                                                   const Eigen::MatrixBase<DerivedX>& x,
                                                   typename DerivedE::Scalar P) {
  if (E.rows() != x.size()) throw DimensionError("modified_endmembers: E rows do not match pixel length");
  return (E.array().colwise() * interaction_weights(x, P).array()).matrix();
}

/// Sum over pixels of squared bilinear residual norms, accumulated
/// sequentially in pixel order.
double objective(const MatrixXd& X, const MatrixXd& E, const MatrixXd& A, const VectorXd& P);
double objective(const HyperCube& X, const EndmemberMatrix& E, const AbundanceMatrix& A,
                 const TransitionProbabilities& P);

/// Per-pixel squared residual norms (length n); objective() sums these.
VectorXd pixel_objectives(const MatrixXd& X, const MatrixXd& E, const MatrixXd& A, const VectorXd& P);

}  // namespace mlmunmix
