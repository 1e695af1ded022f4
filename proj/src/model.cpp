#include "mlmunmix/model.hpp"

namespace mlmunmix {

namespace {

void check_dims(const MatrixXd& X, const MatrixXd& E, const MatrixXd& A, const VectorXd& P) {
  if (E.rows() != X.rows() || A.rows() != E.cols() || A.cols() != X.cols() || P.size() != X.cols())
    throw DimensionError("objective: expected X d x n, E d x m, A m x n, P n; got X " +
                         std::to_string(X.rows()) + "x" + std::to_string(X.cols()) + ", E " +
                         std::to_string(E.rows()) + "x" + std::to_string(E.cols()) + ", A " +
                         std::to_string(A.rows()) + "x" + std::to_string(A.cols()) + ", P " +
                         std::to_string(P.size()));
}

}  // namespace

VectorXd pixel_objectives(const MatrixXd& X, const MatrixXd& E, const MatrixXd& A, const VectorXd& P) {
  check_dims(X, E, A, P);
  const Index n = X.cols();
  VectorXd out(n);
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) {
    const VectorXd y = E * A.col(i);
    out(i) = mlm_residual(X.col(i), y, P(i)).squaredNorm();
  }
  return out;
}

double objective(const MatrixXd& X, const MatrixXd& E, const MatrixXd& A, const VectorXd& P) {
  const VectorXd per_pixel = pixel_objectives(X, E, A, P);
  double total = 0.0;
  for (Index i = 0; i < per_pixel.size(); ++i) total += per_pixel(i);
  return total;
}

double objective(const HyperCube& X, const EndmemberMatrix& E, const AbundanceMatrix& A,
                 const TransitionProbabilities& P) {
  return objective(X.data(), E.data(), A.data(), P.data());
}

}  // namespace mlmunmix
