#include "mlmunmix/core.hpp"

#include <cmath>
#include <sstream>

namespace mlmunmix {

std::string Violation::describe() const {
  std::ostringstream os;
  os << object;
  if (row >= 0 && col >= 0)
    os << "(" << row << "," << col << ")";
  else if (col >= 0)
    os << " column " << col;
  else if (row >= 0)
    os << " row " << row;
  os << ": " << message;
  return os.str();
}

namespace {

std::string join(const std::vector<Violation>& v) {
  std::string out = "invalid input";
  for (const auto& item : v) out += "\n  " + item.describe();
  return out;
}

void append(std::vector<Violation>& into, std::vector<Violation> from) {
  into.insert(into.end(), std::make_move_iterator(from.begin()), std::make_move_iterator(from.end()));
}

void throw_if_any(std::vector<Violation> v) {
  if (!v.empty()) throw ValidationError(std::move(v));
}

}  // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : Error(join(violations)), violations_(std::move(violations)) {}

std::vector<Violation> check_cube(const MatrixXd& X, std::optional<Index> height,
                                  std::optional<Index> width) {
  std::vector<Violation> out;
  if (X.rows() < 1 || X.cols() < 1) {
    out.push_back({"X", -1, -1, "cube must have at least one band and one pixel"});
    return out;
  }
  for (Index j = 0; j < X.cols(); ++j)
    for (Index i = 0; i < X.rows(); ++i)
      if (!std::isfinite(X(i, j))) out.push_back({"X", i, j, "non-finite value"});
  if (height.has_value() != width.has_value()) {
    out.push_back({"X", -1, -1, "grid shape needs both height and width"});
  } else if (height && (*height < 1 || *width < 1 || *height * *width != X.cols())) {
    out.push_back({"X", -1, -1,
                   "grid " + std::to_string(*height) + "x" + std::to_string(*width) +
                       " does not match " + std::to_string(X.cols()) + " pixels"});
  }
  return out;
}

std::vector<Violation> check_endmembers(const MatrixXd& E) {
  std::vector<Violation> out;
  if (E.rows() < 1 || E.cols() < 1) {
    out.push_back({"E", -1, -1, "endmember matrix must be at least 1x1"});
    return out;
  }
  for (Index j = 0; j < E.cols(); ++j) {
    for (Index i = 0; i < E.rows(); ++i) {
      const double v = E(i, j);
      if (!std::isfinite(v) || v < 0.0 || v > 1.0)
        out.push_back({"E", i, j, "entry " + std::to_string(v) + " outside [0,1]"});
    }
    if ((E.col(j).array() == 0.0).all()) out.push_back({"E", -1, j, "column is identically zero"});
  }
  return out;
}

std::vector<Violation> check_abundances(const MatrixXd& A, double tol) {
  std::vector<Violation> out;
  if (A.rows() < 1 || A.cols() < 1) {
    out.push_back({"A", -1, -1, "abundance matrix must be at least 1x1"});
    return out;
  }
  for (Index j = 0; j < A.cols(); ++j) {
    for (Index i = 0; i < A.rows(); ++i)
      if (!std::isfinite(A(i, j)) || A(i, j) < 0.0)
        out.push_back({"A", i, j, "negative or non-finite abundance"});
    const double s = A.col(j).sum();
    if (!(std::abs(s - 1.0) <= tol))
      out.push_back({"A", -1, j, "column sums to " + std::to_string(s)});
  }
  return out;
}

std::vector<Violation> check_probabilities(const VectorXd& P) {
  std::vector<Violation> out;
  for (Index i = 0; i < P.size(); ++i)
    if (!(P(i) >= 0.0 && P(i) <= 1.0)) out.push_back({"P", i, -1, "probability outside [0,1]"});
  return out;
}

HyperCube::HyperCube(MatrixXd data, std::vector<double> bands, std::optional<Index> height,
                     std::optional<Index> width)
    : data_(std::move(data)), bands_(std::move(bands)), height_(height), width_(width) {
  auto v = check_cube(data_, height_, width_);
  if (!bands_.empty() && static_cast<Index>(bands_.size()) != data_.rows())
    v.push_back({"X", -1, -1, "band label count does not match band count"});
  throw_if_any(std::move(v));
}

EndmemberMatrix::EndmemberMatrix(MatrixXd data) : data_(std::move(data)) {
  throw_if_any(check_endmembers(data_));
}

AbundanceMatrix::AbundanceMatrix(MatrixXd data) : data_(std::move(data)) {
  throw_if_any(check_abundances(data_));
}

TransitionProbabilities::TransitionProbabilities(VectorXd data) : data_(std::move(data)) {
  throw_if_any(check_probabilities(data_));
}

std::vector<Violation> validate(const MatrixXd& X, const MatrixXd& E, const MatrixXd& A,
                                const VectorXd& P) {
  std::vector<Violation> out = check_cube(X);
  append(out, check_endmembers(E));
  append(out, check_abundances(A));
  append(out, check_probabilities(P));
  if (E.rows() != X.rows())
    out.push_back({"E", -1, -1,
                   "has " + std::to_string(E.rows()) + " bands, cube has " + std::to_string(X.rows())});
  if (A.rows() != E.cols())
    out.push_back({"A", -1, -1,
                   "has " + std::to_string(A.rows()) + " rows, E has " + std::to_string(E.cols()) +
                       " endmembers"});
  if (A.cols() != X.cols())
    out.push_back({"A", -1, -1,
                   "has " + std::to_string(A.cols()) + " columns, cube has " +
                       std::to_string(X.cols()) + " pixels"});
  if (P.size() != X.cols())
    out.push_back({"P", -1, -1,
                   "has length " + std::to_string(P.size()) + ", cube has " +
                       std::to_string(X.cols()) + " pixels"});
  return out;
}

std::vector<Violation> validate(const HyperCube& cube, const EndmemberMatrix& E,
                                const AbundanceMatrix& A, const TransitionProbabilities& P) {
  return validate(cube.data(), E.data(), A.data(), P.data());
}

}  // namespace mlmunmix
