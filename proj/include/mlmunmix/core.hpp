#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlmunmix {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Sum-to-one tolerance every abundance column must meet after projection.
inline constexpr double kSumToOneTol = 1e-9;

// Error hierarchy. The CLI maps these onto exit codes: DimensionError and
// ValidationError are data errors (2), DivergenceError/RankDeficientError are
// numeric failures (3).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

/// The MLM series does not converge (P * max(y) reaches the pole).
class DivergenceError : public NumericError {
 public:
  using NumericError::NumericError;
};

class RankDeficientError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// One broken invariant. `object` names the offending value ("A", "E", ...),
/// `row`/`col` locate the entry or column when meaningful (-1 otherwise).
struct Violation {
  std::string object;
  Index row = -1;
  Index col = -1;
  std::string message;

  std::string describe() const;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

std::vector<Violation> check_cube(const MatrixXd& X, std::optional<Index> height = {},
                                  std::optional<Index> width = {});
std::vector<Violation> check_endmembers(const MatrixXd& E);
std::vector<Violation> check_abundances(const MatrixXd& A, double tol = kSumToOneTol);
std::vector<Violation> check_probabilities(const VectorXd& P);

/// Observed reflectances, one pixel per column (d bands x n pixels).
class HyperCube {
 public:
  HyperCube() = default;
  /// Throws ValidationError when an entry is non-finite or the grid does not
  /// multiply out to the pixel count.
  explicit HyperCube(MatrixXd data, std::vector<double> bands = {},
                     std::optional<Index> height = {}, std::optional<Index> width = {});

  const MatrixXd& data() const { return data_; }
  const std::vector<double>& bands() const { return bands_; }
  Index num_bands() const { return data_.rows(); }
  Index num_pixels() const { return data_.cols(); }
  bool has_grid() const { return height_.has_value(); }
  Index height() const { return height_.value_or(1); }
  Index width() const { return width_.value_or(data_.cols()); }

 private:
  MatrixXd data_;
  std::vector<double> bands_;
  std::optional<Index> height_;
  std::optional<Index> width_;
};

/// d x m endmember signatures, entries in [0, 1], no all-zero column.
class EndmemberMatrix {
 public:
  EndmemberMatrix() = default;
  explicit EndmemberMatrix(MatrixXd data);

  const MatrixXd& data() const { return data_; }
  Index num_bands() const { return data_.rows(); }
  Index num_endmembers() const { return data_.cols(); }

 private:
  MatrixXd data_;
};

/// m x n abundances, every column on the probability simplex.
class AbundanceMatrix {
 public:
  AbundanceMatrix() = default;
  explicit AbundanceMatrix(MatrixXd data);

  const MatrixXd& data() const { return data_; }
  Index num_endmembers() const { return data_.rows(); }
  Index num_pixels() const { return data_.cols(); }

 private:
  MatrixXd data_;
};

/// Per-pixel interaction probabilities in [0, 1].
class TransitionProbabilities {
 public:
  TransitionProbabilities() = default;
  explicit TransitionProbabilities(VectorXd data);
  static TransitionProbabilities zeros(Index n) { return TransitionProbabilities(VectorXd::Zero(n)); }

  const VectorXd& data() const { return data_; }
  Index size() const { return data_.size(); }

 private:
  VectorXd data_;
};

/// Checks every invariant of the four inputs plus dimensional agreement
/// (E is d x m, A is m x n, P has length n). Nothing is thrown.
std::vector<Violation> validate(const MatrixXd& X, const MatrixXd& E, const MatrixXd& A,
                                const VectorXd& P);
std::vector<Violation> validate(const HyperCube& cube, const EndmemberMatrix& E,
                                const AbundanceMatrix& A, const TransitionProbabilities& P);

}  // namespace mlmunmix
