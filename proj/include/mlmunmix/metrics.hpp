#pragma once

#include "mlmunmix/core.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mlmunmix {

/// 10 log10(||est - truth||_F^2 / ||truth||_F^2). An exact match yields
/// -infinity. Throws DimensionError on a shape mismatch and
/// std::invalid_argument when the truth is all zeros.
double nmse_db(const Eigen::Ref<const MatrixXd>& est, const Eigen::Ref<const MatrixXd>& truth);

/// Spectral angle in degrees. Throws std::invalid_argument on a zero vector.
double sam_deg(const Eigen::Ref<const VectorXd>& e, const Eigen::Ref<const VectorXd>& e_hat);

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method).
/// Returns assignment[row] = column.
std::vector<Index> optimal_assignment(const MatrixXd& cost);

struct Alignment {
  /// permutation[k] is the column of the estimate matched to true endmember k.
  std::vector<Index> permutation;
  MatrixXd E_hat;  // columns reordered to the truth's order
  MatrixXd A_hat;  // rows reordered the same way (empty if no A was given)
};

/// Reorders the estimated endmembers (and abundance rows) to minimize total SAM
/// against the truth.
Alignment align_endmembers(const MatrixXd& E_hat, const MatrixXd& E_true, const MatrixXd& A_hat = MatrixXd());

struct EvalReport {
  double nmse_a_db = 0.0;
  double nmse_e_db = 0.0;
  std::optional<double> nmse_p_db;  // absent for linear runs
  double sam_mean_deg = 0.0;
  VectorXd sam_per_endmember;
  std::vector<Index> permutation;
};

/// Aligns (E_hat, A_hat) to the truth, then computes every metric. P metrics
/// are only computed when both P_hat is supplied and P_true is nonzero.
EvalReport evaluate(const MatrixXd& E_hat, const MatrixXd& A_hat, const std::optional<VectorXd>& P_hat,
                    const MatrixXd& E_true, const MatrixXd& A_true, const VectorXd& P_true);

/// Decimal text for a metric value; -infinity becomes "-inf".
std::string format_metric(double value);

/// Key-value text ("key=value" lines).
std::string to_key_value(const EvalReport& report, const std::string& label);
std::string csv_header();
/// One row: label,SAM_E,NMSE_E,NMSE_A,NMSE_P with "/" for missing P metrics.
std::string to_csv_row(const EvalReport& report, const std::string& label);

}  // namespace mlmunmix
