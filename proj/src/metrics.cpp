#include "mlmunmix/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace mlmunmix {

double nmse_db(const Eigen::Ref<const MatrixXd>& est, const Eigen::Ref<const MatrixXd>& truth) {
  if (est.rows() != truth.rows() || est.cols() != truth.cols())
    throw DimensionError("nmse: shapes differ");
  const double denom = truth.squaredNorm();
  if (!(denom > 0.0)) throw std::invalid_argument("nmse: truth is identically zero");
  const double err = (est - truth).squaredNorm();
  if (err == 0.0) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(err / denom);
}

double sam_deg(const Eigen::Ref<const VectorXd>& e, const Eigen::Ref<const VectorXd>& e_hat) {
  if (e.size() != e_hat.size()) throw DimensionError("sam: lengths differ");
  const double ne = e.norm();
  const double nh = e_hat.norm();
  if (!(ne > 0.0) || !(nh > 0.0)) throw std::invalid_argument("sam: zero vector");
  const VectorXd u = e / ne;
  const VectorXd v = e_hat / nh;
  return 2.0 * std::atan2((u - v).norm(), (u + v).norm()) * 180.0 / std::numbers::pi;
}

std::vector<Index> optimal_assignment(const MatrixXd& cost) {
  if (cost.rows() != cost.cols()) throw DimensionError("optimal_assignment: cost matrix must be square");
  const Index n = cost.rows();
  // Potentials formulation with 1-based sentinel row/column 0.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<Index> match(n + 1, 0), way(n + 1, 0);
  for (Index i = 1; i <= n; ++i) {
    match[0] = i;
    Index j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const Index i0 = match[j0];
      double delta = inf;
      Index j1 = 0;
      for (Index j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (Index j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const Index j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<Index> assignment(n);
  for (Index j = 1; j <= n; ++j) assignment[match[j] - 1] = j - 1;
  return assignment;
}

Alignment align_endmembers(const MatrixXd& E_hat, const MatrixXd& E_true, const MatrixXd& A_hat) {
  if (E_hat.rows() != E_true.rows() || E_hat.cols() != E_true.cols())
    throw DimensionError("align_endmembers: estimate and truth shapes differ");
  const Index m = E_true.cols();
  MatrixXd cost(m, m);
  for (Index k = 0; k < m; ++k)
    for (Index l = 0; l < m; ++l) cost(k, l) = sam_deg(E_true.col(k), E_hat.col(l));

  Alignment out;
  out.permutation = optimal_assignment(cost);
  out.E_hat.resize(E_hat.rows(), m);
  for (Index k = 0; k < m; ++k) out.E_hat.col(k) = E_hat.col(out.permutation[k]);
  if (A_hat.size() > 0) {
    if (A_hat.rows() != m) throw DimensionError("align_endmembers: A rows do not match endmember count");
    out.A_hat.resize(m, A_hat.cols());
    for (Index k = 0; k < m; ++k) out.A_hat.row(k) = A_hat.row(out.permutation[k]);
  }
  return out;
}

EvalReport evaluate(const MatrixXd& E_hat, const MatrixXd& A_hat, const std::optional<VectorXd>& P_hat,
                    const MatrixXd& E_true, const MatrixXd& A_true, const VectorXd& P_true) {
  const Alignment al = align_endmembers(E_hat, E_true, A_hat);
  EvalReport r;
  r.permutation = al.permutation;
  r.nmse_e_db = nmse_db(al.E_hat, E_true);
  r.nmse_a_db = nmse_db(al.A_hat, A_true);
  if (P_hat && P_true.squaredNorm() > 0.0) r.nmse_p_db = nmse_db(*P_hat, P_true);
  const Index m = E_true.cols();
  r.sam_per_endmember.resize(m);
  for (Index k = 0; k < m; ++k) r.sam_per_endmember(k) = sam_deg(E_true.col(k), al.E_hat.col(k));
  r.sam_mean_deg = r.sam_per_endmember.mean();
  return r;
}

std::string format_metric(double value) {
  if (std::isinf(value)) return value < 0 ? "-inf" : "inf";
  if (std::isnan(value)) return "nan";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string to_key_value(const EvalReport& r, const std::string& label) {
  std::ostringstream os;
  os << "label=" << label << "\n";
  os << "sam_mean_deg=" << format_metric(r.sam_mean_deg) << "\n";
  os << "nmse_e_db=" << format_metric(r.nmse_e_db) << "\n";
  os << "nmse_a_db=" << format_metric(r.nmse_a_db) << "\n";
  os << "nmse_p_db=" << (r.nmse_p_db ? format_metric(*r.nmse_p_db) : "/") << "\n";
  for (Index k = 0; k < r.sam_per_endmember.size(); ++k)
    os << "sam_deg_" << (k + 1) << "=" << format_metric(r.sam_per_endmember(k)) << "\n";
  os << "permutation=";
  for (std::size_t k = 0; k < r.permutation.size(); ++k) os << (k ? "," : "") << (r.permutation[k] + 1);
  os << "\n";
  return os.str();
}

std::string csv_header() { return "method,SAM_E,NMSE_E,NMSE_A,NMSE_P"; }

std::string to_csv_row(const EvalReport& r, const std::string& label) {
  return label + "," + format_metric(r.sam_mean_deg) + "," + format_metric(r.nmse_e_db) + "," +
         format_metric(r.nmse_a_db) + "," + (r.nmse_p_db ? format_metric(*r.nmse_p_db) : "/");
}

}  // namespace mlmunmix
