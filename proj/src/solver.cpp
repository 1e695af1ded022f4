#include "mlmunmix/solver.hpp"

#include "mlmunmix/model.hpp"
#include "mlmunmix/projections.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mlmunmix {

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::LU_fixed_E: return "LU_fixed_E";
    case Mode::LU_free_E: return "LU_free_E";
    case Mode::NLU_fixed_E: return "NLU_fixed_E";
    case Mode::NLU_free_E: return "NLU_free_E";
  }
  return "?";
}

std::optional<Mode> parse_mode(std::string_view text) {
  for (Mode m : {Mode::LU_fixed_E, Mode::LU_free_E, Mode::NLU_fixed_E, Mode::NLU_free_E})
    if (text == to_string(m)) return m;
  return std::nullopt;
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::AbsoluteThreshold: return "AbsoluteThreshold";
    case Termination::RelativeThreshold: return "RelativeThreshold";
    case Termination::MaxIterations: return "MaxIterations";
  }
  return "?";
}

void SolverConfig::validate() const {
  if (!(eta2 > 0.0)) throw std::invalid_argument("eta2 must be positive");
  if (max_outer_iterations < 1) throw std::invalid_argument("max_outer_iterations must be at least 1");
  if (eta1 && !(*eta1 >= 0.0)) throw std::invalid_argument("eta1 must be non-negative");
  if (noise_power && !(*noise_power >= 0.0)) throw std::invalid_argument("noise_power must be non-negative");
}

double SolverConfig::absolute_threshold(Index num_pixels) const {
  if (eta1) return *eta1;
  if (noise_power) return static_cast<double>(num_pixels) * *noise_power;
  return 0.0;
}

AbundanceStep update_abundance(const VectorXd& x, const VectorXd& a, const MatrixXd& E, double P) {
  if (x.size() != E.rows() || a.size() != E.cols())
    throw DimensionError("update_abundance: x must have d entries and a must have m entries");
  const MatrixXd Et = modified_endmembers(E, x, P);
  const MatrixXd gram = Et.transpose() * Et;
  const double lipschitz = gram.norm();
  if (!(lipschitz >= kLipschitzFloor)) return {a, lipschitz, true};
  const VectorXd grad = Et.transpose() * (Et * a - x);
  return {project_simplex(a - grad / lipschitz), lipschitz, false};
}

ProbabilityStep update_probability(const VectorXd& x, const VectorXd& y) {
  if (x.size() != y.size()) throw DimensionError("update_probability: x and y lengths differ");
  const VectorXd u = y - y.cwiseProduct(x);
  const double den = u.squaredNorm();
  if (!(den >= kProbabilityDenominatorFloor)) return {0.0, true};
  const double num = u.dot(y - x);
  return {std::clamp(num / den, 0.0, 1.0), false};
}

namespace {

// Pixel chunk size of the endmember-step reductions. Partial sums per chunk
// are combined in chunk order.
constexpr Index kReductionChunk = 256;

struct EndmemberSums {
  MatrixXd gradient;      // d x m
  MatrixXd hessian_rows;  // d x m*m, row j is vec(H_j)
};

void check_endmember_dims(const MatrixXd& E, const MatrixXd& X, const MatrixXd& A, const VectorXd& P) {
  if (E.rows() != X.rows() || A.rows() != E.cols() || A.cols() != X.cols() || P.size() != X.cols())
    throw DimensionError("endmember step: expected E d x m, X d x n, A m x n, P n");
}

EndmemberSums accumulate(const MatrixXd* E, const MatrixXd& X, const MatrixXd& A, const VectorXd& P) {
  const Index d = X.rows();
  const Index n = X.cols();
  const Index m = A.rows();
  const Index chunks = (n + kReductionChunk - 1) / kReductionChunk;
  std::vector<MatrixXd> grad_parts(E ? chunks : 0);
  std::vector<MatrixXd> hess_parts(chunks);

#pragma omp parallel for schedule(static)
  for (Index c = 0; c < chunks; ++c) {
    const Index begin = c * kReductionChunk;
    const Index len = std::min(kReductionChunk, n - begin);
    const auto Xc = X.middleCols(begin, len);
    const auto Ac = A.middleCols(begin, len);
    const auto Pc = P.segment(begin, len);

    // W(:, i) = (1 - P_i) 1 + P_i x_i, so A~_i = W(:, i) a_i^T.
    Eigen::ArrayXXd W = Xc.array().rowwise() * Pc.transpose().array();
    W.rowwise() += (1.0 - Pc.array()).transpose();

    if (E) {
      const MatrixXd Y = (*E) * Ac;
      const Eigen::ArrayXXd R = W * Y.array() - Xc.array();
      grad_parts[c] = (R * W).matrix() * Ac.transpose();
    }

    MatrixXd outer(len, m * m);
    for (Index i = 0; i < len; ++i)
      for (Index k = 0; k < m; ++k)
        for (Index l = 0; l < m; ++l) outer(i, k * m + l) = Ac(k, i) * Ac(l, i);
    hess_parts[c] = W.square().matrix() * outer;
  }

  EndmemberSums sums{MatrixXd::Zero(E ? d : 0, E ? m : 0), MatrixXd::Zero(d, m * m)};
  for (Index c = 0; c < chunks; ++c) {
    if (E) sums.gradient += grad_parts[c];
    sums.hessian_rows += hess_parts[c];
  }
  return sums;
}

VectorXd row_norms(const MatrixXd& hessian_rows) { return hessian_rows.rowwise().norm(); }

}  // namespace

MatrixXd endmember_gradient(const MatrixXd& E, const MatrixXd& X, const MatrixXd& A, const VectorXd& P) {
  check_endmember_dims(E, X, A, P);
  return accumulate(&E, X, A, P).gradient;
}

VectorXd endmember_row_lipschitz(const MatrixXd& X, const MatrixXd& A, const VectorXd& P) {
  if (A.cols() != X.cols() || P.size() != X.cols())
    throw DimensionError("endmember_row_lipschitz: X, A and P pixel counts differ");
  return row_norms(accumulate(nullptr, X, A, P).hessian_rows);
}

EndmemberStep update_endmembers(const MatrixXd& E, const MatrixXd& X, const MatrixXd& A, const VectorXd& P) {
  check_endmember_dims(E, X, A, P);
  const EndmemberSums sums = accumulate(&E, X, A, P);
  EndmemberStep step{E, row_norms(sums.hessian_rows), {}};
  for (Index j = 0; j < E.rows(); ++j) {
    const double lj = step.lipschitz(j);
    if (!(lj >= kLipschitzFloor)) {
      step.degenerate_rows.push_back(j);
      continue;
    }
    step.E.row(j) = project_box(E.row(j) - sums.gradient.row(j) / lj, 0.0, 1.0);
  }
  return step;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<Index> flagged(const std::vector<char>& flags) {
  std::vector<Index> out;
  for (std::size_t i = 0; i < flags.size(); ++i)
    if (flags[i]) out.push_back(static_cast<Index>(i));
  return out;
}

}  // namespace

UnmixingResult solve(const HyperCube& cube, const SolverConfig& cfg, const EndmemberMatrix& E0,
                     std::optional<TransitionProbabilities> P0, const SolverCallbacks& callbacks) {
  cfg.validate();
  const MatrixXd& X = cube.data();
  const Index d = X.rows();
  const Index n = X.cols();
  const Index m = E0.num_endmembers();
  if (E0.num_bands() != d)
    throw DimensionError("solve: E0 has " + std::to_string(E0.num_bands()) + " bands, cube has " +
                         std::to_string(d));
  if (P0 && P0->size() != n)
    throw DimensionError("solve: P0 has " + std::to_string(P0->size()) + " entries, cube has " +
                         std::to_string(n) + " pixels");

  const auto start = Clock::now();
  const bool with_p = updates_probability(cfg.mode);
  const bool with_e = updates_endmembers(cfg.mode);

  MatrixXd E = E0.data();
  MatrixXd A = MatrixXd::Constant(m, n, 1.0 / static_cast<double>(m));
  VectorXd P = (with_p && P0) ? P0->data() : VectorXd::Zero(n);
  const double eta1 = cfg.absolute_threshold(n);

  UnmixingResult result;
  result.initial_objective = objective(X, E, A, P);
  double previous = result.initial_objective;
  StepDiagnostics diag;

  auto notify = [&](int t, Block b, double value) {
    if (callbacks.on_block) callbacks.on_block(t, b, E, A, P, value);
  };

  for (int t = 1;; ++t) {
    IterationReport report;
    report.iteration = t;
    diag = StepDiagnostics{};
    diag.objective_before = previous;
    diag.lipschitz_a.resize(n);

    auto t0 = Clock::now();
    std::vector<char> degenerate(n, 0);
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < n; ++i) {
      AbundanceStep step = update_abundance(X.col(i), A.col(i), E, P(i));
      A.col(i) = step.a;
      diag.lipschitz_a(i) = step.lipschitz;
      degenerate[i] = step.degenerate;
    }
    diag.degenerate_pixels_a = flagged(degenerate);
    report.seconds_a = seconds_since(t0);
    double current = objective(X, E, A, P);
    diag.objective_after_a = current;
    notify(t, Block::Abundance, current);

    if (with_p) {
      t0 = Clock::now();
      std::fill(degenerate.begin(), degenerate.end(), 0);
#pragma omp parallel for schedule(static)
      for (Index i = 0; i < n; ++i) {
        const ProbabilityStep step = update_probability(X.col(i), E * A.col(i));
        P(i) = step.P;
        degenerate[i] = step.degenerate;
      }
      diag.degenerate_pixels_p = flagged(degenerate);
      report.seconds_p = seconds_since(t0);
      current = objective(X, E, A, P);
      notify(t, Block::Probability, current);
    }
    diag.objective_after_p = current;

    if (with_e) {
      t0 = Clock::now();
      EndmemberStep step = update_endmembers(E, X, A, P);
      E = std::move(step.E);
      diag.lipschitz_e = std::move(step.lipschitz);
      diag.degenerate_rows_e = std::move(step.degenerate_rows);
      report.seconds_e = seconds_since(t0);
      current = objective(X, E, A, P);
      notify(t, Block::Endmember, current);
    }
    diag.objective_after_e = current;

    result.objective_trace.push_back(current);
    report.objective = current;
    if (callbacks.on_iteration) callbacks.on_iteration(report);

    result.iterations = t;
    const double decrease = (previous - current) / std::max(std::abs(previous), 1e-300);
    if (current < eta1) {
      result.termination = Termination::AbsoluteThreshold;
      break;
    }
    if (decrease < cfg.eta2) {
      result.termination = Termination::RelativeThreshold;
      break;
    }
    if (t >= cfg.max_outer_iterations) {
      result.termination = Termination::MaxIterations;
      break;
    }
    previous = current;
  }

  result.endmembers = EndmemberMatrix(std::move(E));
  result.abundances = AbundanceMatrix(std::move(A));
  result.probabilities = TransitionProbabilities(std::move(P));
  result.diagnostics = std::move(diag);
  result.wall_time = seconds_since(start);
  return result;
}

}  // namespace mlmunmix
