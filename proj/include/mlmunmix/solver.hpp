#pragma once

#include "mlmunmix/core.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace mlmunmix {

/// {linear, nonlinear} x {endmembers fixed at E0, endmembers estimated}.
/// Linear modes pin P to zero.
enum class Mode { LU_fixed_E, LU_free_E, NLU_fixed_E, NLU_free_E };

std::string_view to_string(Mode mode);
std::optional<Mode> parse_mode(std::string_view text);
inline bool updates_probability(Mode m) { return m == Mode::NLU_fixed_E || m == Mode::NLU_free_E; }
inline bool updates_endmembers(Mode m) { return m == Mode::LU_free_E || m == Mode::NLU_free_E; }

enum class Termination { AbsoluteThreshold, RelativeThreshold, MaxIterations };
std::string_view to_string(Termination t);

struct SolverConfig {
  Mode mode = Mode::NLU_free_E;
  /// Absolute objective threshold. When unset it becomes n * noise_power if
  /// the noise power is known, and is disabled (0) otherwise.
  std::optional<double> eta1;
  /// Stop once the relative objective decrease of one outer iteration drops below this.
  double eta2 = 1e-3;
  int max_outer_iterations = 500;
  /// Reserved for randomized tie-breaking; the current steps are deterministic.
  std::uint64_t seed = 0;
  /// Noise variance per band sample, when known.
  std::optional<double> noise_power;

  /// Throws std::invalid_argument on eta2 <= 0, max_outer_iterations < 1, or
  /// negative thresholds.
  void validate() const;
  double absolute_threshold(Index num_pixels) const;
};

// Lipschitz values below this are treated as a numerically zero operator.
inline constexpr double kLipschitzFloor = 1e-15;
// Denominator floor for the closed-form probability update.
inline constexpr double kProbabilityDenominatorFloor = 1e-20;

struct AbundanceStep {
  VectorXd a;
  double lipschitz = 0.0;
  bool degenerate = false;
};

/// One projected-gradient step on g(a) = ||x - E~ a||^2 with stepsize 1/L_a,
/// where L_a = ||E~^T E~||_F and the gradient is taken as E~^T (E~ a - x).
AbundanceStep update_abundance(const VectorXd& x, const VectorXd& a, const MatrixXd& E, double P);

struct ProbabilityStep {
  double P = 0.0;
  bool degenerate = false;
};

/// Closed-form minimizer over [0,1] of ||x - (1 - P) y - P y .* x||^2.
ProbabilityStep update_probability(const VectorXd& x, const VectorXd& y);

/// Gradient of f(E) = sum_i ||x_i - (E .* A~_i) 1||^2 with
/// A~_i = ((1 - P_i) 1 + P_i x_i) a_i^T, without the factor 2 of the
/// squared norm (the same convention as the row Hessians).
MatrixXd endmember_gradient(const MatrixXd& E, const MatrixXd& X, const MatrixXd& A, const VectorXd& P);

/// ||H||_F for H = sum_i r_i^T r_i, where row i of `atilde_rows` is the
/// band-j row of A~_i.
template <typename Derived>
double row_lipschitz(const Eigen::MatrixBase<Derived>& atilde_rows) {
  const MatrixXd H = atilde_rows.transpose() * atilde_rows;
  return H.norm();
}

/// Row Lipschitz constants L_j for all d bands at once.
VectorXd endmember_row_lipschitz(const MatrixXd& X, const MatrixXd& A, const VectorXd& P);

struct EndmemberStep {
  MatrixXd E;
  VectorXd lipschitz;
  std::vector<Index> degenerate_rows;
};

/// One projected-gradient sweep over all rows of E, stepsize 1/L_j per row,
/// projected onto [0,1].
EndmemberStep update_endmembers(const MatrixXd& E, const MatrixXd& X, const MatrixXd& A, const VectorXd& P);

enum class Block { Abundance, Probability, Endmember };

struct StepDiagnostics {
  VectorXd lipschitz_a;
  VectorXd lipschitz_e;
  double objective_before = 0.0;
  double objective_after_a = 0.0;
  double objective_after_p = 0.0;
  double objective_after_e = 0.0;
  std::vector<Index> degenerate_pixels_a;
  std::vector<Index> degenerate_pixels_p;
  std::vector<Index> degenerate_rows_e;
};

struct IterationReport {
  int iteration = 0;
  double objective = 0.0;
  double seconds_a = 0.0;
  double seconds_p = 0.0;
  double seconds_e = 0.0;
};

struct SolverCallbacks {
  /// Called once per outer iteration, after the last block.
  std::function<void(const IterationReport&)> on_iteration;
  /// Called after every block visit with the current iterate and its objective.
  std::function<void(int iteration, Block block, const MatrixXd& E, const MatrixXd& A,
                     const VectorXd& P, double objective)>
      on_block;
};

struct UnmixingResult {
  EndmemberMatrix endmembers;
  AbundanceMatrix abundances;
  TransitionProbabilities probabilities;
  /// Objective at (E0, A0, P0), before the first sweep.
  double initial_objective = 0.0;
  /// One value per outer iteration.
  std::vector<double> objective_trace;
  Termination termination = Termination::MaxIterations;
  int iterations = 0;
  double wall_time = 0.0;
  StepDiagnostics diagnostics;  // of the last outer iteration
};

/// Block coordinate descent: per outer iteration an abundance step on every
/// pixel, a probability step (nonlinear modes), and an endmember sweep (free-E
/// modes), until L < eta1, the relative decrease falls below eta2, or the
/// iteration cap is reached. A starts at uniform columns 1/m; P0 defaults to 0.
UnmixingResult solve(const HyperCube& X, const SolverConfig& cfg, const EndmemberMatrix& E0,
                     std::optional<TransitionProbabilities> P0 = {}, const SolverCallbacks& callbacks = {});

}  // namespace mlmunmix
