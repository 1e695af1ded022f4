#include "mlmunmix/metrics.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace mlmunmix;

TEST(Nmse, Examples) {
  MatrixXd truth(1, 2);
  truth << 1.0, 0.0;
  MatrixXd est(1, 2);
  est << 1.1, 0.0;
  EXPECT_NEAR(nmse_db(est, truth), -20.0, 1e-12);
  EXPECT_EQ(nmse_db(truth, truth), -std::numeric_limits<double>::infinity());
  EXPECT_NEAR(nmse_db(MatrixXd::Zero(1, 2), truth), 0.0, 1e-15);
}

TEST(Nmse, Errors) {
  EXPECT_THROW(nmse_db(MatrixXd::Ones(2, 2), MatrixXd::Ones(2, 3)), DimensionError);
  EXPECT_THROW(nmse_db(MatrixXd::Ones(2, 2), MatrixXd::Zero(2, 2)), std::invalid_argument);
}

TEST(Sam, Examples) {
  EXPECT_NEAR(sam_deg(VectorXd::Unit(2, 0), VectorXd::Unit(2, 1)), 90.0, 1e-12);
  VectorXd a(2);
  a << 1, 1;
  EXPECT_NEAR(sam_deg(VectorXd::Unit(2, 0), a), 45.0, 1e-12);
  EXPECT_NEAR(sam_deg(a, 3.0 * a), 0.0, 1e-12);
  EXPECT_NEAR(sam_deg(a, -a), 180.0, 1e-12);
  EXPECT_THROW(sam_deg(a, VectorXd::Zero(2)), std::invalid_argument);
  EXPECT_THROW(sam_deg(a, VectorXd::Ones(3)), DimensionError);
}

TEST(Sam, AccurateForTinyAndNearStraightAngles) {
  const double theta = 1e-7;
  VectorXd a(2);
  a << 1.0, 0.0;
  VectorXd b(2);
  b << std::cos(theta), std::sin(theta);
  const double deg = theta * 180.0 / std::numbers::pi;
  EXPECT_NEAR(sam_deg(a, b), deg, 1e-12 * deg + 1e-15);
  EXPECT_NEAR(sam_deg(a, -b), 180.0 - deg, 1e-12);
}

TEST(Sam, MatchesExtendedPrecisionOracle) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 1000; ++trial) {
    const VectorXd a = oracle::uniform_matrix(20, 1, 0, 1, rng);
    const VectorXd b = oracle::uniform_matrix(20, 1, 0, 1, rng);
    ASSERT_NEAR(sam_deg(a, b), oracle::spectral_angle_deg(a, b), 1e-6);
  }
}

TEST(Assignment, MatchesBruteForce) {
  std::mt19937_64 rng(2);
  for (Index m = 1; m <= 6; ++m) {
    for (int trial = 0; trial < 40; ++trial) {
      const MatrixXd cost = oracle::uniform_matrix(m, m, 0, 10, rng);
      double best = 0;
      oracle::brute_force_assignment(cost, &best);
      const auto got = optimal_assignment(cost);
      double total = 0;
      std::vector<bool> used(static_cast<std::size_t>(m), false);
      for (Index k = 0; k < m; ++k) {
        const Index c = got[static_cast<std::size_t>(k)];
        ASSERT_FALSE(used[static_cast<std::size_t>(c)]);
        used[static_cast<std::size_t>(c)] = true;
        total += cost(k, c);
      }
      ASSERT_NEAR(total, best, 1e-9);
    }
  }
  EXPECT_THROW(optimal_assignment(MatrixXd::Ones(2, 3)), DimensionError);
}

TEST(Alignment, UndoesAPermutation) {
  std::mt19937_64 rng(3);
  const MatrixXd E = oracle::uniform_matrix(10, 4, 0.05, 0.95, rng);
  const MatrixXd A = oracle::uniform_matrix(4, 7, 0, 1, rng);
  const std::vector<Index> perm{2, 0, 3, 1};
  MatrixXd E_hat(10, 4);
  MatrixXd A_hat(4, 7);
  for (Index k = 0; k < 4; ++k) {
    E_hat.col(perm[static_cast<std::size_t>(k)]) = E.col(k);
    A_hat.row(perm[static_cast<std::size_t>(k)]) = A.row(k);
  }
  const Alignment al = align_endmembers(E_hat, E, A_hat);
  EXPECT_EQ(al.permutation, perm);
  EXPECT_EQ(al.E_hat, E);
  EXPECT_EQ(al.A_hat, A);
  EXPECT_THROW(align_endmembers(E_hat, E, MatrixXd::Ones(3, 7)), DimensionError);
}

TEST(Evaluate, ExactEstimateAndMissingProbabilities) {
  std::mt19937_64 rng(4);
  const MatrixXd E = oracle::uniform_matrix(8, 3, 0.05, 0.95, rng);
  const MatrixXd A = oracle::uniform_matrix(3, 5, 0, 1, rng);
  const VectorXd P = oracle::uniform_matrix(5, 1, 0, 1, rng);
  const EvalReport exact = evaluate(E, A, P, E, A, P);
  EXPECT_EQ(exact.nmse_e_db, -std::numeric_limits<double>::infinity());
  EXPECT_EQ(exact.nmse_a_db, -std::numeric_limits<double>::infinity());
  ASSERT_TRUE(exact.nmse_p_db.has_value());
  EXPECT_EQ(*exact.nmse_p_db, -std::numeric_limits<double>::infinity());
  EXPECT_EQ(exact.sam_mean_deg, 0.0);

  EXPECT_FALSE(evaluate(E, A, std::nullopt, E, A, P).nmse_p_db.has_value());
  EXPECT_FALSE(evaluate(E, A, P, E, A, VectorXd::Zero(5)).nmse_p_db.has_value());

  const EvalReport noisy = evaluate(E * 1.01, A, P * 0.9, E, A, P);
  EXPECT_NEAR(noisy.nmse_e_db, -40.0, 1e-9);
  EXPECT_NEAR(*noisy.nmse_p_db, -20.0, 1e-9);
  EXPECT_NEAR(noisy.sam_mean_deg, 0.0, 1e-6);
}

TEST(Formatting, MetricsAndCsv) {
  EXPECT_EQ(format_metric(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_EQ(format_metric(-20.0), "-20");
  EXPECT_EQ(format_metric(0.1), "0.1");
  EXPECT_EQ(csv_header(), "method,SAM_E,NMSE_E,NMSE_A,NMSE_P");

  EvalReport r;
  r.sam_mean_deg = 1.5;
  r.nmse_e_db = -10;
  r.nmse_a_db = -20;
  r.sam_per_endmember = VectorXd::Constant(2, 1.5);
  r.permutation = {1, 0};
  EXPECT_EQ(to_csv_row(r, "LU_free_E"), "LU_free_E,1.5,-10,-20,/");
  r.nmse_p_db = -30;
  EXPECT_EQ(to_csv_row(r, "NLU_free_E"), "NLU_free_E,1.5,-10,-20,-30");
  const std::string kv = to_key_value(r, "NLU_free_E");
  EXPECT_NE(kv.find("nmse_p_db=-30\n"), std::string::npos);
  EXPECT_NE(kv.find("sam_deg_2=1.5\n"), std::string::npos);
  EXPECT_NE(kv.find("permutation=2,1\n"), std::string::npos);
}
