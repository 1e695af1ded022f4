#include "mlmunmix/model.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace mlmunmix;

namespace {

VectorXd vec(std::initializer_list<double> values) {
  VectorXd v(static_cast<Index>(values.size()));
  Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

}  // namespace

TEST(MlmForward, ZeroProbabilityIsExactlyLinear) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const MatrixXd E = oracle::uniform_matrix(7, 3, 0, 1, rng);
    const VectorXd a = oracle::simplex_point(3, rng);
    const VectorXd y = E * a;
    EXPECT_EQ(mlm_forward(E, a, 0.0), y);
  }
}

TEST(MlmForward, WorkedExampleMatchesSeries) {
  const VectorXd y = vec({0.4, 0.6});
  const VectorXd x = mlm_forward_linear(y, 0.3);
  const VectorXd series = oracle::mlm_series(y, 0.3);
  EXPECT_NEAR(x(0), 0.28 / 0.88, 1e-15);
  EXPECT_NEAR(x(1), 0.42 / 0.82, 1e-15);
  EXPECT_LE((x - series).lpNorm<Eigen::Infinity>(), 1e-14);
  EXPECT_NEAR(x(0), 0.318182, 1e-6);
  EXPECT_NEAR(x(1), 0.512195, 1e-6);
}

TEST(MlmForward, PoleRaisesDivergence) {
  EXPECT_THROW(mlm_forward_linear(vec({1.0}), 1.0), DivergenceError);
  EXPECT_THROW(mlm_forward_linear(vec({1.0}), 1.0 - 1e-13), DivergenceError);
  EXPECT_NO_THROW(mlm_forward_linear(vec({1.0}), 0.999));
  EXPECT_THROW(mlm_forward(MatrixXd::Ones(2, 1), vec({1.0}), 1.0), DivergenceError);
}

TEST(MlmForward, DimensionMismatch) {
  EXPECT_THROW(mlm_forward(MatrixXd::Ones(2, 2), vec({1.0}), 0.1), DimensionError);
}

TEST(MlmForward, SatisfiesFixedPointIdentity) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 1000; ++trial) {
    const MatrixXd E = oracle::uniform_matrix(10, 4, 0, 1, rng);
    const VectorXd a = oracle::simplex_point(4, rng);
    const VectorXd y = E * a;
    const double P = u(rng) * std::min(1.0, 0.999 / y.maxCoeff());
    const VectorXd x = mlm_forward(E, a, P);
    const VectorXd rhs = (1 - P) * y + P * y.cwiseProduct(x);
    ASSERT_LE((x - rhs).lpNorm<Eigen::Infinity>(), 1e-12);
  }
}

TEST(MlmForward, AgreesWithTruncatedSeriesUpToItsTail) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 1000; ++trial) {
    const VectorXd y = oracle::uniform_matrix(8, 1, 0, 1, rng);
    const double P = u(rng) * std::min(1.0, 0.9 / y.maxCoeff());
    const VectorXd x = mlm_forward_linear(y, P);
    const VectorXd partial = oracle::mlm_series(y, P);
    for (Index j = 0; j < y.size(); ++j) {
      const double py = P * y(j);
      const double tail = (1 - P) * y(j) * std::pow(py, 200) / (1 - py);
      ASSERT_LE(std::abs(x(j) - partial(j)), 1e-12 + tail) << "y=" << y(j) << " P=" << P;
    }
  }
}

TEST(MlmForward, AgreesWithSeriesAwayFromTheBoundary) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 1000; ++trial) {
    const VectorXd y = oracle::uniform_matrix(8, 1, 0, 1, rng);
    const double P = u(rng) * std::min(1.0, 0.85 / y.maxCoeff());
    ASSERT_LE((mlm_forward_linear(y, P) - oracle::mlm_series(y, P)).lpNorm<Eigen::Infinity>(), 1e-10);
  }
}

TEST(MlmResidual, Examples) {
  EXPECT_EQ(mlm_residual(vec({0.3, 0.4}), vec({0.3, 0.4}), 0.0), VectorXd::Zero(2));
  EXPECT_EQ(mlm_residual(vec({1, 1}), vec({0, 0}), 0.7), vec({1, 1}));
  const VectorXd y = vec({0.4, 0.6});
  EXPECT_LE(mlm_residual(mlm_forward_linear(y, 0.3), y, 0.3).lpNorm<Eigen::Infinity>(), 1e-12);
  EXPECT_THROW(mlm_residual(vec({1}), vec({1, 2}), 0.0), DimensionError);
}

TEST(ModifiedEndmembers, Examples) {
  MatrixXd E(2, 1);
  E << 0.5, 0.5;
  MatrixXd expected(2, 1);
  expected << 0.5, 0.25;
  EXPECT_EQ(modified_endmembers(E, vec({1, 0}), 0.5), expected);

  std::mt19937_64 rng(4);
  const MatrixXd E3 = oracle::uniform_matrix(4, 3, 0, 1, rng);
  const VectorXd x = oracle::uniform_matrix(4, 1, 0, 1, rng);
  EXPECT_EQ(modified_endmembers(E3, x, 0.0), E3);
  const MatrixXd at_one = modified_endmembers(E3, x, 1.0);
  for (Index j = 0; j < 4; ++j)
    for (Index k = 0; k < 3; ++k) EXPECT_DOUBLE_EQ(at_one(j, k), E3(j, k) * x(j));
  EXPECT_THROW(modified_endmembers(E3, vec({1, 2}), 0.5), DimensionError);
}

TEST(ModifiedEndmembers, TurnsTheBilinearModelLinear) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const MatrixXd E = oracle::uniform_matrix(6, 3, 0, 1, rng);
    const VectorXd a = oracle::simplex_point(3, rng);
    const VectorXd x = oracle::uniform_matrix(6, 1, 0, 1, rng);
    const double P = u(rng);
    const VectorXd y = E * a;
    const VectorXd direct = x - (1 - P) * y - P * y.cwiseProduct(x);
    ASSERT_LE((direct - (x - modified_endmembers(E, x, P) * a)).lpNorm<Eigen::Infinity>(), 1e-14);
  }
}

TEST(Objective, Examples) {
  MatrixXd E(1, 1);
  E << 0.0;
  MatrixXd X(1, 1);
  X << 1.0;
  EXPECT_EQ(objective(X, E, MatrixXd::Ones(1, 1), VectorXd::Zero(1)), 1.0);

  std::mt19937_64 rng(6);
  const MatrixXd E2 = oracle::uniform_matrix(5, 3, 0, 1, rng);
  MatrixXd A(3, 20);
  for (Index i = 0; i < 20; ++i) A.col(i) = oracle::simplex_point(3, rng);
  EXPECT_EQ(objective(E2 * A, E2, A, VectorXd::Zero(20)), 0.0);

  std::uniform_real_distribution<double> u(0, 1);
  VectorXd P(20);
  MatrixXd Xm(5, 20);
  for (Index i = 0; i < 20; ++i) {
    P(i) = u(rng);
    Xm.col(i) = mlm_forward(E2, A.col(i), P(i));
  }
  EXPECT_LE(objective(Xm, E2, A, P), 1e-20 * 5 * 20);
}

TEST(Objective, MatchesElementwiseOracle) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const MatrixXd E = oracle::uniform_matrix(9, 3, 0, 1, rng);
    const MatrixXd X = oracle::uniform_matrix(9, 30, 0, 1, rng);
    MatrixXd A(3, 30);
    for (Index i = 0; i < 30; ++i) A.col(i) = oracle::simplex_point(3, rng);
    const VectorXd P = oracle::uniform_matrix(30, 1, 0, 1, rng);
    const double ref = oracle::mlm_objective(X, E, A, P);
    ASSERT_NEAR(objective(X, E, A, P), ref, 1e-12 * ref);
    ASSERT_NEAR(pixel_objectives(X, E, A, P).sum(), ref, 1e-12 * ref);
  }
}

TEST(Objective, DimensionMismatch) {
  EXPECT_THROW(objective(MatrixXd::Ones(2, 3), MatrixXd::Ones(2, 2), MatrixXd::Ones(2, 4), VectorXd::Zero(3)),
               DimensionError);
  EXPECT_THROW(objective(MatrixXd::Ones(2, 3), MatrixXd::Ones(2, 2), MatrixXd::Ones(2, 3), VectorXd::Zero(2)),
               DimensionError);
}
