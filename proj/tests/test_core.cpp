#include "mlmunmix/core.hpp"

#include <gtest/gtest.h>

#include <limits>
#include <random>

using namespace mlmunmix;

namespace {

struct Instance {
  MatrixXd X{3, 4};
  MatrixXd E{3, 2};
  MatrixXd A{2, 4};
  VectorXd P{4};
};

Instance consistent() {
  Instance in;
  in.E << 0.1, 0.9, 0.5, 0.4, 0.8, 0.2;
  in.A << 0.25, 0.5, 1.0, 0.0, 0.75, 0.5, 0.0, 1.0;
  in.P << 0.0, 0.2, 0.5, 0.9;
  in.X = in.E * in.A;
  return in;
}

}  // namespace

TEST(Validate, ConsistentInstanceHasNoViolations) {
  const Instance in = consistent();
  EXPECT_TRUE(validate(in.X, in.E, in.A, in.P).empty());
  EXPECT_TRUE(validate(HyperCube(in.X), EndmemberMatrix(in.E), AbundanceMatrix(in.A), TransitionProbabilities(in.P))
                  .empty());
}

TEST(Validate, ColumnSummingToPointNineNamesTheColumn) {
  Instance in = consistent();
  in.A.col(2) << 0.6, 0.3;
  const auto v = validate(in.X, in.E, in.A, in.P);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].object, "A");
  EXPECT_EQ(v[0].col, 2);
}

TEST(Validate, EndmemberAboveOneNamesTheEntry) {
  Instance in = consistent();
  in.E(1, 0) = 1.2;
  const auto v = validate(in.X, in.E, in.A, in.P);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].object, "E");
  EXPECT_EQ(v[0].row, 1);
  EXPECT_EQ(v[0].col, 0);
  EXPECT_NE(v[0].describe().find("E"), std::string::npos);
}

TEST(Validate, DimensionMismatchesAreReported) {
  Instance in = consistent();
  VectorXd P_short = VectorXd::Zero(3);
  EXPECT_FALSE(validate(in.X, in.E, in.A, P_short).empty());
  MatrixXd E_wide = MatrixXd::Constant(3, 3, 0.5);
  EXPECT_FALSE(validate(in.X, E_wide, in.A, in.P).empty());
  MatrixXd X_tall = MatrixXd::Constant(4, 4, 0.5);
  EXPECT_FALSE(validate(X_tall, in.E, in.A, in.P).empty());
}

TEST(Validate, ProbabilityOutsideUnitInterval) {
  Instance in = consistent();
  in.P(3) = 1.5;
  in.P(0) = -0.1;
  const auto v = validate(in.X, in.E, in.A, in.P);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].object, "P");
}

TEST(Validate, SumToOneToleranceIsOneInABillion) {
  Instance in = consistent();
  in.A(0, 0) += 0.5e-9;
  EXPECT_TRUE(validate(in.X, in.E, in.A, in.P).empty());
  in.A(0, 0) += 1e-9;
  EXPECT_EQ(validate(in.X, in.E, in.A, in.P).size(), 1u);
}

TEST(HyperCubeType, RejectsNonFiniteEntries) {
  MatrixXd X = MatrixXd::Constant(2, 2, 0.5);
  X(1, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(HyperCube{X}, ValidationError);
  X(1, 1) = std::numeric_limits<double>::infinity();
  try {
    HyperCube cube(X);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    ASSERT_EQ(e.violations().size(), 1u);
    EXPECT_EQ(e.violations()[0].row, 1);
    EXPECT_EQ(e.violations()[0].col, 1);
  }
}

TEST(HyperCubeType, GridMustMatchPixelCount) {
  const MatrixXd X = MatrixXd::Constant(2, 6, 0.5);
  EXPECT_THROW(HyperCube(X, {}, 4, 2), ValidationError);
  const HyperCube cube(X, {400.0, 500.0}, 2, 3);
  EXPECT_TRUE(cube.has_grid());
  EXPECT_EQ(cube.height(), 2);
  EXPECT_EQ(cube.width(), 3);
  EXPECT_EQ(cube.num_bands(), 2);
  EXPECT_EQ(cube.num_pixels(), 6);
}

TEST(HyperCubeType, BandLabelsMustMatchBandCount) {
  EXPECT_THROW(HyperCube(MatrixXd::Constant(2, 3, 0.5), {400.0}), ValidationError);
}

TEST(HyperCubeType, ReflectanceAboveOneIsAllowed) {
  EXPECT_NO_THROW(HyperCube(MatrixXd::Constant(2, 2, 1.3)));
}

TEST(HyperCubeType, UngriddedCubeIsASingleRow) {
  const HyperCube cube(MatrixXd::Constant(3, 5, 0.2));
  EXPECT_FALSE(cube.has_grid());
  EXPECT_EQ(cube.height(), 1);
  EXPECT_EQ(cube.width(), 5);
}

TEST(HyperCubeType, EmptyCubeIsRejected) {
  EXPECT_THROW(HyperCube(MatrixXd(0, 3)), ValidationError);
  EXPECT_THROW(HyperCube(MatrixXd(3, 0)), ValidationError);
}

TEST(EndmemberType, RejectsZeroColumnAndOutOfBox) {
  MatrixXd E = MatrixXd::Constant(3, 2, 0.5);
  E.col(1).setZero();
  EXPECT_THROW(EndmemberMatrix{E}, ValidationError);
  E.col(1).setConstant(0.5);
  E(0, 0) = -1e-3;
  EXPECT_THROW(EndmemberMatrix{E}, ValidationError);
  E(0, 0) = 1.0;
  EXPECT_NO_THROW(EndmemberMatrix{E});
}

TEST(AbundanceType, RejectsNegativeEntries) {
  MatrixXd A(2, 1);
  A << 1.1, -0.1;
  EXPECT_THROW(AbundanceMatrix{A}, ValidationError);
}

TEST(ProbabilityType, ZerosFactory) {
  const auto P = TransitionProbabilities::zeros(5);
  EXPECT_EQ(P.size(), 5);
  EXPECT_EQ(P.data().cwiseAbs().maxCoeff(), 0.0);
  EXPECT_THROW(TransitionProbabilities(VectorXd::Constant(2, 1.01)), ValidationError);
}

TEST(ConstructionProperty, EveryRandomMatrixIsEitherValidOrRejected) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.3, 1.3);
  for (int trial = 0; trial < 500; ++trial) {
    MatrixXd A(3, 4);
    for (Index i = 0; i < A.size(); ++i) A(i) = u(rng);
    if (trial % 2 == 0) A = A.cwiseAbs().array().rowwise() / A.cwiseAbs().colwise().sum().array();
    try {
      const AbundanceMatrix typed(A);
      EXPECT_TRUE(check_abundances(typed.data()).empty());
    } catch (const ValidationError& e) {
      EXPECT_FALSE(e.violations().empty());
      EXPECT_FALSE(check_abundances(A).empty());
    }
  }
}
