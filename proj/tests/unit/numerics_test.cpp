#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "ucec/numerics.hpp"
#include "ucec/rng.hpp"

namespace ucec {
namespace {

RealMatrix random_matrix(Eigen::Index rows, Eigen::Index cols, Stream& s) {
  RealMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = standard_normal(s);
  return m;
}

// Naive triple loop, kept away from Eigen's product kernels.
RealMatrix multiply(const RealMatrix& a, const RealMatrix& b) {
  RealMatrix out = RealMatrix::Zero(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j)
      for (Eigen::Index k = 0; k < a.cols(); ++k) out(i, j) += a(i, k) * b(k, j);
  return out;
}

double multiply_back_error(const RealMatrix& m, const RealMatrix& inv) {
  const RealMatrix id = RealMatrix::Identity(m.rows(), m.cols());
  return numerics::max_abs(multiply(m, inv) - id);
}

TEST(Invert, Identity) {
  const RealMatrix id = RealMatrix::Identity(2, 2);
  EXPECT_EQ(numerics::invert(id), id);
}

TEST(Invert, Diagonal) {
  RealMatrix m(2, 2);
  m << 2, 0, 0, 4;
  RealMatrix expected(2, 2);
  expected << 0.5, 0, 0, 0.25;
  EXPECT_LE(numerics::max_abs(numerics::invert(m) - expected), 1e-15);
}

TEST(Invert, SeededThreeByThreeMultipliesBack) {
  Stream s(42);
  const RealMatrix m = random_matrix(3, 3, s);
  EXPECT_LE(multiply_back_error(m, numerics::invert(m)),
            1e-9 * std::max(1.0, numerics::max_abs(m)));
}

TEST(Invert, ThousandRandomWellConditionedMatrices) {
  Stream s(7);
  int tested = 0;
  while (tested < 1000) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(tested % 4);
    const RealMatrix m = random_matrix(n, n, s);
    if (numerics::condition_number(m) > 1e6) continue;
    ASSERT_LE(multiply_back_error(m, numerics::invert(m)),
              1e-9 * std::max(1.0, numerics::max_abs(m)))
        << m;
    ++tested;
  }
}

TEST(Invert, RejectsSingularAndNonSquare) {
  RealMatrix rank_one(2, 2);
  rank_one << 1, 2, 2, 4;
  EXPECT_THROW(numerics::invert(rank_one), SingularMatrix);
  EXPECT_THROW(numerics::invert(RealMatrix::Zero(3, 3)), SingularMatrix);
  EXPECT_THROW(numerics::invert(RealMatrix::Ones(2, 3)), DimensionMismatch);
}

TEST(Invert, GuardIsRelativeToScale) {
  // tiny but perfectly conditioned: must not be flagged
  const RealMatrix small = 1e-8 * RealMatrix::Identity(3, 3);
  EXPECT_NO_THROW(numerics::invert(small));
  RealMatrix nearly(2, 2);
  nearly << 1, 1, 1, 1 + 1e-14;
  EXPECT_THROW(numerics::invert(nearly), SingularMatrix);
}

TEST(LeastSquares, IdentitySystem) {
  RealVector y(2);
  y << 3, -1;
  const RealVector x = numerics::solve_least_squares(RealMatrix::Identity(2, 2), y);
  EXPECT_NEAR(x(0), 3, 1e-15);
  EXPECT_NEAR(x(1), -1, 1e-15);
}

TEST(LeastSquares, OverdeterminedMean) {
  RealMatrix a(2, 1);
  a << 1, 1;
  RealVector y(2);
  y << 1, 3;
  EXPECT_NEAR(numerics::solve_least_squares(a, y)(0), 2.0, 1e-14);
}

TEST(LeastSquares, MatchesInvertOnSquareSystems) {
  Stream s(99);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index n = 1 + trial % 5;
    const RealMatrix a = random_matrix(n, n, s);
    if (numerics::condition_number(a) > 1e6) continue;
    const RealVector y = random_matrix(n, 1, s);
    const RealVector via_ls = numerics::solve_least_squares(a, y);
    const RealMatrix inv = numerics::invert(a);
    const RealVector via_inv = multiply(inv, y);
    ASSERT_LE((via_ls - via_inv).cwiseAbs().maxCoeff(),
              1e-9 * std::max(1.0, via_inv.cwiseAbs().maxCoeff()));
  }
}

TEST(LeastSquares, ResidualOrthogonalToColumns) {
  Stream s(5);
  const RealMatrix a = random_matrix(20, 4, s);
  const RealVector y = random_matrix(20, 1, s);
  const RealVector x = numerics::solve_least_squares(a, y);
  const RealVector normal = a.transpose() * (a * x - y);
  EXPECT_LE(normal.cwiseAbs().maxCoeff(), 1e-10);
}

TEST(LeastSquares, RankDeficientAndShapeErrors) {
  RealMatrix a(3, 2);
  a << 1, 2, 2, 4, 3, 6;
  EXPECT_THROW(numerics::solve_least_squares(a, RealVector::Ones(3)), RankDeficient);
  EXPECT_THROW(numerics::solve_least_squares(RealMatrix::Ones(1, 2), RealVector::Ones(1)),
               DimensionMismatch);
  EXPECT_THROW(numerics::solve_least_squares(RealMatrix::Identity(2, 2), RealVector::Ones(3)),
               DimensionMismatch);
}

TEST(LeastSquaresSolver, ReusesFactorization) {
  Stream s(8);
  const RealMatrix a = random_matrix(6, 3, s);
  const numerics::LeastSquaresSolver solver(a);
  const RealVector x(RealVector::LinSpaced(3, 1.0, 3.0));
  EXPECT_LE((solver.solve(a * x) - x).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(solver.condition(), numerics::condition_number(a), 1e-9 * solver.condition());
}

TEST(ConditionNumber, KnownValues) {
  EXPECT_DOUBLE_EQ(numerics::condition_number(RealMatrix::Identity(3, 3)), 1.0);
  RealMatrix d(2, 2);
  d << 1, 0, 0, 1e-6;
  EXPECT_NEAR(numerics::condition_number(d), 1e6, 1e-3);
  EXPECT_EQ(numerics::condition_number(RealMatrix::Zero(2, 2)),
            std::numeric_limits<double>::infinity());
  EXPECT_THROW(numerics::condition_number(RealMatrix()), DimensionMismatch);
}

}  // namespace
}  // namespace ucec
