#pragma once

// Small dense real-matrix helpers: inversion with a relative singularity
// guard, full-column-rank least squares, and condition numbers.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "ucec/errors.hpp"

namespace ucec {

using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

namespace numerics {

inline constexpr double kSingularityTolerance = 1e-12;
inline constexpr double kRankTolerance = 1e-10;
inline constexpr double kTinySingularValue = 1e-300;

/// Product of the row max-norms; the scale against which |det| is judged.
inline double row_norm_scale(const RealMatrix& m) {
  double scale = 1.0;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    scale *= m.row(r).cwiseAbs().maxCoeff();
  }
  return scale;
}

/// True when |det(m)| falls below the relative guard. `m` must be square.
inline bool is_near_singular(const RealMatrix& m) {
  if (m.rows() != m.cols()) {
    throw DimensionMismatch("is_near_singular: matrix is not square");
  }
  if (m.size() == 0) return true;
  const double scale = row_norm_scale(m);
  if (scale == 0.0) return true;
  const double det = Eigen::PartialPivLU<RealMatrix>(m).determinant();
  return !(std::abs(det) >= kSingularityTolerance * scale);
}

inline RealMatrix invert(const RealMatrix& m) {
  if (m.rows() != m.cols()) {
    throw DimensionMismatch("invert: matrix is " + std::to_string(m.rows()) +
                            "x" + std::to_string(m.cols()) +
                            ", expected square");
  }
  if (!m.allFinite()) throw SingularMatrix("invert: non-finite entry");
  if (is_near_singular(m)) {
    throw SingularMatrix("invert: |det| below relative guard");
  }
  return Eigen::PartialPivLU<RealMatrix>(m).inverse();
}

/// Largest over smallest singular value; +infinity when the smallest one
/// underflows.
inline double condition_number(const RealMatrix& a) {
  if (a.size() == 0) {
    throw DimensionMismatch("condition_number: empty matrix");
  }
  const RealVector sv = Eigen::JacobiSVD<RealMatrix>(a).singularValues();
  const double smallest = sv.minCoeff();
  if (smallest < kTinySingularValue) {
    return std::numeric_limits<double>::infinity();
  }
  return sv.maxCoeff() / smallest;
}

/// Factors a tall full-column-rank matrix once and solves any number of
/// right-hand sides.
///
/// Columns are scaled to unit norm before the QR factorization; the
/// minimizer is invariant under that reparametrization. The rank test runs
/// on the equilibrated singular values, condition() reports the raw ones.
/// Both come from the small triangular factor, which shares singular values
/// with the (scaled) input.
class LeastSquaresSolver {
 public:
  explicit LeastSquaresSolver(const RealMatrix& a) {
    if (a.rows() < a.cols() || a.cols() == 0) {
      throw DimensionMismatch("least squares: need rows >= cols >= 1, got " +
                              std::to_string(a.rows()) + "x" +
                              std::to_string(a.cols()));
    }
    if (!a.allFinite()) throw RankDeficient("least squares: non-finite entry");
    col_scale_ = a.colwise().norm().transpose();
    if ((col_scale_.array() == 0.0).any()) {
      throw RankDeficient("least squares: zero column");
    }
    col_scale_ = col_scale_.cwiseInverse();
    qr_.compute(a * col_scale_.asDiagonal());

    const RealMatrix r =
        qr_.matrixQR().topRows(a.cols()).triangularView<Eigen::Upper>();
    const RealVector scaled = Eigen::JacobiSVD<RealMatrix>(r).singularValues();
    if (!(scaled.maxCoeff() > 0.0) ||
        scaled.minCoeff() < kRankTolerance * scaled.maxCoeff()) {
      throw RankDeficient("least squares: numerical rank below column count");
    }
    const RealMatrix r_raw = r * col_scale_.cwiseInverse().asDiagonal();
    const RealVector raw = Eigen::JacobiSVD<RealMatrix>(r_raw).singularValues();
    largest_ = raw.maxCoeff();
    smallest_ = raw.minCoeff();
  }

  [[nodiscard]] RealVector solve(const RealVector& y) const {
    if (y.size() != qr_.rows()) {
      throw DimensionMismatch("least squares: rhs length " +
                              std::to_string(y.size()) + " vs rows " +
                              std::to_string(qr_.rows()));
    }
    return col_scale_.asDiagonal() * qr_.solve(y);
  }

  /// Condition number of the matrix as given (not equilibrated).
  [[nodiscard]] double condition() const {
    if (smallest_ < kTinySingularValue) {
      return std::numeric_limits<double>::infinity();
    }
    return largest_ / smallest_;
  }

  [[nodiscard]] Eigen::Index rows() const { return qr_.rows(); }
  [[nodiscard]] Eigen::Index cols() const { return qr_.cols(); }

 private:
  Eigen::HouseholderQR<RealMatrix> qr_;
  RealVector col_scale_;
  double largest_ = 0.0;
  double smallest_ = 0.0;
};

inline RealVector solve_least_squares(const RealMatrix& a, const RealVector& y) {
  return LeastSquaresSolver(a).solve(y);
}

inline double max_abs(const RealMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace numerics
}  // namespace ucec
