#pragma once

#include <vector>

#include <Eigen/Dense>

#include "skewgibbs/errors.hpp"

namespace skewgibbs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

namespace numerics {

/// Lower Cholesky factor L with a = L Lᵀ. Only the lower triangle of `a` is
/// read. Throws NotPositiveDefinite when a pivot is not strictly positive.
Matrix cholesky(const Matrix& a);

/// Symmetric positive-definite matrix with its Cholesky factor cached.
///
/// Construction symmetrizes the input as (A + Aᵀ)/2 and factors it, so any
/// SpdMatrix that exists is known to be positive definite. Round-off in
/// residual cross-products at large T otherwise leaves the input a few ulps
/// away from symmetric.
class SpdMatrix {
 public:
  SpdMatrix() = default;
  explicit SpdMatrix(const Matrix& a);

  static SpdMatrix identity(Index n);
  static SpdMatrix scaled_identity(Index n, double scale);

  Index dim() const { return matrix_.rows(); }
  const Matrix& matrix() const { return matrix_; }
  const Matrix& lower() const { return lower_; }
  double operator()(Index i, Index j) const { return matrix_(i, j); }

  /// log|A| = 2 Σ log Lᵢᵢ.
  double log_det() const;
  Vector solve(const Vector& b) const;
  Matrix solve(const Matrix& b) const;
  Matrix inverse() const;

 private:
  Matrix matrix_;
  Matrix lower_;
};

Vector spd_solve(const SpdMatrix& a, const Vector& b);

/// Symmetric block view of (Omega, S) with `pivot` moved to the front:
///
///   Omega = [ scalar_diag  off_colᵀ ]     S = [ s_scalar  s_colᵀ ]
///           [ off_col      rest     ]         [ s_col     s_rest ]
///
/// The remaining indices keep their relative order (see partition_order).
struct BlockPartition {
  Index pivot = 0;
  double scalar_diag = 0.0;
  Vector off_col;
  Matrix rest;
  double s_scalar = 0.0;
  Vector s_col;
  Matrix s_rest;
};

/// Indices of the non-pivot rows in the order they appear in `rest`.
std::vector<Index> partition_order(Index n, Index pivot);

BlockPartition partition_at(const Matrix& omega, const Matrix& s, Index pivot);

/// Inverse of partition_at for the Omega half; writes into `out` (n x n).
void reassemble(Index pivot, double scalar_diag, const Vector& off_col,
                const Matrix& rest, Matrix& out);
Matrix reassemble(Index pivot, double scalar_diag, const Vector& off_col,
                  const Matrix& rest);

/// Writes only the pivot row/column (diag + off-diagonals) back into `omega`.
void write_pivot(Index pivot, double scalar_diag, const Vector& off_col,
                 Matrix& omega);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Matrix& a);

}  // namespace numerics
}  // namespace skewgibbs
