#include "skewgibbs/numerics.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace skewgibbs::numerics {

Matrix cholesky(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw DimensionMismatch("cholesky: matrix is not square");
  }
  const Index n = a.rows();
  Matrix l = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    double pivot = a(j, j);
    for (Index k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
    if (!(pivot > 0.0) || !std::isfinite(pivot)) {
      throw NotPositiveDefinite("cholesky: pivot " + std::to_string(j) +
                                " is " + std::to_string(pivot));
    }
    const double ljj = std::sqrt(pivot);
    l(j, j) = ljj;
    for (Index i = j + 1; i < n; ++i) {
      double v = a(i, j);
      for (Index k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / ljj;
    }
  }
  return l;
}

SpdMatrix::SpdMatrix(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw DimensionMismatch("SpdMatrix: matrix is not square");
  }
  matrix_ = 0.5 * (a + a.transpose());
  lower_ = cholesky(matrix_);
}

SpdMatrix SpdMatrix::identity(Index n) { return SpdMatrix(Matrix::Identity(n, n)); }

SpdMatrix SpdMatrix::scaled_identity(Index n, double scale) {
  return SpdMatrix(scale * Matrix::Identity(n, n));
}

double SpdMatrix::log_det() const {
  return 2.0 * lower_.diagonal().array().log().sum();
}

Vector SpdMatrix::solve(const Vector& b) const {
  if (b.size() != dim()) throw DimensionMismatch("SpdMatrix::solve: size mismatch");
  const auto y = lower_.triangularView<Eigen::Lower>().solve(b).eval();
  return lower_.transpose().triangularView<Eigen::Upper>().solve(y);
}

Matrix SpdMatrix::solve(const Matrix& b) const {
  if (b.rows() != dim()) throw DimensionMismatch("SpdMatrix::solve: size mismatch");
  const auto y = lower_.triangularView<Eigen::Lower>().solve(b).eval();
  return lower_.transpose().triangularView<Eigen::Upper>().solve(y);
}

Matrix SpdMatrix::inverse() const {
  Matrix inv = solve(Matrix(Matrix::Identity(dim(), dim())));
  return 0.5 * (inv + inv.transpose());
}

Vector spd_solve(const SpdMatrix& a, const Vector& b) { return a.solve(b); }

std::vector<Index> partition_order(Index n, Index pivot) {
  std::vector<Index> order;
  order.reserve(static_cast<std::size_t>(n > 0 ? n - 1 : 0));
  for (Index i = 0; i < n; ++i) {
    if (i != pivot) order.push_back(i);
  }
  return order;
}

BlockPartition partition_at(const Matrix& omega, const Matrix& s, Index pivot) {
  const Index n = omega.rows();
  if (omega.cols() != n || s.rows() != n || s.cols() != n) {
    throw DimensionMismatch("partition_at: Omega and S must be square and equal size");
  }
  if (pivot < 0 || pivot >= n) {
    throw IndexOutOfRange("partition_at: pivot " + std::to_string(pivot) +
                          " outside [0, " + std::to_string(n) + ")");
  }
  const auto order = partition_order(n, pivot);
  const Index m = n - 1;
  BlockPartition p;
  p.pivot = pivot;
  p.scalar_diag = omega(pivot, pivot);
  p.s_scalar = s(pivot, pivot);
  p.off_col.resize(m);
  p.s_col.resize(m);
  p.rest.resize(m, m);
  p.s_rest.resize(m, m);
  for (Index a = 0; a < m; ++a) {
    const Index i = order[static_cast<std::size_t>(a)];
    p.off_col(a) = omega(i, pivot);
    p.s_col(a) = s(i, pivot);
    for (Index b = 0; b < m; ++b) {
      const Index j = order[static_cast<std::size_t>(b)];
      p.rest(a, b) = omega(i, j);
      p.s_rest(a, b) = s(i, j);
    }
  }
  return p;
}

void write_pivot(Index pivot, double scalar_diag, const Vector& off_col, Matrix& omega) {
  const Index n = omega.rows();
  if (off_col.size() != n - 1) throw DimensionMismatch("write_pivot: off_col size");
  omega(pivot, pivot) = scalar_diag;
  Index a = 0;
  for (Index i = 0; i < n; ++i) {
    if (i == pivot) continue;
    omega(i, pivot) = off_col(a);
    omega(pivot, i) = off_col(a);
    ++a;
  }
}

void reassemble(Index pivot, double scalar_diag, const Vector& off_col, const Matrix& rest,
                Matrix& out) {
  const Index n = rest.rows() + 1;
  if (rest.cols() != n - 1 || off_col.size() != n - 1) {
    throw DimensionMismatch("reassemble: block sizes disagree");
  }
  if (pivot < 0 || pivot >= n) throw IndexOutOfRange("reassemble: pivot out of range");
  out.resize(n, n);
  const auto order = partition_order(n, pivot);
  for (Index a = 0; a < n - 1; ++a) {
    for (Index b = 0; b < n - 1; ++b) {
      out(order[static_cast<std::size_t>(a)], order[static_cast<std::size_t>(b)]) = rest(a, b);
    }
  }
  write_pivot(pivot, scalar_diag, off_col, out);
}

Matrix reassemble(Index pivot, double scalar_diag, const Vector& off_col, const Matrix& rest) {
  Matrix out;
  reassemble(pivot, scalar_diag, off_col, rest, out);
  return out;
}

double min_eigenvalue(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace skewgibbs::numerics
