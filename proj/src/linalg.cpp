#include "varx/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "varx/errors.hpp"
#include "varx/kernels.hpp"

namespace varx {

bool is_symmetric(const Matrix& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(max_abs(m), std::numeric_limits<double>::min());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j)
      if (std::abs(m(i, j) - m(j, i)) > rel_tol * scale) return false;
  return true;
}

Cholesky::Cholesky(const Matrix& spd) : factor_(spd.rows(), spd.cols()) {
  if (spd.rows() != spd.cols())
    throw ShapeMismatch("Cholesky: matrix is " + std::to_string(spd.rows()) + "x" +
                        std::to_string(spd.cols()));
  const std::size_t n = spd.rows();
  const auto& k = kernels::active();
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, spd(i, i));
  const double threshold = kPivotTolerance * max_diag;
  min_pivot_ = std::numeric_limits<double>::infinity();

  for (std::size_t j = 0; j < n; ++j) {
    const double* lj = factor_.row(j).data();
    const double pivot = spd(j, j) - k.dot(lj, lj, j);
    min_pivot_ = std::min(min_pivot_, pivot);
    if (!(pivot > threshold))
      throw NotPositiveDefinite("matrix is not positive definite: pivot " + std::to_string(pivot) +
                                    " at index " + std::to_string(j) +
                                    " (regularization may be required)",
                                pivot, j);
    const double ljj = std::sqrt(pivot);
    factor_(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      const double* li = factor_.row(i).data();
      factor_(i, j) = (spd(i, j) - k.dot(li, lj, j)) / ljj;
    }
  }
  if (n == 0) min_pivot_ = 0.0;
}

Matrix Cholesky::solve(const Matrix& rhs) const {
  const std::size_t n = factor_.rows();
  if (rhs.rows() != n)
    throw ShapeMismatch("Cholesky::solve: rhs has " + std::to_string(rhs.rows()) +
                        " rows, expected " + std::to_string(n));
  const std::size_t m = rhs.cols();
  const auto& k = kernels::active();
  Matrix x = rhs;
  // L·z = b
  for (std::size_t i = 0; i < n; ++i) {
    double* xi = x.row(i).data();
    for (std::size_t p = 0; p < i; ++p) {
      const double lip = factor_(i, p);
      if (lip != 0.0) k.axpy(-lip, x.row(p).data(), xi, m);
    }
    const double inv = 1.0 / factor_(i, i);
    for (std::size_t c = 0; c < m; ++c) xi[c] *= inv;
  }
  // Lᵀ·x = z
  for (std::size_t ii = n; ii-- > 0;) {
    double* xi = x.row(ii).data();
    for (std::size_t p = ii + 1; p < n; ++p) {
      const double lpi = factor_(p, ii);
      if (lpi != 0.0) k.axpy(-lpi, x.row(p).data(), xi, m);
    }
    const double inv = 1.0 / factor_(ii, ii);
    for (std::size_t c = 0; c < m; ++c) xi[c] *= inv;
  }
  return x;
}

SpdSolveResult spd_solve(const Matrix& lhs, const Matrix& rhs) {
  if (lhs.rows() != lhs.cols()) throw ShapeMismatch("spd_solve: lhs is not square");
  if (rhs.rows() != lhs.rows()) throw ShapeMismatch("spd_solve: rhs row count mismatch");
  if (!is_symmetric(lhs)) throw DomainError("spd_solve: lhs is not symmetric");
  Cholesky chol(lhs);
  return {chol.solve(rhs), chol.min_pivot()};
}

}  // namespace varx
