#pragma once

#include "varx/matrix.hpp"

namespace varx {

struct SpdSolveResult {
  Matrix solution;
  /// Smallest Cholesky pivot (diagonal before the square root).
  double min_pivot = 0.0;
};

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
/// A pivot at or below 1e-12 times the largest diagonal entry is treated as
/// singular and raises NotPositiveDefinite.
class Cholesky {
 public:
  explicit Cholesky(const Matrix& spd);

  /// Solves lhs·X = rhs for X.
  Matrix solve(const Matrix& rhs) const;
  double min_pivot() const noexcept { return min_pivot_; }
  std::size_t size() const noexcept { return factor_.rows(); }
  const Matrix& factor() const noexcept { return factor_; }

 private:
  Matrix factor_;
  double min_pivot_ = 0.0;
};

inline constexpr double kPivotTolerance = 1e-12;
inline constexpr double kSymmetryTolerance = 1e-10;

/// Solves lhs·X = rhs for symmetric positive-definite lhs. Throws DomainError
/// when lhs is not symmetric to 1e-10 relative tolerance.
SpdSolveResult spd_solve(const Matrix& lhs, const Matrix& rhs);

bool is_symmetric(const Matrix& m, double rel_tol = kSymmetryTolerance);

}  // namespace varx
