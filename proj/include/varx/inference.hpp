#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "varx/design.hpp"
#include "varx/filters.hpp"
#include "varx/matrix.hpp"
#include "varx/timeseries.hpp"

namespace varx {

enum class GammaRule { scaled, fixed };

/// Tikhonov regularization with Γ = diag(Rxx). Under the scaled rule the
/// effective factor is γ = λ/√T_valid.
struct RegularizationSpec {
  double lambda = 0.0;
  GammaRule rule = GammaRule::scaled;
  std::optional<double> fixed_gamma;

  static RegularizationSpec none() { return {}; }
  static RegularizationSpec scaled(double lambda) { return {lambda, GammaRule::scaled, {}}; }
  static RegularizationSpec fixed(double gamma) { return {0.0, GammaRule::fixed, gamma}; }

  /// Throws DomainError for negative values or a fixed rule without a value.
  double gamma(std::size_t t_valid) const;
};

/// Ĥ solving (Rxx + γ·diag(Rxx))·Ĥ = Rxy.
Matrix ridge_solve(const CorrelationBundle& bundle, const RegularizationSpec& reg);
/// Same, with an explicit γ.
Matrix ridge_solve_gamma(const Matrix& rxx, const Matrix& rxy, double gamma);

struct ResidualStats {
  Matrix ree;                  // d_y × d_y
  std::vector<double> sigma2;  // diag(Ree)/T_valid
  Matrix rxe;                  // Rxy - Rxx·H
};

ResidualStats residual_stats(const Matrix& h, const CorrelationBundle& bundle);
ResidualStats residual_stats(const Matrix& h, const Matrix& rxx, const Matrix& rxy,
                             const Matrix& ryy, std::size_t t_valid);

/// b = ½·diag(Rxeᵀ·Rxx⁻¹·Rxe)/diag(Ree) with the unregularized Rxx. The fit
/// passes the per-sample residual covariance Ree/T_valid, so the divisor is σ².
/// Throws NotPositiveDefinite when Rxx is singular.
std::vector<double> debias_term(const Matrix& rxe, const Matrix& rxx, const Matrix& ree);

struct EffectSize {
  Matrix r2;
  Matrix r;
};

/// R² = 1 - exp(-max(D,0)/T_valid) element-wise, and R = √R².
EffectSize effect_size_matrix(const Matrix& deviance, std::size_t t_valid);

struct FitOptions {
  /// Subtract per-channel means before building correlations.
  bool demean = true;
};

struct VarxFit {
  LagSpec lags;
  RegularizationSpec reg;
  BasisMatrix basis;

  FilterTensor a;  // n_a × d_y × d_y, a(l,i,j): y_j at lag l+1 onto y_i
  FilterTensor b;  // n_b × d_y × d_x in raw-lag space
  std::optional<FilterTensor> b_compressed;  // n̲ × d_y × d_x under a basis
  Matrix h;        // N × d_y stacked solution
  std::vector<double> sigma2;

  // Per-link statistics, rows are targets, columns sources.
  Matrix deviance_a, deviance_b;        // de-biased, unclipped
  Matrix raw_deviance_a, raw_deviance_b;  // without bias correction
  Matrix pvalue_a, pvalue_b;
  Matrix r2_a, r2_b;

  std::size_t t_valid = 0;
  std::size_t predictors = 0;
  std::size_t dof_a = 0;
  std::size_t dof_b = 0;
  double gamma = 0.0;
  bool debias_applied = false;
  std::vector<double> y_means, x_means;
  std::vector<std::string> warnings;

  /// Effective sample count used in the deviance, T_valid - N.
  double effective_samples() const noexcept {
    return static_cast<double>(t_valid) - static_cast<double>(predictors);
  }
};

/// Full-model fit followed by one reduced fit per source variable (its block of
/// columns deleted from Rxx/Rxy). Deviance per output is
/// (T_valid-N)·log(σ²_r/σ²_f) - b_r + b_f and p = 1 - F_chi2(max(D,0), n).
/// Throws InsufficientData when T_valid <= N without regularization.
VarxFit granger_test(const TimeSeriesMatrix& y, const TimeSeriesMatrix* x, const LagSpec& lags,
                     const RegularizationSpec& reg = RegularizationSpec::none(),
                     const BasisMatrix& basis = BasisMatrix::none(),
                     const FitOptions& options = {});

/// Same tests on pre-built correlations (no demeaning, no ingestion).
VarxFit granger_test(const CorrelationBundle& bundle, const RegularizationSpec& reg,
                     const BasisMatrix& basis = BasisMatrix::none());

/// One-step prediction residuals of a fitted model on (possibly new) data,
/// using the fit's stored channel means. Rows are the valid samples.
Matrix prediction_residuals(const VarxFit& fit, const TimeSeriesMatrix& y,
                            const TimeSeriesMatrix* x);
/// Mean over outputs of residual variance divided by the output's variance.
double relative_error(const VarxFit& fit, const TimeSeriesMatrix& y, const TimeSeriesMatrix* x);

struct PermutationResult {
  VarxFit observed;
  Matrix pvalue_a, pvalue_b;  // (1 + #{perm >= observed}) / (n_perms + 1)
  std::size_t permutations = 0;
};

/// Non-parametric null by circularly shifting every channel by an independent
/// offset in [1, T-1] and refitting. Self-links are shifted together with their
/// target, so their empirical p-values carry no null information.
PermutationResult permutation_null(const TimeSeriesMatrix& y, const TimeSeriesMatrix* x,
                                   const LagSpec& lags, const RegularizationSpec& reg,
                                   const BasisMatrix& basis, std::size_t n_perms,
                                   std::uint64_t seed);

}  // namespace varx
