#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "varx/matrix.hpp"
#include "varx/timeseries.hpp"

namespace varx {

/// Lag orders and channel counts. AR lags reference y(t-1)..y(t-n_a); MA lags
/// reference x(t)..x(t-n_b+1). n_a = 0 gives a pure moving-average design.
struct LagSpec {
  std::size_t n_a = 1;
  std::size_t n_b = 1;
  std::size_t d_y = 1;
  std::size_t d_x = 0;

  /// Longest history a row needs.
  std::size_t history() const noexcept;
};

enum class BasisKind { none, gaussian };

/// n_b × n̲ matrix applied along the lag axis of the MA filters.
struct BasisMatrix {
  Matrix weights;
  BasisKind kind = BasisKind::none;

  static BasisMatrix none() { return {}; }
  bool active() const noexcept { return kind != BasisKind::none; }
  /// Parameters per MA filter: n̲ with a basis, n_b without.
  std::size_t params_per_filter(std::size_t n_b) const noexcept {
    return active() ? weights.cols() : n_b;
  }
};

/// Gaussian windows W[l,j] = exp(-(l-c_j)²/(2s²)), centers evenly spaced over
/// [0, n_b-1], width equal to the center spacing, each column scaled to unit
/// maximum. Throws DomainError unless 1 <= count <= n_b.
BasisMatrix gaussian_basis(std::size_t n_b, std::size_t count);

enum class PredictorKind { ar, ma };

/// Origin of one predictor column. For MA columns under a basis, `lag` is the
/// basis index.
struct ColumnInfo {
  std::size_t channel = 0;
  std::size_t lag = 0;
  PredictorKind kind = PredictorKind::ar;
  friend bool operator==(const ColumnInfo&, const ColumnInfo&) = default;
};

struct CorrelationBundle {
  Matrix rxx;  // N × N
  Matrix rxy;  // N × d_y
  Matrix ryy;  // d_y × d_y
  std::size_t t_valid = 0;
  std::vector<ColumnInfo> columns;
  LagSpec lags;
  std::size_t ma_params = 0;  // per exogenous channel

  std::size_t predictors() const noexcept { return rxx.rows(); }
  /// Number of candidate source variables, d_y + d_x.
  std::size_t sources() const noexcept { return lags.d_y + lags.d_x; }
  /// Predictor columns belonging to a source variable; sources 0..d_y-1 are the
  /// endogenous channels, d_y.. the exogenous ones.
  std::vector<std::size_t> source_columns(std::size_t source) const;
  /// All columns except those of `source`.
  std::vector<std::size_t> columns_without(std::size_t source) const;
};

/// Per-row validity: row t counts iff y(t) and every lagged entry it references
/// are present, and t >= history.
std::vector<unsigned char> valid_rows(const TimeSeriesMatrix& y, const TimeSeriesMatrix* x,
                                      const LagSpec& lags);

/// Predictor matrix restricted to valid rows, stored column-major: column c
/// occupies values[c*rows .. (c+1)*rows). Targets likewise, one column per output.
struct DesignMatrix {
  std::size_t rows = 0;
  std::vector<double> predictors;
  std::vector<double> targets;
  std::vector<ColumnInfo> columns;
  std::vector<std::size_t> row_times;

  std::size_t predictor_count() const noexcept { return columns.size(); }
  const double* column(std::size_t c) const noexcept { return predictors.data() + c * rows; }
  const double* target(std::size_t i) const noexcept { return targets.data() + i * rows; }
};

/// Raw-lag design (no basis) over the rows flagged in `valid`.
DesignMatrix build_design(const TimeSeriesMatrix& y, const TimeSeriesMatrix* x,
                          const LagSpec& lags, const std::vector<unsigned char>& valid);

/// Rxx = XᵀX, Rxy = XᵀY, Ryy = YᵀY over valid rows. With a basis, the MA blocks
/// are transformed to W·Rxx·Wᵀ and W·Rxy.
/// Throws ShapeMismatch when channel counts or lengths disagree, NoValidSamples
/// when no row qualifies.
CorrelationBundle build_correlations(const TimeSeriesMatrix& y, const TimeSeriesMatrix* x,
                                     const LagSpec& lags,
                                     const BasisMatrix& basis = BasisMatrix::none());

/// Applies the basis transform to the MA blocks of a raw-lag bundle.
CorrelationBundle compress_ma_blocks(const CorrelationBundle& raw, const BasisMatrix& basis);

/// Subtracts each channel's mean over its present entries. Missing entries
/// stay missing. Throws AllMissingChannel.
std::pair<TimeSeriesMatrix, std::vector<double>> demean(const TimeSeriesMatrix& series);

}  // namespace varx
