#include "varx/design.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "varx/errors.hpp"
#include "varx/kernels.hpp"

namespace varx {

std::size_t LagSpec::history() const noexcept {
  std::size_t h = n_a;
  if (d_x > 0 && n_b > 0) h = std::max(h, n_b - 1);
  return h;
}

BasisMatrix gaussian_basis(std::size_t n_b, std::size_t count) {
  if (count < 1 || count > n_b)
    throw DomainError("gaussian_basis: need 1 <= basis count <= n_b (got " + std::to_string(count) +
                      " for n_b=" + std::to_string(n_b) + ")");
  Matrix w(n_b, count);
  const double span = static_cast<double>(n_b - 1);
  // A single window sits at the middle of the lag range and spans all of it.
  const double spacing = count > 1 ? span / static_cast<double>(count - 1) : std::max(span, 1.0);
  const double width = spacing;
  for (std::size_t j = 0; j < count; ++j) {
    const double center = count > 1 ? spacing * static_cast<double>(j) : 0.5 * span;
    double peak = 0.0;
    for (std::size_t l = 0; l < n_b; ++l) {
      const double d = static_cast<double>(l) - center;
      w(l, j) = std::exp(-d * d / (2.0 * width * width));
      peak = std::max(peak, w(l, j));
    }
    for (std::size_t l = 0; l < n_b; ++l) w(l, j) /= peak;
  }
  return {std::move(w), BasisKind::gaussian};
}

std::vector<std::size_t> CorrelationBundle::source_columns(std::size_t source) const {
  std::vector<std::size_t> out;
  const bool ar = source < lags.d_y;
  const std::size_t ch = ar ? source : source - lags.d_y;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const auto& info = columns[c];
    if ((info.kind == PredictorKind::ar) == ar && info.channel == ch) out.push_back(c);
  }
  return out;
}

std::vector<std::size_t> CorrelationBundle::columns_without(std::size_t source) const {
  const auto drop = source_columns(source);
  std::vector<std::size_t> keep;
  keep.reserve(columns.size() - drop.size());
  for (std::size_t c = 0; c < columns.size(); ++c)
    if (!std::binary_search(drop.begin(), drop.end(), c)) keep.push_back(c);
  return keep;
}

namespace {

void check_inputs(const TimeSeriesMatrix& y, const TimeSeriesMatrix* x, const LagSpec& lags) {
  if (y.channels() != lags.d_y)
    throw ShapeMismatch("y has " + std::to_string(y.channels()) + " channels, lag spec says d_y=" +
                        std::to_string(lags.d_y));
  const std::size_t dx = x ? x->channels() : 0;
  if (dx != lags.d_x)
    throw ShapeMismatch("x has " + std::to_string(dx) + " channels, lag spec says d_x=" +
                        std::to_string(lags.d_x));
  if (x && x->length() != y.length())
    throw ShapeMismatch("x has " + std::to_string(x->length()) + " samples, y has " +
                        std::to_string(y.length()));
  if (lags.d_x > 0 && lags.n_b < 1) throw DomainError("n_b must be >= 1 when inputs are present");
  if (lags.d_y * lags.n_a + lags.d_x * lags.n_b == 0)
    throw DomainError("lag spec yields no predictors");
}

std::vector<ColumnInfo> raw_columns(const LagSpec& lags) {
  std::vector<ColumnInfo> cols;
  for (std::size_t j = 0; j < lags.d_y; ++j)
    for (std::size_t l = 1; l <= lags.n_a; ++l) cols.push_back({j, l, PredictorKind::ar});
  for (std::size_t k = 0; k < lags.d_x; ++k)
    for (std::size_t l = 0; l < lags.n_b; ++l) cols.push_back({k, l, PredictorKind::ma});
  return cols;
}

}  // namespace

std::vector<unsigned char> valid_rows(const TimeSeriesMatrix& y, const TimeSeriesMatrix* x,
                                      const LagSpec& lags) {
  check_inputs(y, x, lags);
  const std::size_t T = y.length();
  // Prefix counts of samples with any channel missing make each row check O(1).
  auto bad_prefix = [T](const TimeSeriesMatrix& s) {
    std::vector<std::size_t> p(T + 1, 0);
    for (std::size_t t = 0; t < T; ++t) {
      bool bad = false;
      for (std::size_t c = 0; c < s.channels() && !bad; ++c) bad = s.missing(t, c);
      p[t + 1] = p[t] + (bad ? 1 : 0);
    }
    return p;
  };
  const auto ybad = bad_prefix(y);
  std::vector<std::size_t> xbad;
  if (x) xbad = bad_prefix(*x);

  std::vector<unsigned char> valid(T, 0);
  const std::size_t h = lags.history();
  for (std::size_t t = h; t < T; ++t) {
    // y(t - n_a) .. y(t) all present
    if (ybad[t + 1] - ybad[t - lags.n_a] != 0) continue;
    if (x && lags.n_b > 0 && xbad[t + 1] - xbad[t + 1 - lags.n_b] != 0) continue;
    valid[t] = 1;
  }
  return valid;
}

DesignMatrix build_design(const TimeSeriesMatrix& y, const TimeSeriesMatrix* x,
                          const LagSpec& lags, const std::vector<unsigned char>& valid) {
  check_inputs(y, x, lags);
  if (valid.size() != y.length()) throw ShapeMismatch("validity mask length mismatch");
  DesignMatrix d;
  for (std::size_t t = 0; t < valid.size(); ++t)
    if (valid[t]) d.row_times.push_back(t);
  d.rows = d.row_times.size();
  d.columns = raw_columns(lags);
  d.predictors.resize(d.columns.size() * d.rows);
  d.targets.resize(lags.d_y * d.rows);
  for (std::size_t c = 0; c < d.columns.size(); ++c) {
    const auto& info = d.columns[c];
    double* out = d.predictors.data() + c * d.rows;
    if (info.kind == PredictorKind::ar) {
      for (std::size_t r = 0; r < d.rows; ++r) out[r] = y.value(d.row_times[r] - info.lag, info.channel);
    } else {
      for (std::size_t r = 0; r < d.rows; ++r) out[r] = x->value(d.row_times[r] - info.lag, info.channel);
    }
  }
  for (std::size_t i = 0; i < lags.d_y; ++i) {
    double* out = d.targets.data() + i * d.rows;
    for (std::size_t r = 0; r < d.rows; ++r) out[r] = y.value(d.row_times[r], i);
  }
  return d;
}

CorrelationBundle build_correlations(const TimeSeriesMatrix& y, const TimeSeriesMatrix* x,
                                     const LagSpec& lags, const BasisMatrix& basis) {
  if (basis.active() && basis.weights.rows() != lags.n_b)
    throw ShapeMismatch("basis has " + std::to_string(basis.weights.rows()) +
                        " rows, expected n_b=" + std::to_string(lags.n_b));
  const auto valid = valid_rows(y, x, lags);
  const DesignMatrix d = build_design(y, x, lags, valid);
  if (d.rows == 0) throw NoValidSamples("no sample has a complete history");

  const auto& k = kernels::active();
  const std::size_t n = d.predictor_count();
  CorrelationBundle b;
  b.lags = lags;
  b.t_valid = d.rows;
  b.columns = d.columns;
  b.ma_params = lags.n_b;
  b.rxx = Matrix(n, n);
  k.gram(d.predictors.data(), n, d.rows, b.rxx.data());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) b.rxx(i, j) = b.rxx(j, i);
  b.rxy = Matrix(n, lags.d_y);
  k.cross(d.predictors.data(), n, d.targets.data(), lags.d_y, d.rows, b.rxy.data());
  b.ryy = Matrix(lags.d_y, lags.d_y);
  k.gram(d.targets.data(), lags.d_y, d.rows, b.ryy.data());
  for (std::size_t i = 0; i < lags.d_y; ++i)
    for (std::size_t j = 0; j < i; ++j) b.ryy(i, j) = b.ryy(j, i);

  if (basis.active()) return compress_ma_blocks(b, basis);
  return b;
}

CorrelationBundle compress_ma_blocks(const CorrelationBundle& raw, const BasisMatrix& basis) {
  if (!basis.active()) return raw;
  const LagSpec& lags = raw.lags;
  if (raw.ma_params != lags.n_b) throw DomainError("bundle is already basis-compressed");
  if (basis.weights.rows() != lags.n_b) throw ShapeMismatch("basis row count must equal n_b");
  const std::size_t nbar = basis.weights.cols();
  const std::size_t n_ar = lags.d_y * lags.n_a;
  const std::size_t n_raw = raw.predictors();
  const std::size_t n_new = n_ar + lags.d_x * nbar;

  // Block-diagonal map: identity on AR columns, W on each MA block.
  Matrix map(n_raw, n_new);
  for (std::size_t c = 0; c < n_ar; ++c) map(c, c) = 1.0;
  for (std::size_t k = 0; k < lags.d_x; ++k)
    for (std::size_t l = 0; l < lags.n_b; ++l)
      for (std::size_t j = 0; j < nbar; ++j)
        map(n_ar + k * lags.n_b + l, n_ar + k * nbar + j) = basis.weights(l, j);

  CorrelationBundle out;
  out.lags = lags;
  out.t_valid = raw.t_valid;
  out.ma_params = nbar;
  out.ryy = raw.ryy;
  out.rxy = transpose_times(map, raw.rxy);
  out.rxx = transpose_times(map, raw.rxx * map);
  for (std::size_t i = 0; i < n_new; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      const double s = 0.5 * (out.rxx(i, j) + out.rxx(j, i));
      out.rxx(i, j) = out.rxx(j, i) = s;
    }
  out.columns.assign(raw.columns.begin(), raw.columns.begin() + static_cast<std::ptrdiff_t>(n_ar));
  for (std::size_t k = 0; k < lags.d_x; ++k)
    for (std::size_t j = 0; j < nbar; ++j) out.columns.push_back({k, j, PredictorKind::ma});
  return out;
}

std::pair<TimeSeriesMatrix, std::vector<double>> demean(const TimeSeriesMatrix& series) {
  TimeSeriesMatrix out = series;
  std::vector<double> means(series.channels(), 0.0);
  for (std::size_t c = 0; c < series.channels(); ++c) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t t = 0; t < series.length(); ++t)
      if (!series.missing(t, c)) {
        sum += series.value(t, c);
        ++count;
      }
    if (count == 0)
      throw AllMissingChannel("channel '" + series.name(c) + "' has no present samples", c);
    means[c] = sum / static_cast<double>(count);
    for (std::size_t t = 0; t < series.length(); ++t)
      if (!series.missing(t, c)) out.set(t, c, series.value(t, c) - means[c]);
  }
  return {std::move(out), std::move(means)};
}

}  // namespace varx
