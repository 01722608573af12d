#include "varx/timeseries.hpp"

#include <algorithm>
#include <cmath>

#include "varx/errors.hpp"

namespace varx {

TimeSeriesMatrix::TimeSeriesMatrix(Matrix samples, std::vector<std::string> names)
    : samples_(std::move(samples)),
      missing_(samples_.size(), 0),
      names_(std::move(names)) {
  if (samples_.rows() == 0 || samples_.cols() == 0)
    throw DomainError("time series needs at least one sample and one channel");
  if (!names_.empty() && names_.size() != samples_.cols())
    throw ShapeMismatch("channel name count does not match channel count");
  for (std::size_t k = 0; k < samples_.size(); ++k) {
    double& v = samples_.data()[k];
    if (std::isnan(v)) {
      missing_[k] = 1;
      v = 0.0;
    } else if (!std::isfinite(v)) {
      throw DomainError("time series contains a non-finite sample");
    }
  }
}

TimeSeriesMatrix::TimeSeriesMatrix(Matrix samples, std::vector<unsigned char> missing,
                                   std::vector<std::string> names)
    : samples_(std::move(samples)), missing_(std::move(missing)), names_(std::move(names)) {
  if (samples_.rows() == 0 || samples_.cols() == 0)
    throw DomainError("time series needs at least one sample and one channel");
  if (missing_.size() != samples_.size()) throw ShapeMismatch("missing mask size mismatch");
  if (!names_.empty() && names_.size() != samples_.cols())
    throw ShapeMismatch("channel name count does not match channel count");
  for (std::size_t k = 0; k < samples_.size(); ++k) {
    if (missing_[k]) {
      samples_.data()[k] = 0.0;
    } else if (!std::isfinite(samples_.data()[k])) {
      throw DomainError("time series contains a non-finite sample");
    }
  }
}

void TimeSeriesMatrix::set(std::size_t t, std::size_t c, double v) {
  if (!std::isfinite(v)) throw DomainError("time series sample must be finite");
  samples_(t, c) = v;
  missing_[t * channels() + c] = 0;
}

void TimeSeriesMatrix::set_missing(std::size_t t, std::size_t c) {
  samples_(t, c) = 0.0;
  missing_[t * channels() + c] = 1;
}

std::string TimeSeriesMatrix::name(std::size_t c) const {
  if (c < names_.size()) return names_[c];
  return "ch" + std::to_string(c + 1);
}

std::size_t TimeSeriesMatrix::missing_count() const {
  return static_cast<std::size_t>(std::count(missing_.begin(), missing_.end(), 1));
}

TimeSeriesMatrix TimeSeriesMatrix::select_channels(const std::vector<std::size_t>& idx) const {
  Matrix s(length(), idx.size());
  std::vector<unsigned char> m(length() * idx.size());
  std::vector<std::string> n;
  for (std::size_t j = 0; j < idx.size(); ++j) {
    if (idx[j] >= channels()) throw ShapeMismatch("channel index out of range");
    if (!names_.empty()) n.push_back(names_[idx[j]]);
    for (std::size_t t = 0; t < length(); ++t) {
      s(t, j) = samples_(t, idx[j]);
      m[t * idx.size() + j] = missing_[t * channels() + idx[j]];
    }
  }
  return TimeSeriesMatrix(std::move(s), std::move(m), std::move(n));
}

TimeSeriesMatrix TimeSeriesMatrix::head(std::size_t n) const { return slice(0, n); }

TimeSeriesMatrix TimeSeriesMatrix::slice(std::size_t start, std::size_t n) const {
  if (n == 0 || start + n > length()) throw ShapeMismatch("slice: row range out of bounds");
  const auto first = static_cast<std::ptrdiff_t>(start * channels());
  const auto last = static_cast<std::ptrdiff_t>((start + n) * channels());
  std::vector<double> s(samples_.values().begin() + first, samples_.values().begin() + last);
  std::vector<unsigned char> m(missing_.begin() + first, missing_.begin() + last);
  return TimeSeriesMatrix(Matrix(n, channels(), std::move(s)), std::move(m), names_);
}

void TimeSeriesMatrix::circular_shift(std::size_t c, std::size_t offset) {
  const std::size_t T = length();
  offset %= T;
  if (offset == 0) return;
  std::vector<double> v(T);
  std::vector<unsigned char> m(T);
  for (std::size_t t = 0; t < T; ++t) {
    const std::size_t src = (t + T - offset) % T;
    v[t] = samples_(src, c);
    m[t] = missing_[src * channels() + c];
  }
  for (std::size_t t = 0; t < T; ++t) {
    samples_(t, c) = v[t];
    missing_[t * channels() + c] = m[t];
  }
}

}  // namespace varx
