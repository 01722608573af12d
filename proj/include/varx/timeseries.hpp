#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "varx/matrix.hpp"

namespace varx {

/// T samples × d channels with a per-entry missing mask.
class TimeSeriesMatrix {
 public:
  TimeSeriesMatrix() = default;
  /// NaN entries in `samples` are marked missing. Throws DomainError for
  /// infinite entries or an empty matrix.
  explicit TimeSeriesMatrix(Matrix samples, std::vector<std::string> names = {});
  TimeSeriesMatrix(Matrix samples, std::vector<unsigned char> missing,
                   std::vector<std::string> names);

  std::size_t length() const noexcept { return samples_.rows(); }
  std::size_t channels() const noexcept { return samples_.cols(); }
  bool empty() const noexcept { return samples_.empty(); }

  double value(std::size_t t, std::size_t c) const noexcept { return samples_(t, c); }
  bool missing(std::size_t t, std::size_t c) const noexcept {
    return missing_[t * channels() + c] != 0;
  }
  void set(std::size_t t, std::size_t c, double v);
  void set_missing(std::size_t t, std::size_t c);

  /// Sample matrix; missing entries hold 0.
  const Matrix& samples() const noexcept { return samples_; }
  const std::vector<unsigned char>& mask() const noexcept { return missing_; }
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::string name(std::size_t c) const;
  std::size_t missing_count() const;

  /// Copy of the listed channels.
  TimeSeriesMatrix select_channels(const std::vector<std::size_t>& idx) const;
  /// First `n` rows.
  TimeSeriesMatrix head(std::size_t n) const;
  /// `n` rows starting at `start`.
  TimeSeriesMatrix slice(std::size_t start, std::size_t n) const;
  /// Channel c rotated so that new(t) = old((t - offset) mod T); mask moves with it.
  void circular_shift(std::size_t c, std::size_t offset);

 private:
  Matrix samples_;
  std::vector<unsigned char> missing_;
  std::vector<std::string> names_;
};

}  // namespace varx
