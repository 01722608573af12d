#pragma once

#include <cstddef>
#include <vector>

namespace varx {

/// Stack of filter matrices indexed (lag, output, input).
class FilterTensor {
 public:
  FilterTensor() = default;
  FilterTensor(std::size_t lags, std::size_t rows, std::size_t cols, double fill = 0.0)
      : lags_(lags), rows_(rows), cols_(cols), data_(lags * rows * cols, fill) {}
  FilterTensor(std::size_t lags, std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t lags() const noexcept { return lags_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t l, std::size_t i, std::size_t j) noexcept {
    return data_[(l * rows_ + i) * cols_ + j];
  }
  double operator()(std::size_t l, std::size_t i, std::size_t j) const noexcept {
    return data_[(l * rows_ + i) * cols_ + j];
  }
  const std::vector<double>& values() const noexcept { return data_; }
  std::vector<double>& values() noexcept { return data_; }

  /// Zeroes the filter from input j to output i at every lag.
  void clear_link(std::size_t i, std::size_t j);
  double max_abs() const;

  friend bool operator==(const FilterTensor&, const FilterTensor&) = default;

 private:
  std::size_t lags_ = 0;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

}  // namespace varx
