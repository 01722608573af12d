#include "varx/filters.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "varx/errors.hpp"

namespace varx {

FilterTensor::FilterTensor(std::size_t lags, std::size_t rows, std::size_t cols,
                           std::vector<double> data)
    : lags_(lags), rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != lags_ * rows_ * cols_)
    throw ShapeMismatch("filter tensor has " + std::to_string(data_.size()) + " entries, expected " +
                        std::to_string(lags_ * rows_ * cols_));
}

void FilterTensor::clear_link(std::size_t i, std::size_t j) {
  for (std::size_t l = 0; l < lags_; ++l) (*this)(l, i, j) = 0.0;
}

double FilterTensor::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace varx
