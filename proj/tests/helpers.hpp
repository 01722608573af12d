#pragma once

#include <cmath>
#include <limits>

#include "varx/filters.hpp"
#include "varx/random.hpp"
#include "varx/timeseries.hpp"

namespace testutil {

inline varx::TimeSeriesMatrix white(std::size_t t, std::size_t d, varx::Rng& rng, double sd = 1.0) {
  varx::Matrix m(t, d);
  for (std::size_t i = 0; i < t; ++i)
    for (std::size_t j = 0; j < d; ++j) m(i, j) = sd * rng.normal();
  return varx::TimeSeriesMatrix(std::move(m));
}

inline void punch_holes(varx::TimeSeriesMatrix& s, double rate, varx::Rng& rng) {
  for (std::size_t t = 0; t < s.length(); ++t)
    for (std::size_t c = 0; c < s.channels(); ++c)
      if (rng.uniform() < rate) s.set_missing(t, c);
}

inline varx::FilterTensor random_filter(std::size_t lags, std::size_t rows, std::size_t cols, double scale,
                                        varx::Rng& rng) {
  varx::FilterTensor f(lags, rows, cols);
  for (double& v : f.values()) v = scale * rng.normal();
  return f;
}

inline double relative_diff(const varx::Matrix& a, const varx::Matrix& b) {
  return varx::max_abs_diff(a, b) / std::max(1.0, varx::max_abs(b));
}

}  // namespace testutil
