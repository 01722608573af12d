#include "varx/kernels.hpp"

namespace varx::kernels::detail {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += a[k] * b[k];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) y[k] += alpha * x[k];
}

void gram_scalar(const double* cols, std::size_t ncols, std::size_t n, double* out) {
  for (std::size_t i = 0; i < ncols; ++i)
    for (std::size_t j = i; j < ncols; ++j)
      out[i * ncols + j] = dot_scalar(cols + i * n, cols + j * n, n);
}

void cross_scalar(const double* a, std::size_t na, const double* b, std::size_t nb,
                  std::size_t n, double* out) {
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < nb; ++j)
      out[i * nb + j] = dot_scalar(a + i * n, b + j * n, n);
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable t{Isa::scalar, dot_scalar, axpy_scalar, gram_scalar, cross_scalar};
  return t;
}

}  // namespace varx::kernels::detail
