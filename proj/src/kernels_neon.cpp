#include <arm_neon.h>

#include "varx/kernels.hpp"

namespace varx::kernels::detail {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + k), vld1q_f64(b + k));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + k + 2), vld1q_f64(b + k + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; k < n; ++k) s += a[k] * b[k];
  return s;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) vst1q_f64(y + k, vfmaq_f64(vld1q_f64(y + k), va, vld1q_f64(x + k)));
  for (; k < n; ++k) y[k] += alpha * x[k];
}

void gram_neon(const double* cols, std::size_t ncols, std::size_t n, double* out) {
  for (std::size_t i = 0; i < ncols; ++i)
    for (std::size_t j = i; j < ncols; ++j)
      out[i * ncols + j] = dot_neon(cols + i * n, cols + j * n, n);
}

void cross_neon(const double* a, std::size_t na, const double* b, std::size_t nb, std::size_t n,
                double* out) {
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < nb; ++j) out[i * nb + j] = dot_neon(a + i * n, b + j * n, n);
}

}  // namespace

const KernelTable& neon_table() {
  static const KernelTable t{Isa::neon, dot_neon, axpy_neon, gram_neon, cross_neon};
  return t;
}

}  // namespace varx::kernels::detail
