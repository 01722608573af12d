#include <immintrin.h>

#include "varx/kernels.hpp"

namespace varx::kernels::detail {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k + 4), _mm256_loadu_pd(b + k + 4), acc1);
  }
  if (k + 4 <= n) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), acc0);
    k += 4;
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; k < n; ++k) s += a[k] * b[k];
  return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4)
    _mm256_storeu_pd(y + k, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + k), _mm256_loadu_pd(y + k)));
  for (; k < n; ++k) y[k] += alpha * x[k];
}

// One column of `a` against four columns of `b` per pass; the shared load of
// a[k] is what makes this faster than four separate dots.
void dot_1x4(const double* a, const double* b0, const double* b1, const double* b2,
             const double* b3, std::size_t n, double* out) {
  __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
  __m256d s2 = _mm256_setzero_pd(), s3 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d va = _mm256_loadu_pd(a + k);
    s0 = _mm256_fmadd_pd(va, _mm256_loadu_pd(b0 + k), s0);
    s1 = _mm256_fmadd_pd(va, _mm256_loadu_pd(b1 + k), s1);
    s2 = _mm256_fmadd_pd(va, _mm256_loadu_pd(b2 + k), s2);
    s3 = _mm256_fmadd_pd(va, _mm256_loadu_pd(b3 + k), s3);
  }
  double r0 = hsum(s0), r1 = hsum(s1), r2 = hsum(s2), r3 = hsum(s3);
  for (; k < n; ++k) {
    r0 += a[k] * b0[k];
    r1 += a[k] * b1[k];
    r2 += a[k] * b2[k];
    r3 += a[k] * b3[k];
  }
  out[0] = r0;
  out[1] = r1;
  out[2] = r2;
  out[3] = r3;
}

void gram_avx2(const double* cols, std::size_t ncols, std::size_t n, double* out) {
  for (std::size_t i = 0; i < ncols; ++i) {
    const double* ci = cols + i * n;
    std::size_t j = i;
    for (; j + 4 <= ncols; j += 4) {
      dot_1x4(ci, cols + j * n, cols + (j + 1) * n, cols + (j + 2) * n, cols + (j + 3) * n, n,
              out + i * ncols + j);
    }
    for (; j < ncols; ++j) out[i * ncols + j] = dot_avx2(ci, cols + j * n, n);
  }
}

void cross_avx2(const double* a, std::size_t na, const double* b, std::size_t nb, std::size_t n,
                double* out) {
  for (std::size_t i = 0; i < na; ++i) {
    const double* ai = a + i * n;
    std::size_t j = 0;
    for (; j + 4 <= nb; j += 4)
      dot_1x4(ai, b + j * n, b + (j + 1) * n, b + (j + 2) * n, b + (j + 3) * n, n, out + i * nb + j);
    for (; j < nb; ++j) out[i * nb + j] = dot_avx2(ai, b + j * n, n);
  }
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable t{Isa::avx2, dot_avx2, axpy_avx2, gram_avx2, cross_avx2};
  return t;
}

}  // namespace varx::kernels::detail
