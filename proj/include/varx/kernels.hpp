#pragma once

#include <cstddef>
#include <string_view>

// Data-parallel inner loops. Each routine has a scalar reference version and,
// where the build target allows it, a SIMD version. The active table is picked
// once at startup from the CPU features (override with VARX_ISA=scalar|avx2|neon
// or kernels::select()).
namespace varx::kernels {

enum class Isa { scalar, avx2, neon };

struct KernelTable {
  Isa isa;
  /// sum_k a[k]*b[k]
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// y[k] += alpha*x[k]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  /// Upper triangle of the Gram matrix of `ncols` contiguous columns of length
  /// `n`: out[i*ncols+j] = dot(col_i, col_j) for j >= i. Lower triangle untouched.
  void (*gram)(const double* cols, std::size_t ncols, std::size_t n, double* out);
  /// out[i*nb+j] = dot(a_i, b_j) for column blocks a (na columns) and b (nb
  /// columns), each of length n.
  void (*cross)(const double* a, std::size_t na, const double* b, std::size_t nb,
                std::size_t n, double* out);
};

const KernelTable& active();
const KernelTable& table(Isa isa);
bool available(Isa isa);
/// Throws DomainError when the requested ISA is not compiled in or not
/// supported by this CPU.
void select(Isa isa);
std::string_view name(Isa isa);

/// RAII guard that switches the active table and restores it on scope exit.
class ScopedIsa {
 public:
  explicit ScopedIsa(Isa isa);
  ~ScopedIsa();
  ScopedIsa(const ScopedIsa&) = delete;
  ScopedIsa& operator=(const ScopedIsa&) = delete;

 private:
  Isa previous_;
};

namespace detail {
const KernelTable& scalar_table();
#if defined(VARX_BUILD_AVX2)
const KernelTable& avx2_table();
#endif
#if defined(VARX_BUILD_NEON)
const KernelTable& neon_table();
#endif
}  // namespace detail

}  // namespace varx::kernels
