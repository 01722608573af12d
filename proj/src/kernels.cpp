#include "varx/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#include "varx/errors.hpp"

namespace varx::kernels {
namespace {

bool cpu_supports(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(VARX_BUILD_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::neon:
#if defined(VARX_BUILD_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa best_isa() {
  if (const char* env = std::getenv("VARX_ISA")) {
    const std::string want(env);
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon})
      if (want == name(isa) && cpu_supports(isa)) return isa;
  }
  if (cpu_supports(Isa::avx2)) return Isa::avx2;
  if (cpu_supports(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> ptr{&table(best_isa())};
  return ptr;
}

}  // namespace

std::string_view name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::neon:
      return "neon";
  }
  return "unknown";
}

bool available(Isa isa) { return cpu_supports(isa); }

const KernelTable& table(Isa isa) {
  switch (isa) {
#if defined(VARX_BUILD_AVX2)
    case Isa::avx2:
      if (cpu_supports(isa)) return detail::avx2_table();
      break;
#endif
#if defined(VARX_BUILD_NEON)
    case Isa::neon:
      return detail::neon_table();
#endif
    default:
      break;
  }
  if (isa != Isa::scalar)
    throw DomainError("kernel set '" + std::string(name(isa)) + "' is not available on this machine");
  return detail::scalar_table();
}

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

void select(Isa isa) { current().store(&table(isa), std::memory_order_release); }

ScopedIsa::ScopedIsa(Isa isa) : previous_(active().isa) { select(isa); }
ScopedIsa::~ScopedIsa() { select(previous_); }

}  // namespace varx::kernels
