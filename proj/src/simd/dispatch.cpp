#include <atomic>

#include "relpush/error.hpp"
#include "relpush/simd/stencil.hpp"

namespace relpush::simd {
namespace {

Isa detect() {
#if defined(RELPUSH_HAVE_AVX2)
  if (__builtin_cpu_supports("avx2")) return Isa::Avx2;
#endif
#if defined(RELPUSH_HAVE_NEON)
  return Isa::Neon;
#endif
  return Isa::Scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(RELPUSH_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(RELPUSH_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
  if (!isa_available(isa))
    throw Error(ErrorCode::Validation, std::string("kernel ISA not available: ") + std::string(isa_name(isa)));
  current().store(isa, std::memory_order_relaxed);
}

void reset_isa() { current().store(detect(), std::memory_order_relaxed); }

CombineFn combine_for(Isa isa) {
  switch (isa) {
#if defined(RELPUSH_HAVE_AVX2)
    case Isa::Avx2: return &combine_avx2;
#endif
#if defined(RELPUSH_HAVE_NEON)
    case Isa::Neon: return &combine_neon;
#endif
    default: return &combine_scalar;
  }
}

}  // namespace relpush::simd
