#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace relpush::simd {

// One 3-vector padded to four doubles so a row is one AVX2 register.
struct alignas(32) Lane {
  double v[4] = {0.0, 0.0, 0.0, 0.0};
};

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa);
bool isa_available(Isa isa);

// Best available ISA unless overridden.
Isa active_isa();
void set_isa(Isa isa);
void reset_isa();

// out = sum_i vw[i] * vals[i] + dt * sum_i dw[i] * ders[i], accumulated in
// index order with separate multiplies and adds. Every ISA performs the same
// operations in the same order, so results are bit-identical.
using CombineFn = void (*)(const double* vw, const Lane* vals, std::size_t nv, const double* dw,
                           const Lane* ders, std::size_t nd, double dt, Lane* out);

void combine_scalar(const double* vw, const Lane* vals, std::size_t nv, const double* dw,
                    const Lane* ders, std::size_t nd, double dt, Lane* out);
#if defined(RELPUSH_HAVE_AVX2)
void combine_avx2(const double* vw, const Lane* vals, std::size_t nv, const double* dw,
                  const Lane* ders, std::size_t nd, double dt, Lane* out);
#endif
#if defined(RELPUSH_HAVE_NEON)
void combine_neon(const double* vw, const Lane* vals, std::size_t nv, const double* dw,
                  const Lane* ders, std::size_t nd, double dt, Lane* out);
#endif

CombineFn combine_for(Isa isa);

inline Lane combine(std::span<const double> vw, std::span<const Lane> vals,
                    std::span<const double> dw, std::span<const Lane> ders, double dt) {
  Lane out;
  combine_for(active_isa())(vw.data(), vals.data(), vw.size(), dw.data(), ders.data(), dw.size(),
                            dt, &out);
  return out;
}

}  // namespace relpush::simd
