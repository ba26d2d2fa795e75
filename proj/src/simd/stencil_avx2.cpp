#include <immintrin.h>

#include "relpush/simd/stencil.hpp"

namespace relpush::simd {

// Built with -mavx2 but without -mfma: fused multiply-add would change rounding.
void combine_avx2(const double* vw, const Lane* vals, std::size_t nv, const double* dw,
                  const Lane* ders, std::size_t nd, double dt, Lane* out) {
  __m256d sv = _mm256_setzero_pd();
  __m256d sd = _mm256_setzero_pd();
  for (std::size_t i = 0; i < nv; ++i) {
    const __m256d p = _mm256_mul_pd(_mm256_set1_pd(vw[i]), _mm256_load_pd(vals[i].v));
    sv = _mm256_add_pd(sv, p);
  }
  for (std::size_t i = 0; i < nd; ++i) {
    const __m256d p = _mm256_mul_pd(_mm256_set1_pd(dw[i]), _mm256_load_pd(ders[i].v));
    sd = _mm256_add_pd(sd, p);
  }
  _mm256_store_pd(out->v, _mm256_add_pd(sv, _mm256_mul_pd(_mm256_set1_pd(dt), sd)));
}

}  // namespace relpush::simd
