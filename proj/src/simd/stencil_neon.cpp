#include <arm_neon.h>

#include "relpush/simd/stencil.hpp"

namespace relpush::simd {

void combine_neon(const double* vw, const Lane* vals, std::size_t nv, const double* dw,
                  const Lane* ders, std::size_t nd, double dt, Lane* out) {
  float64x2_t sv0 = vdupq_n_f64(0.0), sv1 = vdupq_n_f64(0.0);
  float64x2_t sd0 = vdupq_n_f64(0.0), sd1 = vdupq_n_f64(0.0);
  for (std::size_t i = 0; i < nv; ++i) {
    const float64x2_t w = vdupq_n_f64(vw[i]);
    sv0 = vaddq_f64(sv0, vmulq_f64(w, vld1q_f64(vals[i].v)));
    sv1 = vaddq_f64(sv1, vmulq_f64(w, vld1q_f64(vals[i].v + 2)));
  }
  for (std::size_t i = 0; i < nd; ++i) {
    const float64x2_t w = vdupq_n_f64(dw[i]);
    sd0 = vaddq_f64(sd0, vmulq_f64(w, vld1q_f64(ders[i].v)));
    sd1 = vaddq_f64(sd1, vmulq_f64(w, vld1q_f64(ders[i].v + 2)));
  }
  const float64x2_t h = vdupq_n_f64(dt);
  vst1q_f64(out->v, vaddq_f64(sv0, vmulq_f64(h, sd0)));
  vst1q_f64(out->v + 2, vaddq_f64(sv1, vmulq_f64(h, sd1)));
}

}  // namespace relpush::simd
