#include "relpush/simd/stencil.hpp"

namespace relpush::simd {

void combine_scalar(const double* vw, const Lane* vals, std::size_t nv, const double* dw,
                    const Lane* ders, std::size_t nd, double dt, Lane* out) {
  double sv[4] = {0.0, 0.0, 0.0, 0.0};
  double sd[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < nv; ++i) {
    for (int c = 0; c < 4; ++c) {
      const double p = vw[i] * vals[i].v[c];
      sv[c] = sv[c] + p;
    }
  }
  for (std::size_t i = 0; i < nd; ++i) {
    for (int c = 0; c < 4; ++c) {
      const double p = dw[i] * ders[i].v[c];
      sd[c] = sd[c] + p;
    }
  }
  for (int c = 0; c < 4; ++c) {
    const double p = dt * sd[c];
    out->v[c] = sv[c] + p;
  }
}

}  // namespace relpush::simd
