#pragma once

#include <array>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "relpush/kinematics.hpp"

namespace relpush {

using complexd = std::complex<double>;

// Antisymmetric matrix with rows (0, wz, -wy), (-wz, 0, wx), (wy, -wx, 0).
struct OmegaMatrix {
  std::array<std::array<double, 3>, 3> m{};
  static OmegaMatrix from(const Vec3& w);
};

enum class OmegaScaling { Boris, Adams };

// (dt q / (m gamma)) B; the Adams path carries an extra 1/24.
Vec3 omega_from_B(const Vec3& B, const Species& sp, double gamma, double dt,
                  OmegaScaling scaling = OmegaScaling::Boris);

// Eigenvalues of M = (I - W)^-1 (I + W).
std::array<complexd, 3> boris_amplification_eigenvalues(const Vec3& omega);
double boris_amplification_determinant(const Vec3& omega);

struct RootSet {
  std::string label;
  std::array<complexd, 4> coeffs;  // c3 z^3 + c2 z^2 + c1 z + c0
  std::vector<complexd> roots;
  double max_magnitude = 0.0;
  double max_residual = 0.0;  // |p(z)| / max(1, |z|^3)
};

struct StabilityReport {
  std::string method;
  Vec3 omega;
  std::vector<complexd> eigenvalues;
  std::vector<RootSet> root_sets;
  double max_root_magnitude = 0.0;
};

enum class AdamsEnumeration {
  // One cubic per eigen-direction of W, derived from the corrector weights
  // (9, 19, -5, 1)/24: (1+9mu) z^3 - (1-19mu) z^2 - 5mu z + mu, mu in {0, +-i wz}.
  Consistent,
  // Diagnostic: every pick of l1 in {1, 1-9iw, 1+9iw}, l2 in {1, 1+19iw, 1-19iw},
  // l3 = l4 in {0, iw, -iw} in the printed form l1 z^3 - l2 z^2 + 5 l3 z + l4.
  Exhaustive,
};

StabilityReport adams4_characteristic_roots(double omega_z,
                                            AdamsEnumeration mode = AdamsEnumeration::Consistent);

StabilityReport boris_report(const Vec3& omega);

// Roots of sum_i c[i] z^(n-i), highest degree first, via the companion matrix.
std::vector<complexd> polynomial_roots(std::span<const complexd> coeffs_high_first);

// Roots of zeta^k - sum_i w[i-1] zeta^(k-i) for newest-first value weights w.
std::vector<complexd> value_polynomial_roots(std::span<const double> newest_first);

}  // namespace relpush
