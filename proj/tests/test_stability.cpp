#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "gen.hpp"
#include "relpush/stability.hpp"

using namespace relpush;

namespace {

complexd horner(const std::array<complexd, 4>& c, complexd z) {
  return ((c[0] * z + c[1]) * z + c[2]) * z + c[3];
}

bool has_root_near(const std::vector<complexd>& roots, complexd z, double tol) {
  return std::any_of(roots.begin(), roots.end(), [&](complexd r) { return std::abs(r - z) <= tol; });
}

}  // namespace

TEST_CASE("omega matrix layout") {
  const OmegaMatrix w = OmegaMatrix::from({1, 2, 3});
  CHECK(w.m[0] == std::array<double, 3>{0, 3, -2});
  CHECK(w.m[1] == std::array<double, 3>{-3, 0, 1});
  CHECK(w.m[2] == std::array<double, 3>{2, -1, 0});
  test::Gen g(51);
  for (int n = 0; n < 100; ++n) {
    const OmegaMatrix r = OmegaMatrix::from(g.vec(-10, 10));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) CHECK(r.m[i][j] == -r.m[j][i]);
  }
}

TEST_CASE("omega from B") {
  const Species sp{1, 1};
  CHECK(omega_from_B({0, 0, 1}, sp, 1.0, 1.0) == Vec3{0, 0, 1});
  CHECK(omega_from_B({0, 0, 1}, sp, 2.0, 0.5) == Vec3{0, 0, 0.25});
  CHECK(omega_from_B({}, sp, 1.0, 1.0) == Vec3{});
  CHECK(omega_from_B({0, 0, 24}, sp, 1.0, 1.0, OmegaScaling::Adams).z == doctest::Approx(1.0));
}

TEST_CASE("boris eigenvalue examples") {
  const auto id = boris_amplification_eigenvalues({});
  for (const complexd l : id) CHECK(std::abs(l - 1.0) <= 1e-15);
  const auto e = boris_amplification_eigenvalues({0, 0, 0.5});
  CHECK(std::abs(e[0] - 1.0) <= 1e-14);
  CHECK(std::abs(e[1] - complexd(0.6, 0.8)) <= 1e-14);
  CHECK(std::abs(e[2] - complexd(0.6, -0.8)) <= 1e-14);
}

TEST_CASE("boris eigenvalues sit on the unit circle") {
  test::Gen g(52);
  double worst = 0.0, worst_det = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const Vec3 w = g.vec(-10, 10);
    const auto e = boris_amplification_eigenvalues(w);
    for (const complexd l : e) worst = std::max(worst, std::fabs(std::abs(l) - 1.0));
    worst_det = std::max(worst_det, std::fabs(std::fabs(boris_amplification_determinant(w)) - 1.0));

    // Closed form after the |w|^2 reading: (1 - |w|^2 +- 2i|w|) / (1 + |w|^2).
    const double w2 = norm2(w), wn = std::sqrt(w2);
    const complexd pair((1 - w2) / (1 + w2), 2 * wn / (1 + w2));
    CHECK(has_root_near({e.begin(), e.end()}, 1.0, 1e-12));
    CHECK(has_root_near({e.begin(), e.end()}, pair, 1e-11));
    CHECK(has_root_near({e.begin(), e.end()}, std::conj(pair), 1e-11));
    // Non-real eigenvalues pair up with their conjugates.
    for (const complexd l : e)
      if (std::fabs(l.imag()) > 1e-12) CHECK(has_root_near({e.begin(), e.end()}, std::conj(l), 1e-12));
  }
  CHECK(worst <= 1e-12);
  CHECK(worst_det <= 1e-12);
}

TEST_CASE("adams roots at zero field") {
  for (const auto mode : {AdamsEnumeration::Consistent, AdamsEnumeration::Exhaustive}) {
    const StabilityReport r = adams4_characteristic_roots(0.0, mode);
    for (const RootSet& s : r.root_sets) {
      REQUIRE(s.roots.size() == 3);
      int zeros = 0, ones = 0;
      for (const complexd z : s.roots) {
        if (std::abs(z) <= 1e-12) ++zeros;
        if (std::abs(z - 1.0) <= 1e-12) ++ones;
      }
      CHECK(zeros == 2);
      CHECK(ones == 1);
    }
  }
}

TEST_CASE("adams roots at omega 0.1") {
  const StabilityReport r = adams4_characteristic_roots(0.1);
  REQUIRE(r.root_sets.size() == 3);
  const RootSet& trivial = r.root_sets[0];
  CHECK(has_root_near(trivial.roots, 1.0, 1e-12));
  CHECK(has_root_near(trivial.roots, 0.0, 1e-12));
  for (std::size_t i = 1; i < 3; ++i) {
    const RootSet& s = r.root_sets[i];
    CHECK(std::fabs(s.max_magnitude - 1.0) >= 1e-6);
    // Vieta: the product of the roots is -c0/c3 and their sum is -c2/c3.
    complexd prod = 1.0, sum = 0.0;
    for (const complexd z : s.roots) {
      prod *= z;
      sum += z;
    }
    CHECK(std::abs(prod + s.coeffs[3] / s.coeffs[0]) <= 1e-12);
    CHECK(std::abs(sum + s.coeffs[1] / s.coeffs[0]) <= 1e-12);
  }
  CHECK(r.max_root_magnitude > 1.0);
}

TEST_CASE("every reported root satisfies its polynomial") {
  test::Gen g(53);
  for (int n = 0; n < 200; ++n) {
    const double w = g.uniform(-2, 2);
    for (const auto mode : {AdamsEnumeration::Consistent, AdamsEnumeration::Exhaustive}) {
      const StabilityReport r = adams4_characteristic_roots(w, mode);
      CHECK(r.root_sets.size() == (mode == AdamsEnumeration::Consistent ? 3u : 27u));
      for (const RootSet& s : r.root_sets)
        for (const complexd z : s.roots)
          CHECK(std::abs(horner(s.coeffs, z)) <= 1e-10 * std::max(1.0, std::pow(std::abs(z), 3)));
    }
  }
}

TEST_CASE("polynomial roots") {
  const std::vector<complexd> quad{1.0, -3.0, 2.0};
  const auto r = polynomial_roots(quad);
  REQUIRE(r.size() == 2);
  CHECK(has_root_near(r, 1.0, 1e-14));
  CHECK(has_root_near(r, 2.0, 1e-14));
  const std::vector<complexd> triple_zero{1.0, -1.0, 0.0, 0.0};
  const auto z = polynomial_roots(triple_zero);
  REQUIRE(z.size() == 3);
  CHECK(std::count(z.begin(), z.end(), complexd(0.0)) == 2);
  // zeta^2 - zeta: the value polynomial of Adams (newest-first 1, 0).
  const std::vector<double> adams{1.0, 0.0};
  const auto v = value_polynomial_roots(adams);
  CHECK(has_root_near(v, 1.0, 1e-14));
  CHECK(has_root_near(v, 0.0, 1e-14));
}

TEST_CASE("boris report") {
  const StabilityReport r = boris_report({0, 0, 0.5});
  CHECK(r.method == "boris");
  CHECK(r.eigenvalues.size() == 3);
  CHECK(r.max_root_magnitude == doctest::Approx(1.0).epsilon(1e-14));
}
