#include "relpush/stability.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "relpush/error.hpp"

namespace relpush {
namespace {

Eigen::Matrix3d to_eigen(const OmegaMatrix& w) {
  Eigen::Matrix3d m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = w.m[i][j];
  return m;
}

Eigen::Matrix3d amplification(const Vec3& omega) {
  const Eigen::Matrix3d W = to_eigen(OmegaMatrix::from(omega));
  const Eigen::Matrix3d I = Eigen::Matrix3d::Identity();
  return (I - W).partialPivLu().solve(I + W);
}

complexd horner(std::span<const complexd> c, complexd z) {
  complexd acc = 0.0;
  for (const complexd& x : c) acc = acc * z + x;
  return acc;
}

RootSet solve_cubic(std::string label, const std::array<complexd, 4>& c) {
  RootSet rs;
  rs.label = std::move(label);
  rs.coeffs = c;
  rs.roots = polynomial_roots(c);
  for (const complexd& z : rs.roots) {
    rs.max_magnitude = std::max(rs.max_magnitude, std::abs(z));
    const double scale = std::max(1.0, std::pow(std::abs(z), 3));
    rs.max_residual = std::max(rs.max_residual, std::abs(horner(c, z)) / scale);
  }
  return rs;
}

}  // namespace

OmegaMatrix OmegaMatrix::from(const Vec3& w) {
  OmegaMatrix o;
  o.m = {{{0.0, w.z, -w.y}, {-w.z, 0.0, w.x}, {w.y, -w.x, 0.0}}};
  return o;
}

Vec3 omega_from_B(const Vec3& B, const Species& sp, double gamma, double dt, OmegaScaling scaling) {
  if (!(gamma >= 1.0)) throw Error(ErrorCode::Validation, "omega_from_B needs gamma >= 1");
  if (!(dt > 0.0)) throw Error(ErrorCode::Validation, "omega_from_B needs dt > 0");
  double f = dt * sp.q / (sp.m * gamma);
  if (scaling == OmegaScaling::Adams) f /= 24.0;
  return f * B;
}

std::array<complexd, 3> boris_amplification_eigenvalues(const Vec3& omega) {
  Eigen::EigenSolver<Eigen::Matrix3d> es(amplification(omega), false);
  const auto ev = es.eigenvalues();
  std::array<complexd, 3> out{ev(0), ev(1), ev(2)};
  // Real eigenvalue first, then the conjugate pair with positive imaginary part first.
  std::sort(out.begin(), out.end(), [](const complexd& a, const complexd& b) {
    const bool ra = std::fabs(a.imag()) < 1e-13, rb = std::fabs(b.imag()) < 1e-13;
    if (ra != rb) return ra;
    if (a.imag() != b.imag()) return a.imag() > b.imag();
    return a.real() > b.real();
  });
  return out;
}

double boris_amplification_determinant(const Vec3& omega) { return amplification(omega).determinant(); }

std::vector<complexd> polynomial_roots(std::span<const complexd> c) {
  std::size_t lead = 0;
  while (lead < c.size() && c[lead] == complexd(0.0)) ++lead;
  if (lead == c.size()) throw Error(ErrorCode::Validation, "polynomial is identically zero");
  std::span<const complexd> p = c.subspan(lead);
  // Exact zero roots are split off so they come back exactly.
  std::size_t zeros = 0;
  while (p.size() > 1 && p.back() == complexd(0.0)) {
    p = p.first(p.size() - 1);
    ++zeros;
  }
  const Eigen::Index n = static_cast<Eigen::Index>(p.size()) - 1;
  if (n == 0) return std::vector<complexd>(zeros, 0.0);
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) comp(0, j) = -p[j + 1] / p[0];
  for (Eigen::Index i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
  std::vector<complexd> roots(es.eigenvalues().data(), es.eigenvalues().data() + n);
  roots.insert(roots.end(), zeros, 0.0);

  // A few Newton steps tighten simple roots; multiple roots (e.g. z = 0 twice)
  // are left alone when the derivative vanishes.
  for (std::size_t r = 0; r < static_cast<std::size_t>(n); ++r) {
    complexd& z = roots[r];
    for (int it = 0; it < 3; ++it) {
      complexd f = 0.0, df = 0.0;
      for (const complexd& x : p) {
        df = df * z + f;
        f = f * z + x;
      }
      if (std::abs(df) < 1e-8 * std::max(1.0, std::abs(f))) break;
      const complexd step = f / df;
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
      z -= step;
    }
  }
  std::sort(roots.begin(), roots.end(), [](const complexd& a, const complexd& b) {
    if (std::abs(a) != std::abs(b)) return std::abs(a) < std::abs(b);
    return a.imag() < b.imag();
  });
  return roots;
}

std::vector<complexd> value_polynomial_roots(std::span<const double> w) {
  std::vector<complexd> c(w.size() + 1);
  c[0] = 1.0;
  for (std::size_t i = 0; i < w.size(); ++i) c[i + 1] = -w[i];
  return polynomial_roots(c);
}

StabilityReport adams4_characteristic_roots(double omega_z, AdamsEnumeration mode) {
  StabilityReport rep;
  rep.method = "adams4";
  rep.omega = {0.0, 0.0, omega_z};
  const complexd iw(0.0, omega_z);
  rep.eigenvalues = {0.0, iw, -iw};

  if (mode == AdamsEnumeration::Consistent) {
    const char* labels[] = {"mu=0", "mu=+i*wz", "mu=-i*wz"};
    for (int d = 0; d < 3; ++d) {
      const complexd mu = rep.eigenvalues[d];
      rep.root_sets.push_back(
          solve_cubic(labels[d], {1.0 + 9.0 * mu, -(1.0 - 19.0 * mu), -5.0 * mu, mu}));
    }
  } else {
    const complexd l1[] = {1.0, 1.0 - 9.0 * iw, 1.0 + 9.0 * iw};
    const complexd l2[] = {1.0, 1.0 + 19.0 * iw, 1.0 - 19.0 * iw};
    const complexd l3[] = {0.0, iw, -iw};
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int c = 0; c < 3; ++c) {
          const std::string label = "l1#" + std::to_string(a) + ",l2#" + std::to_string(b) +
                                    ",l3=l4#" + std::to_string(c);
          rep.root_sets.push_back(solve_cubic(label, {l1[a], -l2[b], 5.0 * l3[c], l3[c]}));
        }
  }
  for (const RootSet& rs : rep.root_sets)
    rep.max_root_magnitude = std::max(rep.max_root_magnitude, rs.max_magnitude);
  return rep;
}

StabilityReport boris_report(const Vec3& omega) {
  StabilityReport rep;
  rep.method = "boris";
  rep.omega = omega;
  const auto ev = boris_amplification_eigenvalues(omega);
  rep.eigenvalues.assign(ev.begin(), ev.end());
  for (const complexd& z : ev) rep.max_root_magnitude = std::max(rep.max_root_magnitude, std::abs(z));
  return rep;
}

}  // namespace relpush
