#pragma once

#include <complex>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace relpush {

// Weights of the exponential predictor-corrector, stored newest first:
// index i of a value array weighs sample n+1-i (i = 1..k stored at i-1), and
// corrector_deriv_w[0] weighs the derivative at the new point.
//
// The fitting region is the half disk |z| <= rho, Re z <= 0 with z = lambda*k*dt,
// i.e. the radius is measured across the whole k-step window.
struct ExpPcCoefficients {
  int k = 22;
  double rho = 3.15;
  int rank = 18;
  double svd_tol = 1e-12;
  int sampling_rule_version = 1;
  int samples = 0;
  int predictor_rank_used = 0;
  int corrector_rank_used = 0;
  int verification_grid = 500;
  std::vector<double> predictor_value_w;
  std::vector<double> predictor_deriv_w;
  std::vector<double> corrector_value_w;
  std::vector<double> corrector_deriv_w;
  double max_residual = 0.0;
};

inline constexpr int kDefaultVerificationGrid = 500;

ExpPcCoefficients build_exp_pc_coefficients(int k = 22, double rho = 3.15, int rank = 18,
                                            double svd_tol = 1e-12);

// Max one-step exactness residual of both stencils for e^{lambda t}, over a
// grid disjoint from the construction samples. rho_eval <= 0 means c.rho.
double verify_stencil_on_semidisk(const ExpPcCoefficients& c, int grid_size,
                                  double rho_eval = 0.0);

// Sample points in z = lambda*k*dt used by the construction (rule version 1).
std::vector<std::complex<double>> construction_samples(int k, double rho);
std::vector<std::complex<double>> verification_samples(int grid_size, double rho);

// Residuals of each stencil at one z, in units of the oldest sample.
double predictor_residual(const ExpPcCoefficients& c, std::complex<double> z);
double corrector_residual(const ExpPcCoefficients& c, std::complex<double> z);

std::string save_coefficients(const ExpPcCoefficients& c);
ExpPcCoefficients load_coefficients(std::string_view document);

void save_coefficients_file(const ExpPcCoefficients& c, const std::filesystem::path& path);
ExpPcCoefficients load_coefficients_file(const std::filesystem::path& path);

}  // namespace relpush
