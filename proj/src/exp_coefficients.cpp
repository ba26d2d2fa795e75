#include "relpush/exp_coefficients.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "relpush/error.hpp"

namespace relpush {
namespace {

using cd = std::complex<double>;
using std::numbers::pi;

constexpr double kConditioningLimit = 1e-8;
constexpr const char* kFormat = "relpush-exp-pc-coefficients";

// Arc, diameter and interior polar points of the half disk. The two offsets
// shift every family so construction and verification grids never coincide.
std::vector<cd> half_disk(int n_arc, int n_diam, int n_inner, double rho, double offset) {
  std::vector<cd> z;
  z.reserve(n_arc + n_diam + n_inner);
  for (int j = 0; j < n_arc; ++j) {
    const double th = pi / 2.0 + pi * (j + offset) / n_arc;
    z.push_back(std::polar(rho, th));
  }
  for (int j = 0; j < n_diam; ++j) z.emplace_back(0.0, rho * (-1.0 + 2.0 * (j + offset) / n_diam));
  if (n_inner > 0) {
    const int rings = std::max(1, static_cast<int>(std::lround(std::sqrt(n_inner / 3.0))));
    const int per = (n_inner + rings - 1) / rings;
    int placed = 0;
    for (int a = 0; a < rings && placed < n_inner; ++a) {
      const double rad = rho * (a + offset) / rings;
      for (int b = 0; b < per && placed < n_inner; ++b, ++placed)
        z.push_back(std::polar(rad, pi / 2.0 + pi * (b + offset) / per));
    }
  }
  return z;
}

struct LsResult {
  Eigen::VectorXd x;
  int rank_used = 0;
  double residual = 0.0;
};

// Minimum-norm truncated-SVD solution of the real-ified system A x = b, with
// each column scaled to unit norm first.
LsResult solve_truncated(const Eigen::MatrixXcd& A, const Eigen::VectorXcd& b, int max_rank,
                         double tol) {
  const Eigen::Index m = A.rows(), n = A.cols();
  Eigen::MatrixXd R(2 * m, n);
  R.topRows(m) = A.real();
  R.bottomRows(m) = A.imag();
  Eigen::VectorXd rhs(2 * m);
  rhs.head(m) = b.real();
  rhs.tail(m) = b.imag();

  Eigen::VectorXd scale = R.colwise().norm().transpose();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (scale(j) == 0.0) scale(j) = 1.0;
    R.col(j) /= scale(j);
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(R, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  int keep = 0;
  while (keep < sv.size() && keep < max_rank && sv(keep) > tol * sv(0)) ++keep;

  Eigen::VectorXd coef = Eigen::VectorXd::Zero(n);
  if (keep > 0) {
    const Eigen::VectorXd proj = svd.matrixU().leftCols(keep).transpose() * rhs;
    coef = svd.matrixV().leftCols(keep) * proj.cwiseQuotient(sv.head(keep));
  }
  LsResult out;
  out.x = coef.cwiseQuotient(scale);
  out.rank_used = keep;
  out.residual = (A * out.x.cast<cd>() - b).cwiseAbs().maxCoeff();
  return out;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::Validation, what);
}

}  // namespace

std::vector<cd> construction_samples(int k, double rho) {
  const int m = 10 * k;
  return half_disk(2 * k, 2 * k, m - 4 * k, rho, 0.5);
}

std::vector<cd> verification_samples(int grid_size, double rho) {
  const int n_arc = grid_size / 4;
  const int n_diam = grid_size / 4;
  std::vector<cd> z = half_disk(n_arc, n_diam, grid_size - n_arc - n_diam - 1, rho, 0.25);
  z.emplace_back(0.0, 0.0);
  return z;
}

ExpPcCoefficients build_exp_pc_coefficients(int k, double rho, int rank, double svd_tol) {
  require(k >= 2, "exp coefficients require k >= 2");
  require(rho > 0.0 && std::isfinite(rho), "exp coefficients require rho > 0");
  require(rank >= 1 && rank <= 2 * k, "exp coefficients require 1 <= rank <= 2k");
  require(svd_tol > 0.0, "exp coefficients require svd_tol > 0");

  const std::vector<cd> zs = construction_samples(k, rho);
  const Eigen::Index m = static_cast<Eigen::Index>(zs.size());

  // Predictor: e^{lk} = sum_i pv_i e^{l(k-i)} + pd_i l e^{l(k-i)}, l = z/k.
  Eigen::MatrixXcd P(m, 2 * k);
  Eigen::VectorXcd bp(m);
  for (Eigen::Index s = 0; s < m; ++s) {
    const cd l = zs[s] / static_cast<double>(k);
    for (int i = 1; i <= k; ++i) {
      const cd e = std::exp(l * static_cast<double>(k - i));
      P(s, i - 1) = e;
      P(s, k + i - 1) = l * e;
    }
    bp(s) = std::exp(l * static_cast<double>(k));
  }
  const LsResult pred = solve_truncated(P, bp, rank, svd_tol);

  // Corrector in time-symmetric form over offsets j = 0..k from the oldest
  // sample: sum_j alpha_j y_j = h sum_j beta_j f_j with alpha_k = 1,
  // alpha_j = -alpha_{k-j}, beta_j = beta_{k-j}. Unknowns are alpha_1..alpha_na
  // and beta_0..beta_nb.
  const int na = (k - 1) / 2;
  const int nb = k / 2;
  Eigen::MatrixXcd C(m, na + nb + 1);
  Eigen::VectorXcd bc(m);
  for (Eigen::Index s = 0; s < m; ++s) {
    const cd l = zs[s] / static_cast<double>(k);
    auto e = [&](int j) { return std::exp(l * static_cast<double>(j)); };
    for (int j = 1; j <= na; ++j) C(s, j - 1) = e(j) - e(k - j);
    for (int j = 0; j <= nb; ++j)
      C(s, na + j) = (j == k - j) ? -l * e(j) : -l * (e(j) + e(k - j));
    bc(s) = -(e(k) - 1.0);
  }
  const LsResult corr = solve_truncated(C, bc, rank, svd_tol);

  if (pred.residual > kConditioningLimit || corr.residual > kConditioningLimit) {
    std::ostringstream msg;
    msg << "exp coefficient fit residual " << std::max(pred.residual, corr.residual)
        << " exceeds " << kConditioningLimit << " for k=" << k << " rho=" << rho
        << " rank=" << rank;
    throw Error(ErrorCode::IllConditioned, msg.str());
  }

  ExpPcCoefficients c;
  c.k = k;
  c.rho = rho;
  c.rank = rank;
  c.svd_tol = svd_tol;
  c.samples = static_cast<int>(m);
  c.predictor_rank_used = pred.rank_used;
  c.corrector_rank_used = corr.rank_used;
  c.predictor_value_w.assign(pred.x.data(), pred.x.data() + k);
  c.predictor_deriv_w.assign(pred.x.data() + k, pred.x.data() + 2 * k);

  std::vector<double> alpha(k + 1, 0.0), beta(k + 1, 0.0);
  alpha[k] = 1.0;
  alpha[0] = -1.0;
  for (int j = 1; j <= na; ++j) {
    alpha[j] = corr.x(j - 1);
    alpha[k - j] = -corr.x(j - 1);
  }
  for (int j = 0; j <= nb; ++j) beta[j] = beta[k - j] = corr.x(na + j);
  c.corrector_value_w.resize(k);
  c.corrector_deriv_w.resize(k + 1);
  for (int i = 1; i <= k; ++i) c.corrector_value_w[i - 1] = -alpha[k - i];
  for (int i = 0; i <= k; ++i) c.corrector_deriv_w[i] = beta[k - i];

  c.verification_grid = kDefaultVerificationGrid;
  c.max_residual = verify_stencil_on_semidisk(c, c.verification_grid);
  return c;
}

double predictor_residual(const ExpPcCoefficients& c, cd z) {
  const int k = c.k;
  const cd l = z / static_cast<double>(k);
  cd acc = std::exp(l * static_cast<double>(k));
  for (int i = 1; i <= k; ++i) {
    const cd e = std::exp(l * static_cast<double>(k - i));
    acc -= (c.predictor_value_w[i - 1] + c.predictor_deriv_w[i - 1] * l) * e;
  }
  return std::abs(acc);
}

double corrector_residual(const ExpPcCoefficients& c, cd z) {
  const int k = c.k;
  const cd l = z / static_cast<double>(k);
  cd acc = std::exp(l * static_cast<double>(k)) * (1.0 - c.corrector_deriv_w[0] * l);
  for (int i = 1; i <= k; ++i) {
    const cd e = std::exp(l * static_cast<double>(k - i));
    acc -= (c.corrector_value_w[i - 1] + c.corrector_deriv_w[i] * l) * e;
  }
  return std::abs(acc);
}

double verify_stencil_on_semidisk(const ExpPcCoefficients& c, int grid_size, double rho_eval) {
  require(grid_size >= 100, "verification grid_size must be >= 100");
  const bool shapes_ok = c.k >= 2 && c.predictor_value_w.size() == static_cast<std::size_t>(c.k) &&
                         c.predictor_deriv_w.size() == static_cast<std::size_t>(c.k) &&
                         c.corrector_value_w.size() == static_cast<std::size_t>(c.k) &&
                         c.corrector_deriv_w.size() == static_cast<std::size_t>(c.k + 1);
  require(shapes_ok, "coefficient arrays do not match k");
  const double rho = rho_eval > 0.0 ? rho_eval : c.rho;
  double worst = 0.0;
  for (const cd z : verification_samples(grid_size, rho))
    worst = std::max({worst, predictor_residual(c, z), corrector_residual(c, z)});
  return worst;
}

std::string save_coefficients(const ExpPcCoefficients& c) {
  nlohmann::ordered_json doc;
  doc["format"] = kFormat;
  doc["sampling_rule_version"] = c.sampling_rule_version;
  doc["k"] = c.k;
  doc["rho"] = c.rho;
  doc["rank"] = c.rank;
  doc["svd_tol"] = c.svd_tol;
  doc["samples"] = c.samples;
  doc["predictor_rank_used"] = c.predictor_rank_used;
  doc["corrector_rank_used"] = c.corrector_rank_used;
  doc["verification_grid"] = c.verification_grid;
  doc["predictor_value_w"] = c.predictor_value_w;
  doc["predictor_deriv_w"] = c.predictor_deriv_w;
  doc["corrector_value_w"] = c.corrector_value_w;
  doc["corrector_deriv_w"] = c.corrector_deriv_w;
  doc["max_residual"] = c.max_residual;
  return doc.dump(2) + "\n";
}

ExpPcCoefficients load_coefficients(std::string_view document) {
  ExpPcCoefficients c;
  try {
    const auto doc = nlohmann::json::parse(document);
    if (doc.value("format", std::string()) != kFormat)
      throw Error(ErrorCode::MalformedDocument, "not an exp-pc coefficient document");
    c.sampling_rule_version = doc.at("sampling_rule_version").get<int>();
    c.k = doc.at("k").get<int>();
    c.rho = doc.at("rho").get<double>();
    c.rank = doc.at("rank").get<int>();
    c.svd_tol = doc.at("svd_tol").get<double>();
    c.samples = doc.value("samples", 0);
    c.predictor_rank_used = doc.value("predictor_rank_used", 0);
    c.corrector_rank_used = doc.value("corrector_rank_used", 0);
    c.verification_grid = doc.value("verification_grid", kDefaultVerificationGrid);
    c.predictor_value_w = doc.at("predictor_value_w").get<std::vector<double>>();
    c.predictor_deriv_w = doc.at("predictor_deriv_w").get<std::vector<double>>();
    c.corrector_value_w = doc.at("corrector_value_w").get<std::vector<double>>();
    c.corrector_deriv_w = doc.at("corrector_deriv_w").get<std::vector<double>>();
    c.max_residual = doc.at("max_residual").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedDocument, std::string("coefficient document: ") + e.what());
  }
  if (c.sampling_rule_version != 1)
    throw Error(ErrorCode::MalformedDocument, "unsupported sampling_rule_version");
  double recomputed = 0.0;
  try {
    recomputed = verify_stencil_on_semidisk(c, c.verification_grid);
  } catch (const Error& e) {
    throw Error(ErrorCode::MalformedDocument, std::string("coefficient document: ") + e.what());
  }
  if (!(std::fabs(recomputed - c.max_residual) <= 1e-12)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "recorded max_residual " << c.max_residual << " disagrees with recomputed "
        << recomputed;
    throw Error(ErrorCode::VerificationMismatch, msg.str());
  }
  return c;
}

void save_coefficients_file(const ExpPcCoefficients& c, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  out << save_coefficients(c);
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

ExpPcCoefficients load_coefficients_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_coefficients(ss.str());
}

}  // namespace relpush
