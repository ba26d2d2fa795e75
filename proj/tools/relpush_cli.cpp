#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "relpush/config.hpp"
#include "relpush/csv.hpp"
#include "relpush/error.hpp"
#include "relpush/exp_coefficients.hpp"
#include "relpush/presets.hpp"
#include "relpush/simd/stencil.hpp"
#include "relpush/simulation.hpp"
#include "relpush/stability.hpp"

namespace fs = std::filesystem;
using namespace relpush;

namespace {

struct Source {
  std::string config;
  std::string preset;
  std::string out_dir;
  std::string method;
};

void add_source_options(CLI::App* cmd, Source& src) {
  auto* cfg = cmd->add_option("--config", src.config, "experiment config (JSON)");
  auto* pre = cmd->add_option("--preset", src.preset, "bundled preset name");
  cfg->excludes(pre);
  cmd->add_option("--out-dir", src.out_dir, "directory for relative output paths");
  cmd->add_option("--method", src.method, "override pusher.method");
}

ExperimentConfig load(const Source& src) {
  ExperimentConfig cfg;
  if (!src.config.empty()) {
    cfg = load_config_file(src.config);
  } else if (!src.preset.empty()) {
    const Preset* p = find_preset(src.preset);
    if (!p) throw Error(ErrorCode::Validation, "unknown preset " + src.preset);
    cfg = parse_config(p->json);
    if (cfg.name.empty()) cfg.name = std::string(p->name);
  } else {
    throw Error(ErrorCode::Validation, "one of --config or --preset is required");
  }
  if (!src.method.empty()) {
    const auto m = parse_method(src.method);
    if (!m) throw Error(ErrorCode::Validation, "unknown method " + src.method);
    cfg.pusher.method = *m;
  }
  return cfg;
}

fs::path output_path(const Source& src, const std::optional<fs::path>& configured,
                     const std::string& fallback) {
  fs::path p = configured ? *configured : fs::path(fallback);
  if (p.is_relative() && !src.out_dir.empty()) p = fs::path(src.out_dir) / p;
  return p;
}

std::string stem_name(const ExperimentConfig& cfg) { return cfg.name.empty() ? "experiment" : cfg.name; }

int cmd_run(const Source& src) {
  ExperimentConfig cfg = load(src);
  ensure_coefficients(cfg);
  const TimeSeries ts = run_simulation(cfg);
  const fs::path traj = output_path(src, cfg.outputs.trajectory_csv, stem_name(cfg) + "_trajectory.csv");
  const fs::path energy = output_path(src, cfg.outputs.energy_csv, stem_name(cfg) + "_energy.csv");
  emit_trajectory_csv(ts, traj);
  emit_energy_csv(ts, energy);

  const double start = cfg.energy_window ? (*cfg.energy_window)[0] : first_post_warmup_time(ts);
  const double end = cfg.energy_window ? (*cfg.energy_window)[1] : ts.samples.back().t;
  const EnergyDrift d = energy_drift_detail(ts, {start, end});
  std::cout << "method " << ts.method << "\nscenario " << ts.scenario << "\nsteps "
            << ts.samples.size() - 1 << "\nenergy_drift " << format_double(d.relative_range)
            << "\nenergy_net_drift " << format_double(d.net) << "\n";
  if (analytic_oracle_for(cfg.scenario, cfg.species, cfg.units, cfg.initial))
    std::cout << "error_norm " << format_double(error_norm(ts, oracle_positions(cfg, ts))) << "\n";
  std::cout << "trajectory_csv " << traj.string() << "\nenergy_csv " << energy.string() << "\n";
  return 0;
}

int cmd_converge(const Source& src, int jobs) {
  ExperimentConfig cfg = load(src);
  const ConvergenceTable t = convergence_study(cfg, jobs);
  const fs::path csv = output_path(src, cfg.outputs.convergence_csv, stem_name(cfg) + "_convergence.csv");
  emit_convergence_csv(t, csv);

  nlohmann::ordered_json summary;
  summary["method"] = t.method;
  summary["scenario"] = t.scenario;
  summary["oracle"] = to_string(t.oracle);
  summary["floor"] = t.floor;
  summary["status"] = to_string(t.status);
  if (t.status == FitStatus::Ok) summary["fitted_slope"] = t.fitted_slope;
  else summary["fitted_slope"] = nullptr;
  summary["fit_window"] = t.fit_window;
  fs::path summary_path = csv;
  summary_path.replace_extension(".summary.json");
  {
    std::ofstream out(summary_path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot open " + summary_path.string() + " for writing");
    out << summary.dump(2) << "\n";
  }
  std::cout << summary.dump(2) << "\nconvergence_csv " << csv.string() << "\n";
  if (t.status == FitStatus::AllPointsAtFloor)
    std::cerr << "note: all sweep points are at the error floor; no slope fitted\n";
  return 0;
}

std::vector<double> parse_sweep(const std::string& spec) {
  double a = 0, b = 0;
  int n = 0;
  char c1 = 0, c2 = 0;
  std::istringstream in(spec);
  if (!(in >> a >> c1 >> b >> c2 >> n) || c1 != ':' || c2 != ':' || n < 1 || !in.eof())
    throw Error(ErrorCode::Validation, "--sweep expects a:b:n");
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
  return out;
}

int cmd_stability(const std::string& method, std::optional<double> omega_z, const std::string& sweep,
                  const std::vector<double>& omega, bool exhaustive, const std::string& out) {
  std::vector<double> values;
  if (omega_z) values.push_back(*omega_z);
  if (!sweep.empty()) values = parse_sweep(sweep);
  if (values.empty() && omega.empty()) throw Error(ErrorCode::Validation, "give --omega-z, --sweep or --omega");

  std::vector<StabilityReport> reports;
  if (method == "boris") {
    if (!omega.empty()) reports.push_back(boris_report({omega[0], omega[1], omega[2]}));
    for (double w : values) reports.push_back(boris_report({0.0, 0.0, w}));
  } else if (method == "adams4") {
    if (!omega.empty()) throw Error(ErrorCode::Validation, "--omega applies to boris only");
    const auto mode = exhaustive ? AdamsEnumeration::Exhaustive : AdamsEnumeration::Consistent;
    for (double w : values) reports.push_back(adams4_characteristic_roots(w, mode));
  } else {
    throw Error(ErrorCode::Validation, "--method must be boris or adams4");
  }
  if (out.empty()) write_stability_csv(std::cout, reports);
  else emit_stability_csv(reports, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relativistic particle pusher experiments"};
  app.require_subcommand(1);
  std::string kernel = "auto";
  app.add_option("--kernel", kernel, "stencil kernel: auto, scalar, avx2, neon")
      ->check(CLI::IsMember({"auto", "scalar", "avx2", "neon"}));

  Source run_src, conv_src;
  auto* run = app.add_subcommand("run", "integrate one configured trajectory");
  add_source_options(run, run_src);

  int jobs = 1;
  auto* conv = app.add_subcommand("converge", "error against dt over run.dt_sweep");
  add_source_options(conv, conv_src);
  conv->add_option("--jobs", jobs, "parallel sweep entries")->check(CLI::PositiveNumber);

  std::string st_method, st_sweep, st_out;
  std::optional<double> st_omega_z;
  std::vector<double> st_omega;
  bool st_exhaustive = false;
  auto* stab = app.add_subcommand("stability", "amplification eigenvalues and characteristic roots");
  stab->add_option("--method", st_method, "boris or adams4")->required();
  auto* oz = stab->add_option("--omega-z", st_omega_z, "single omega_z");
  auto* sw = stab->add_option("--sweep", st_sweep, "omega_z range a:b:n");
  oz->excludes(sw);
  stab->add_option("--omega", st_omega, "full omega vector (boris)")->expected(3);
  stab->add_flag("--exhaustive", st_exhaustive, "all eigenvalue combinations (diagnostic)");
  stab->add_option("--out", st_out, "CSV path (default stdout)");

  auto* coeffs = app.add_subcommand("coeffs", "exponential PC coefficient documents");
  coeffs->require_subcommand(1);
  int ck = 22, crank = 18, cgrid = kDefaultVerificationGrid;
  double crho = 3.15, ctol = 1e-12;
  std::string cout_path, cin_path;
  auto* build = coeffs->add_subcommand("build", "construct coefficients");
  auto* verify = coeffs->add_subcommand("verify", "check a document or a fresh build");
  for (auto* c : {build, verify}) {
    c->add_option("--k", ck, "history length");
    c->add_option("--rho", crho, "half-disk radius in lambda*k*dt");
    c->add_option("--rank", crank, "maximum retained rank");
    c->add_option("--tol", ctol, "relative singular value cutoff");
  }
  build->add_option("--out", cout_path, "document path (default stdout)");
  verify->add_option("--in", cin_path, "document to load and verify");
  verify->add_option("--grid", cgrid, "verification grid size")->check(CLI::Range(100, 1000000));

  auto* presets = app.add_subcommand("presets", "bundled experiment configs");
  presets->require_subcommand(1);
  auto* plist = presets->add_subcommand("list", "list preset names");
  std::string pname;
  auto* pshow = presets->add_subcommand("show", "print a preset config");
  pshow->add_option("name", pname, "preset name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (kernel == "auto") simd::reset_isa();
    else if (kernel == "scalar") simd::set_isa(simd::Isa::Scalar);
    else if (kernel == "avx2") simd::set_isa(simd::Isa::Avx2);
    else simd::set_isa(simd::Isa::Neon);

    if (*run) return cmd_run(run_src);
    if (*conv) return cmd_converge(conv_src, jobs);
    if (*stab) return cmd_stability(st_method, st_omega_z, st_sweep, st_omega, st_exhaustive, st_out);
    if (*build) {
      const ExpPcCoefficients c = build_exp_pc_coefficients(ck, crho, crank, ctol);
      if (cout_path.empty()) std::cout << save_coefficients(c);
      else save_coefficients_file(c, cout_path);
      std::cerr << "max_residual " << format_double(c.max_residual) << " predictor_rank "
                << c.predictor_rank_used << " corrector_rank " << c.corrector_rank_used << "\n";
      return 0;
    }
    if (*verify) {
      const ExpPcCoefficients c = cin_path.empty() ? build_exp_pc_coefficients(ck, crho, crank, ctol)
                                                   : load_coefficients_file(cin_path);
      std::cout << "max_residual " << format_double(verify_stencil_on_semidisk(c, cgrid)) << "\n";
      return 0;
    }
    if (*plist) {
      for (const Preset& p : bundled_presets()) std::cout << p.name << "\n";
      return 0;
    }
    if (*pshow) {
      const Preset* p = find_preset(pname);
      if (!p) throw Error(ErrorCode::Validation, "unknown preset " + pname);
      std::cout << p->json;
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return is_numerical(e.code()) ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
