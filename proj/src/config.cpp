#include "relpush/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "relpush/error.hpp"

namespace relpush {
namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::Validation, "config: " + what); }

const json& need(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) invalid("missing " + where + "." + key);
  return j.at(key);
}

void only_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) invalid(where + " must be an object");
  for (const auto& [key, _] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      invalid("unknown key " + where + "." + key);
  }
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) invalid(where + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) invalid(where + " must be finite");
  return v;
}

double number_or(const json& j, const char* key, double fallback, const std::string& where) {
  return j.contains(key) ? number(j.at(key), where + "." + key) : fallback;
}

Vec3 vec3(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) invalid(where + " must be an array of 3 numbers");
  return {number(j[0], where + "[0]"), number(j[1], where + "[1]"), number(j[2], where + "[2]")};
}

Vec3 vec3_or(const json& j, const char* key, const Vec3& fallback, const std::string& where) {
  return j.contains(key) ? vec3(j.at(key), where + "." + key) : fallback;
}

int integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) invalid(where + " must be an integer");
  return j.get<int>();
}

UnitsSystem parse_units(const json& j) {
  only_keys(j, {"system", "c", "mu0"}, "units");
  const std::string system = j.value("system", std::string("natural"));
  UnitsSystem u;
  if (system == "natural") u = UnitsSystem::natural();
  else if (system == "mks") u = UnitsSystem::mks();
  else invalid("units.system must be natural or mks");
  u.c = number_or(j, "c", u.c, "units");
  u.mu0 = number_or(j, "mu0", u.mu0, "units");
  return u;
}

FieldScenario parse_scenario(const json& j) {
  const json& tj = need(j, "type", "scenario");
  if (!tj.is_string()) invalid("scenario.type must be a string");
  const std::string type = tj.get<std::string>();
  if (type == "UniformE") {
    only_keys(j, {"type", "E0"}, "scenario");
    return UniformE{vec3_or(j, "E0", UniformE{}.E0, "scenario")};
  }
  if (type == "UniformB") {
    only_keys(j, {"type", "B0"}, "scenario");
    return UniformB{vec3_or(j, "B0", UniformB{}.B0, "scenario")};
  }
  if (type == "CrossedEB") {
    only_keys(j, {"type", "E0", "B0"}, "scenario");
    return CrossedEB{vec3_or(j, "E0", CrossedEB{}.E0, "scenario"),
                     vec3_or(j, "B0", CrossedEB{}.B0, "scenario")};
  }
  if (type == "RadialWell") {
    only_keys(j, {"type", "phi_coeff", "b_coeff"}, "scenario");
    RadialWell w;
    w.phi_coeff = number_or(j, "phi_coeff", w.phi_coeff, "scenario");
    w.b_coeff = number_or(j, "b_coeff", w.b_coeff, "scenario");
    return w;
  }
  if (type == "MagneticBottle") {
    only_keys(j, {"type", "moment", "dipole_positions", "kick_E", "kick_duration"}, "scenario");
    MagneticBottle b;
    b.moment = vec3_or(j, "moment", b.moment, "scenario");
    if (j.contains("dipole_positions")) {
      const json& d = j.at("dipole_positions");
      if (!d.is_array() || d.size() != 2) invalid("scenario.dipole_positions must hold two positions");
      b.dipole_positions = {vec3(d[0], "scenario.dipole_positions[0]"),
                            vec3(d[1], "scenario.dipole_positions[1]")};
    }
    b.kick_E = vec3_or(j, "kick_E", b.kick_E, "scenario");
    b.kick_duration = number_or(j, "kick_duration", b.kick_duration, "scenario");
    return b;
  }
  invalid("unknown scenario.type " + type);
}

void parse_coefficients(const json& j, CoefficientSource& src, const std::filesystem::path& base) {
  only_keys(j, {"k", "rho", "rank", "svd_tol", "file"}, "pusher.exp_coeffs");
  if (j.contains("file")) {
    if (!j.at("file").is_string()) invalid("pusher.exp_coeffs.file must be a string");
    std::filesystem::path p = j.at("file").get<std::string>();
    src.file = p.is_relative() ? base / p : p;
  }
  if (j.contains("k")) src.k = integer(j.at("k"), "pusher.exp_coeffs.k");
  if (j.contains("rank")) src.rank = integer(j.at("rank"), "pusher.exp_coeffs.rank");
  src.rho = number_or(j, "rho", src.rho, "pusher.exp_coeffs");
  src.svd_tol = number_or(j, "svd_tol", src.svd_tol, "pusher.exp_coeffs");
}

}  // namespace

int steps_for(double span, double dt) {
  const double n = span / dt;
  const double r = std::round(n);
  if (std::fabs(n - r) <= 1e-9 * std::max(1.0, r)) return static_cast<int>(r);
  return static_cast<int>(std::ceil(n));
}

ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    invalid(std::string("not valid JSON: ") + e.what());
  }
  only_keys(j, {"name", "units", "species", "scenario", "initial", "pusher", "run", "outputs"}, "config");

  ExperimentConfig c;
  try {
    c.name = j.value("name", std::string());
    if (j.contains("units")) c.units = parse_units(j.at("units"));

    const json& sp = need(j, "species", "config");
    only_keys(sp, {"q", "m"}, "species");
    c.species = {number(need(sp, "q", "species"), "species.q"), number(need(sp, "m", "species"), "species.m")};

    c.scenario = parse_scenario(need(j, "scenario", "config"));

    const json& ini = need(j, "initial", "config");
    only_keys(ini, {"r", "u", "t"}, "initial");
    c.initial = {vec3_or(ini, "r", {}, "initial"), vec3_or(ini, "u", {}, "initial"),
                 number_or(ini, "t", 0.0, "initial")};

    const json& pu = need(j, "pusher", "config");
    only_keys(pu, {"method", "dt", "corrector_tol", "max_correctors", "exp_coeffs"}, "pusher");
    const json& mj = need(pu, "method", "pusher");
    if (!mj.is_string()) invalid("pusher.method must be a string");
    const auto m = parse_method(mj.get<std::string>());
    if (!m) invalid("unknown pusher.method " + mj.get<std::string>());
    c.pusher.method = *m;
    c.pusher.dt = number(need(pu, "dt", "pusher"), "pusher.dt");
    c.pusher.corrector_tol = number_or(pu, "corrector_tol", c.pusher.corrector_tol, "pusher");
    if (pu.contains("max_correctors"))
      c.pusher.max_correctors = integer(pu.at("max_correctors"), "pusher.max_correctors");
    if (pu.contains("exp_coeffs")) parse_coefficients(pu.at("exp_coeffs"), c.coeff_source, base_dir);

    const json& run = need(j, "run", "config");
    only_keys(run, {"t_end", "steps", "dt_sweep", "sweep_t_end", "energy_window"}, "run");
    if (run.contains("t_end") == run.contains("steps")) invalid("run needs exactly one of t_end or steps");
    if (run.contains("t_end")) {
      c.t_end = number(run.at("t_end"), "run.t_end");
    } else {
      const int steps = integer(run.at("steps"), "run.steps");
      if (steps < 1) invalid("run.steps must be >= 1");
      c.t_end = c.initial.t + steps * c.pusher.dt;
    }
    if (run.contains("dt_sweep")) {
      const json& sw = run.at("dt_sweep");
      if (!sw.is_array()) invalid("run.dt_sweep must be an array");
      for (std::size_t i = 0; i < sw.size(); ++i)
        c.dt_sweep.push_back(number(sw[i], "run.dt_sweep[" + std::to_string(i) + "]"));
    }
    if (run.contains("sweep_t_end")) c.sweep_t_end = number(run.at("sweep_t_end"), "run.sweep_t_end");
    if (run.contains("energy_window")) {
      const json& w = run.at("energy_window");
      if (!w.is_array() || w.size() != 2) invalid("run.energy_window must be [start, end]");
      c.energy_window = std::array<double, 2>{number(w[0], "run.energy_window[0]"),
                                              number(w[1], "run.energy_window[1]")};
    }

    if (j.contains("outputs")) {
      const json& o = j.at("outputs");
      only_keys(o, {"trajectory_csv", "energy_csv", "convergence_csv"}, "outputs");
      auto path = [&](const char* key, std::optional<std::filesystem::path>& dst) {
        if (!o.contains(key)) return;
        if (!o.at(key).is_string()) invalid(std::string("outputs.") + key + " must be a string");
        dst = o.at(key).get<std::string>();
      };
      path("trajectory_csv", c.outputs.trajectory_csv);
      path("energy_csv", c.outputs.energy_csv);
      path("convergence_csv", c.outputs.convergence_csv);
    }
  } catch (const json::exception& e) {
    invalid(e.what());
  }
  validate(c);
  return c;
}

ExperimentConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  ExperimentConfig c = parse_config(ss.str(), path.parent_path());
  if (c.name.empty()) c.name = path.stem().string();
  return c;
}

void validate(const ExperimentConfig& c) {
  validate(c.units);
  validate(c.species);
  validate(c.scenario);
  if (!is_finite(c.initial.r) || !is_finite(c.initial.u) || !std::isfinite(c.initial.t))
    invalid("initial state must be finite");
  if (!(c.pusher.dt > 0.0)) invalid("pusher.dt must be > 0");
  if (!(c.pusher.corrector_tol > 0.0)) invalid("pusher.corrector_tol must be > 0");
  if (c.pusher.max_correctors < 1) invalid("pusher.max_correctors must be >= 1");
  if (!(c.t_end > c.initial.t)) invalid("run.t_end must exceed initial.t");
  if (c.sweep_t_end && !(*c.sweep_t_end > c.initial.t)) invalid("run.sweep_t_end must exceed initial.t");
  std::set<double> seen;
  for (double dt : c.dt_sweep) {
    if (!(dt > 0.0)) invalid("run.dt_sweep entries must be positive");
    if (!seen.insert(dt).second) invalid("run.dt_sweep entries must be distinct");
  }
  if (c.energy_window && !((*c.energy_window)[0] < (*c.energy_window)[1]))
    invalid("run.energy_window must have start < end");
}

void ensure_coefficients(ExperimentConfig& c) {
  if (c.pusher.method != Method::ExponentialPC || c.pusher.exp_coeffs) return;
  ExpPcCoefficients coeffs =
      c.coeff_source.file
          ? load_coefficients_file(*c.coeff_source.file)
          : build_exp_pc_coefficients(c.coeff_source.k, c.coeff_source.rho, c.coeff_source.rank,
                                      c.coeff_source.svd_tol);
  c.pusher.exp_coeffs = std::make_shared<const ExpPcCoefficients>(std::move(coeffs));
}

ExperimentConfig with_method(const ExperimentConfig& cfg, Method m) {
  ExperimentConfig c = cfg;
  c.pusher.method = m;
  ensure_coefficients(c);
  return c;
}

}  // namespace relpush
