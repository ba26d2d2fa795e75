#include "relpush/csv.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>
#include <system_error>

#include "relpush/error.hpp"

namespace relpush {
namespace {

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

template <class Writer>
void to_file(const std::filesystem::path& path, Writer&& write) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  write(out);
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const std::filesystem::path& path) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw Error(ErrorCode::MalformedDocument, path.string() + ": bad number '" + s + "'");
  return v;
}

constexpr const char* kTrajectoryHeader =
    "t,x,y,z,ux,uy,uz,gamma,kinetic_energy,potential_energy,total_energy,error,warmup,corrector_iterations";

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_trajectory_csv(std::ostream& out, const TimeSeries& ts) {
  out << kTrajectoryHeader << '\n';
  for (const Sample& s : ts.samples) {
    out << format_double(s.t) << ',' << format_double(s.r.x) << ',' << format_double(s.r.y) << ','
        << format_double(s.r.z) << ',' << format_double(s.u.x) << ',' << format_double(s.u.y) << ','
        << format_double(s.u.z) << ',' << format_double(s.gamma) << ','
        << format_double(s.kinetic_energy) << ',' << opt(s.potential_energy) << ','
        << format_double(s.total_energy) << ',' << opt(s.error) << ',' << (s.warmup ? 1 : 0) << ','
        << s.corrector_iterations << '\n';
  }
}

void write_energy_csv(std::ostream& out, const TimeSeries& ts) {
  out << "t,gamma,kinetic_energy,potential_energy,total_energy,warmup\n";
  for (const Sample& s : ts.samples) {
    out << format_double(s.t) << ',' << format_double(s.gamma) << ','
        << format_double(s.kinetic_energy) << ',' << opt(s.potential_energy) << ','
        << format_double(s.total_energy) << ',' << (s.warmup ? 1 : 0) << '\n';
  }
}

void write_convergence_csv(std::ostream& out, const ConvergenceTable& t) {
  out << "method,scenario,dt,steps,error,in_fit\n";
  for (const ConvergenceRow& r : t.rows) {
    out << t.method << ',' << t.scenario << ',' << format_double(r.dt) << ',' << r.steps << ','
        << format_double(r.error) << ',' << (r.in_fit ? 1 : 0) << '\n';
  }
}

void write_stability_csv(std::ostream& out, const std::vector<StabilityReport>& reports) {
  out << "method,omega_x,omega_y,omega_z,set,index,re,im,magnitude\n";
  auto row = [&](const StabilityReport& rep, const std::string& set, std::size_t i, const complexd& z) {
    out << rep.method << ',' << format_double(rep.omega.x) << ',' << format_double(rep.omega.y) << ','
        << format_double(rep.omega.z) << ',' << set << ',' << i << ',' << format_double(z.real()) << ','
        << format_double(z.imag()) << ',' << format_double(std::abs(z)) << '\n';
  };
  for (const StabilityReport& rep : reports) {
    if (rep.root_sets.empty()) {
      for (std::size_t i = 0; i < rep.eigenvalues.size(); ++i) row(rep, "eigenvalue", i, rep.eigenvalues[i]);
    }
    for (const RootSet& rs : rep.root_sets)
      for (std::size_t i = 0; i < rs.roots.size(); ++i) row(rep, rs.label, i, rs.roots[i]);
  }
}

void emit_trajectory_csv(const TimeSeries& ts, const std::filesystem::path& path) {
  to_file(path, [&](std::ostream& o) { write_trajectory_csv(o, ts); });
}
void emit_energy_csv(const TimeSeries& ts, const std::filesystem::path& path) {
  to_file(path, [&](std::ostream& o) { write_energy_csv(o, ts); });
}
void emit_convergence_csv(const ConvergenceTable& t, const std::filesystem::path& path) {
  to_file(path, [&](std::ostream& o) { write_convergence_csv(o, t); });
}
void emit_stability_csv(const std::vector<StabilityReport>& reports, const std::filesystem::path& path) {
  to_file(path, [&](std::ostream& o) { write_stability_csv(o, reports); });
}

TimeSeries read_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kTrajectoryHeader)
    throw Error(ErrorCode::MalformedDocument, path.string() + ": unexpected trajectory header");
  TimeSeries ts;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 14) throw Error(ErrorCode::MalformedDocument, path.string() + ": wrong field count");
    auto num = [&](int i) { return parse_double(f[i], path); };
    auto optnum = [&](int i) -> std::optional<double> {
      if (f[i].empty()) return std::nullopt;
      return num(i);
    };
    Sample s;
    s.t = num(0);
    s.r = {num(1), num(2), num(3)};
    s.u = {num(4), num(5), num(6)};
    s.gamma = num(7);
    s.kinetic_energy = num(8);
    s.potential_energy = optnum(9);
    s.total_energy = num(10);
    s.error = optnum(11);
    s.warmup = f[12] == "1";
    s.corrector_iterations = static_cast<int>(num(13));
    ts.samples.push_back(s);
  }
  return ts;
}

}  // namespace relpush
