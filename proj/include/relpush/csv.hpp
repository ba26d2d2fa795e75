#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "relpush/simulation.hpp"
#include "relpush/stability.hpp"

namespace relpush {

// Shortest text with 17 significant digits; round-trips exactly.
std::string format_double(double v);

// Column orders:
//   trajectory:  t,x,y,z,ux,uy,uz,gamma,kinetic_energy,potential_energy,total_energy,error,warmup,corrector_iterations
//   energy:      t,gamma,kinetic_energy,potential_energy,total_energy,warmup
//   convergence: method,scenario,dt,steps,error,in_fit
//   stability:   method,omega_x,omega_y,omega_z,set,index,re,im,magnitude
// Absent optional values are empty fields.
void write_trajectory_csv(std::ostream& out, const TimeSeries& ts);
void write_energy_csv(std::ostream& out, const TimeSeries& ts);
void write_convergence_csv(std::ostream& out, const ConvergenceTable& table);
void write_stability_csv(std::ostream& out, const std::vector<StabilityReport>& reports);

void emit_trajectory_csv(const TimeSeries& ts, const std::filesystem::path& path);
void emit_energy_csv(const TimeSeries& ts, const std::filesystem::path& path);
void emit_convergence_csv(const ConvergenceTable& table, const std::filesystem::path& path);
void emit_stability_csv(const std::vector<StabilityReport>& reports, const std::filesystem::path& path);

TimeSeries read_trajectory_csv(const std::filesystem::path& path);

}  // namespace relpush
