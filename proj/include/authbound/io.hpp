#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "authbound/attack_solver.hpp"
#include "authbound/covmodel.hpp"
#include "authbound/gaussian_info.hpp"

// Text formats. All floating point values are written with %.17g so that
// files round-trip bit exactly; complex entries are written as "re,im";
// matrices are row-major lists of entries on one line. '#' starts a comment.
//
// Scenario file (key value per line):
//   format authbound-scenario-v1
//   kind identity | wishart | explicit
//   n <int>            m <int>
//   rho re,im          sigma re,im        tau re,im      (identity)
//   seed <uint64>      field real|complex                (wishart)
//   Kxx <n*n entries> ... Kzz <m*m entries>              (explicit)
//
// Solution file: scalar keys (j_star, d_star, relaxed_cost, eta, iterations,
// converged_at, converged, projected, projection_fallback, regularized,
// stationarity_residual) followed by Z and C matrix lines.
namespace authbound::io {

// Shortest round-trip decimal form ('.' decimal point, C locale).
std::string format_double(double v);
std::string format_complex(Complex v);

ScenarioSpec read_scenario(std::istream& in);
ScenarioSpec read_scenario_file(const std::string& path);
void write_scenario(std::ostream& out, const ScenarioSpec& spec);
void write_scenario_file(const std::string& path, const ScenarioSpec& spec);

AttackSolution read_solution(std::istream& in);
AttackSolution read_solution_file(const std::string& path);
void write_solution(std::ostream& out, const AttackSolution& sol);
void write_solution_file(const std::string& path, const AttackSolution& sol);

// CSV "alpha,beta_low", one row per grid point, preceded by '#' config lines.
void write_region_csv(std::ostream& out, const ErrorRegionBound& bound,
                      const std::vector<std::string>& config_lines);

}  // namespace authbound::io
