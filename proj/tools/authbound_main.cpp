// authbound: batch experiments on the optimal channel-forging attack and the
// error-region bound it induces. Subcommands: solve, region, sweep, wishart,
// perturb. Every command is deterministic given its options; all randomness
// flows from --seed through the documented stream-splitting rule.
//
// Exit codes: 0 success, 1 invalid input, 2 numerical failure.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "authbound/attack_solver.hpp"
#include "authbound/gaussian_info.hpp"
#include "authbound/io.hpp"
#include "authbound/rng.hpp"

using namespace authbound;
using json = nlohmann::ordered_json;

namespace {

struct OutputTarget {
  std::string path;  // empty: stdout

  void write(const std::string& content) const {
    if (path.empty()) {
      std::cout << content;
      return;
    }
    std::ofstream out(path);
    if (!out) throw StructuralError("cannot open output file: " + path);
    out << content;
  }
};

std::vector<long long> parse_int_list(const std::string& text) {
  std::vector<long long> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stoll(item));
  }
  if (out.empty()) throw StructuralError("empty integer list: " + text);
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  if (out.empty()) throw StructuralError("empty list: " + text);
  return out;
}

// "lo:hi:count" inclusive grid
std::vector<double> parse_grid(const std::string& text) {
  double lo = 0.0, hi = 0.0;
  int count = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%d", &lo, &hi, &count) != 3 || count < 1) {
    throw StructuralError("grid must be lo:hi:count, got: " + text);
  }
  std::vector<double> grid(count);
  for (int i = 0; i < count; ++i) {
    grid[i] = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
  }
  return grid;
}

JointChannelCovariance load_validated_scenario(const std::string& path) {
  const auto spec = io::read_scenario_file(path);
  if (spec.kind == ScenarioKind::IdentityBlock && spec.sigma_defaulted) {
    std::cerr << "note: sigma not set in " << path << ", using default "
              << io::format_complex(spec.sigma) << "\n";
  }
  if (spec.kind == ScenarioKind::IdentityBlock && spec.tau_defaulted) {
    std::cerr << "note: tau not set in " << path << ", using default "
              << io::format_complex(spec.tau) << "\n";
  }
  auto cov = build_scenario(spec);
  const auto report = validate(cov);
  if (!report.ok()) {
    throw StructuralError("scenario violates model invariants: " + report.to_string());
  }
  return cov;
}

std::string solution_summary(const AttackSolution& sol) {
  std::ostringstream os;
  os << "J*=" << io::format_double(sol.j_star) << " D*=" << io::format_double(sol.d_star)
     << " iterations=" << sol.iterations << " converged_at=" << sol.converged_at
     << " converged=" << (sol.converged ? "yes" : "no")
     << " projected=" << (sol.projected ? "yes" : "no")
     << " eta=" << io::format_double(sol.eta)
     << " residual=" << io::format_double(sol.stationarity_residual);
  return os.str();
}

int cmd_solve(const std::string& scenario_path, const std::string& out_path,
              const SolveOptions& opts) {
  const auto cov = load_validated_scenario(scenario_path);
  const auto sol = solve(cov, opts);
  if (!out_path.empty()) io::write_solution_file(out_path, sol);
  std::cout << solution_summary(sol) << "\n";
  return 0;
}

int cmd_region(const std::optional<double>& d_star_opt, const std::string& scenario_path,
               const std::string& grid_text, const OutputTarget& out,
               const SolveOptions& opts) {
  double d_star = 0.0;
  std::string source;
  if (d_star_opt) {
    d_star = *d_star_opt;
    source = "d_star=" + io::format_double(d_star);
  } else if (!scenario_path.empty()) {
    const auto cov = load_validated_scenario(scenario_path);
    const auto sol = solve(cov, opts);
    d_star = sol.d_star;
    source = "scenario=" + scenario_path + " d_star=" + io::format_double(d_star);
  } else {
    throw StructuralError("region: provide --d-star or --scenario");
  }
  const auto bound = region_boundary(d_star, parse_grid(grid_text));
  std::ostringstream os;
  io::write_region_csv(os, bound, {"authbound region " + source + " alpha_grid=" + grid_text});
  out.write(os.str());
  return 0;
}

int cmd_sweep(const std::string& n_list, const std::string& rho_list, double sigma,
              std::optional<double> tau_opt, const OutputTarget& out,
              const SolveOptions& opts) {
  std::ostringstream os;
  os << "# authbound sweep n=" << n_list << " rho=" << rho_list
     << " sigma=" << io::format_double(sigma)
     << " tau=" << (tau_opt ? io::format_double(*tau_opt) : std::string("rho*sigma"))
     << " max_iter=" << opts.max_iter << " rel_tol=" << io::format_double(opts.rel_tol)
     << "\n";
  if (!tau_opt) {
    std::cerr << "note: tau not set, using default tau = rho * sigma\n";
  }
  os << "n,rho,J_cf,J_iter,D_iter,eta,projected,iters\n";
  for (long long n : parse_int_list(n_list)) {
    for (double rho : parse_double_list(rho_list)) {
      const double tau = tau_opt ? *tau_opt : rho * sigma;
      const auto cov = build_identity_scenario(n, {rho, 0}, {sigma, 0}, {tau, 0});
      const auto report = validate(cov);
      if (!report.ok()) {
        throw StructuralError("sweep scenario n=" + std::to_string(n) +
                              " rho=" + io::format_double(rho) +
                              " violates model invariants: " + report.to_string());
      }
      const auto sol = solve(cov, opts);
      os << n << ',' << io::format_double(rho) << ','
         << io::format_double(sol.relaxed_cost) << ',' << io::format_double(sol.j_star)
         << ',' << io::format_double(sol.d_star) << ',' << io::format_double(sol.eta)
         << ',' << (sol.projected ? 1 : 0) << ',' << sol.converged_at << '\n';
    }
  }
  out.write(os.str());
  return 0;
}

int cmd_wishart(const std::string& n_list, int trials, std::uint64_t seed,
                const std::string& field_text, const OutputTarget& out,
                const std::string& summary_path, const SolveOptions& opts) {
  if (trials < 1) throw StructuralError("wishart: trials must be positive");
  WishartField field;
  if (field_text == "real") {
    field = WishartField::Real;
  } else if (field_text == "complex") {
    field = WishartField::Complex;
  } else {
    throw StructuralError("wishart: field must be 'real' or 'complex'");
  }

  std::ostringstream os;
  os << "# authbound wishart n=" << n_list << " trials=" << trials << " seed=" << seed
     << " field=" << field_text << " max_iter=" << opts.max_iter
     << " rel_tol=" << io::format_double(opts.rel_tol) << "\n";
  os << "n,trial,feasible_cf,J_cf,J_iter,D_iter,eta,iters\n";

  json summary;
  summary["config"] = {{"n", n_list},       {"trials", trials},
                       {"seed", seed},      {"field", field_text},
                       {"max_iter", opts.max_iter}, {"rel_tol", opts.rel_tol}};
  json feasibility = json::object();
  json d_cdf = json::object();

  for (long long n : parse_int_list(n_list)) {
    int feasible_count = 0;
    std::vector<double> d_values;
    for (int t = 0; t < trials; ++t) {
      // documented stream split: trial (n, t) draws from
      // derive_seed(seed, n * 1e6 + t)
      const auto draw = sample_wishart_scenario(
          n, derive_seed(seed, static_cast<std::uint64_t>(n) * 1000000 + t), field);
      const auto relaxed = solve_relaxed(draw.cov);
      const bool feasible = is_feasible(draw.cov, relaxed.Z, relaxed.X);
      feasible_count += feasible ? 1 : 0;
      const auto sol = solve(draw.cov, opts);
      d_values.push_back(sol.d_star);
      os << n << ',' << t << ',' << (feasible ? 1 : 0) << ','
         << io::format_double(sol.relaxed_cost) << ',' << io::format_double(sol.j_star)
         << ',' << io::format_double(sol.d_star) << ',' << io::format_double(sol.eta)
         << ',' << sol.converged_at << '\n';
    }
    std::sort(d_values.begin(), d_values.end());
    feasibility[std::to_string(n)] = 100.0 * feasible_count / trials;
    d_cdf[std::to_string(n)] = d_values;
  }
  summary["feasibility_percent"] = feasibility;
  summary["d_star_sorted"] = d_cdf;

  out.write(os.str());
  const std::string summary_text = summary.dump(2) + "\n";
  if (summary_path.empty()) {
    std::cout << summary_text;
  } else {
    OutputTarget{summary_path}.write(summary_text);
  }
  return 0;
}

int cmd_perturb(const std::string& solution_path, const std::string& scenario_path,
                int trials, double scale, std::uint64_t seed, const OutputTarget& out) {
  const auto cov = load_validated_scenario(scenario_path);
  const auto sol = io::read_solution_file(solution_path);
  if (sol.params.Z.rows() != cov.n() || sol.params.Z.cols() != cov.m()) {
    throw StructuralError("perturb: solution dimensions do not match the scenario");
  }
  const auto rep = perturb_and_check(cov, sol, scale, trials, seed);
  double max_improvement = 0.0;
  for (double delta : rep.deltas) {
    if (delta < 0.0) max_improvement = std::max(max_improvement, -delta);
  }
  json j;
  j["config"] = {{"solution", solution_path}, {"scenario", scenario_path},
                 {"trials", trials},          {"scale", scale},
                 {"seed", seed}};
  j["j_star"] = rep.j_star;
  j["min_j_found"] = rep.min_j_found;
  j["max_improvement"] = max_improvement;
  j["improved"] = rep.improved;
  j["deltas"] = rep.deltas;
  out.write(j.dump(2) + "\n");
  std::cerr << "perturb: " << trials << " trials, improved="
            << (rep.improved ? "yes" : "no")
            << " max_improvement=" << io::format_double(max_improvement) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"optimal channel-forging attacks and error-region bounds"};
  app.require_subcommand(1);
  app.set_config("--config");

  SolveOptions opts;
  std::string out_path;
  std::uint64_t seed = 0;

  const auto add_solver_opts = [&](CLI::App* cmd) {
    cmd->add_option("--max-iter", opts.max_iter, "iteration budget")
        ->capture_default_str();
    cmd->add_option("--rel-tol", opts.rel_tol,
                    "relative divergence-change tolerance for the convergence flag")
        ->capture_default_str();
  };

  auto* solve_cmd = app.add_subcommand("solve", "solve one scenario file");
  std::string scenario_path;
  solve_cmd->add_option("--scenario", scenario_path, "scenario file")->required();
  solve_cmd->add_option("--out", out_path, "solution file to write");
  add_solver_opts(solve_cmd);

  auto* region_cmd =
      app.add_subcommand("region", "error-region boundary as CSV alpha,beta_low");
  std::optional<double> d_star_opt;
  std::string grid_text = "0.01:0.99:99";
  region_cmd->add_option("--d-star", d_star_opt, "divergence budget (skip solving)");
  region_cmd->add_option("--scenario", scenario_path, "scenario to solve for D*");
  region_cmd->add_option("--alpha-grid", grid_text, "grid lo:hi:count")
      ->capture_default_str();
  region_cmd->add_option("--out", out_path, "output CSV (default stdout)");
  add_solver_opts(region_cmd);

  auto* sweep_cmd =
      app.add_subcommand("sweep", "identity-scenario sweep over n and rho");
  std::string n_list = "2,4,8,16,32,64";
  std::string rho_list = "0.1,0.5,0.7";
  double sigma = kDefaultSigma;
  std::optional<double> tau_opt;
  sweep_cmd->add_option("--n-list", n_list, "comma separated")->capture_default_str();
  sweep_cmd->add_option("--rho-list", rho_list, "comma separated")->capture_default_str();
  sweep_cmd->add_option("--sigma", sigma, "x-y correlation")->capture_default_str();
  sweep_cmd->add_option("--tau", tau_opt, "y-z correlation (default rho*sigma)");
  sweep_cmd->add_option("--out", out_path, "output CSV (default stdout)");
  add_solver_opts(sweep_cmd);

  auto* wishart_cmd =
      app.add_subcommand("wishart", "random-correlation ensemble experiment");
  std::string wishart_n_list = "2,4,8";
  int trials = 100;
  std::string field_text = "real";
  std::string summary_path;
  wishart_cmd->add_option("--n-list", wishart_n_list, "comma separated")
      ->capture_default_str();
  wishart_cmd->add_option("--trials", trials, "draws per n")->capture_default_str();
  wishart_cmd->add_option("--seed", seed, "base seed")->capture_default_str();
  wishart_cmd->add_option("--field", field_text, "real or complex")
      ->capture_default_str();
  wishart_cmd->add_option("--out", out_path, "per-trial CSV (default stdout)");
  wishart_cmd->add_option("--summary-out", summary_path,
                          "JSON summary (default stdout)");
  add_solver_opts(wishart_cmd);

  auto* perturb_cmd =
      app.add_subcommand("perturb", "perturbation analysis around a solution file");
  std::string solution_path;
  double scale = 0.01;
  int perturb_trials = 1000;
  perturb_cmd->add_option("--solution", solution_path, "solution file")->required();
  perturb_cmd->add_option("--scenario", scenario_path, "matching scenario file")
      ->required();
  perturb_cmd->add_option("--trials", perturb_trials, "perturbation draws")
      ->capture_default_str();
  perturb_cmd->add_option("--scale", scale, "relative perturbation norm")
      ->capture_default_str();
  perturb_cmd->add_option("--seed", seed, "base seed")->capture_default_str();
  perturb_cmd->add_option("--out", out_path, "JSON report (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve_cmd->parsed()) {
      return cmd_solve(scenario_path, out_path, opts);
    }
    if (region_cmd->parsed()) {
      return cmd_region(d_star_opt, scenario_path, grid_text, OutputTarget{out_path},
                        opts);
    }
    if (sweep_cmd->parsed()) {
      return cmd_sweep(n_list, rho_list, sigma, tau_opt, OutputTarget{out_path}, opts);
    }
    if (wishart_cmd->parsed()) {
      return cmd_wishart(wishart_n_list, trials, seed, field_text,
                         OutputTarget{out_path}, summary_path, opts);
    }
    if (perturb_cmd->parsed()) {
      return cmd_perturb(solution_path, scenario_path, perturb_trials, scale, seed,
                         OutputTarget{out_path});
    }
  } catch (const StructuralError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
