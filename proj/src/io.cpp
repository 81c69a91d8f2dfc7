#include "authbound/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace authbound::io {

namespace {

constexpr const char* kScenarioMagic = "authbound-scenario-v1";
constexpr const char* kSolutionMagic = "authbound-solution-v1";

std::string strip_comment(const std::string& line) {
  const auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

// key -> remainder-of-line map; later keys overwrite earlier ones.
std::map<std::string, std::string> read_key_values(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(strip_comment(line));
    std::string key;
    if (!(ls >> key)) continue;
    std::string rest;
    std::getline(ls, rest);
    const auto start = rest.find_first_not_of(" \t");
    kv[key] = start == std::string::npos ? std::string() : rest.substr(start);
  }
  return kv;
}

const std::string& require_key(const std::map<std::string, std::string>& kv,
                               const std::string& key, const char* what) {
  const auto it = kv.find(key);
  if (it == kv.end()) {
    throw StructuralError(std::string(what) + ": missing key '" + key + "'");
  }
  return it->second;
}

double parse_double(const std::string& text, const std::string& key) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == 0) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw StructuralError("cannot parse number for '" + key + "': " + text);
  }
}

long long parse_int(const std::string& text, const std::string& key) {
  try {
    return std::stoll(text);
  } catch (const std::exception&) {
    throw StructuralError("cannot parse integer for '" + key + "': " + text);
  }
}

std::uint64_t parse_uint(const std::string& text, const std::string& key) {
  try {
    return std::stoull(text);
  } catch (const std::exception&) {
    throw StructuralError("cannot parse unsigned integer for '" + key + "': " + text);
  }
}

// "re,im" (bare "re" accepted on input, imaginary part zero).
Complex parse_complex(const std::string& text, const std::string& key) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) {
    return {parse_double(text, key), 0.0};
  }
  return {parse_double(text.substr(0, comma), key),
          parse_double(text.substr(comma + 1), key)};
}

Matrix parse_matrix(const std::string& text, Eigen::Index rows, Eigen::Index cols,
                    const std::string& key) {
  std::istringstream ss(text);
  Matrix M(rows, cols);
  std::string token;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!(ss >> token)) {
        throw StructuralError("matrix '" + key + "': expected " +
                              std::to_string(rows * cols) + " entries");
      }
      M(r, c) = parse_complex(token, key);
    }
  }
  if (ss >> token) {
    throw StructuralError("matrix '" + key + "': trailing entries");
  }
  return M;
}

void write_matrix(std::ostream& out, const char* key, const Matrix& M) {
  out << key;
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    for (Eigen::Index c = 0; c < M.cols(); ++c) {
      out << ' ' << format_complex(M(r, c));
    }
  }
  out << '\n';
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_complex(Complex v) {
  return format_double(v.real()) + "," + format_double(v.imag());
}

ScenarioSpec read_scenario(std::istream& in) {
  const auto kv = read_key_values(in);
  if (require_key(kv, "format", "scenario") != kScenarioMagic) {
    throw StructuralError("scenario: unsupported format line");
  }
  const std::string kind = require_key(kv, "kind", "scenario");

  ScenarioSpec spec;
  spec.n = parse_int(require_key(kv, "n", "scenario"), "n");
  if (spec.n < 1) throw StructuralError("scenario: n must be at least 1");
  spec.m = kv.count("m") ? parse_int(kv.at("m"), "m") : spec.n;
  if (spec.m < 1) throw StructuralError("scenario: m must be at least 1");

  if (kind == "identity") {
    spec.kind = ScenarioKind::IdentityBlock;
    spec.rho = parse_complex(require_key(kv, "rho", "identity scenario"), "rho");
    spec.sigma_defaulted = !kv.count("sigma");
    spec.sigma = spec.sigma_defaulted ? Complex(kDefaultSigma, 0.0)
                                      : parse_complex(kv.at("sigma"), "sigma");
    spec.tau_defaulted = !kv.count("tau");
    spec.tau = spec.tau_defaulted ? default_tau(spec.rho, spec.sigma)
                                  : parse_complex(kv.at("tau"), "tau");
  } else if (kind == "wishart") {
    spec.kind = ScenarioKind::Wishart;
    spec.seed = parse_uint(require_key(kv, "seed", "wishart scenario"), "seed");
    const std::string field = kv.count("field") ? kv.at("field") : "real";
    if (field == "real") {
      spec.field = WishartField::Real;
    } else if (field == "complex") {
      spec.field = WishartField::Complex;
    } else {
      throw StructuralError("wishart scenario: field must be 'real' or 'complex'");
    }
  } else if (kind == "explicit") {
    spec.kind = ScenarioKind::ExplicitBlocks;
    const Eigen::Index n = spec.n, m = spec.m;
    spec.blocks = JointChannelCovariance::from_blocks(
        parse_matrix(require_key(kv, "Kxx", "explicit scenario"), n, n, "Kxx"),
        parse_matrix(require_key(kv, "Kxy", "explicit scenario"), n, n, "Kxy"),
        parse_matrix(require_key(kv, "Kxz", "explicit scenario"), n, m, "Kxz"),
        parse_matrix(require_key(kv, "Kyy", "explicit scenario"), n, n, "Kyy"),
        parse_matrix(require_key(kv, "Kyz", "explicit scenario"), n, m, "Kyz"),
        parse_matrix(require_key(kv, "Kzz", "explicit scenario"), m, m, "Kzz"));
  } else {
    throw StructuralError("scenario: unknown kind '" + kind + "'");
  }
  return spec;
}

ScenarioSpec read_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StructuralError("cannot open scenario file: " + path);
  return read_scenario(in);
}

void write_scenario(std::ostream& out, const ScenarioSpec& spec) {
  out << "format " << kScenarioMagic << '\n';
  switch (spec.kind) {
    case ScenarioKind::IdentityBlock:
      out << "kind identity\n";
      out << "n " << spec.n << '\n';
      out << "m " << spec.m << '\n';
      out << "rho " << format_complex(spec.rho) << '\n';
      out << "sigma " << format_complex(spec.sigma) << '\n';
      out << "tau " << format_complex(spec.tau) << '\n';
      break;
    case ScenarioKind::Wishart:
      out << "kind wishart\n";
      out << "n " << spec.n << '\n';
      out << "m " << spec.m << '\n';
      out << "seed " << spec.seed << '\n';
      out << "field " << (spec.field == WishartField::Real ? "real" : "complex") << '\n';
      break;
    case ScenarioKind::ExplicitBlocks: {
      if (!spec.blocks) throw StructuralError("scenario: explicit blocks missing");
      const auto& K = *spec.blocks;
      out << "kind explicit\n";
      out << "n " << K.n() << '\n';
      out << "m " << K.m() << '\n';
      write_matrix(out, "Kxx", K.Kxx());
      write_matrix(out, "Kxy", K.Kxy());
      write_matrix(out, "Kxz", K.Kxz());
      write_matrix(out, "Kyy", K.Kyy());
      write_matrix(out, "Kyz", K.Kyz());
      write_matrix(out, "Kzz", K.Kzz());
      break;
    }
  }
}

void write_scenario_file(const std::string& path, const ScenarioSpec& spec) {
  std::ofstream out(path);
  if (!out) throw StructuralError("cannot open scenario file for writing: " + path);
  write_scenario(out, spec);
}

AttackSolution read_solution(std::istream& in) {
  const auto kv = read_key_values(in);
  if (require_key(kv, "format", "solution") != kSolutionMagic) {
    throw StructuralError("solution: unsupported format line");
  }
  const Eigen::Index n = parse_int(require_key(kv, "n", "solution"), "n");
  const Eigen::Index m = parse_int(require_key(kv, "m", "solution"), "m");
  if (n < 1 || m < 1) throw StructuralError("solution: invalid dimensions");

  AttackSolution sol;
  sol.j_star = parse_double(require_key(kv, "j_star", "solution"), "j_star");
  sol.d_star = parse_double(require_key(kv, "d_star", "solution"), "d_star");
  sol.relaxed_cost = parse_double(require_key(kv, "relaxed_cost", "solution"), "relaxed_cost");
  sol.eta = parse_double(require_key(kv, "eta", "solution"), "eta");
  sol.iterations = static_cast<int>(parse_int(require_key(kv, "iterations", "solution"), "iterations"));
  sol.converged_at = static_cast<int>(parse_int(require_key(kv, "converged_at", "solution"), "converged_at"));
  sol.converged = parse_int(require_key(kv, "converged", "solution"), "converged") != 0;
  sol.projected = parse_int(require_key(kv, "projected", "solution"), "projected") != 0;
  sol.projection_fallback =
      parse_int(require_key(kv, "projection_fallback", "solution"), "projection_fallback") != 0;
  sol.regularized = parse_int(require_key(kv, "regularized", "solution"), "regularized") != 0;
  sol.stationarity_residual = parse_double(
      require_key(kv, "stationarity_residual", "solution"), "stationarity_residual");
  sol.params.Z = parse_matrix(require_key(kv, "Z", "solution"), n, m, "Z");
  sol.params.C = parse_matrix(require_key(kv, "C", "solution"), n, n, "C");
  return sol;
}

AttackSolution read_solution_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StructuralError("cannot open solution file: " + path);
  return read_solution(in);
}

void write_solution(std::ostream& out, const AttackSolution& sol) {
  out << "format " << kSolutionMagic << '\n';
  out << "n " << sol.params.Z.rows() << '\n';
  out << "m " << sol.params.Z.cols() << '\n';
  out << "j_star " << format_double(sol.j_star) << '\n';
  out << "d_star " << format_double(sol.d_star) << '\n';
  out << "relaxed_cost " << format_double(sol.relaxed_cost) << '\n';
  out << "eta " << format_double(sol.eta) << '\n';
  out << "iterations " << sol.iterations << '\n';
  out << "converged_at " << sol.converged_at << '\n';
  out << "converged " << (sol.converged ? 1 : 0) << '\n';
  out << "projected " << (sol.projected ? 1 : 0) << '\n';
  out << "projection_fallback " << (sol.projection_fallback ? 1 : 0) << '\n';
  out << "regularized " << (sol.regularized ? 1 : 0) << '\n';
  out << "stationarity_residual " << format_double(sol.stationarity_residual) << '\n';
  write_matrix(out, "Z", sol.params.Z);
  write_matrix(out, "C", sol.params.C);
}

void write_solution_file(const std::string& path, const AttackSolution& sol) {
  std::ofstream out(path);
  if (!out) throw StructuralError("cannot open solution file for writing: " + path);
  write_solution(out, sol);
}

void write_region_csv(std::ostream& out, const ErrorRegionBound& bound,
                      const std::vector<std::string>& config_lines) {
  for (const auto& line : config_lines) {
    out << "# " << line << '\n';
  }
  out << "alpha,beta_low\n";
  for (const auto& [alpha, beta] : bound.points) {
    out << format_double(alpha) << ',' << format_double(beta) << '\n';
  }
}

}  // namespace authbound::io
