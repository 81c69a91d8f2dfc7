// Acceptance suite: end-to-end checks of the solver pipeline against its
// analytic anchors, ensemble statistics and structural invariants. Prints one
// PASS/FAIL line per criterion; the exit code is the number of failures.

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "authbound/attack_solver.hpp"
#include "authbound/gaussian_info.hpp"
#include "authbound/oracle.hpp"
#include "authbound/rng.hpp"

using namespace authbound;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("criterion %d [%s] %s\n", criterion, pass ? "PASS" : "FAIL",
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
  char buf[1024];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return buf;
}

struct StoredSolution {
  std::string label;
  JointChannelCovariance cov;
  AttackSolution sol;
};

std::vector<StoredSolution> g_solutions;  // converged solutions of criteria 1, 3, 4
std::vector<std::pair<std::string, double>> g_etas;  // every wishart solve

JointChannelCovariance identity_with_defaults(Eigen::Index n, double rho) {
  // logged defaults: sigma = 0.9, tau = rho * sigma
  return build_identity_scenario(n, {rho, 0}, {kDefaultSigma, 0},
                                 {rho * kDefaultSigma, 0});
}

double scalar_optimum(double sigma) { return sigma * sigma / (1.0 - sigma * sigma); }

// 1. Identity-scenario cost doubles with the dimension.
void criterion1() {
  double worst = 0.0;
  for (double rho : {0.1, 0.5}) {
    double prev = -1.0;
    for (Eigen::Index n : {1, 2, 4, 8, 16, 32, 64}) {
      const auto cov = identity_with_defaults(n, rho);
      const auto sol = solve(cov);
      if (!sol.converged) {
        report(1, false, fmt("identity n=%d rho=%.1f did not converge", (int)n, rho));
        return;
      }
      g_solutions.push_back({fmt("identity n=%d rho=%.1f", (int)n, rho), cov, sol});
      if (prev > 0.0) {
        worst = std::max(worst, std::abs(sol.d_star - 2.0 * prev) / (2.0 * prev));
      }
      prev = sol.d_star;
    }
  }
  report(1, worst <= 1e-8,
         fmt("identity doubling D*(2n) = 2 D*(n), n up to 64, rho in {0.1, 0.5}, "
             "sigma=0.9, tau=rho*sigma: worst relative deviation %.2e (tolerance 1e-8)",
             worst));
}

// 2. Feasibility probability of the relaxed closed form on real Wishart draws.
void criterion2() {
  const int trials = 200;
  std::string detail = "relaxed-solution feasibility, 200 real Wishart trials per n:";
  bool pass = true;
  for (Eigen::Index n : {2, 4, 8, 16, 32}) {
    int feasible = 0;
    for (int t = 0; t < trials; ++t) {
      const auto d = sample_wishart_scenario(
          n, derive_seed(20260810, static_cast<std::uint64_t>(n) * 1000 + t),
          WishartField::Real);
      const auto r = solve_relaxed(d.cov);
      feasible += is_feasible(d.cov, r.Z, r.X) ? 1 : 0;
    }
    const double pct = 100.0 * feasible / trials;
    bool ok = true;
    if (n == 2) ok = pct >= 25.0 && pct <= 60.0;
    if (n == 4) ok = pct >= 2.0 && pct <= 25.0;
    if (n >= 8) ok = feasible == 0;
    pass = pass && ok;
    detail += fmt(" n=%d: %.1f%%%s", (int)n, pct, ok ? "" : " [out of band]");
  }
  detail += " (bands: n=2 [25,60], n=4 [2,25], n>=8 exactly 0)";
  report(2, pass, detail);
}

// 3. Identity n=64 converges within 200 iterations at rel_tol 1e-10.
void criterion3() {
  bool pass = true;
  std::string detail = "identity n=64 convergence (rel_tol 1e-10, max_iter 200):";
  for (double rho : {0.1, 0.3, 0.5}) {
    const auto cov = identity_with_defaults(64, rho);
    SolveOptions opts;  // defaults: max_iter 200, rel_tol 1e-10
    const auto sol = solve(cov, opts);
    pass = pass && sol.converged;
    detail += fmt(" rho=%.1f: %s at iteration %d;", rho,
                  sol.converged ? "converged" : "NOT converged", sol.converged_at);
    if (sol.converged) {
      g_solutions.push_back({fmt("identity n=64 rho=%.1f", rho), cov, sol});
    }
  }
  report(3, pass, detail);
}

// 4. Perturbations around converged Wishart solutions find no lower cost.
void criterion4() {
  SolveOptions opts;
  opts.max_iter = 20000;  // rel_tol stays at the 1e-10 default
  int converged_count = 0, total = 0, improved = 0;
  double worst_delta = 0.0;  // most negative best-delta seen
  for (Eigen::Index n : {2, 4, 8}) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      ++total;
      const auto d = sample_wishart_scenario(n, seed, WishartField::Real);
      const auto sol = solve(d.cov, opts);
      g_etas.push_back({fmt("wishart n=%d seed=%llu", (int)n, (unsigned long long)seed),
                        sol.eta});
      if (!sol.converged) continue;
      ++converged_count;
      g_solutions.push_back(
          {fmt("wishart n=%d seed=%llu", (int)n, (unsigned long long)seed), d.cov, sol});
      const auto rep = perturb_and_check(
          d.cov, sol, 0.01, 1000,
          derive_seed(4242, static_cast<std::uint64_t>(n) * 100 + seed));
      const double best = rep.min_j_found - sol.j_star;
      worst_delta = std::min(worst_delta, best);
      if (rep.min_j_found < sol.j_star - 1e-9) ++improved;
    }
  }
  report(4, improved == 0 && converged_count > 0,
         fmt("1000 perturbations at 1%% norm around each of %d converged Wishart "
             "solutions (of %d runs, n in {2,4,8}, seeds 1..20, max_iter 20000): "
             "%d improved beyond 1e-9; best delta %.2e",
             converged_count, total, improved, worst_delta));
}

// 5. Analytic scalar optima.
void criterion5() {
  bool pass = true;
  std::string detail = "scalar anchors:";
  for (double sigma : {0.3, 0.6, 0.9}) {
    const auto sol = solve(build_identity_scenario(1, {0, 0}, {sigma, 0}, {0, 0}));
    const double err = std::abs(sol.d_star - scalar_optimum(sigma));
    pass = pass && err <= 1e-8 && sol.converged;
    detail += fmt(" rho=0 sigma=%.1f: |D* - s^2/(1-s^2)| = %.1e;", sigma, err);
  }
  {
    const Matrix I = Matrix::Identity(3, 3);
    const auto cov = JointChannelCovariance::from_blocks(I, 0.9 * I, I, I, 0.9 * I, I);
    const auto sol = solve(cov);
    pass = pass && sol.d_star <= 1e-10;
    detail += fmt(" z=x n=3: D* = %.1e (<= 1e-10)", sol.d_star);
  }
  report(5, pass, detail);
}

// 6. Exhaustive scalar grid search agrees with the solver.
void criterion6() {
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const auto d = sample_wishart_scenario(1, derive_seed(600, t), WishartField::Real);
    const Matrix W = d.cov.assembled();
    Eigen::VectorXd s(3);
    for (int i = 0; i < 3; ++i) s(i) = 1.0 / std::sqrt(W(i, i).real());
    const Matrix D = s.cast<Complex>().asDiagonal();
    const Matrix Wn = D * W * D;  // unit diagonal keeps the optimum inside the box
    const auto cov = JointChannelCovariance::from_blocks(
        Wn.block(0, 0, 1, 1), Wn.block(0, 1, 1, 1), Wn.block(0, 2, 1, 1),
        Wn.block(1, 1, 1, 1), Wn.block(1, 2, 1, 1), Wn.block(2, 2, 1, 1));
    SolveOptions opts;
    opts.max_iter = 2000;
    const auto sol = solve(cov, opts);
    const auto best = oracle::brute_force_scalar(cov, {});
    worst = std::max(worst, std::abs(best.j - sol.j_star));
  }
  report(6, worst <= 1e-3,
         fmt("20 random scalar instances, grid [-3,3]x[0,3] step 1e-3: worst "
             "|J_grid - J*| = %.2e (tolerance 1e-3)",
             worst));
}

// 7. Stationarity, gradient and inverse structure at the stored solutions.
void criterion7() {
  double worst_resid = 0.0, worst_grad = 0.0, worst_zero = 0.0;
  std::string worst_resid_label = "-", worst_grad_label = "-";
  int resid_fail = 0, grad_fail = 0, zero_fail = 0, zero_checked = 0, singular = 0;
  for (const auto& stored : g_solutions) {
    const double resid = stored.sol.stationarity_residual;
    if (resid > worst_resid) {
      worst_resid = resid;
      worst_resid_label = stored.label;
    }
    if (resid > 1e-7) ++resid_fail;

    const auto grad = oracle::finite_difference_gradient(stored.cov, stored.sol.params);
    if (grad.relative_norm > worst_grad) {
      worst_grad = grad.relative_norm;
      worst_grad_label = stored.label;
    }
    if (grad.relative_norm > 1e-5) ++grad_fail;

    try {
      const double z = oracle::check_zero_block_inverse(
          assemble_joint(stored.cov, stored.sol.params), stored.cov.n(), stored.cov.m());
      ++zero_checked;
      worst_zero = std::max(worst_zero, z);
      if (z > 1e-8) ++zero_fail;
    } catch (const PreconditionError&) {
      ++singular;  // assembled joint is singular at an active-constraint optimum
    }
  }
  const bool pass = resid_fail == 0 && grad_fail == 0 && zero_fail == 0;
  report(7, pass,
         fmt("over %d converged solutions of criteria 1, 3, 4: stationarity residual "
             "<= 1e-7 violated by %d (worst %.2e at %s); FD gradient <= 1e-5 violated "
             "by %d (worst %.2e at %s); inverse (x,v)-block <= 1e-8 violated by %d of "
             "%d checked (worst %.2e; %d joints singular, skipped)",
             (int)g_solutions.size(), resid_fail, worst_resid, worst_resid_label.c_str(),
             grad_fail, worst_grad, worst_grad_label.c_str(), zero_fail, zero_checked,
             worst_zero, singular));
}

// 8. eta nonnegative everywhere; median eta inside a loose band.
void criterion8() {
  bool pass = true;
  std::string detail;
  // 1000-draw ensemble: every iterate is feasible and the relaxed cost is a
  // global lower bound, so eta >= 0 holds at any iteration budget.
  for (int t = 0; t < 1000; ++t) {
    const Eigen::Index n = (t % 3 == 0) ? 2 : (t % 3 == 1 ? 4 : 8);
    const auto d = sample_wishart_scenario(n, derive_seed(31337, t), WishartField::Real);
    SolveOptions opts;
    opts.max_iter = 300;
    const auto sol = solve(d.cov, opts);
    g_etas.push_back({fmt("ensemble n=%d draw=%d", (int)n, t), sol.eta});
  }
  std::vector<double> medians;
  for (Eigen::Index n : {8, 16, 32}) {
    std::vector<double> etas;
    for (int t = 0; t < 30; ++t) {
      const auto d = sample_wishart_scenario(
          n, derive_seed(8000 + static_cast<std::uint64_t>(n), t), WishartField::Real);
      SolveOptions opts;
      opts.max_iter = 1500;
      const auto sol = solve(d.cov, opts);
      etas.push_back(sol.eta);
      g_etas.push_back({fmt("wishart n=%d trial=%d", (int)n, t), sol.eta});
    }
    std::sort(etas.begin(), etas.end());
    const double median = 0.5 * (etas[14] + etas[15]);
    medians.push_back(median);
    const bool ok = median >= 5.0 && median <= 50.0;
    pass = pass && ok;
    detail += fmt("median eta n=%d: %.1f%%%s; ", (int)n, median, ok ? "" : " [out of band]");
  }
  double min_eta = 0.0;
  std::string min_label = "-";
  for (const auto& [label, eta] : g_etas) {
    if (eta < min_eta) {
      min_eta = eta;
      min_label = label;
    }
  }
  const bool nonneg = min_eta >= -1e-9;
  pass = pass && nonneg;
  report(8, pass,
         detail + fmt("band [5,50]; min eta over all %d Wishart solves "
                      "(incl. a 1000-draw n in {2,4,8} ensemble): %.2e (%s)",
                      (int)g_etas.size(), min_eta, min_label.c_str()));
}

// 9. Error-region boundaries invert the bound and order monotonically in rho.
void criterion9() {
  std::vector<double> grid;
  for (int i = 1; i <= 99; ++i) grid.push_back(i * 0.01);

  bool pass = true;
  std::string detail;
  double prev_d = std::numeric_limits<double>::infinity();
  std::vector<double> prev_betas;
  int interior_total = 0;
  double worst_f_dev = 0.0;
  for (double rho : {0.1, 0.3, 0.5, 0.7}) {
    const auto sol = solve(identity_with_defaults(1, rho));
    if (!sol.converged) {
      pass = false;
      detail += fmt("rho=%.1f did not converge; ", rho);
      continue;
    }
    if (sol.d_star >= prev_d) {
      pass = false;
      detail += fmt("D* not decreasing at rho=%.1f; ", rho);
    }
    prev_d = sol.d_star;

    const auto bound = region_boundary(sol.d_star, grid);
    std::vector<double> betas;
    for (const auto& [alpha, beta] : bound.points) {
      betas.push_back(beta);
      if (beta > 0.0) {
        ++interior_total;
        worst_f_dev = std::max(
            worst_f_dev, std::abs(binary_divergence(beta, alpha) - sol.d_star));
      } else if (binary_divergence(0.0, alpha) > sol.d_star + kRootTol) {
        pass = false;  // clipped point must already satisfy the bound
      }
    }
    if (!prev_betas.empty()) {
      // smaller D* (larger rho) pushes the boundary up toward beta = 1 - alpha
      for (std::size_t i = 0; i < betas.size(); ++i) {
        if (betas[i] + 1e-12 < prev_betas[i]) {
          pass = false;
          detail += fmt("boundary not monotone in rho at alpha=%.2f; ", grid[i]);
          break;
        }
      }
    }
    prev_betas = betas;
  }
  pass = pass && worst_f_dev <= 1e-12 && interior_total > 0;
  report(9, pass,
         detail + fmt("identity n=1 rho in {0.1,0.3,0.5,0.7}: %d interior grid points, "
                      "worst |f(beta_low, alpha) - D*| = %.2e (tolerance 1e-12); "
                      "boundaries pointwise non-decreasing in rho",
                      interior_total, worst_f_dev));
}

}  // namespace

int main() {
  std::setvbuf(stdout, nullptr, _IONBF, 0);
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  std::printf("RESULT %d/9 criteria passed\n", 9 - g_failures);
  return g_failures;
}
