#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "authbound/covmodel.hpp"

namespace authbound {

// Unknowns of the attack covariance: the cross covariance Z between the
// forged estimate v and the observation z, and a factor C parameterizing the
// conditional covariance, so that K_vv = Z Kzz^{-1} Z* + C C*. Any C keeps
// the implied joint matrix positive semidefinite.
struct AttackParameters {
  Matrix Z;  // n x m
  Matrix C;  // n x n
};

struct SolveOptions {
  // The iteration always runs its full budget (opportunistically stopping
  // only when an update reproduces the previous point bitwise); rel_tol
  // controls the convergence flag, not the stopping point, so converged
  // solutions keep polishing toward the fixed point.
  int max_iter = 200;
  double rel_tol = 1e-10;  // on the divergence change per iteration
};

struct AttackSolution {
  AttackParameters params;
  double j_star = 0.0;  // cost J at the final iterate
  double d_star = 0.0;  // j_star - 2n, clamped at 0 within kRootTol
  int iterations = 0;   // update steps actually performed
  int converged_at = -1;  // first step whose divergence change met rel_tol, -1 if none
  bool converged = false;
  double stationarity_residual = 0.0;
  std::vector<double> history;  // divergence at the start and after each step
  bool regularized = false;     // the inner matrix needed regularization at least once

  // Filled by solve():
  bool projected = false;             // relaxed solution was infeasible
  bool projection_fallback = false;   // projection had no positive eigenvalue to lean on
  double relaxed_cost = std::numeric_limits<double>::quiet_NaN();  // J of the relaxed closed form
  double eta = std::numeric_limits<double>::quiet_NaN();  // 100 (j_star / relaxed_cost - 1)
};

// The optimal forging rule: v | z=a is Gaussian with mean gain * a and
// covariance cond_cov.
struct AttackStrategy {
  Matrix gain;      // Z Kzz^{-1}
  Matrix cond_cov;  // C C*, Hermitian PSD
};

struct RelaxedSolution {
  Matrix Z;  // n x m
  Matrix X;  // n x n, Hermitian (candidate K_vv)
};

// Closed form minimizer of the cost with the positivity constraint dropped:
//   Z = Kxy* Kxx^{-1} Kxz (Kxz* Kxx^{-1} Kxz)^+ Kzz
//   X = Kyy - Kxy* Kxx^{-1/2} [I - P] Kxx^{-1/2} Kxy
// with P the orthogonal projector onto the range of Kxx^{-1/2} Kxz and ^+ the
// Moore-Penrose pseudo-inverse (singular values below 1e-12 of the largest
// treated as zero). Throws PreconditionError when Kxx is singular.
RelaxedSolution solve_relaxed(const JointChannelCovariance& K);

// True iff min eig(X - Z Kzz^{-1} Z*) >= -tol, i.e. the implied joint matrix
// is a genuine covariance.
bool is_feasible(const JointChannelCovariance& K, const Matrix& Z, const Matrix& X);

struct ProjectionResult {
  AttackParameters params;
  bool clipped = false;   // at least one eigenvalue was raised to epsilon
  bool fallback = false;  // no positive eigenvalue existed; fallback epsilon used
  double epsilon = 0.0;   // the floor applied to nonpositive eigenvalues
};

// Projects (Z, X) onto the feasible set: eigendecompose X - Z Kzz^{-1} Z*,
// replace nonpositive eigenvalues by epsilon = d_k / 100 (d_k the smallest
// positive eigenvalue), and take C as the Hermitian square root of the
// clipped matrix. When no positive eigenvalue exists, epsilon falls back to
// 1e-2 * max(1, mean diagonal of X). Z passes through unchanged.
ProjectionResult project_to_feasible(const JointChannelCovariance& K,
                                     const Matrix& Z, const Matrix& X);

// Cost J = -log det(K_xv K_xy^{-1}) + tr(K_xy^{-1} K_xv) of the joint (x, v)
// covariance implied by the parameters. +infinity when K_xv is singular.
double cost_J(const JointChannelCovariance& K, const AttackParameters& p);

// Same cost evaluated at a relaxed (Z, X) pair, where X stands in for K_vv.
double cost_J_relaxed(const JointChannelCovariance& K, const Matrix& Z, const Matrix& X);

// divergence_D = cost_J - 2n; equals the Gaussian KL divergence between the
// assembled (x, v) law and the legitimate (x, y) law.
double divergence_D(const JointChannelCovariance& K, const AttackParameters& p);

// Normalized residual of the two first-order stationarity conditions
//   (Kxz Kzz^{-1})* Delta_12 + Kzz^{-1} Z* Delta_22 = 0,   C* Delta_22 = 0,
// with Delta = K_xy^{-1} - K_xv^{-1}. Zero at any stationary point. Returns
// +infinity when K_xv is singular.
double stationarity_residual(const JointChannelCovariance& K, const AttackParameters& p);

// 2n x 2n joint covariance of (x, v).
Matrix assemble_xv(const JointChannelCovariance& K, const AttackParameters& p);

// Full (2n+m) x (2n+m) joint covariance of (x, v, z):
//   [ Kxx            Kxz Kzz^{-1} Z*  Kxz ]
//   [ Z Kzz^{-1} Kxz* Z Kzz^{-1} Z* + CC*  Z ]
//   [ Kxz*           Z*               Kzz ]
// Its inverse, when it exists, has a vanishing (x, v) block.
Matrix assemble_joint(const JointChannelCovariance& K, const AttackParameters& p);

AttackStrategy extract_strategy(const JointChannelCovariance& K, const AttackParameters& p);

// Raised when the iteration produces non-finite values; carries the last
// finite state.
struct SolverDivergence : NumericalError {
  SolverDivergence(const std::string& msg, AttackSolution last_state)
      : NumericalError(msg), last(std::move(last_state)) {}
  AttackSolution last;
};

// Fixed-point iteration
//   C*(k+1) = C*(k) M(k)^{-1} A
//   Z*(k+1) = Kzx Kxx^{-1} Kxy + B Kzz^{-1} Z*(k) M(k)^{-1} A
// with M(k) = Z(k) Kzz^{-1} B Kzz^{-1} Z*(k) + C(k) C*(k) and A, B the Schur
// complements above. When M is nearly singular (min eig < 1e-9 * trace) it is
// regularized by 1e-9 * trace * I and the solution flagged. The convergence
// flag fires at the first step with |D(k+1) - D(k)| <= rel_tol * max(1, |D(k)|).
AttackSolution iterate_fixed_point(const JointChannelCovariance& K, AttackParameters init,
                                   const SolveOptions& opts = {});

// Full pipeline: solve_relaxed -> is_feasible -> (project_to_feasible if
// needed) -> iterate_fixed_point. Also records the relaxed cost and the
// percentage increase eta = 100 (J* / J_cf - 1).
AttackSolution solve(const JointChannelCovariance& K, const SolveOptions& opts = {});

struct PerturbationReport {
  double j_star = 0.0;
  double min_j_found = 0.0;
  bool improved = false;          // some perturbed J < j_star - kRootTol
  std::vector<double> deltas;     // perturbed J minus j_star per trial; +inf when singular
  double scale = 0.0;
  std::uint64_t seed = 0;
};

// Evaluates the cost at (Z + dZ, C + dC) for `trials` Gaussian-direction
// perturbations with ||dZ|| = scale ||Z|| and ||dC|| = scale ||C||
// (Frobenius). Trial t draws from derive_seed(seed, t), dZ first.
PerturbationReport perturb_and_check(const JointChannelCovariance& K,
                                     const AttackSolution& sol, double scale,
                                     int trials, std::uint64_t seed);

}  // namespace authbound
