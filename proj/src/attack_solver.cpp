#include "authbound/attack_solver.hpp"

#include <cmath>
#include <sstream>

#include "authbound/gaussian_info.hpp"
#include "authbound/rng.hpp"

namespace authbound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_param_shapes(const JointChannelCovariance& K, const AttackParameters& p) {
  if (p.Z.rows() != K.n() || p.Z.cols() != K.m()) {
    throw StructuralError("attack parameters: Z must be n x m");
  }
  if (p.C.rows() != K.n() || p.C.cols() != K.n()) {
    throw StructuralError("attack parameters: C must be n x n");
  }
}

Eigen::LLT<Matrix> llt_of_pd(const Matrix& M, const char* what) {
  Eigen::LLT<Matrix> llt(hermitian_part(M));
  if (llt.info() != Eigen::Success) {
    throw PreconditionError(std::string(what) + " is not positive definite");
  }
  return llt;
}

// Kzz^{-1} materialized through the Cholesky solve, so every caller applies
// the identical floating-point operations.
Matrix kzz_inverse(const JointChannelCovariance& K) {
  auto llt = llt_of_pd(K.Kzz(), "Kzz");
  return llt.solve(Matrix::Identity(K.m(), K.m()));
}

// Pseudo-inverse of a Hermitian PSD matrix; eigenvalues below
// 1e-12 * (largest eigenvalue) are treated as zero.
Matrix pinv_psd(const Matrix& M) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(M));
  const auto& evals = es.eigenvalues();
  const double cutoff = 1e-12 * std::max(evals.maxCoeff(), 0.0);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(evals.size());
  for (Eigen::Index i = 0; i < evals.size(); ++i) {
    if (evals[i] > cutoff && evals[i] > 0.0) inv[i] = 1.0 / evals[i];
  }
  return es.eigenvectors() * inv.cast<Complex>().asDiagonal() *
         es.eigenvectors().adjoint();
}

Matrix xv_from_blocks(const JointChannelCovariance& K, const Matrix& Y, const Matrix& Kvv) {
  const Eigen::Index n = K.n();
  Matrix Kxv(2 * n, 2 * n);
  Kxv.block(0, 0, n, n) = K.Kxx();
  Kxv.block(0, n, n, n) = Y;
  Kxv.block(n, 0, n, n) = Y.adjoint();
  Kxv.block(n, n, n, n) = hermitian_part(Kvv);
  return Kxv;
}

}  // namespace

RelaxedSolution solve_relaxed(const JointChannelCovariance& K) {
  Eigen::SelfAdjointEigenSolver<Matrix> es_xx(hermitian_part(K.Kxx()));
  if (es_xx.eigenvalues().minCoeff() <= K.psd_tol()) {
    throw PreconditionError("relaxed solution: Kxx is singular within tolerance");
  }
  const Matrix inv_sqrt_xx = es_xx.operatorInverseSqrt();
  const Matrix Kxx_inv_Kxz = llt_of_pd(K.Kxx(), "Kxx").solve(K.Kxz());
  const Matrix gram = hermitian_part(K.Kxz().adjoint() * Kxx_inv_Kxz);
  const Matrix gram_pinv = pinv_psd(gram);

  RelaxedSolution out;
  out.Z = K.Kxy().adjoint() * Kxx_inv_Kxz * gram_pinv * K.Kzz();
  const Matrix proj = inv_sqrt_xx * K.Kxz() * gram_pinv * K.Kxz().adjoint() * inv_sqrt_xx;
  const Matrix inner = Matrix::Identity(K.n(), K.n()) - proj;
  out.X = hermitian_part(K.Kyy() - K.Kxy().adjoint() * inv_sqrt_xx * inner * inv_sqrt_xx * K.Kxy());
  return out;
}

bool is_feasible(const JointChannelCovariance& K, const Matrix& Z, const Matrix& X) {
  if (Z.rows() != K.n() || Z.cols() != K.m() || X.rows() != K.n() || X.cols() != K.n()) {
    throw StructuralError("is_feasible: inconsistent shapes");
  }
  const Matrix W = kzz_inverse(K);
  const Matrix S = hermitian_part(X - Z * W * Z.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(S, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -K.psd_tol();
}

ProjectionResult project_to_feasible(const JointChannelCovariance& K,
                                     const Matrix& Z, const Matrix& X) {
  if (Z.rows() != K.n() || Z.cols() != K.m() || X.rows() != K.n() || X.cols() != K.n()) {
    throw StructuralError("project_to_feasible: inconsistent shapes");
  }
  const Matrix W = kzz_inverse(K);
  const Matrix S = hermitian_part(X - Z * W * Z.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(S);
  Eigen::VectorXd evals = es.eigenvalues();

  const double tol = K.psd_tol();
  double smallest_positive = 0.0;
  for (Eigen::Index i = 0; i < evals.size(); ++i) {
    // ascending order: the first entry above tolerance is d_k
    if (evals[i] > tol) {
      smallest_positive = evals[i];
      break;
    }
  }

  ProjectionResult out;
  if (smallest_positive > 0.0) {
    out.epsilon = smallest_positive / 100.0;
  } else {
    // no positive eigenvalue to derive epsilon from
    out.fallback = true;
    out.epsilon = 1e-2 * std::max(1.0, X.diagonal().real().mean());
  }
  for (Eigen::Index i = 0; i < evals.size(); ++i) {
    if (evals[i] <= tol) {
      evals[i] = out.epsilon;
      out.clipped = true;
    }
  }

  const Matrix sqrt_clipped = es.eigenvectors() *
                              evals.cwiseSqrt().cast<Complex>().asDiagonal() *
                              es.eigenvectors().adjoint();
  out.params.Z = Z;
  out.params.C = hermitian_part(sqrt_clipped);
  return out;
}

Matrix assemble_xv(const JointChannelCovariance& K, const AttackParameters& p) {
  check_param_shapes(K, p);
  const Matrix W = kzz_inverse(K);
  const Matrix WZt = W * p.Z.adjoint();
  const Matrix Y = K.Kxz() * WZt;
  const Matrix Kvv = p.Z * WZt + p.C * p.C.adjoint();
  return xv_from_blocks(K, Y, Kvv);
}

Matrix assemble_joint(const JointChannelCovariance& K, const AttackParameters& p) {
  check_param_shapes(K, p);
  const Eigen::Index n = K.n();
  const Eigen::Index m = K.m();
  const Matrix W = kzz_inverse(K);
  const Matrix WZt = W * p.Z.adjoint();
  const Matrix Y = K.Kxz() * WZt;
  const Matrix Kvv = hermitian_part(p.Z * WZt + p.C * p.C.adjoint());

  Matrix M(2 * n + m, 2 * n + m);
  M.block(0, 0, n, n) = K.Kxx();
  M.block(0, n, n, n) = Y;
  M.block(0, 2 * n, n, m) = K.Kxz();
  M.block(n, 0, n, n) = Y.adjoint();
  M.block(n, n, n, n) = Kvv;
  M.block(n, 2 * n, n, m) = p.Z;
  M.block(2 * n, 0, m, n) = K.Kxz().adjoint();
  M.block(2 * n, n, m, n) = p.Z.adjoint();
  M.block(2 * n, 2 * n, m, m) = K.Kzz();
  return M;
}

double cost_J(const JointChannelCovariance& K, const AttackParameters& p) {
  return detail::kl_core(assemble_xv(K, p), K.xy_joint()) + 2.0 * static_cast<double>(K.n());
}

double cost_J_relaxed(const JointChannelCovariance& K, const Matrix& Z, const Matrix& X) {
  if (Z.rows() != K.n() || Z.cols() != K.m() || X.rows() != K.n() || X.cols() != K.n()) {
    throw StructuralError("cost_J_relaxed: inconsistent shapes");
  }
  const Matrix W = kzz_inverse(K);
  const Matrix Y = K.Kxz() * (W * Z.adjoint());
  return detail::kl_core(xv_from_blocks(K, Y, X), K.xy_joint()) +
         2.0 * static_cast<double>(K.n());
}

double divergence_D(const JointChannelCovariance& K, const AttackParameters& p) {
  return detail::kl_core(assemble_xv(K, p), K.xy_joint());
}

double stationarity_residual(const JointChannelCovariance& K, const AttackParameters& p) {
  const Eigen::Index n = K.n();
  const Matrix Kxv = assemble_xv(K, p);
  const Matrix Kxy = K.xy_joint();

  Eigen::LLT<Matrix> llt_xv(hermitian_part(Kxv));
  if (llt_xv.info() != Eigen::Success) return kInf;
  const Matrix eye = Matrix::Identity(2 * n, 2 * n);
  const Matrix delta = hermitian_part(llt_of_pd(Kxy, "K_[x;y]").solve(eye) - llt_xv.solve(eye));
  const Matrix d12 = delta.block(0, n, n, n);
  const Matrix d22 = delta.block(n, n, n, n);

  auto llt_zz = llt_of_pd(K.Kzz(), "Kzz");
  const Matrix t1 = llt_zz.solve(K.Kxz().adjoint() * d12);  // (Kxz Kzz^{-1})* Delta_12
  const Matrix t2 = llt_zz.solve(p.Z.adjoint() * d22);      // Kzz^{-1} Z* Delta_22
  const double r1 = (t1 + t2).norm() / (1.0 + t1.norm() + t2.norm());

  const Matrix t3 = p.C.adjoint() * d22;
  const double r2 = t3.norm() / (1.0 + p.C.norm() * d22.norm());
  return std::max(r1, r2);
}

AttackStrategy extract_strategy(const JointChannelCovariance& K, const AttackParameters& p) {
  check_param_shapes(K, p);
  AttackStrategy s;
  s.gain = llt_of_pd(K.Kzz(), "Kzz").solve(p.Z.adjoint()).adjoint();  // Z Kzz^{-1}
  s.cond_cov = hermitian_part(p.C * p.C.adjoint());
  return s;
}

AttackSolution iterate_fixed_point(const JointChannelCovariance& K, AttackParameters init,
                                   const SolveOptions& opts) {
  check_param_shapes(K, init);
  if (opts.max_iter < 1) throw StructuralError("iterate: max_iter must be at least 1");

  const Eigen::Index n = K.n();
  const Matrix A = schur_A(K);
  const Matrix B = schur_B(K);
  const Matrix W = kzz_inverse(K);
  const Matrix WBW = hermitian_part(W * B * W);
  const Matrix G_adj = K.Kxy().adjoint() * llt_of_pd(K.Kxx(), "Kxx").solve(K.Kxz());
  const Matrix Kxy_joint = K.xy_joint();

  const auto divergence = [&](const Matrix& Z, const Matrix& C) {
    const Matrix WZt = W * Z.adjoint();
    const Matrix Y = K.Kxz() * WZt;
    return detail::kl_core(xv_from_blocks(K, Y, Z * WZt + C * C.adjoint()), Kxy_joint);
  };

  AttackSolution sol;
  Matrix Z = std::move(init.Z);
  Matrix C = std::move(init.C);
  double d_prev = divergence(Z, C);
  if (!std::isfinite(d_prev)) {
    throw NumericalError("iterate: divergence is not finite at the starting point");
  }
  sol.history.push_back(d_prev);

  for (int k = 1; k <= opts.max_iter; ++k) {
    Matrix M = hermitian_part(Z * WBW * Z.adjoint() + C * C.adjoint());
    const double trace = M.trace().real();
    if (!std::isfinite(trace) || trace <= 0.0) {
      sol.params = {Z, C};
      throw SolverDivergence("iterate: inner matrix degenerate at iteration " +
                                 std::to_string(k),
                             sol);
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(M);
    Eigen::VectorXd evals = es.eigenvalues();
    const double floor = kPsdTolBase * trace;
    if (evals.minCoeff() < floor) {
      evals.array() += floor;  // M + floor * I
      sol.regularized = true;
    }
    const Matrix Minv = es.eigenvectors() * evals.cwiseInverse().cast<Complex>().asDiagonal() *
                        es.eigenvectors().adjoint();

    // Adjoint form of the update equations (A, M, W, B Hermitian).
    const Matrix AMinv = A * Minv;
    Matrix C_next = AMinv * C;
    Matrix Z_next = G_adj + AMinv * (Z * W * B);

    const double d_next = divergence(Z_next, C_next);
    if (!std::isfinite(d_next) || !C_next.allFinite() || !Z_next.allFinite()) {
      sol.params = {Z, C};
      sol.j_star = d_prev + 2.0 * static_cast<double>(n);
      sol.d_star = d_prev;
      throw SolverDivergence("iterate: non-finite values at iteration " + std::to_string(k) +
                                 " (last finite divergence " + std::to_string(d_prev) + ")",
                             sol);
    }

    sol.history.push_back(d_next);
    sol.iterations = k;
    if (sol.converged_at < 0 &&
        std::abs(d_next - d_prev) <= opts.rel_tol * std::max(1.0, std::abs(d_prev))) {
      sol.converged_at = k;
    }
    const bool fixed_point = (Z_next == Z) && (C_next == C);
    Z = std::move(Z_next);
    C = std::move(C_next);
    d_prev = d_next;
    if (fixed_point) break;  // bitwise stationary, nothing further can change
  }

  sol.converged = sol.converged_at >= 0;
  sol.params = {std::move(Z), std::move(C)};
  sol.j_star = d_prev + 2.0 * static_cast<double>(n);
  sol.d_star = (d_prev < 0.0 && d_prev >= -kRootTol) ? 0.0 : d_prev;
  sol.stationarity_residual = stationarity_residual(K, sol.params);
  return sol;
}

AttackSolution solve(const JointChannelCovariance& K, const SolveOptions& opts) {
  const RelaxedSolution relaxed = solve_relaxed(K);
  const double j_cf = cost_J_relaxed(K, relaxed.Z, relaxed.X);

  AttackParameters init;
  bool projected = false;
  bool fallback = false;
  if (is_feasible(K, relaxed.Z, relaxed.X)) {
    // Factor the Schur complement directly; eps-sized negatives are floored.
    const Matrix W = kzz_inverse(K);
    const Matrix S = hermitian_part(relaxed.X - relaxed.Z * W * relaxed.Z.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(S);
    const Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
    init.Z = relaxed.Z;
    init.C = hermitian_part(es.eigenvectors() * clipped.cwiseSqrt().cast<Complex>().asDiagonal() *
                            es.eigenvectors().adjoint());
  } else {
    ProjectionResult proj = project_to_feasible(K, relaxed.Z, relaxed.X);
    init = std::move(proj.params);
    projected = true;
    fallback = proj.fallback;
  }

  AttackSolution sol = iterate_fixed_point(K, std::move(init), opts);
  sol.projected = projected;
  sol.projection_fallback = fallback;
  sol.relaxed_cost = j_cf;
  sol.eta = 100.0 * (sol.j_star / j_cf - 1.0);
  return sol;
}

PerturbationReport perturb_and_check(const JointChannelCovariance& K,
                                     const AttackSolution& sol, double scale,
                                     int trials, std::uint64_t seed) {
  if (trials < 0) throw StructuralError("perturb: trials must be nonnegative");
  if (scale < 0.0) throw StructuralError("perturb: scale must be nonnegative");

  PerturbationReport report;
  report.j_star = sol.j_star;
  report.min_j_found = sol.j_star;
  report.scale = scale;
  report.seed = seed;
  report.deltas.reserve(static_cast<std::size_t>(trials));

  const double z_norm = sol.params.Z.norm();
  const double c_norm = sol.params.C.norm();
  const Matrix Kxy_joint = K.xy_joint();
  const Matrix W = kzz_inverse(K);

  for (int t = 0; t < trials; ++t) {
    GaussianSource source(derive_seed(seed, static_cast<std::uint64_t>(t)));
    Matrix dZ = source.matrix(K.n(), K.m(), true);
    Matrix dC = source.matrix(K.n(), K.n(), true);
    const double dz_norm = dZ.norm();
    const double dc_norm = dC.norm();
    dZ = (dz_norm > 0.0) ? Matrix(dZ * (scale * z_norm / dz_norm)) : Matrix::Zero(K.n(), K.m());
    dC = (dc_norm > 0.0) ? Matrix(dC * (scale * c_norm / dc_norm)) : Matrix::Zero(K.n(), K.n());

    const Matrix Zp = sol.params.Z + dZ;
    const Matrix Cp = sol.params.C + dC;
    const Matrix WZt = W * Zp.adjoint();
    const Matrix Y = K.Kxz() * WZt;
    const double j = detail::kl_core(xv_from_blocks(K, Y, Zp * WZt + Cp * Cp.adjoint()),
                                     Kxy_joint) +
                     2.0 * static_cast<double>(K.n());
    report.deltas.push_back(j - sol.j_star);
    if (j < report.min_j_found) report.min_j_found = j;
  }
  report.improved = report.min_j_found < sol.j_star - kRootTol;
  return report;
}

}  // namespace authbound
