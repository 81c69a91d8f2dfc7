#pragma once

#include <string>
#include <vector>

#include "authbound/attack_solver.hpp"

// Independent desk-scale verifiers used before and alongside the main solver.
// Deliberately kept free of the solver's linear-algebra path: the scalar cost
// is evaluated from first principles on plain doubles.
namespace authbound::oracle {

struct GridSpec {
  double z_lo = -3.0, z_hi = 3.0;
  double c_lo = 0.0, c_hi = 3.0;
  double step = 1e-3;
};

struct GridMinimum {
  double z = 0.0;
  double c = 0.0;
  double j = 0.0;
};

// Exhaustive evaluation of the cost over the (z, c) grid for a real scalar
// (n = m = 1) model. Throws StructuralError when the model is not scalar
// real, the grid is empty, or it exceeds 1e8 points.
GridMinimum brute_force_scalar(const JointChannelCovariance& K, const GridSpec& grid);

struct GradientReport {
  std::vector<std::string> labels;  // "Z[i,j].re", "C[i,j].im", ...
  std::vector<double> values;       // central difference per real coordinate
  double norm = 0.0;
  double relative_norm = 0.0;  // norm / (1 + |J|)
};

// Central finite differences of the cost over every real coordinate of Z and
// C, step h = h_base * (1 + Frobenius norm of the matrix being probed).
// Throws NumericalError naming the coordinate when a probe is non-finite.
GradientReport finite_difference_gradient(const JointChannelCovariance& K,
                                          const AttackParameters& p,
                                          double h_base = 1e-6);

// Relative Frobenius norm of the (x, v) block of M^{-1} for a Hermitian
// positive definite M of dimension 2n + m (rows 0..n-1 = x, n..2n-1 = v,
// 2n..2n+m-1 = z). The inverse is formed by block elimination of the (x, z)
// corner, which keeps the computation accurate when the conditional
// covariance of v is nearly singular. Throws PreconditionError when M is not
// positive definite.
double check_zero_block_inverse(const Matrix& M, Eigen::Index n, Eigen::Index m);

}  // namespace authbound::oracle
