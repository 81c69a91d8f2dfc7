#pragma once

#include <utility>
#include <vector>

#include "authbound/types.hpp"

namespace authbound {

// Absolute tolerance on the binary divergence in root finding.
inline constexpr double kRootTol = 1e-12;

// KL divergence, in nats, between zero-mean circularly symmetric Gaussian
// laws with covariances K0 and K1 (complex convention, no 1/2 factor):
//
//   D = tr(K1^{-1} K0) - log det(K0 K1^{-1}) - d.
//
// Returns +infinity when K0 is singular (a value, not an error, so sweeps
// over degenerate scenarios keep running). Throws PreconditionError when K1
// is not positive definite, StructuralError on shape mismatch.
double kl_gaussian(const Matrix& K0, const Matrix& K1);

// Binary divergence
//   f(phi, psi) = phi log(phi / (1 - psi)) + (1 - phi) log((1 - phi) / psi)
// with the 0 log 0 = 0 convention; the KL divergence between Bernoulli laws
// of parameters phi and 1 - psi. Throws std::domain_error outside [0,1]^2.
double binary_divergence(double phi, double psi);

// Smallest beta in [0, 1 - alpha] with f(beta, alpha) <= d_star. f(., alpha)
// decreases monotonically on that interval, so bisection applies; when the
// result is interior, |f(beta, alpha) - d_star| <= kRootTol.
double beta_lower_bound(double alpha, double d_star);

namespace detail {
// Unclamped divergence core shared with the solver cost: tr(K1^{-1} K0)
// - log det K0 + log det K1 - d. +infinity when K0 is singular.
double kl_core(const Matrix& K0, const Matrix& K1);
}  // namespace detail

// Sampled boundary of the region { (alpha, beta) : f(beta, alpha) <= d_star }.
struct ErrorRegionBound {
  double d_star = 0.0;
  std::vector<std::pair<double, double>> points;  // (alpha, beta_low), beta_low non-increasing
};

// Applies beta_lower_bound pointwise. The grid must be strictly increasing
// inside [0, 1); otherwise StructuralError.
ErrorRegionBound region_boundary(double d_star, const std::vector<double>& alpha_grid);

}  // namespace authbound
