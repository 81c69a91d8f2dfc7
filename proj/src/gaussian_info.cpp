#include "authbound/gaussian_info.hpp"

#include <cmath>
#include <limits>

namespace authbound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log det of a Hermitian PD matrix from its Cholesky factor.
double logdet_from_llt(const Eigen::LLT<Matrix>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().real().array().log().sum();
}

}  // namespace

namespace detail {

// Shared core of kl_gaussian / cost_J: tr(K1^{-1} K0) - log det K0
// + log det K1 - d, with +inf when K0 is singular. K1 must be PD.
double kl_core(const Matrix& K0, const Matrix& K1) {
  if (K0.rows() != K0.cols() || K1.rows() != K1.cols()) {
    throw StructuralError("kl divergence: covariance matrices must be square");
  }
  if (K0.rows() != K1.rows()) {
    throw StructuralError("kl divergence: dimension mismatch");
  }
  const Eigen::Index d = K0.rows();

  Eigen::LLT<Matrix> llt1(hermitian_part(K1));
  if (llt1.info() != Eigen::Success) {
    throw PreconditionError("kl divergence: second covariance is not positive definite");
  }

  // Cholesky is the fast path for log det K0; the eigendecomposition is only
  // needed to classify a failed factorization as singular.
  double logdet0;
  const Matrix K0h = hermitian_part(K0);
  Eigen::LLT<Matrix> llt0(K0h);
  if (llt0.info() == Eigen::Success) {
    logdet0 = logdet_from_llt(llt0);
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> es0(K0h, Eigen::EigenvaluesOnly);
    if (es0.eigenvalues().minCoeff() <= 0.0) {
      return kInf;
    }
    logdet0 = es0.eigenvalues().array().log().sum();
  }
  const double trace = llt1.solve(K0).trace().real();
  return trace - logdet0 + logdet_from_llt(llt1) - static_cast<double>(d);
}

}  // namespace detail

double kl_gaussian(const Matrix& K0, const Matrix& K1) {
  const double v = detail::kl_core(K0, K1);
  // The divergence is nonnegative for any PSD/PD pair; rounding can leave an
  // eps-sized negative when K0 ~ K1.
  return v < 0.0 ? 0.0 : v;
}

double binary_divergence(double phi, double psi) {
  if (!(phi >= 0.0 && phi <= 1.0) || !(psi >= 0.0 && psi <= 1.0)) {
    throw std::domain_error("binary divergence: arguments must lie in [0, 1]");
  }
  // term(a, b) = a log(a / b) with 0 log 0 = 0 and +inf when b = 0 < a.
  const auto term = [](double a, double b) {
    if (a == 0.0) return 0.0;
    if (b == 0.0) return kInf;
    return a * std::log(a / b);
  };
  const double v = term(phi, 1.0 - psi) + term(1.0 - phi, psi);
  // a KL divergence: nonnegative up to rounding near the zero curve
  return v < 0.0 ? 0.0 : v;
}

double beta_lower_bound(double alpha, double d_star) {
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw std::domain_error("beta_lower_bound: alpha must lie in [0, 1)");
  }
  if (!(d_star >= 0.0)) {
    throw std::domain_error("beta_lower_bound: d_star must be nonnegative");
  }
  const double hi_end = 1.0 - alpha;
  if (d_star == 0.0) return hi_end;
  // f(., alpha) decreases from f(0, alpha) = -log(alpha) to 0 at 1 - alpha.
  const double f0 = binary_divergence(0.0, alpha);
  if (d_star >= f0) return 0.0;  // bound already met at beta = 0 (alpha > 0 here)

  double lo = 0.0;       // f(lo) > d_star
  double hi = hi_end;    // f(hi) <= d_star
  double mid = hi;
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double f = binary_divergence(mid, alpha);
    if (std::abs(f - d_star) <= kRootTol) return mid;
    if (f > d_star) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;  // f(hi) <= d_star by the bracket invariant
}

ErrorRegionBound region_boundary(double d_star, const std::vector<double>& alpha_grid) {
  for (std::size_t i = 0; i < alpha_grid.size(); ++i) {
    if (!(alpha_grid[i] >= 0.0 && alpha_grid[i] < 1.0)) {
      throw StructuralError("region boundary: alpha grid must lie inside [0, 1)");
    }
    if (i > 0 && !(alpha_grid[i] > alpha_grid[i - 1])) {
      throw StructuralError("region boundary: alpha grid must be strictly increasing");
    }
  }
  ErrorRegionBound bound;
  bound.d_star = d_star;
  bound.points.reserve(alpha_grid.size());
  for (double alpha : alpha_grid) {
    bound.points.emplace_back(alpha, beta_lower_bound(alpha, d_star));
  }
  return bound;
}

}  // namespace authbound
