#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>

namespace authbound {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

// Shape mismatches and malformed inputs. Distinct from numeric invariant
// violations, which are reported through ValidationReport.
struct StructuralError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A numeric precondition does not hold (e.g. a block that must be positive
// definite is singular within tolerance).
struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An iterative computation produced non-finite values.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Base factor of the scale-aware PSD tolerance: tol = 1e-9 * (1 + max diag).
inline constexpr double kPsdTolBase = 1e-9;

inline Matrix hermitian_part(const Matrix& M) {
  return 0.5 * (M + M.adjoint());
}

}  // namespace authbound
