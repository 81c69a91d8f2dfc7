#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "authbound/types.hpp"

namespace authbound {

// Joint second-order model of the authenticated template x (dim n), the
// legitimate second-phase estimate y (dim n) and the adversary observation z
// (dim m). Stores the six independent blocks of the (2n+m) x (2n+m) joint
// covariance
//
//   [ Kxx  Kxy  Kxz ]
//   [ Kxy* Kyy  Kyz ]
//   [ Kxz* Kyz* Kzz ]
//
// Immutable after construction; cheap to copy at desk scale.
class JointChannelCovariance {
 public:
  // Throws StructuralError when block shapes are inconsistent.
  static JointChannelCovariance from_blocks(Matrix Kxx, Matrix Kxy, Matrix Kxz,
                                            Matrix Kyy, Matrix Kyz, Matrix Kzz);

  Eigen::Index n() const { return n_; }
  Eigen::Index m() const { return m_; }

  const Matrix& Kxx() const { return Kxx_; }
  const Matrix& Kxy() const { return Kxy_; }
  const Matrix& Kxz() const { return Kxz_; }
  const Matrix& Kyy() const { return Kyy_; }
  const Matrix& Kyz() const { return Kyz_; }
  const Matrix& Kzz() const { return Kzz_; }

  // Full (2n+m) x (2n+m) matrix with mirrored lower blocks.
  Matrix assembled() const;

  // (n+m) x (n+m) joint covariance of (x, z); must be positive definite for
  // the solver to be applicable.
  Matrix xz_corner() const;

  // 2n x 2n joint covariance of (x, y).
  Matrix xy_joint() const;

  // Scale-aware PSD tolerance: 1e-9 * (1 + largest diagonal entry).
  double psd_tol() const;

 private:
  JointChannelCovariance() = default;
  Eigen::Index n_ = 0, m_ = 0;
  Matrix Kxx_, Kxy_, Kxz_, Kyy_, Kyz_, Kzz_;
};

struct Violation {
  std::string what;
  double magnitude;  // offending quantity, e.g. the most negative eigenvalue
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

// Checks the model invariants: diagonal blocks Hermitian, real nonnegative
// diagonal, assembled matrix PSD within tolerance, Kxx and Kzz strictly
// positive definite (both get inverted downstream). Empty report iff all
// hold.
ValidationReport validate(const JointChannelCovariance& K);

// Uncorrelated-channel scenario: all diagonal blocks identities,
// Kxy = sigma I, Kxz = rho I, Kyz = tau I, with m = n.
JointChannelCovariance build_identity_scenario(Eigen::Index n, Complex rho,
                                               Complex sigma, Complex tau);

// Default cross correlations for identity scenarios when the caller leaves
// them open: sigma = 0.9 and tau = rho * sigma (y and z both noisy views of
// x). Callers are expected to log the resolved values.
inline constexpr double kDefaultSigma = 0.9;
inline Complex default_tau(Complex rho, Complex sigma) { return rho * sigma; }

enum class WishartField { Real, Complex };

struct WishartDraw {
  JointChannelCovariance cov;
  std::uint64_t seed;  // base seed of the draw
  int attempts;        // resamples taken before the (x, z) corner was well conditioned
};

// Random correlated scenario: the assembled 3n x 3n matrix is W = A A* with
// A filled with iid zero-mean unit-variance entries (real field: N(0,1);
// complex field: CN(0,1)), then partitioned into the six blocks with m = n.
// Pure function of (n, seed, field). When the (x, z) corner is singular
// within tolerance the draw is repeated with an incremented sub-seed, at most
// 100 times, then NumericalError.
WishartDraw sample_wishart_scenario(Eigen::Index n, std::uint64_t seed,
                                    WishartField field);

// Residual covariances after linear regression on x.
Matrix schur_A(const JointChannelCovariance& K);  // Kyy - Kxy* Kxx^{-1} Kxy
Matrix schur_B(const JointChannelCovariance& K);  // Kzz - Kxz* Kxx^{-1} Kxz

enum class ScenarioKind { IdentityBlock, Wishart, ExplicitBlocks };

// Declarative description of a scenario, the unit stored in scenario files.
struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::IdentityBlock;
  Eigen::Index n = 1;
  Eigen::Index m = 1;
  Complex rho{0.0, 0.0};
  Complex sigma{kDefaultSigma, 0.0};
  Complex tau{0.0, 0.0};
  bool sigma_defaulted = true;  // true when sigma was not supplied explicitly
  bool tau_defaulted = true;
  std::uint64_t seed = 0;
  WishartField field = WishartField::Real;
  std::optional<JointChannelCovariance> blocks;  // ExplicitBlocks only

  // Identity spec with defaults resolved (and flagged as defaulted).
  static ScenarioSpec identity(Eigen::Index n, Complex rho,
                               std::optional<Complex> sigma = std::nullopt,
                               std::optional<Complex> tau = std::nullopt);
  static ScenarioSpec wishart(Eigen::Index n, std::uint64_t seed,
                              WishartField field = WishartField::Real);
};

// Materializes the spec. Throws StructuralError on inconsistent fields.
JointChannelCovariance build_scenario(const ScenarioSpec& spec);

}  // namespace authbound
