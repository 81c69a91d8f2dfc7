#include "authbound/covmodel.hpp"

#include <cmath>
#include <sstream>

#include "authbound/rng.hpp"

namespace authbound {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw StructuralError(msg);
}

double min_eigenvalue(const Matrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

JointChannelCovariance JointChannelCovariance::from_blocks(Matrix Kxx, Matrix Kxy,
                                                           Matrix Kxz, Matrix Kyy,
                                                           Matrix Kyz, Matrix Kzz) {
  const Eigen::Index n = Kxx.rows();
  const Eigen::Index m = Kzz.rows();
  require(n >= 1, "covariance model: n must be at least 1");
  require(m >= 1, "covariance model: m must be at least 1");
  require(Kxx.cols() == n, "covariance model: Kxx must be n x n");
  require(Kyy.rows() == n && Kyy.cols() == n, "covariance model: Kyy must be n x n");
  require(Kzz.cols() == m, "covariance model: Kzz must be m x m");
  require(Kxy.rows() == n && Kxy.cols() == n, "covariance model: Kxy must be n x n");
  require(Kxz.rows() == n && Kxz.cols() == m, "covariance model: Kxz must be n x m");
  require(Kyz.rows() == n && Kyz.cols() == m, "covariance model: Kyz must be n x m");

  JointChannelCovariance K;
  K.n_ = n;
  K.m_ = m;
  K.Kxx_ = std::move(Kxx);
  K.Kxy_ = std::move(Kxy);
  K.Kxz_ = std::move(Kxz);
  K.Kyy_ = std::move(Kyy);
  K.Kyz_ = std::move(Kyz);
  K.Kzz_ = std::move(Kzz);
  return K;
}

Matrix JointChannelCovariance::assembled() const {
  Matrix K(2 * n_ + m_, 2 * n_ + m_);
  K.block(0, 0, n_, n_) = Kxx_;
  K.block(0, n_, n_, n_) = Kxy_;
  K.block(0, 2 * n_, n_, m_) = Kxz_;
  K.block(n_, 0, n_, n_) = Kxy_.adjoint();
  K.block(n_, n_, n_, n_) = Kyy_;
  K.block(n_, 2 * n_, n_, m_) = Kyz_;
  K.block(2 * n_, 0, m_, n_) = Kxz_.adjoint();
  K.block(2 * n_, n_, m_, n_) = Kyz_.adjoint();
  K.block(2 * n_, 2 * n_, m_, m_) = Kzz_;
  return K;
}

Matrix JointChannelCovariance::xz_corner() const {
  Matrix K(n_ + m_, n_ + m_);
  K.block(0, 0, n_, n_) = Kxx_;
  K.block(0, n_, n_, m_) = Kxz_;
  K.block(n_, 0, m_, n_) = Kxz_.adjoint();
  K.block(n_, n_, m_, m_) = Kzz_;
  return K;
}

Matrix JointChannelCovariance::xy_joint() const {
  Matrix K(2 * n_, 2 * n_);
  K.block(0, 0, n_, n_) = Kxx_;
  K.block(0, n_, n_, n_) = Kxy_;
  K.block(n_, 0, n_, n_) = Kxy_.adjoint();
  K.block(n_, n_, n_, n_) = Kyy_;
  return K;
}

double JointChannelCovariance::psd_tol() const {
  double max_diag = 0.0;
  max_diag = std::max(max_diag, Kxx_.diagonal().real().maxCoeff());
  max_diag = std::max(max_diag, Kyy_.diagonal().real().maxCoeff());
  max_diag = std::max(max_diag, Kzz_.diagonal().real().maxCoeff());
  return kPsdTolBase * (1.0 + max_diag);
}

std::string ValidationReport::to_string() const {
  if (ok()) return "ok";
  std::ostringstream os;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) os << "; ";
    os << violations[i].what << " (" << violations[i].magnitude << ")";
  }
  return os.str();
}

ValidationReport validate(const JointChannelCovariance& K) {
  ValidationReport report;
  const double tol = K.psd_tol();

  const auto check_hermitian = [&](const Matrix& M, const char* name) {
    const double dev = (M - M.adjoint()).norm();
    if (dev > tol) {
      report.violations.push_back({std::string(name) + " block is not Hermitian", dev});
    }
  };
  check_hermitian(K.Kxx(), "Kxx");
  check_hermitian(K.Kyy(), "Kyy");
  check_hermitian(K.Kzz(), "Kzz");

  const auto check_diagonal = [&](const Matrix& M, const char* name) {
    const double max_imag = M.diagonal().imag().cwiseAbs().maxCoeff();
    if (max_imag > tol) {
      report.violations.push_back({std::string(name) + " diagonal is not real", max_imag});
    }
    const double min_real = M.diagonal().real().minCoeff();
    if (min_real < -tol) {
      report.violations.push_back({std::string(name) + " diagonal has negative entries", min_real});
    }
  };
  check_diagonal(K.Kxx(), "Kxx");
  check_diagonal(K.Kyy(), "Kyy");
  check_diagonal(K.Kzz(), "Kzz");

  const double min_eig = min_eigenvalue(hermitian_part(K.assembled()));
  if (min_eig < -tol) {
    report.violations.push_back({"assembled matrix is not PSD", min_eig});
  }

  // The solver inverts Kxx and Kzz; both must be strictly positive definite.
  // The full (x,z) corner may be singular in legitimate scenarios (z = x).
  const double min_eig_xx = min_eigenvalue(hermitian_part(K.Kxx()));
  if (min_eig_xx <= tol) {
    report.violations.push_back({"Kxx is not positive definite", min_eig_xx});
  }
  const double min_eig_zz = min_eigenvalue(hermitian_part(K.Kzz()));
  if (min_eig_zz <= tol) {
    report.violations.push_back({"Kzz is not positive definite", min_eig_zz});
  }

  return report;
}

JointChannelCovariance build_identity_scenario(Eigen::Index n, Complex rho,
                                               Complex sigma, Complex tau) {
  require(n >= 1, "identity scenario: n must be at least 1");
  const Matrix eye = Matrix::Identity(n, n);
  return JointChannelCovariance::from_blocks(eye, sigma * eye, rho * eye, eye,
                                             tau * eye, eye);
}

WishartDraw sample_wishart_scenario(Eigen::Index n, std::uint64_t seed,
                                    WishartField field) {
  require(n >= 1, "wishart scenario: n must be at least 1");
  constexpr int kMaxAttempts = 100;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    GaussianSource source(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
    const Matrix A = source.matrix(3 * n, 3 * n, field == WishartField::Complex);
    const Matrix W = hermitian_part(A * A.adjoint());

    auto cov = JointChannelCovariance::from_blocks(
        W.block(0, 0, n, n), W.block(0, n, n, n), W.block(0, 2 * n, n, n),
        W.block(n, n, n, n), W.block(n, 2 * n, n, n), W.block(2 * n, 2 * n, n, n));

    if (min_eigenvalue(hermitian_part(cov.xz_corner())) > cov.psd_tol()) {
      return {std::move(cov), seed, attempt};
    }
  }
  throw NumericalError("wishart scenario: (x,z) corner singular after 100 resamples");
}

namespace {

Matrix schur_complement(const JointChannelCovariance& K, const Matrix& diag_block,
                        const Matrix& cross_block) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(K.Kxx()),
                                           Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() <= K.psd_tol()) {
    throw PreconditionError("schur complement: Kxx is singular within tolerance");
  }
  Eigen::LLT<Matrix> llt(hermitian_part(K.Kxx()));
  return hermitian_part(diag_block - cross_block.adjoint() * llt.solve(cross_block));
}

}  // namespace

Matrix schur_A(const JointChannelCovariance& K) {
  return schur_complement(K, K.Kyy(), K.Kxy());
}

Matrix schur_B(const JointChannelCovariance& K) {
  return schur_complement(K, K.Kzz(), K.Kxz());
}

ScenarioSpec ScenarioSpec::identity(Eigen::Index n, Complex rho,
                                    std::optional<Complex> sigma,
                                    std::optional<Complex> tau) {
  ScenarioSpec spec;
  spec.kind = ScenarioKind::IdentityBlock;
  spec.n = n;
  spec.m = n;
  spec.rho = rho;
  spec.sigma_defaulted = !sigma.has_value();
  spec.sigma = sigma.value_or(Complex(kDefaultSigma, 0.0));
  spec.tau_defaulted = !tau.has_value();
  spec.tau = tau.value_or(default_tau(rho, spec.sigma));
  return spec;
}

ScenarioSpec ScenarioSpec::wishart(Eigen::Index n, std::uint64_t seed, WishartField field) {
  ScenarioSpec spec;
  spec.kind = ScenarioKind::Wishart;
  spec.n = n;
  spec.m = n;
  spec.seed = seed;
  spec.field = field;
  return spec;
}

JointChannelCovariance build_scenario(const ScenarioSpec& spec) {
  switch (spec.kind) {
    case ScenarioKind::IdentityBlock:
      require(spec.m == spec.n, "identity scenario: m must equal n");
      return build_identity_scenario(spec.n, spec.rho, spec.sigma, spec.tau);
    case ScenarioKind::Wishart:
      require(spec.m == spec.n, "wishart scenario: m must equal n");
      return sample_wishart_scenario(spec.n, spec.seed, spec.field).cov;
    case ScenarioKind::ExplicitBlocks:
      require(spec.blocks.has_value(), "explicit scenario: blocks missing");
      return *spec.blocks;
  }
  throw StructuralError("scenario: unknown kind");
}

}  // namespace authbound
