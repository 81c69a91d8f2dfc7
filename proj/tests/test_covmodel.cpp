#include <cmath>

#include "authbound/covmodel.hpp"
#include "authbound/rng.hpp"
#include "doctest.h"

using namespace authbound;

namespace {

double min_eig(const Matrix& M) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(M), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

TEST_CASE("identity scenario blocks") {
  const auto K = build_identity_scenario(2, {0.5, 0}, {0.5, 0}, {0.25, 0});
  CHECK((K.Kxz() - 0.5 * Matrix::Identity(2, 2)).norm() == 0.0);
  CHECK((K.Kzz() - Matrix::Identity(2, 2)).norm() == 0.0);
  CHECK((K.Kxy() - 0.5 * Matrix::Identity(2, 2)).norm() == 0.0);
  CHECK((K.Kyz() - 0.25 * Matrix::Identity(2, 2)).norm() == 0.0);

  const auto K0 = build_identity_scenario(1, {0, 0}, {0, 0}, {0, 0});
  CHECK((K0.assembled() - Matrix::Identity(3, 3)).norm() == 0.0);
}

TEST_CASE("validation") {
  SUBCASE("valid scalar scenario") {
    const auto K = build_identity_scenario(1, {0.3, 0}, {0.5, 0}, {0.2, 0});
    CHECK(validate(K).ok());
    CHECK(min_eig(K.assembled()) > 0.0);
  }
  SUBCASE("|sigma| > 1 violates PSD") {
    const auto K = build_identity_scenario(1, {0, 0}, {1.5, 0}, {0, 0});
    const auto report = validate(K);
    REQUIRE_FALSE(report.ok());
    bool found = false;
    for (const auto& v : report.violations) {
      if (v.what.find("PSD") != std::string::npos) {
        found = true;
        CHECK(v.magnitude == doctest::Approx(-0.5).epsilon(1e-12));
      }
    }
    CHECK(found);
  }
  SUBCASE("z statistically identical to x passes") {
    const auto K = build_identity_scenario(4, {1.0, 0}, {0.5, 0}, {0.5, 0});
    CHECK(validate(K).ok());
  }
  SUBCASE("block shape mismatch is a structural error") {
    const Matrix I2 = Matrix::Identity(2, 2);
    CHECK_THROWS_AS(JointChannelCovariance::from_blocks(I2, Matrix::Zero(2, 3), I2,
                                                        I2, I2, I2),
                    StructuralError);
  }
  SUBCASE("non-Hermitian diagonal block is reported") {
    Matrix bad = Matrix::Identity(2, 2);
    bad(0, 1) = Complex(0.5, 0);  // asymmetric
    bad(1, 0) = Complex(0.1, 0);
    const auto K = JointChannelCovariance::from_blocks(
        bad, Matrix::Zero(2, 2), Matrix::Zero(2, 2), Matrix::Identity(2, 2),
        Matrix::Zero(2, 2), Matrix::Identity(2, 2));
    CHECK_FALSE(validate(K).ok());
  }
}

TEST_CASE("wishart scenarios") {
  SUBCASE("deterministic in (n, seed, field)") {
    const auto a = sample_wishart_scenario(2, 42, WishartField::Real);
    const auto b = sample_wishart_scenario(2, 42, WishartField::Real);
    CHECK((a.cov.assembled() - b.cov.assembled()).norm() == 0.0);
    const auto c = sample_wishart_scenario(2, 43, WishartField::Real);
    CHECK((a.cov.assembled() - c.cov.assembled()).norm() > 0.0);
  }
  SUBCASE("golden regression of the seed to matrix mapping") {
    const auto d = sample_wishart_scenario(2, 42, WishartField::Real);
    CHECK(d.attempts == 0);
    CHECK(d.cov.Kxx()(0, 0).real() == doctest::Approx(6.5617830029823043).epsilon(1e-15));
    CHECK(d.cov.Kxy()(1, 0).real() == doctest::Approx(-7.211572425400302).epsilon(1e-15));
    CHECK(d.cov.Kzz()(1, 1).real() == doctest::Approx(7.4453321490376139).epsilon(1e-15));
    const auto dc = sample_wishart_scenario(2, 42, WishartField::Complex);
    CHECK(dc.cov.Kxz()(0, 1).real() == doctest::Approx(-2.4160731726417248).epsilon(1e-15));
    CHECK(dc.cov.Kxz()(0, 1).imag() == doctest::Approx(0.12160166345355364).epsilon(1e-15));
  }
  SUBCASE("complex field keeps diagonals real and nonnegative") {
    const auto d = sample_wishart_scenario(8, 7, WishartField::Complex);
    const Matrix W = d.cov.assembled();
    for (Eigen::Index i = 0; i < W.rows(); ++i) {
      CHECK(std::abs(W(i, i).imag()) < 1e-12);
      CHECK(W(i, i).real() >= 0.0);
    }
  }
  SUBCASE("assembled draw is PSD within tolerance") {
    const auto d = sample_wishart_scenario(4, 1, WishartField::Real);
    CHECK(min_eig(d.cov.assembled()) >= -d.cov.psd_tol());
  }
}

TEST_CASE("schur complements") {
  SUBCASE("identity scenario closed forms") {
    const auto K = build_identity_scenario(3, {0.4, 0}, {0.7, 0}, {0.28, 0});
    CHECK((schur_A(K) - (1 - 0.49) * Matrix::Identity(3, 3)).norm() < 1e-14);
    CHECK((schur_B(K) - (1 - 0.16) * Matrix::Identity(3, 3)).norm() < 1e-14);
  }
  SUBCASE("sigma = 0 gives A = Kyy") {
    const auto K = build_identity_scenario(2, {0.4, 0}, {0, 0}, {0, 0});
    CHECK((schur_A(K) - K.Kyy()).norm() < 1e-14);
  }
  SUBCASE("rho = 1 gives B = 0") {
    const auto K = build_identity_scenario(2, {1.0, 0}, {0.5, 0}, {0.5, 0});
    CHECK(schur_B(K).norm() < 1e-14);
  }
  SUBCASE("singular Kxx is a precondition error") {
    const Matrix Z2 = Matrix::Zero(2, 2);
    const auto K = JointChannelCovariance::from_blocks(Z2, Z2, Z2, Matrix::Identity(2, 2),
                                                       Z2, Matrix::Identity(2, 2));
    CHECK_THROWS_AS(schur_A(K), PreconditionError);
  }
}

// Every constructed scenario validates; Schur complements stay PSD.
TEST_CASE("wishart ensemble properties") {
  for (int t = 0; t < 1000; ++t) {
    const Eigen::Index n = 1 + t % 3;
    const auto d = sample_wishart_scenario(n, derive_seed(555, t), WishartField::Real);
    const auto report = validate(d.cov);
    CAPTURE(t);
    REQUIRE(report.ok());
    const double tol = d.cov.psd_tol();
    REQUIRE(min_eig(schur_A(d.cov)) >= -tol);
    REQUIRE(min_eig(schur_B(d.cov)) >= -tol);
  }
}

TEST_CASE("scenario specs") {
  const auto spec = ScenarioSpec::identity(4, {0.3, 0});
  CHECK(spec.sigma_defaulted);
  CHECK(spec.sigma == Complex(0.9, 0));
  CHECK(spec.tau_defaulted);
  CHECK(spec.tau == Complex(0.27, 0));
  CHECK(validate(build_scenario(spec)).ok());

  ScenarioSpec bad = spec;
  bad.m = 5;
  CHECK_THROWS_AS(build_scenario(bad), StructuralError);

  const auto wspec = ScenarioSpec::wishart(3, 11);
  const auto K = build_scenario(wspec);
  CHECK((K.assembled() - sample_wishart_scenario(3, 11, WishartField::Real).cov.assembled())
            .norm() == 0.0);
}
