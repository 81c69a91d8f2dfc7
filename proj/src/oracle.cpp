#include "authbound/oracle.hpp"

#include <cmath>
#include <limits>

namespace authbound::oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double real_entry(const Matrix& M, const char* name) {
  if (std::abs(M(0, 0).imag()) > 1e-14 * (1.0 + std::abs(M(0, 0).real()))) {
    throw StructuralError(std::string("brute force oracle: ") + name +
                          " must be real valued");
  }
  return M(0, 0).real();
}

}  // namespace

GridMinimum brute_force_scalar(const JointChannelCovariance& K, const GridSpec& grid) {
  if (K.n() != 1 || K.m() != 1) {
    throw StructuralError("brute force oracle: model must be scalar (n = m = 1)");
  }
  if (!(grid.step > 0.0) || grid.z_hi < grid.z_lo || grid.c_hi < grid.c_lo) {
    throw StructuralError("brute force oracle: empty or malformed grid");
  }
  const auto count = [&](double lo, double hi) {
    return static_cast<long long>(std::floor((hi - lo) / grid.step)) + 1;
  };
  const long long nz = count(grid.z_lo, grid.z_hi);
  const long long nc = count(grid.c_lo, grid.c_hi);
  if (nz * nc > 100'000'000LL) {
    throw StructuralError("brute force oracle: grid exceeds 1e8 points");
  }

  const double kxx = real_entry(K.Kxx(), "Kxx");
  const double kxy = real_entry(K.Kxy(), "Kxy");
  const double kxz = real_entry(K.Kxz(), "Kxz");
  const double kyy = real_entry(K.Kyy(), "Kyy");
  const double kzz = real_entry(K.Kzz(), "Kzz");

  const double det_xy = kxx * kyy - kxy * kxy;
  if (!(det_xy > 0.0) || !(kxx > 0.0) || !(kzz > 0.0)) {
    throw PreconditionError("brute force oracle: (x,y) model is not positive definite");
  }

  // Scalar cost from first principles: K_xv = [kxx, y; y, kvv] with
  // y = kxz z / kzz and kvv = z^2 / kzz + c^2, against K_xy.
  const auto scalar_cost = [&](double z, double c) {
    const double y = kxz * z / kzz;
    const double kvv = z * z / kzz + c * c;
    const double det_xv = kxx * kvv - y * y;
    if (!(det_xv > 0.0)) return kInf;
    const double trace = (kyy * kxx - 2.0 * kxy * y + kxx * kvv) / det_xy;
    return -std::log(det_xv / det_xy) + trace;
  };

  GridMinimum best;
  best.j = kInf;
  for (long long iz = 0; iz < nz; ++iz) {
    const double z = grid.z_lo + static_cast<double>(iz) * grid.step;
    for (long long ic = 0; ic < nc; ++ic) {
      const double c = grid.c_lo + static_cast<double>(ic) * grid.step;
      const double j = scalar_cost(z, c);
      if (j < best.j) {
        best = {z, c, j};
      }
    }
  }
  return best;
}

GradientReport finite_difference_gradient(const JointChannelCovariance& K,
                                          const AttackParameters& p, double h_base) {
  const Eigen::Index n = K.n();
  const double j0 = cost_J(K, p);
  if (!std::isfinite(j0)) {
    throw NumericalError("finite differences: cost not finite at the base point");
  }

  // Quantities that do not change across probes. The cost of one probe is
  // J = tr(Kxy^{-1} Kxv) - log det Kxv + log det Kxy (the dimension term of
  // the divergence cancels against the +2n of the cost).
  Eigen::LLT<Matrix> llt_xy(hermitian_part(K.xy_joint()));
  if (llt_xy.info() != Eigen::Success) {
    throw PreconditionError("finite differences: K_[x;y] is not positive definite");
  }
  const double logdet_xy =
      2.0 * llt_xy.matrixLLT().diagonal().real().array().log().sum();
  const Matrix Kinv_xy = llt_xy.solve(Matrix::Identity(2 * n, 2 * n));
  const Matrix W = Eigen::LLT<Matrix>(hermitian_part(K.Kzz()))
                       .solve(Matrix::Identity(K.m(), K.m()));
  const Matrix KxzW = K.Kxz() * W;
  const Matrix Y0 = KxzW * p.Z.adjoint();
  const Matrix ZWZt0 = p.Z * W * p.Z.adjoint();
  const Matrix CCt0 = p.C * p.C.adjoint();

  const auto probe_cost = [&](const Matrix& Zp, const Matrix& Cp, bool z_changed,
                              bool c_changed) {
    const Matrix Y = z_changed ? Matrix(KxzW * Zp.adjoint()) : Y0;
    const Matrix ZWZt = z_changed ? Matrix(Zp * W * Zp.adjoint()) : ZWZt0;
    const Matrix CCt = c_changed ? Matrix(Cp * Cp.adjoint()) : CCt0;
    Matrix Kxv(2 * n, 2 * n);
    Kxv.block(0, 0, n, n) = K.Kxx();
    Kxv.block(0, n, n, n) = Y;
    Kxv.block(n, 0, n, n) = Y.adjoint();
    Kxv.block(n, n, n, n) = hermitian_part(ZWZt + CCt);
    Eigen::LLT<Matrix> llt(hermitian_part(Kxv));
    if (llt.info() != Eigen::Success) {
      return std::numeric_limits<double>::infinity();
    }
    const double logdet =
        2.0 * llt.matrixLLT().diagonal().real().array().log().sum();
    // tr(A B) = sum_ij A_ij B_ji
    const double trace = Kinv_xy.cwiseProduct(Kxv.transpose()).sum().real();
    return trace - logdet + logdet_xy;
  };

  GradientReport report;
  const auto probe = [&](Matrix AttackParameters::* field, const char* tag,
                         double h, bool is_z) {
    const Matrix& base = p.*field;
    for (Eigen::Index r = 0; r < base.rows(); ++r) {
      for (Eigen::Index c = 0; c < base.cols(); ++c) {
        for (int part = 0; part < 2; ++part) {
          const Complex delta = part == 0 ? Complex(h, 0.0) : Complex(0.0, h);
          Matrix plus = base;
          plus(r, c) += delta;
          Matrix minus = base;
          minus(r, c) -= delta;
          const double jp = is_z ? probe_cost(plus, p.C, true, false)
                                 : probe_cost(p.Z, plus, false, true);
          const double jm = is_z ? probe_cost(minus, p.C, true, false)
                                 : probe_cost(p.Z, minus, false, true);
          std::string label = std::string(tag) + "[" + std::to_string(r) + "," +
                              std::to_string(c) + "]" + (part == 0 ? ".re" : ".im");
          if (!std::isfinite(jp) || !std::isfinite(jm)) {
            throw NumericalError("finite differences: non-finite cost probing " + label);
          }
          report.labels.push_back(std::move(label));
          report.values.push_back((jp - jm) / (2.0 * h));
        }
      }
    }
  };
  probe(&AttackParameters::Z, "Z", h_base * (1.0 + p.Z.norm()), true);
  probe(&AttackParameters::C, "C", h_base * (1.0 + p.C.norm()), false);

  double sq = 0.0;
  for (double v : report.values) sq += v * v;
  report.norm = std::sqrt(sq);
  report.relative_norm = report.norm / (1.0 + std::abs(j0));
  return report;
}

double check_zero_block_inverse(const Matrix& M, Eigen::Index n, Eigen::Index m) {
  if (M.rows() != M.cols() || M.rows() != 2 * n + m || n < 1 || m < 1) {
    throw StructuralError("zero block check: matrix must be (2n+m) x (2n+m)");
  }

  // Permute to group the healthy (x, z) corner first, then eliminate it.
  const Eigen::Index g1 = n + m;
  Matrix P(g1, g1), Q(g1, n), R(n, n);
  P.block(0, 0, n, n) = M.block(0, 0, n, n);
  P.block(0, n, n, m) = M.block(0, 2 * n, n, m);
  P.block(n, 0, m, n) = M.block(2 * n, 0, m, n);
  P.block(n, n, m, m) = M.block(2 * n, 2 * n, m, m);
  Q.block(0, 0, n, n) = M.block(0, n, n, n);
  Q.block(n, 0, m, n) = M.block(2 * n, n, m, n);
  R = M.block(n, n, n, n);

  Eigen::LLT<Matrix> llt_p(hermitian_part(P));
  if (llt_p.info() != Eigen::Success) {
    throw PreconditionError("zero block check: matrix is not positive definite");
  }
  const Matrix PiQ = llt_p.solve(Q);
  const Matrix S = hermitian_part(R - Q.adjoint() * PiQ);
  Eigen::LLT<Matrix> llt_s(S);
  if (llt_s.info() != Eigen::Success) {
    throw PreconditionError("zero block check: matrix is singular");
  }
  const Matrix Si = llt_s.solve(Matrix::Identity(n, n));

  const Matrix B12 = -PiQ * Si;                                      // (x,z) rows, v columns
  const Matrix B11 = llt_p.solve(Matrix::Identity(g1, g1)) + PiQ * Si * PiQ.adjoint();
  const double inv_norm = std::sqrt(B11.squaredNorm() + 2.0 * B12.squaredNorm() +
                                    Si.squaredNorm());
  const double xv_norm = B12.topRows(n).norm();
  return xv_norm / inv_norm;
}

}  // namespace authbound::oracle
