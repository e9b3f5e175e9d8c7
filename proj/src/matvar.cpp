#include "amfloss/matvar.hpp"

#include <cmath>
#include <stdexcept>

namespace amfloss {

namespace {

constexpr double kHermitianTol = 1e-12;
constexpr double kSingularTol = 1e-12;

// Lower-triangular Bartlett factor A of a unit-scale complex Wishart with
// dof degrees of freedom: |a_ii|^2 ~ CChi2_{dof-i+1} (taken real positive)
// and strictly-lower entries iid CN(0,1).
ComplexMatrix bartlett_factor(Eigen::Index p, int dof, RngStream& stream) {
  ComplexMatrix a = ComplexMatrix::Zero(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    a(i, i) = std::sqrt(
        draw_complex_chi_square(dof - static_cast<int>(i), stream));
    for (Eigen::Index j = 0; j < i; ++j) {
      a(i, j) = stream.next_complex_normal();
    }
  }
  return a;
}

ComplexMatrix iid_complex_normal_matrix(Eigen::Index p, Eigen::Index n,
                                        RngStream& stream) {
  ComplexMatrix z(p, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < p; ++i) {
      z(i, j) = stream.next_complex_normal();
    }
  }
  return z;
}

ComplexMatrix hermitianized(const ComplexMatrix& m) {
  return 0.5 * (m + m.adjoint());
}

}  // namespace

HermitianPd::HermitianPd(ComplexMatrix m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw std::invalid_argument("HermitianPd: matrix must be square");
  }
  const double scale = m.cwiseAbs().maxCoeff();
  const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (scale > 0.0 && asym > kHermitianTol * scale) {
    throw std::invalid_argument("HermitianPd: matrix is not Hermitian");
  }
  m_ = hermitianized(m);
}

HermitianPd HermitianPd::identity(Eigen::Index n) {
  return HermitianPd(ComplexMatrix::Identity(n, n));
}

ComplexMatrix HermitianPd::cholesky() const {
  Eigen::LLT<ComplexMatrix> llt(m_);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("HermitianPd: matrix is not positive definite");
  }
  return llt.matrixL();
}

ComplexMatrix sample_complex_gaussian_matrix(const ComplexMatrix& mean,
                                             const HermitianPd& row_cov,
                                             const HermitianPd& col_cov,
                                             RngStream& stream) {
  const Eigen::Index p = row_cov.dim();
  const Eigen::Index n = col_cov.dim();
  if (mean.rows() != p || mean.cols() != n) {
    throw std::invalid_argument(
        "sample_complex_gaussian_matrix: mean shape must match covariances");
  }
  const ComplexMatrix a = row_cov.cholesky();
  const ComplexMatrix b = col_cov.cholesky();
  const ComplexMatrix z = iid_complex_normal_matrix(p, n, stream);
  return mean + a * z * b.adjoint();
}

HermitianPd sample_complex_wishart(int dof, const HermitianPd& scale,
                                   RngStream& stream) {
  const Eigen::Index p = scale.dim();
  if (dof < p) {
    throw std::invalid_argument("sample_complex_wishart: requires dof >= p");
  }
  const ComplexMatrix l = scale.cholesky();
  const ComplexMatrix b = l * bartlett_factor(p, dof, stream);
  return HermitianPd(b * b.adjoint());
}

ComplexMatrix sample_complex_matrix_t(int nu_param, const ComplexMatrix& mean,
                                      const HermitianPd& sigma,
                                      const HermitianPd& omega,
                                      RngStream& stream) {
  if (nu_param < 1) {
    throw std::invalid_argument("sample_complex_matrix_t: requires nu >= 1");
  }
  const Eigen::Index p = sigma.dim();
  const Eigen::Index n = omega.dim();
  if (mean.rows() != p || mean.cols() != n) {
    throw std::invalid_argument(
        "sample_complex_matrix_t: mean shape must match scales");
  }
  // W ~ CW_p(nu+p-1, sigma^{-1}) has square root G A where G = L^{-H} for
  // L = chol(sigma), so (W^{-1/2})^H Y = L (A^{-H} Y) without forming the
  // inverse of sigma explicitly.
  const ComplexMatrix l = sigma.cholesky();
  const ComplexMatrix a =
      bartlett_factor(p, nu_param + static_cast<int>(p) - 1, stream);
  ComplexMatrix y = iid_complex_normal_matrix(p, n, stream);
  if (!omega.mat().isIdentity(0.0)) {
    y = y * omega.cholesky().adjoint();
  }
  const ComplexMatrix u =
      a.adjoint().triangularView<Eigen::Upper>().solve(y);
  return mean + l * u;
}

HermitianPd sample_complex_f(Eigen::Index p, int n1, int n2,
                             RngStream& stream) {
  if (n1 < p || n2 < p) {
    throw std::invalid_argument("sample_complex_f: requires n1 >= p, n2 >= p");
  }
  const HermitianPd s1 = sample_complex_wishart(n1, HermitianPd::identity(p),
                                                stream);
  const ComplexMatrix a2 = bartlett_factor(p, n2, stream);
  const ComplexMatrix h = hermitian_sqrt(s1);
  // F = H S2^{-1} H = (A2^{-1} H)^H (A2^{-1} H) with S2 = A2 A2^H.
  const ComplexMatrix m = a2.triangularView<Eigen::Lower>().solve(h);
  return HermitianPd(m.adjoint() * m);
}

ComplexMatrix hermitian_sqrt(const HermitianPd& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(m.mat());
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("hermitian_sqrt: eigendecomposition failed");
  }
  const Eigen::VectorXd& vals = eig.eigenvalues();
  const double max_val = vals.maxCoeff();
  if (max_val <= 0.0 || vals.minCoeff() < kSingularTol * max_val) {
    throw std::runtime_error("hermitian_sqrt: matrix is numerically singular");
  }
  return hermitianized(eig.eigenvectors() *
                       vals.cwiseSqrt().asDiagonal() *
                       eig.eigenvectors().adjoint());
}

PartitionedF partition_f(const HermitianPd& f, Eigen::Index r) {
  const Eigen::Index p = f.dim();
  if (r <= 0 || r >= p) {
    throw std::invalid_argument("partition_f: requires 0 < r < p");
  }
  PartitionedF out;
  out.f11 = f.mat().topLeftCorner(r, r);
  out.f12 = f.mat().topRightCorner(r, p - r);
  out.f21 = f.mat().bottomLeftCorner(p - r, r);
  out.f22 = f.mat().bottomRightCorner(p - r, p - r);
  return out;
}

HermitianPd schur_f(const PartitionedF& pf) {
  const HermitianPd f22(pf.f22);
  Eigen::LLT<ComplexMatrix> llt(f22.mat());
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("schur_f: trailing block is not positive definite");
  }
  return HermitianPd(pf.f11 - pf.f12 * llt.solve(pf.f21));
}

}  // namespace amfloss
