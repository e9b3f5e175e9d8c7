#pragma once

#include <Eigen/Dense>

#include "amfloss/rng.hpp"

// Matrix-variate samplers: complex Gaussian, Wishart (Bartlett
// decomposition), matrix t, and matrix F, plus the Hermitian square root
// and the 2x2 block partition used by the detector analysis.
//
// All covariance/scale matrices are Hermitian positive definite and carried
// by the HermitianPd wrapper, which validates Hermitian symmetry on
// construction and enforces positive definiteness when factorized.

namespace amfloss {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

class HermitianPd {
 public:
  // Validates that m is Hermitian within a relative tolerance and stores the
  // exactly symmetrized matrix.  Positive definiteness is checked wherever a
  // factorization is taken.
  explicit HermitianPd(ComplexMatrix m);

  static HermitianPd identity(Eigen::Index n);

  const ComplexMatrix& mat() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

  // Lower Cholesky factor; throws std::runtime_error if not positive
  // definite to working precision.
  ComplexMatrix cholesky() const;

 private:
  ComplexMatrix m_;
};

struct PartitionedF {
  ComplexMatrix f11;  // r x r
  ComplexMatrix f12;  // r x (p-r)
  ComplexMatrix f21;  // (p-r) x r
  ComplexMatrix f22;  // (p-r) x (p-r)
};

// X ~ CN_{p,n}(mean, row_cov, col_cov): mean + A Z B^H with A A^H = row_cov,
// B B^H = col_cov and Z iid CN(0,1).
ComplexMatrix sample_complex_gaussian_matrix(const ComplexMatrix& mean,
                                             const HermitianPd& row_cov,
                                             const HermitianPd& col_cov,
                                             RngStream& stream);

// W ~ CW_p(dof, scale) via the Bartlett decomposition: W = (L A)(L A)^H with
// L the Cholesky factor of scale and A lower triangular with
// |a_ii|^2 ~ CChi2_{dof-i+1} and standard complex normal subdiagonal.
// Requires dof >= p so that W is positive definite almost surely.
HermitianPd sample_complex_wishart(int dof, const HermitianPd& scale,
                                   RngStream& stream);

// X ~ CT_{p,n}(nu_param, mean, sigma, omega): mean + (W^{-1/2})^H Y with
// W ~ CW_p(nu_param + p - 1, sigma^{-1}) and Y ~ CN_{p,n}(0, I, omega).
// Requires nu_param >= 1.
ComplexMatrix sample_complex_matrix_t(int nu_param, const ComplexMatrix& mean,
                                      const HermitianPd& sigma,
                                      const HermitianPd& omega,
                                      RngStream& stream);

// F ~ CF_p(n1, n2) = S1^{1/2} S2^{-1} S1^{1/2} with S1 ~ CW_p(n1, I),
// S2 ~ CW_p(n2, I) independent, and S1^{1/2} the Hermitian square root.
// Requires n1 >= p and n2 >= p.
HermitianPd sample_complex_f(Eigen::Index p, int n1, int n2, RngStream& stream);

// Hermitian square root via eigendecomposition; throws std::runtime_error if
// the matrix is numerically singular (relative eigenvalue below 1e-12).
ComplexMatrix hermitian_sqrt(const HermitianPd& m);

// Split f into blocks with leading square block of size r (0 < r < p).
PartitionedF partition_f(const HermitianPd& f, Eigen::Index r);

// Schur complement F11 - F12 F22^{-1} F21 of the trailing block.
HermitianPd schur_f(const PartitionedF& pf);

}  // namespace amfloss
