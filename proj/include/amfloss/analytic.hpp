#pragma once

#include <functional>

// Closed-form densities, moments and the special functions they need.
//
// Everything here is deterministic scalar math: the Gauss hypergeometric
// function 2F1 (series plus Pfaff/Euler transformations with an
// Euler-integral quadrature fallback), a 3F2 at unit argument, adaptive
// Gauss-Kronrod quadrature, and the SNR-loss / detector densities for
// Gaussian and Student-trained adaptive filters.
//
// Conventions: N = number of channels, K = number of training samples,
// nu = Student shape parameter.  The block densities (pdf_f22,
// pdf_t12_marginal) use the generic partitioned-F parameters (p, q, n):
// F ~ CF_p(q, n) partitioned with a trailing scalar block.

namespace amfloss {

struct SeriesResult {
  double value = 0.0;
  int terms_used = 0;
  bool converged = false;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = false;
};

// log Gamma(x) for x > 0.
double ln_gamma(double x);

// log Beta(a, b) for a, b > 0.
double ln_beta(double a, double b);

// Beta(a, b) computed in log space.
double beta_fn(double a, double b);

// Gauss hypergeometric 2F1(a, b; c; x) for x < 1 and c > 0.
// Direct series for small |x|; Pfaff transformation for x < 0; Euler
// transformation near x = 1; adaptive quadrature of the Euler integral as
// a fallback when the series converges too slowly.
SeriesResult hyp2f1(double a, double b, double c, double x);

// 3F2(a1, a2, a3; b1, b2; 1).  Requires the convergence margin
// b1 + b2 - a1 - a2 - a3 > 0.
SeriesResult hyp3f2_unit(double a1, double a2, double a3, double b1, double b2);

// Adaptive Gauss-Kronrod (G7, K15) quadrature of f over [a, b].
QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, double rel_tol = 1e-9,
                           double abs_tol = 0.0);

// ----- SNR-loss densities and moments -------------------------------------

// Density of the SNR loss rho conditioned on the covariance-mismatch
// variate F1, for K >= N >= 2.
double pdf_rho_given_f1(double rho, double f1, int n, int k);

// Marginal density of rho under Student training with shape nu.
double pdf_rho_student(double rho, int n, int k, int nu);

// Density of the mismatch variate F1 (ratio of complex chi-squares with
// K - N + 1 and nu degrees of freedom).
double pdf_f1(double f1, int n, int k, int nu);

// Density of the Gaussian-case loss factor F2: rho_gaussian = 1/(1 + F2).
double pdf_f2(double f2, int n, int k);

// Conditional and marginal means of rho.
double mean_rho_given_f1(double f1, int n, int k);
double mean_rho_student(int n, int k, int nu);
double mean_rho_gaussian(int n, int k);

// ----- Partitioned complex-F block densities -------------------------------

// Density of the trailing scalar diagonal block F22 of F ~ CF_p(q, n)
// (an F-tilde(q, n - p + 1) law).
double pdf_f22(double f, int p, int q, int n);

// Marginal density of t12 = F12 / F22 on the complex (p-1)-space,
// evaluated at squared norm |t12|^2 = norm_sq.
double pdf_t12_marginal(double norm_sq, int p, int q, int n);

// Radial density of the scalar |t12|^2 (the marginal above folded with the
// complex spherical shell volume), suitable for histogram comparison.
double pdf_t12_norm_sq(double s, int p, int q, int n);

// ----- False-alarm calibration ---------------------------------------------

// Detection threshold giving false-alarm probability pfa for the Kelly
// statistic under Gaussian training: eta = pfa^(-1/(K-N+1)) - 1.
double gaussian_pfa_threshold(double pfa, int n, int k);

namespace detail {

// Individual 2F1 evaluation routes, exposed for cross-validation: the
// transformations must agree wherever they all converge.
SeriesResult hyp2f1_series(double a, double b, double c, double x);
SeriesResult hyp2f1_pfaff(double a, double b, double c, double x);
SeriesResult hyp2f1_euler_transform(double a, double b, double c, double x);
SeriesResult hyp2f1_euler_integral(double a, double b, double c, double x);

// log of 2F1 for density composition where the value itself may overflow
// (for example near x = 1 with a negative convergence margin).
struct LnSeriesResult {
  double log_value = 0.0;
  bool converged = false;
};
LnSeriesResult hyp2f1_ln(double a, double b, double c, double x);

}  // namespace detail

}  // namespace amfloss
