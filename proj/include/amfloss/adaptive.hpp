#pragma once

#include "amfloss/matvar.hpp"
#include "amfloss/rng.hpp"

// Adaptive matched filter and Kelly detector statistics, computed directly
// from simulated data matrices: the clairvoyant and sample-covariance
// weight vectors, the SNR loss rho, and the Kelly quadratic forms
// (s1, s2, beta, t_tilde).  simulate_direct() draws one full trial at the
// matrix level; the chi-square representations in represent.hpp must agree
// with it in distribution.

namespace amfloss {

// Scenario geometry and training-distribution parameters.
//   n_channels (N) >= 2, k_training (K) >= N, nu >= N + 1, mu > 0,
//   snr_bar >= 0 (target SNR |alpha|^2 v^H Sigma^{-1} v under H1).
struct ScenarioParams {
  int n_channels = 0;
  int k_training = 0;
  int nu = 0;
  double mu = 0.0;
  double snr_bar = 0.0;

  // The calibration that keeps the training covariance comparable across
  // nu: mu = nu - N.
  static double default_mu(int nu, int n_channels);

  void validate() const;
};

// True interference covariance and steering vector.  The target amplitude
// under H1 is derived from ScenarioParams::snr_bar.
struct SignalModel {
  HermitianPd sigma;
  ComplexVector v;
};

enum class TrainingDistribution { gaussian, student };
enum class Hypothesis { h0, h1 };

// One simulated trial's statistics.
struct TrialStatistics {
  double rho = 0.0;      // SNR loss of the sample-covariance filter
  double beta = 0.0;     // Kelly loss factor, in (0, 1]
  double t_tilde = 0.0;  // Kelly detection statistic, >= 0
};

// Clairvoyant filter w = Sigma^{-1} v / (v^H Sigma^{-1} v).
ComplexVector optimal_weights(const SignalModel& model);

// Sample covariance matrix S = X X^H of a p x K training matrix; requires
// K >= p so that S is almost surely positive definite.
HermitianPd scm(const ComplexMatrix& x_train);

// Adaptive filter w = S^{-1} v / (v^H S^{-1} v).
ComplexVector amf_weights(const HermitianPd& s, const ComplexVector& v);

// SNR loss rho(w) = |w^H v|^2 / ((v^H Sigma^{-1} v) (w^H Sigma w)) in (0, 1].
double snr_loss(const ComplexVector& w, const SignalModel& model);

struct KellyStats {
  double s1 = 0.0;  // x^H S^{-1} x
  double s2 = 0.0;  // |x^H S^{-1} v|^2 / (v^H S^{-1} v)
  double beta = 0.0;
  double t_tilde = 0.0;
};

// Kelly quadratic forms of a test vector x against training data x_train:
// beta = 1 / (1 + s1 - s2) and t_tilde = s2 / (1 + s1 - s2).
KellyStats kelly_stats(const ComplexVector& x, const ComplexMatrix& x_train,
                       const ComplexVector& v);

// One direct matrix-level trial: draws the training matrix (Gaussian with
// covariance Sigma, or matrix-t with scale mu * Sigma and shape
// nu - N + 1), draws the test vector x ~ CN(alpha v, Sigma) with real
// alpha = sqrt(snr_bar / (v^H Sigma^{-1} v)) under H1 and alpha = 0 under
// H0, and returns (rho, beta, t_tilde).
TrialStatistics simulate_direct(const ScenarioParams& params,
                                const SignalModel& model,
                                TrainingDistribution training,
                                Hypothesis hypothesis, RngStream& stream);

}  // namespace amfloss
