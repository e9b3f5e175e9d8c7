#include "amfloss/adaptive.hpp"

#include <cmath>
#include <stdexcept>

namespace amfloss {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

struct KellyForms {
  double s1, s2, s1_minus_s2;
};

// Quadratic forms from the whitened vectors a = L^{-1} x, b = L^{-1} v,
// where L is the Cholesky factor of S.  Computing s1 - s2 as the squared
// norm of the projection residual keeps it exactly nonnegative.
KellyForms kelly_forms(const ComplexMatrix& chol_s, const ComplexVector& x,
                       const ComplexVector& v) {
  const auto lower = chol_s.triangularView<Eigen::Lower>();
  const ComplexVector a = lower.solve(x);
  const ComplexVector b = lower.solve(v);
  const double b_sq = b.squaredNorm();
  if (b_sq <= 0.0) {
    throw std::runtime_error("kelly_stats: v^H S^{-1} v is not positive");
  }
  const Complex proj = b.dot(a);  // b^H a
  KellyForms out;
  out.s1 = a.squaredNorm();
  out.s2 = std::norm(proj) / b_sq;
  out.s1_minus_s2 = (a - b * (proj / b_sq)).squaredNorm();
  return out;
}

KellyStats kelly_from_forms(const KellyForms& f) {
  KellyStats out;
  out.s1 = f.s1;
  out.s2 = f.s2;
  out.beta = 1.0 / (1.0 + f.s1_minus_s2);
  out.t_tilde = f.s2 * out.beta;
  return out;
}

}  // namespace

double ScenarioParams::default_mu(int nu, int n_channels) {
  return static_cast<double>(nu - n_channels);
}

void ScenarioParams::validate() const {
  require(n_channels >= 2, "ScenarioParams: requires N >= 2");
  require(k_training >= n_channels, "ScenarioParams: requires K >= N");
  require(nu >= n_channels + 1, "ScenarioParams: requires nu >= N + 1");
  require(mu > 0.0, "ScenarioParams: requires mu > 0");
  require(snr_bar >= 0.0, "ScenarioParams: requires snr_bar >= 0");
}

ComplexVector optimal_weights(const SignalModel& model) {
  require(model.v.size() == model.sigma.dim(),
          "optimal_weights: steering vector size must match covariance");
  Eigen::LLT<ComplexMatrix> llt(model.sigma.mat());
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("optimal_weights: covariance is not positive definite");
  }
  const ComplexVector siv = llt.solve(model.v);
  const double denom = model.v.dot(siv).real();
  if (denom <= 0.0) {
    throw std::runtime_error("optimal_weights: v^H Sigma^{-1} v is not positive");
  }
  return siv / denom;
}

HermitianPd scm(const ComplexMatrix& x_train) {
  require(x_train.cols() >= x_train.rows(),
          "scm: requires at least as many training samples as channels");
  return HermitianPd(x_train * x_train.adjoint());
}

ComplexVector amf_weights(const HermitianPd& s, const ComplexVector& v) {
  require(v.size() == s.dim(),
          "amf_weights: steering vector size must match covariance");
  Eigen::LLT<ComplexMatrix> llt(s.mat());
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("amf_weights: sample covariance is not positive definite");
  }
  const ComplexVector siv = llt.solve(v);
  const double denom = v.dot(siv).real();
  if (denom <= 0.0) {
    throw std::runtime_error("amf_weights: v^H S^{-1} v is not positive");
  }
  return siv / denom;
}

double snr_loss(const ComplexVector& w, const SignalModel& model) {
  require(w.size() == model.sigma.dim(),
          "snr_loss: weight vector size must match covariance");
  Eigen::LLT<ComplexMatrix> llt(model.sigma.mat());
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("snr_loss: covariance is not positive definite");
  }
  const double v_siv = model.v.dot(llt.solve(model.v)).real();
  const double w_sw = w.dot(model.sigma.mat() * w).real();
  if (w_sw <= 0.0 || v_siv <= 0.0) {
    throw std::runtime_error("snr_loss: degenerate quadratic form");
  }
  return std::norm(w.dot(model.v)) / (v_siv * w_sw);
}

KellyStats kelly_stats(const ComplexVector& x, const ComplexMatrix& x_train,
                       const ComplexVector& v) {
  require(x.size() == x_train.rows() && v.size() == x_train.rows(),
          "kelly_stats: vector sizes must match training matrix rows");
  const HermitianPd s = scm(x_train);
  return kelly_from_forms(kelly_forms(s.cholesky(), x, v));
}

TrialStatistics simulate_direct(const ScenarioParams& params,
                                const SignalModel& model,
                                TrainingDistribution training,
                                Hypothesis hypothesis, RngStream& stream) {
  params.validate();
  const int n = params.n_channels;
  const int k = params.k_training;
  require(model.sigma.dim() == n && model.v.size() == n,
          "simulate_direct: model dimensions must match scenario");

  // Training matrix.
  ComplexMatrix x_train;
  if (training == TrainingDistribution::gaussian) {
    x_train = sample_complex_gaussian_matrix(ComplexMatrix::Zero(n, k),
                                             model.sigma,
                                             HermitianPd::identity(k), stream);
  } else {
    const HermitianPd scale(params.mu * model.sigma.mat());
    x_train = sample_complex_matrix_t(params.nu - n + 1,
                                      ComplexMatrix::Zero(n, k), scale,
                                      HermitianPd::identity(k), stream);
  }
  const HermitianPd s = scm(x_train);
  const ComplexMatrix chol_s = s.cholesky();

  // SNR loss of the adaptive filter.
  const ComplexVector w = amf_weights(s, model.v);
  const double rho = snr_loss(w, model);

  // Test vector: x ~ CN(alpha v, Sigma), alpha real nonnegative from the
  // target SNR under H1.
  const ComplexMatrix chol_sigma = model.sigma.cholesky();
  ComplexVector noise(n);
  for (int i = 0; i < n; ++i) noise(i) = stream.next_complex_normal();
  ComplexVector x = chol_sigma * noise;
  if (hypothesis == Hypothesis::h1 && params.snr_bar > 0.0) {
    const double v_siv =
        model.v
            .dot(chol_sigma.triangularView<Eigen::Lower>()
                     .adjoint()
                     .solve(chol_sigma.triangularView<Eigen::Lower>().solve(
                         model.v)))
            .real();
    const double alpha = std::sqrt(params.snr_bar / v_siv);
    x += alpha * model.v;
  }

  const KellyStats ks = kelly_from_forms(kelly_forms(chol_s, x, model.v));
  TrialStatistics out;
  out.rho = rho;
  out.beta = ks.beta;
  out.t_tilde = ks.t_tilde;
  return out;
}

}  // namespace amfloss
