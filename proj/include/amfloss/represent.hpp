#pragma once

#include <optional>

#include "amfloss/matvar.hpp"
#include "amfloss/rng.hpp"

// Scalar stochastic representations of the detector statistics in terms of
// independent complex chi-square variates.  Each draw_* function must agree
// in distribution with the corresponding statistic computed by the direct
// matrix-level simulation in adaptive.hpp; that equivalence is the central
// cross-validation of the project.

namespace amfloss {

// Intermediate variates recorded for diagnostics.
struct RepAux {
  double f22 = 0.0;
  double gamma12 = 0.0;
  double x1_norm_sq = 0.0;
  double chi_nu_minus_1 = 0.0;
};

struct RepDraw {
  double value = 0.0;
  std::optional<RepAux> aux;
};

// Coupling choice for the K-N+2 chi-square in the denominator of the
// Student t_tilde representation: either an independent draw or the same
// draw as gamma12 from the t12 representation.  The default is selected
// empirically by closeness to the direct path (see run_verify_suite):
// sharing the draw reproduces the positive correlation between the
// numerator spread and the denominator quadratic form that the exact
// conditional law carries, and it recovers the Gaussian law as nu grows.
// An independent draw leaves a residual distortion (KS up to ~0.015 at
// K = 3N/2) that the direct path rejects.
enum class TtildeCoupling { independent_denominator, shared_denominator };

inline constexpr TtildeCoupling kDefaultTtildeCoupling =
    TtildeCoupling::shared_denominator;

// SNR loss under Student training:
// rho = [1 + (1 + X_a/X_b) X_c/X_d]^{-1} with X_a ~ CChi2_{K-N+1},
// X_b ~ CChi2_nu, X_c ~ CChi2_{N-1}, X_d ~ CChi2_{K-N+2}.
RepDraw draw_rho_student(int n, int k, int nu, RngStream& stream);

// Gaussian case: rho = [1 + X_c/X_d]^{-1}, a Beta(K-N+2, N-1) variate.
RepDraw draw_rho_gaussian(int n, int k, RngStream& stream);

// Kelly loss factor under Student training:
// beta = [1 + (X_{nu-1}/mu)(X_{N-1}/X_{K-N+2})]^{-1}.
RepDraw draw_beta_student(int n, int k, int nu, double mu, RngStream& stream);

// Gaussian case: beta = [1 + X_{N-1}/X_{K-N+2}]^{-1}.
RepDraw draw_beta_gaussian(int n, int k, RngStream& stream);

// Kelly statistic under Student training, built from F22 = X_nu/X_{K-N+1},
// gamma12 ~ CChi2_{K-N+2}, a shared x1_norm_sq ~ CChi2_{N-1} appearing in
// numerator and denominator, an independent CChi2_{nu-1}, and a noncentral
// CChi2_1 with noncentrality
//   delta = snr_bar / (1 + (1 + 1/F22) x1_norm_sq / gamma12).
RepDraw draw_ttilde_student(int n, int k, int nu, double mu, double snr_bar,
                            TtildeCoupling coupling, RngStream& stream);

// Gaussian case: t_tilde = CChi2_1(beta * snr_bar) / CChi2_{K-N+1} with
// beta drawn from the Gaussian loss-factor law.
RepDraw draw_ttilde_gaussian(int n, int k, double snr_bar, RngStream& stream);

// Conditional representation of the block ratio t12 = F12 / F22 given F22:
// (1 + 1/f22)^{1/2} n12 / sqrt(gamma12) with n12 ~ CN(0, I_{N-1}) and
// gamma12 ~ CChi2_{K-N+2}.
ComplexVector draw_t12_given_f22(int n, int k, double f22, RngStream& stream);

// Pure combiners, shared by the samplers and by coupling tests that supply
// their own chi-square draws.
double rho_student_from_parts(double chi_k_n_1, double chi_nu, double chi_n_1,
                              double chi_k_n_2);
double beta_student_from_parts(double chi_nu_1, double mu, double chi_n_1,
                               double chi_k_n_2);

}  // namespace amfloss
