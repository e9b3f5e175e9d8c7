#include "amfloss/represent.hpp"

#include <cmath>
#include <stdexcept>

namespace amfloss {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

void require_geometry(int n, int k) {
  require(n >= 2, "representation: requires N >= 2");
  require(k >= n, "representation: requires K >= N");
}

}  // namespace

double rho_student_from_parts(double chi_k_n_1, double chi_nu, double chi_n_1,
                              double chi_k_n_2) {
  return 1.0 / (1.0 + (1.0 + chi_k_n_1 / chi_nu) * chi_n_1 / chi_k_n_2);
}

double beta_student_from_parts(double chi_nu_1, double mu, double chi_n_1,
                               double chi_k_n_2) {
  return 1.0 / (1.0 + (chi_nu_1 / mu) * (chi_n_1 / chi_k_n_2));
}

RepDraw draw_rho_student(int n, int k, int nu, RngStream& stream) {
  require_geometry(n, k);
  require(nu >= 1, "draw_rho_student: requires nu >= 1");
  const double chi_k_n_1 = draw_complex_chi_square(k - n + 1, stream);
  const double chi_nu = draw_complex_chi_square(nu, stream);
  const double chi_n_1 = draw_complex_chi_square(n - 1, stream);
  const double chi_k_n_2 = draw_complex_chi_square(k - n + 2, stream);
  RepDraw out;
  out.value = rho_student_from_parts(chi_k_n_1, chi_nu, chi_n_1, chi_k_n_2);
  return out;
}

RepDraw draw_rho_gaussian(int n, int k, RngStream& stream) {
  require_geometry(n, k);
  const double chi_n_1 = draw_complex_chi_square(n - 1, stream);
  const double chi_k_n_2 = draw_complex_chi_square(k - n + 2, stream);
  RepDraw out;
  out.value = 1.0 / (1.0 + chi_n_1 / chi_k_n_2);
  return out;
}

RepDraw draw_beta_student(int n, int k, int nu, double mu, RngStream& stream) {
  require_geometry(n, k);
  require(nu >= 2, "draw_beta_student: requires nu >= 2");
  require(mu > 0.0, "draw_beta_student: requires mu > 0");
  const double chi_nu_1 = draw_complex_chi_square(nu - 1, stream);
  const double chi_n_1 = draw_complex_chi_square(n - 1, stream);
  const double chi_k_n_2 = draw_complex_chi_square(k - n + 2, stream);
  RepDraw out;
  out.value = beta_student_from_parts(chi_nu_1, mu, chi_n_1, chi_k_n_2);
  return out;
}

RepDraw draw_beta_gaussian(int n, int k, RngStream& stream) {
  require_geometry(n, k);
  const double chi_n_1 = draw_complex_chi_square(n - 1, stream);
  const double chi_k_n_2 = draw_complex_chi_square(k - n + 2, stream);
  RepDraw out;
  out.value = 1.0 / (1.0 + chi_n_1 / chi_k_n_2);
  return out;
}

RepDraw draw_ttilde_student(int n, int k, int nu, double mu, double snr_bar,
                            TtildeCoupling coupling, RngStream& stream) {
  require_geometry(n, k);
  require(nu >= 2, "draw_ttilde_student: requires nu >= 2");
  require(mu > 0.0, "draw_ttilde_student: requires mu > 0");
  require(snr_bar >= 0.0, "draw_ttilde_student: requires snr_bar >= 0");

  const double chi_nu = draw_complex_chi_square(nu, stream);
  const double chi_k_n_1 = draw_complex_chi_square(k - n + 1, stream);
  const double f22 = chi_nu / chi_k_n_1;
  const double gamma12 = draw_complex_chi_square(k - n + 2, stream);
  const double x1_norm_sq = draw_complex_chi_square(n - 1, stream);
  const double chi_nu_1 = draw_complex_chi_square(nu - 1, stream);
  const double denom_chi = (coupling == TtildeCoupling::shared_denominator)
                               ? gamma12
                               : draw_complex_chi_square(k - n + 2, stream);

  const double spread = 1.0 + (1.0 + 1.0 / f22) * x1_norm_sq / gamma12;
  const double delta = snr_bar / spread;
  const double numerator = (f22 / mu) * spread;
  const double denominator = 1.0 + (chi_nu_1 / mu) * (x1_norm_sq / denom_chi);

  RepDraw out;
  out.value = numerator / denominator *
              draw_noncentral_complex_chi_square_1(delta, stream);
  out.aux = RepAux{f22, gamma12, x1_norm_sq, chi_nu_1};
  return out;
}

RepDraw draw_ttilde_gaussian(int n, int k, double snr_bar, RngStream& stream) {
  require_geometry(n, k);
  require(snr_bar >= 0.0, "draw_ttilde_gaussian: requires snr_bar >= 0");
  const double beta = draw_beta_gaussian(n, k, stream).value;
  const double chi_k_n_1 = draw_complex_chi_square(k - n + 1, stream);
  RepDraw out;
  out.value =
      draw_noncentral_complex_chi_square_1(beta * snr_bar, stream) / chi_k_n_1;
  return out;
}

ComplexVector draw_t12_given_f22(int n, int k, double f22, RngStream& stream) {
  require_geometry(n, k);
  require(f22 > 0.0, "draw_t12_given_f22: requires f22 > 0");
  const double gamma12 = draw_complex_chi_square(k - n + 2, stream);
  const double scale = std::sqrt((1.0 + 1.0 / f22) / gamma12);
  ComplexVector t(n - 1);
  for (int i = 0; i < n - 1; ++i) {
    t(i) = scale * stream.next_complex_normal();
  }
  return t;
}

}  // namespace amfloss
