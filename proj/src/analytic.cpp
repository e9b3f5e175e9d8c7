#include "amfloss/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <stdexcept>
#include <vector>

namespace amfloss {

namespace {

constexpr double kSeriesTol = 1e-12;
constexpr int kMaxSeriesTerms = 1000000;

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// ----- Gauss-Kronrod (G7, K15) panel rule ----------------------------------

// Kronrod nodes on [0, 1] half-interval scale and weights (QUADPACK dqk15).
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {0.129484966168870, 0.279705391489277,
                           0.381830050505119, 0.417959183673469};

struct PanelEstimate {
  double value = 0.0;  // K15 estimate
  double error = 0.0;  // |K15 - G7|
};

PanelEstimate gk15(const std::function<double(double)>& f, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  const double f_mid = f(mid);
  double kronrod = kWgk[7] * f_mid;
  double gauss = kWg[3] * f_mid;
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kXgk[i];
    const double sum = f(mid - dx) + f(mid + dx);
    kronrod += kWgk[i] * sum;
    if (i % 2 == 1) gauss += kWg[i / 2] * sum;
  }
  PanelEstimate est;
  est.value = kronrod * half;
  est.error = std::abs((kronrod - gauss) * half);
  return est;
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, double rel_tol, double abs_tol) {
  require(std::isfinite(a) && std::isfinite(b), "integrate: bounds must be finite");
  QuadratureResult out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  const double sign = (b > a) ? 1.0 : -1.0;
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);

  struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& other) const { return error < other.error; }
  };
  std::priority_queue<Panel> queue;
  auto push_panel = [&](double pa, double pb) {
    const PanelEstimate est = gk15(f, pa, pb);
    queue.push(Panel{pa, pb, est.value, est.error});
    return est;
  };
  PanelEstimate first = push_panel(lo, hi);
  double total_value = first.value;
  double total_error = first.error;

  constexpr int kMaxPanels = 4000;
  int panels = 1;
  while (panels < kMaxPanels) {
    const double tol = std::max(abs_tol, rel_tol * std::abs(total_value));
    if (total_error <= tol) break;
    const Panel worst = queue.top();
    queue.pop();
    total_value -= worst.value;
    total_error -= worst.error;
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      // Interval at floating-point resolution: keep its estimate as-is.
      total_value += worst.value;
      total_error += worst.error;
      break;
    }
    const PanelEstimate left = push_panel(worst.a, mid);
    const PanelEstimate right = push_panel(mid, worst.b);
    total_value += left.value + right.value;
    total_error += left.error + right.error;
    ++panels;
  }
  out.value = sign * total_value;
  out.error_estimate = total_error;
  out.converged =
      total_error <= std::max(abs_tol, rel_tol * std::abs(total_value));
  return out;
}

double ln_gamma(double x) {
  require(x > 0.0, "ln_gamma: argument must be positive");
  return std::lgamma(x);
}

double ln_beta(double a, double b) {
  require(a > 0.0 && b > 0.0, "ln_beta: arguments must be positive");
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

double beta_fn(double a, double b) { return std::exp(ln_beta(a, b)); }

// ----- Gauss hypergeometric function ---------------------------------------

namespace detail {

SeriesResult hyp2f1_series(double a, double b, double c, double x) {
  require(c > 0.0, "hyp2f1: c must be positive");
  SeriesResult out;
  double term = 1.0;
  double sum = 1.0;
  int small_terms = 0;
  for (int n = 0; n < kMaxSeriesTerms; ++n) {
    term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * x;
    sum += term;
    ++out.terms_used;
    if (term == 0.0 || std::abs(term) <= kSeriesTol * std::abs(sum)) {
      if (++small_terms >= 2) {
        out.value = sum;
        out.converged = true;
        return out;
      }
    } else {
      small_terms = 0;
    }
  }
  out.value = sum;
  out.converged = false;
  return out;
}

SeriesResult hyp2f1_pfaff(double a, double b, double c, double x) {
  // 2F1(a,b;c;x) = (1-x)^(-a) 2F1(a, c-b; c; x/(x-1))
  SeriesResult inner = hyp2f1_series(a, c - b, c, x / (x - 1.0));
  inner.value *= std::exp(-a * std::log1p(-x));
  return inner;
}

SeriesResult hyp2f1_euler_transform(double a, double b, double c, double x) {
  // 2F1(a,b;c;x) = (1-x)^(c-a-b) 2F1(c-a, c-b; c; x)
  SeriesResult inner = hyp2f1_series(c - a, c - b, c, x);
  inner.value *= std::exp((c - a - b) * std::log1p(-x));
  return inner;
}

SeriesResult hyp2f1_euler_integral(double a, double b, double c, double x) {
  // 2F1(a,b;c;x) = 1/B(b, c-b) * Int_0^1 t^(b-1) (1-t)^(c-b-1) (1-xt)^(-a) dt,
  // valid for c > b > 0; the function is symmetric in (a, b), so swap if
  // needed to satisfy the constraint.
  if (!(c > b && b > 0.0)) std::swap(a, b);
  require(c > b && b > 0.0, "hyp2f1: Euler integral needs c > b > 0");
  const double lb = ln_beta(b, c - b);
  auto integrand = [&](double t) {
    return std::exp((b - 1.0) * std::log(t) + (c - b - 1.0) * std::log1p(-t) -
                    a * std::log1p(-x * t) - lb);
  };
  const QuadratureResult q = integrate(integrand, 0.0, 1.0, 1e-11, 0.0);
  SeriesResult out;
  out.value = q.value;
  out.converged = q.converged;
  return out;
}

namespace {

// Core evaluation for argument y in [0, 1): returns log of a positive
// correction factor plus the series value, so callers can stay in log space.
struct CoreResult {
  double log_scale = 0.0;  // multiply series value by exp(log_scale)
  SeriesResult series;
};

CoreResult hyp2f1_core(double a, double b, double c, double y) {
  CoreResult out;
  if (y <= 0.75) {
    out.series = hyp2f1_series(a, b, c, y);
    return out;
  }
  const double margin = c - a - b;
  if (margin < 0.0) {
    // Euler transformation flips the margin sign, so the transformed series
    // converges near (and at) y = 1 and its value stays representable.
    out.log_scale = margin * std::log1p(-y);
    out.series = hyp2f1_series(c - a, c - b, c, y);
    if (!out.series.converged) {
      out.series = hyp2f1_euler_integral(c - a, c - b, c, y);
    }
    return out;
  }
  out.series = hyp2f1_series(a, b, c, y);
  if (!out.series.converged) {
    out.series = hyp2f1_euler_integral(a, b, c, y);
  }
  return out;
}

}  // namespace

LnSeriesResult hyp2f1_ln(double a, double b, double c, double x) {
  require(x < 1.0, "hyp2f1: requires x < 1");
  require(c > 0.0, "hyp2f1: c must be positive");
  double log_prefactor = 0.0;
  double y = x;
  double aa = a;
  double bb = b;
  if (x < 0.0) {
    // Pfaff transformation maps x in (-inf, 0) to y in (0, 1).
    log_prefactor = -a * std::log1p(-x);
    y = x / (x - 1.0);
    bb = c - b;
  }
  const CoreResult core = hyp2f1_core(aa, bb, c, y);
  LnSeriesResult out;
  out.converged = core.series.converged;
  if (core.series.value <= 0.0) {
    // Our parameter ranges keep 2F1 positive; a non-positive series value
    // would mean catastrophic cancellation, so report it as non-converged.
    out.converged = false;
    out.log_value = -std::numeric_limits<double>::infinity();
    return out;
  }
  out.log_value = log_prefactor + core.log_scale + std::log(core.series.value);
  return out;
}

}  // namespace detail

SeriesResult hyp2f1(double a, double b, double c, double x) {
  require(x < 1.0, "hyp2f1: requires x < 1");
  require(c > 0.0, "hyp2f1: c must be positive");
  if (x == 0.0) return SeriesResult{1.0, 0, true};
  double log_prefactor = 0.0;
  double y = x;
  double bb = b;
  if (x < 0.0) {
    log_prefactor = -a * std::log1p(-x);
    y = x / (x - 1.0);
    bb = c - b;
  }
  const detail::CoreResult core = detail::hyp2f1_core(a, bb, c, y);
  SeriesResult out = core.series;
  out.value *= std::exp(log_prefactor + core.log_scale);
  return out;
}

SeriesResult hyp3f2_unit(double a1, double a2, double a3, double b1,
                         double b2) {
  require(b1 > 0.0 && b2 > 0.0, "hyp3f2_unit: b parameters must be positive");
  require(b1 + b2 - a1 - a2 - a3 > 0.0,
          "hyp3f2_unit: requires convergence margin b1+b2-a1-a2-a3 > 0");
  SeriesResult out;
  double term = 1.0;
  double sum = 1.0;
  int small_terms = 0;
  for (int n = 0; n < kMaxSeriesTerms; ++n) {
    term *= (a1 + n) * (a2 + n) * (a3 + n) /
            ((b1 + n) * (b2 + n) * (n + 1.0));
    sum += term;
    ++out.terms_used;
    if (term == 0.0 || std::abs(term) <= kSeriesTol * std::abs(sum)) {
      if (++small_terms >= 2) {
        out.value = sum;
        out.converged = true;
        return out;
      }
    } else {
      small_terms = 0;
    }
  }
  out.value = sum;
  out.converged = false;
  return out;
}

// ----- SNR-loss densities and moments ---------------------------------------

namespace {

void require_geometry(int n, int k) {
  require(n >= 2, "geometry: requires N >= 2");
  require(k >= n, "geometry: requires K >= N");
}

}  // namespace

double pdf_rho_given_f1(double rho, double f1, int n, int k) {
  require_geometry(n, k);
  require(rho >= 0.0 && rho <= 1.0, "pdf_rho_given_f1: rho must be in [0, 1]");
  require(f1 >= 0.0, "pdf_rho_given_f1: f1 must be >= 0");
  if (rho == 0.0) return 0.0;  // exponent k-n+1 >= 1
  if (rho == 1.0 && n > 2) return 0.0;
  double log_pdf = (k - n + 2) * std::log1p(f1) - ln_beta(n - 1, k - n + 2) +
                   (k - n + 1) * std::log(rho) - (k + 1) * std::log1p(rho * f1);
  if (n > 2) log_pdf += (n - 2) * std::log1p(-rho);
  return std::exp(log_pdf);
}

double pdf_rho_student(double rho, int n, int k, int nu) {
  require_geometry(n, k);
  require(nu >= 2, "pdf_rho_student: requires nu >= 2");
  require(rho >= 0.0 && rho <= 1.0, "pdf_rho_student: rho must be in [0, 1]");
  if (rho == 0.0) return 0.0;
  if (rho == 1.0 && n > 2) return 0.0;
  const detail::LnSeriesResult f =
      detail::hyp2f1_ln(k + 1, k - n + 1, nu + k, 1.0 - rho);
  if (!f.converged) {
    throw std::runtime_error("pdf_rho_student: hypergeometric series failed");
  }
  double log_pdf = ln_beta(k - n + 1, nu + n - 1) - ln_beta(n - 1, k - n + 2) -
                   ln_beta(k - n + 1, nu) + (k - n + 1) * std::log(rho) +
                   f.log_value;
  if (n > 2) log_pdf += (n - 2) * std::log1p(-rho);
  return std::exp(log_pdf);
}

double pdf_f1(double f1, int n, int k, int nu) {
  require_geometry(n, k);
  require(nu >= 1, "pdf_f1: requires nu >= 1");
  require(f1 >= 0.0, "pdf_f1: f1 must be >= 0");
  if (f1 == 0.0) return (k == n) ? 1.0 / beta_fn(1, nu) : 0.0;
  const double log_pdf = (k - n) * std::log(f1) -
                         (nu + k - n + 1) * std::log1p(f1) -
                         ln_beta(k - n + 1, nu);
  return std::exp(log_pdf);
}

double pdf_f2(double f2, int n, int k) {
  require_geometry(n, k);
  require(f2 >= 0.0, "pdf_f2: f2 must be >= 0");
  if (f2 == 0.0) return (n == 2) ? 1.0 / beta_fn(1, k - 1) : 0.0;
  const double log_pdf = (n - 2) * std::log(f2) - (k + 1) * std::log1p(f2) -
                         ln_beta(n - 1, k - n + 2);
  return std::exp(log_pdf);
}

double mean_rho_given_f1(double f1, int n, int k) {
  require_geometry(n, k);
  require(f1 >= 0.0, "mean_rho_given_f1: f1 must be >= 0");
  const SeriesResult f = hyp2f1(1, k - n + 3, k + 2, f1 / (1.0 + f1));
  if (!f.converged) {
    throw std::runtime_error("mean_rho_given_f1: hypergeometric series failed");
  }
  return (k - n + 2.0) / (k + 1.0) / (1.0 + f1) * f.value;
}

double mean_rho_student(int n, int k, int nu) {
  require_geometry(n, k);
  require(nu >= 2, "mean_rho_student: requires nu >= 2");
  const SeriesResult f =
      hyp3f2_unit(1, k - n + 3, k - n + 1, k + 2, nu + k - n + 2);
  if (!f.converged) {
    throw std::runtime_error("mean_rho_student: hypergeometric series failed");
  }
  return static_cast<double>(nu) * (k - n + 2.0) /
         ((nu + k - n + 1.0) * (k + 1.0)) * f.value;
}

double mean_rho_gaussian(int n, int k) {
  require_geometry(n, k);
  return (k - n + 2.0) / (k + 1.0);
}

// ----- Partitioned complex-F block densities --------------------------------

namespace {

void require_block_params(int p, int q, int n) {
  require(p >= 2, "block density: requires p >= 2");
  require(q >= p, "block density: requires q >= p");
  require(n >= p, "block density: requires n >= p");
}

}  // namespace

double pdf_f22(double f, int p, int q, int n) {
  // p = 1 is the plain scalar F density (no partition involved), so only the
  // beta-function arguments need to stay positive.
  require(p >= 1 && q >= 1 && n - p + 1 >= 1,
          "pdf_f22: requires p >= 1, q >= 1, n >= p");
  require(f >= 0.0, "pdf_f22: f must be >= 0");
  if (f == 0.0) return (q == 1) ? 1.0 / beta_fn(1, n - p + 1) : 0.0;
  const double log_pdf = (q - 1) * std::log(f) -
                         (q + n - p + 1) * std::log1p(f) -
                         ln_beta(q, n - p + 1);
  return std::exp(log_pdf);
}

double pdf_t12_marginal(double norm_sq, int p, int q, int n) {
  require_block_params(p, q, n);
  require(norm_sq >= 0.0, "pdf_t12_marginal: squared norm must be >= 0");
  const detail::LnSeriesResult f =
      detail::hyp2f1_ln(n + 1, p + q - 1, n + q, -norm_sq);
  if (!f.converged) {
    throw std::runtime_error("pdf_t12_marginal: hypergeometric series failed");
  }
  const double log_c = ln_gamma(n + 1.0) -
                       (p - 1) * std::log(std::numbers::pi) -
                       ln_gamma(n - p + 2.0) - ln_beta(q, n - p + 1);
  // The B(p+q-1, n-p+1) factor comes from the Euler integral over the
  // trailing-block marginal; it multiplies the constant (dividing instead
  // leaves the density unnormalized by a factor of B^2).
  return std::exp(log_c + ln_beta(p + q - 1, n - p + 1) + f.log_value);
}

double pdf_t12_norm_sq(double s, int p, int q, int n) {
  require_block_params(p, q, n);
  require(s >= 0.0, "pdf_t12_norm_sq: s must be >= 0");
  if (s == 0.0 && p > 2) return 0.0;
  // Volume of the complex (p-1)-sphere shell at radius sqrt(s).
  const double log_shell = (p - 1) * std::log(std::numbers::pi) +
                           (p - 2) * std::log(s == 0.0 ? 1.0 : s) -
                           ln_gamma(p - 1.0);
  return pdf_t12_marginal(s, p, q, n) * std::exp(log_shell);
}

double gaussian_pfa_threshold(double pfa, int n, int k) {
  require_geometry(n, k);
  require(pfa > 0.0 && pfa <= 1.0,
          "gaussian_pfa_threshold: pfa must be in (0, 1]");
  return std::pow(pfa, -1.0 / (k - n + 1.0)) - 1.0;
}

}  // namespace amfloss
