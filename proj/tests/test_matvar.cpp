#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "amfloss/analytic.hpp"
#include "amfloss/experiments.hpp"
#include "amfloss/matvar.hpp"
#include "amfloss/rng.hpp"
#include "stat_util.hpp"

using amfloss::Complex;
using amfloss::ComplexMatrix;
using amfloss::ComplexVector;
using amfloss::EmpiricalDistribution;
using amfloss::HermitianPd;
using amfloss::RngStream;

namespace {

ComplexMatrix random_pd(Eigen::Index p, std::uint64_t seed) {
  RngStream stream(seed, 0);
  ComplexMatrix a(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      a(i, j) = stream.next_complex_normal();
    }
  }
  ComplexMatrix m = a * a.adjoint();
  m += ComplexMatrix::Identity(p, p);
  return (m + m.adjoint()) / 2.0;
}

// Deterministic unitary matrix from the QR factorization of a fixed draw.
ComplexMatrix fixed_unitary(Eigen::Index p, std::uint64_t seed) {
  RngStream stream(seed, 0);
  ComplexMatrix a(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      a(i, j) = stream.next_complex_normal();
    }
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(a);
  return qr.householderQ();
}

}  // namespace

TEST_CASE("hermitian wrapper validates its input") {
  CHECK_NOTHROW(HermitianPd(random_pd(4, 1)));
  ComplexMatrix bad = random_pd(4, 2);
  bad(0, 1) += Complex(0.5, 0.25);
  CHECK_THROWS_AS(HermitianPd{bad}, std::invalid_argument);

  // Hermitian but indefinite: rejected at factorization.
  ComplexMatrix indef = ComplexMatrix::Identity(3, 3);
  indef(2, 2) = -1.0;
  CHECK_THROWS_AS(HermitianPd(indef).cholesky(), std::runtime_error);

  CHECK(HermitianPd::identity(5).mat().isIdentity(0.0));
}

TEST_CASE("complex gaussian matrix sampler moments") {
  const Eigen::Index p = 4, n = 8;
  const HermitianPd eye_p = HermitianPd::identity(p);
  const HermitianPd eye_n = HermitianPd::identity(n);
  const ComplexMatrix zero = ComplexMatrix::Zero(p, n);

  RngStream stream(10, 0);
  ComplexMatrix acc = ComplexMatrix::Zero(p, p);
  const int trials = 100000;
  for (int t = 0; t < trials; ++t) {
    const ComplexMatrix x =
        amfloss::sample_complex_gaussian_matrix(zero, eye_p, eye_n, stream);
    acc += x * x.adjoint();
  }
  acc /= static_cast<double>(trials) * static_cast<double>(n);
  CHECK((acc - ComplexMatrix::Identity(p, p)).norm() < 0.02);

  // Mean recovery with arbitrary PD covariances.
  const HermitianPd row_cov(random_pd(p, 3));
  const HermitianPd col_cov(random_pd(n, 4));
  ComplexMatrix mean_mat(p, n);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      mean_mat(i, j) = Complex(static_cast<double>(i) - 1.0,
                               0.5 * static_cast<double>(j));
    }
  }
  RngStream stream2(11, 0);
  ComplexMatrix macc = ComplexMatrix::Zero(p, n);
  for (int t = 0; t < 50000; ++t) {
    macc += amfloss::sample_complex_gaussian_matrix(mean_mat, row_cov, col_cov,
                                                    stream2);
  }
  macc /= 50000.0;
  CHECK((macc - mean_mat).norm() / mean_mat.norm() < 0.03);

  // Row covariance diag(4, 1): variance of first-row entries is 4.
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 4.0;
  d(1, 1) = 1.0;
  const HermitianPd row_diag(d);
  const HermitianPd eye_cols = HermitianPd::identity(4);
  const ComplexMatrix zero2 = ComplexMatrix::Zero(2, 4);
  RngStream stream3(12, 0);
  double sum_sq = 0.0;
  const int var_trials = 100000;
  for (int t = 0; t < var_trials; ++t) {
    const ComplexMatrix x = amfloss::sample_complex_gaussian_matrix(
        zero2, row_diag, eye_cols, stream3);
    sum_sq += x.row(0).squaredNorm();
  }
  const double var = sum_sq / (4.0 * var_trials);
  CHECK(std::fabs(var - 4.0) < 0.05);
}

TEST_CASE("wishart mean and scalar marginal") {
  const Eigen::Index p = 4;
  const HermitianPd eye = HermitianPd::identity(p);
  RngStream stream(20, 0);
  ComplexMatrix acc = ComplexMatrix::Zero(p, p);
  const int trials = 100000;
  for (int t = 0; t < trials; ++t) {
    acc += amfloss::sample_complex_wishart(10, eye, stream).mat();
  }
  acc /= static_cast<double>(trials);
  CHECK((acc - 10.0 * ComplexMatrix::Identity(p, p)).cwiseAbs().maxCoeff() <
        0.1);

  // p = 1: the Wishart reduces to a complex chi-square with dof degrees.
  const HermitianPd one = HermitianPd::identity(1);
  auto scalar_draws = amfloss::map_trials<double>(
      100000, 21, 0, 1, [&](RngStream& s) {
        return amfloss::sample_complex_wishart(6, one, s).mat()(0, 0).real();
      });
  auto chi_draws = amfloss::map_trials<double>(
      100000, 22, 0, 1,
      [](RngStream& s) { return amfloss::draw_complex_chi_square(6, s); });
  CHECK(amfloss::ks_distance(EmpiricalDistribution(std::move(scalar_draws)),
                             EmpiricalDistribution(std::move(chi_draws))) <
        0.01);

  CHECK_THROWS_AS(amfloss::sample_complex_wishart(3, eye, stream),
                  std::invalid_argument);
}

TEST_CASE("bartlett construction matches the sum of outer products") {
  const Eigen::Index p = 3;
  const int dof = 7;
  const HermitianPd eye = HermitianPd::identity(p);
  auto bartlett = amfloss::map_trials<std::pair<double, double>>(
      100000, 23, 0, 1, [&](RngStream& s) {
        const ComplexMatrix w = amfloss::sample_complex_wishart(dof, eye, s).mat();
        return std::pair{w.trace().real(), w(0, 0).real()};
      });
  auto naive = amfloss::map_trials<std::pair<double, double>>(
      100000, 24, 0, 1, [&](RngStream& s) {
        ComplexMatrix w = ComplexMatrix::Zero(p, p);
        for (int d = 0; d < dof; ++d) {
          ComplexVector z(p);
          for (Eigen::Index i = 0; i < p; ++i) {
            z(i) = s.next_complex_normal();
          }
          w += z * z.adjoint();
        }
        return std::pair{w.trace().real(), w(0, 0).real()};
      });
  std::vector<double> tr_a, tr_b, e_a, e_b;
  for (const auto& [tr, e] : bartlett) {
    tr_a.push_back(tr);
    e_a.push_back(e);
  }
  for (const auto& [tr, e] : naive) {
    tr_b.push_back(tr);
    e_b.push_back(e);
  }
  CHECK(amfloss::ks_distance(EmpiricalDistribution(std::move(tr_a)),
                             EmpiricalDistribution(std::move(tr_b))) < 0.01);
  CHECK(amfloss::ks_distance(EmpiricalDistribution(std::move(e_a)),
                             EmpiricalDistribution(std::move(e_b))) < 0.015);
}

TEST_CASE("matrix-t sampler second moment matches the training model") {
  // Training model: X ~ CT_{N,K}(nu - N + 1, 0, mu Sigma, I_K) with
  // mu = nu - N, nu = 32; then E[X X^H] = K Sigma.
  const int n_channels = 16, k = 32, nu = 32;
  const double mu = nu - n_channels;
  ComplexMatrix sigma_scaled = mu * ComplexMatrix::Identity(n_channels, n_channels);
  const HermitianPd sigma(sigma_scaled);
  const HermitianPd omega = HermitianPd::identity(k);
  const ComplexMatrix zero = ComplexMatrix::Zero(n_channels, k);

  RngStream stream(30, 0);
  ComplexMatrix acc = ComplexMatrix::Zero(n_channels, n_channels);
  const int trials = 100000;
  for (int t = 0; t < trials; ++t) {
    const ComplexMatrix x = amfloss::sample_complex_matrix_t(
        nu - n_channels + 1, zero, sigma, omega, stream);
    acc += x * x.adjoint();
  }
  acc /= static_cast<double>(trials);
  CHECK((acc - static_cast<double>(k) *
                   ComplexMatrix::Identity(n_channels, n_channels))
            .cwiseAbs()
            .maxCoeff() < 0.02 * k);
}

TEST_CASE("matrix-t approaches the gaussian law for large nu") {
  const int p = 4, n = 8, nu = 10000;
  const double mu = nu - p;
  const HermitianPd sigma(mu * ComplexMatrix::Identity(p, p));
  const HermitianPd omega = HermitianPd::identity(n);
  const HermitianPd eye_p = HermitianPd::identity(p);
  const ComplexMatrix zero = ComplexMatrix::Zero(p, n);

  auto t_traces = amfloss::map_trials<double>(
      20000, 31, 0, 1, [&](RngStream& s) {
        return amfloss::sample_complex_matrix_t(nu - p + 1, zero, sigma, omega,
                                                s)
            .squaredNorm();
      });
  auto g_traces = amfloss::map_trials<double>(
      20000, 32, 0, 1, [&](RngStream& s) {
        return amfloss::sample_complex_gaussian_matrix(zero, eye_p, omega, s)
            .squaredNorm();
      });
  CHECK(amfloss::ks_distance(EmpiricalDistribution(std::move(t_traces)),
                             EmpiricalDistribution(std::move(g_traces))) <
        0.02);

  RngStream stream(33, 0);
  CHECK_THROWS_AS(
      amfloss::sample_complex_matrix_t(0, zero, sigma, omega, stream),
      std::invalid_argument);
  const ComplexMatrix wrong_shape = ComplexMatrix::Zero(p, n + 1);
  CHECK_THROWS_AS(
      amfloss::sample_complex_matrix_t(1, wrong_shape, sigma, omega, stream),
      std::invalid_argument);
}

TEST_CASE("matrix-F sampler scalar and trace moments") {
  // p = 1: F = chi2_5 / chi2_10, mean 5/9.
  auto scalar = amfloss::map_trials<double>(
      1000000, 40, 0, 1, [](RngStream& s) {
        return amfloss::sample_complex_f(1, 5, 10, s).mat()(0, 0).real();
      });
  CHECK(std::fabs(testutil::mean(scalar) - 5.0 / 9.0) < 0.005);

  // E[tr F] = p n1 / (n2 - p) for p = 2, n1 = 6, n2 = 12.
  auto traces = amfloss::map_trials<double>(
      100000, 41, 0, 1, [](RngStream& s) {
        return amfloss::sample_complex_f(2, 6, 12, s).mat().trace().real();
      });
  CHECK(std::fabs(testutil::mean(traces) - 1.2) < 0.02);

  RngStream stream(42, 0);
  CHECK_THROWS_AS(amfloss::sample_complex_f(4, 3, 8, stream),
                  std::invalid_argument);
  CHECK_THROWS_AS(amfloss::sample_complex_f(4, 8, 3, stream),
                  std::invalid_argument);
}

TEST_CASE("matrix-F distribution is unitarily invariant") {
  const Eigen::Index p = 16;
  const ComplexMatrix q_mat = fixed_unitary(p, 43);
  auto raw = amfloss::map_trials<double>(
      100000, 44, 0, 1, [&](RngStream& s) {
        const ComplexMatrix f = amfloss::sample_complex_f(p, 32, 32, s).mat();
        return f(p - 1, p - 1).real();
      });
  auto rotated = amfloss::map_trials<double>(
      100000, 45, 0, 1, [&](RngStream& s) {
        const ComplexMatrix f = amfloss::sample_complex_f(p, 32, 32, s).mat();
        const ComplexMatrix g = q_mat.adjoint() * f * q_mat;
        return g(p - 1, p - 1).real();
      });
  CHECK(amfloss::ks_distance(EmpiricalDistribution(std::move(raw)),
                             EmpiricalDistribution(std::move(rotated))) < 0.01);
}

TEST_CASE("hermitian square root") {
  const HermitianPd eye = HermitianPd::identity(4);
  CHECK(amfloss::hermitian_sqrt(eye).isIdentity(1e-14));

  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 4.0;
  d(1, 1) = 9.0;
  const ComplexMatrix r = amfloss::hermitian_sqrt(HermitianPd(d));
  CHECK(std::abs(r(0, 0) - Complex(2.0, 0.0)) < 1e-14);
  CHECK(std::abs(r(1, 1) - Complex(3.0, 0.0)) < 1e-14);
  CHECK(std::abs(r(0, 1)) < 1e-14);

  const ComplexMatrix m = random_pd(6, 50);
  const ComplexMatrix root = amfloss::hermitian_sqrt(HermitianPd(m));
  CHECK((root - root.adjoint()).norm() / root.norm() < 1e-12);
  CHECK((root * root - m).norm() / m.norm() < 1e-10);

  ComplexMatrix singular = ComplexMatrix::Identity(3, 3);
  singular(2, 2) = 1e-16;
  CHECK_THROWS_AS(amfloss::hermitian_sqrt(HermitianPd(singular)),
                  std::runtime_error);
}

TEST_CASE("partitioning and reassembly") {
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 3.0;
  d(1, 1) = 7.0;
  const amfloss::PartitionedF blocks = amfloss::partition_f(HermitianPd(d), 1);
  CHECK(blocks.f11(0, 0).real() == doctest::Approx(3.0));
  CHECK(blocks.f22(0, 0).real() == doctest::Approx(7.0));
  CHECK(std::abs(blocks.f12(0, 0)) == doctest::Approx(0.0));

  const ComplexMatrix m = random_pd(5, 51);
  const HermitianPd f(m);
  const amfloss::PartitionedF pf = amfloss::partition_f(f, 2);
  ComplexMatrix back(5, 5);
  back << pf.f11, pf.f12, pf.f21, pf.f22;
  CHECK((back - f.mat()).norm() == doctest::Approx(0.0));
  CHECK((pf.f21 - pf.f12.adjoint()).norm() == doctest::Approx(0.0));

  CHECK_THROWS_AS(amfloss::partition_f(f, 0), std::invalid_argument);
  CHECK_THROWS_AS(amfloss::partition_f(f, 5), std::invalid_argument);
}

TEST_CASE("trailing block of a partitioned F follows the scalar F law") {
  const Eigen::Index p = 16;
  const int q = 32, n = 32;
  auto draws = amfloss::map_trials<double>(
      200000, 52, 0, 1, [&](RngStream& s) {
        const HermitianPd f = amfloss::sample_complex_f(p, q, n, s);
        return amfloss::partition_f(f, p - 1).f22(0, 0).real();
      });
  const double sup = testutil::histogram_sup_norm(
      draws, 0.0, 5.0, 100, [&](double f) {
        return amfloss::pdf_f22(f, static_cast<int>(p), q, n);
      });
  CHECK(sup < 0.05);
}

TEST_CASE("schur complement block laws") {
  ComplexMatrix d = ComplexMatrix::Zero(3, 3);
  d(0, 0) = 2.0;
  d(1, 1) = 5.0;
  d(2, 2) = 11.0;
  const amfloss::PartitionedF diag_blocks =
      amfloss::partition_f(HermitianPd(d), 2);
  const ComplexMatrix sc = amfloss::schur_f(diag_blocks).mat();
  CHECK((sc - d.topLeftCorner(2, 2)).norm() < 1e-14);

  // F ~ CF_3(8, 12) partitioned with r = 2: F_{1.2} ~ CF_2(7, 12) and is
  // independent of F22.
  struct Draw {
    double schur_trace;
    double f22;
  };
  auto part = amfloss::map_trials<Draw>(
      200000, 53, 0, 1, [](RngStream& s) {
        const HermitianPd f = amfloss::sample_complex_f(3, 8, 12, s);
        const amfloss::PartitionedF pf = amfloss::partition_f(f, 2);
        return Draw{amfloss::schur_f(pf).mat().trace().real(),
                    pf.f22(0, 0).real()};
      });
  auto direct = amfloss::map_trials<double>(
      200000, 54, 0, 1, [](RngStream& s) {
        return amfloss::sample_complex_f(2, 7, 12, s).mat().trace().real();
      });
  std::vector<double> schur_traces, f22s;
  for (const Draw& dr : part) {
    schur_traces.push_back(dr.schur_trace);
    f22s.push_back(dr.f22);
  }
  CHECK(testutil::correlation(schur_traces, f22s) ==
        doctest::Approx(0.0).epsilon(0.01));
  CHECK(amfloss::ks_distance(EmpiricalDistribution(std::move(schur_traces)),
                             EmpiricalDistribution(std::move(direct))) <
        0.015);
}

TEST_CASE("sampler outputs satisfy the hermitian PD invariants") {
  RngStream stream(60, 0);
  const HermitianPd eye = HermitianPd::identity(5);
  for (int t = 0; t < 20; ++t) {
    const ComplexMatrix w = amfloss::sample_complex_wishart(9, eye, stream).mat();
    CHECK((w - w.adjoint()).norm() / w.norm() < 1e-10);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(w);
    CHECK(es.eigenvalues().minCoeff() > 0.0);

    const ComplexMatrix f = amfloss::sample_complex_f(5, 9, 11, stream).mat();
    CHECK((f - f.adjoint()).norm() / f.norm() < 1e-10);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> ef(f);
    CHECK(ef.eigenvalues().minCoeff() > 0.0);
  }
}
