#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "amfloss/adaptive.hpp"
#include "amfloss/represent.hpp"

// Monte Carlo experiment drivers.
//
// Every trial owns one RNG substream keyed by (seed, stream_offset + trial
// index), so a run's output is bit-identical for a fixed seed and
// configuration no matter how many OpenMP threads execute it.  threads == 1
// selects a plain serial loop (the reference implementation the parallel
// kernels are tested against); threads == 0 uses all available threads.

namespace amfloss {

// ----- Empirical distributions and comparisons ------------------------------

class EmpiricalDistribution {
 public:
  EmpiricalDistribution() = default;
  // Takes ownership of the samples and sorts them; requires at least one.
  explicit EmpiricalDistribution(std::vector<double> samples);

  // P(X <= x) with the usual right-continuous step convention.
  double cdf_at(double x) const;

  // Order-statistic quantile for p in [0, 1].
  double quantile(double p) const;

  std::size_t count() const { return samples_.size(); }
  const std::vector<double>& sorted_samples() const { return samples_; }

 private:
  std::vector<double> samples_;
};

// Two-sample Kolmogorov-Smirnov distance sup_x |F_a(x) - F_b(x)|.
double ks_distance(const EmpiricalDistribution& a,
                   const EmpiricalDistribution& b);

// One-sample KS distance against a reference CDF.
double ks_distance_to(const EmpiricalDistribution& a,
                      const std::function<double(double)>& cdf);

// CDF evaluated on a grid, as (point, value) pairs.
std::vector<std::pair<double, double>> empirical_cdf_at(
    const EmpiricalDistribution& dist, std::span<const double> grid);

// ----- Deterministic trial-parallel kernels ---------------------------------

namespace engine_detail {

inline int resolve_threads(int threads) {
#ifdef _OPENMP
  if (threads <= 0) return omp_get_max_threads();
  return threads;
#else
  (void)threads;
  return 1;
#endif
}

}  // namespace engine_detail

// Applies fn(stream) once per trial and collects the results in trial
// order.  Identical output for any thread count.
template <typename T, typename Fn>
std::vector<T> map_trials(std::int64_t trials, std::uint64_t seed,
                          std::uint64_t stream_offset, int threads, Fn&& fn) {
  std::vector<T> out(static_cast<std::size_t>(trials));
#ifdef _OPENMP
  const int n_threads = engine_detail::resolve_threads(threads);
  if (n_threads > 1 && trials > 1) {
#pragma omp parallel for schedule(static) num_threads(n_threads)
    for (std::int64_t i = 0; i < trials; ++i) {
      RngStream stream(seed, stream_offset + static_cast<std::uint64_t>(i));
      out[static_cast<std::size_t>(i)] = fn(stream);
    }
    return out;
  }
#endif
  for (std::int64_t i = 0; i < trials; ++i) {
    RngStream stream(seed, stream_offset + static_cast<std::uint64_t>(i));
    out[static_cast<std::size_t>(i)] = fn(stream);
  }
  return out;
}

namespace engine_detail {

// Shared chunked driver: fixed-size chunks produce partial results that are
// reduced in chunk order, so sums do not depend on the thread count.
template <typename Acc, typename ChunkFn>
Acc reduce_chunks(std::int64_t trials, int threads, ChunkFn&& chunk_fn) {
  constexpr std::int64_t kChunk = 8192;
  const std::int64_t n_chunks = (trials + kChunk - 1) / kChunk;
  std::vector<Acc> partial(static_cast<std::size_t>(n_chunks), Acc{});
#ifdef _OPENMP
  const int n_threads = resolve_threads(threads);
#pragma omp parallel for schedule(dynamic) num_threads(n_threads) if (n_threads > 1)
#else
  (void)threads;
#endif
  for (std::int64_t c = 0; c < n_chunks; ++c) {
    const std::int64_t begin = c * kChunk;
    const std::int64_t end = std::min(trials, begin + kChunk);
    partial[static_cast<std::size_t>(c)] = chunk_fn(begin, end);
  }
  Acc total{};
  for (const Acc& p : partial) total += p;
  return total;
}

}  // namespace engine_detail

// Deterministic sum of fn(stream) over trials.
template <typename Fn>
double sum_trials(std::int64_t trials, std::uint64_t seed,
                  std::uint64_t stream_offset, int threads, Fn&& fn) {
  return engine_detail::reduce_chunks<double>(
      trials, threads, [&](std::int64_t begin, std::int64_t end) {
        double acc = 0.0;
        for (std::int64_t i = begin; i < end; ++i) {
          RngStream stream(seed, stream_offset + static_cast<std::uint64_t>(i));
          acc += fn(stream);
        }
        return acc;
      });
}

// Deterministic count of trials satisfying pred(stream).
template <typename Pred>
std::int64_t count_trials(std::int64_t trials, std::uint64_t seed,
                          std::uint64_t stream_offset, int threads,
                          Pred&& pred) {
  return engine_detail::reduce_chunks<std::int64_t>(
      trials, threads, [&](std::int64_t begin, std::int64_t end) {
        std::int64_t acc = 0;
        for (std::int64_t i = begin; i < end; ++i) {
          RngStream stream(seed, stream_offset + static_cast<std::uint64_t>(i));
          if (pred(stream)) ++acc;
        }
        return acc;
      });
}

// Stable seed derivation for named sub-experiments.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag);

// ----- Monte Carlo runs -----------------------------------------------------

enum class SimulationPath { direct, representation, both };

struct RunConfig {
  ScenarioParams scenario;
  std::int64_t trials = 0;
  std::uint64_t seed = 1;
  SimulationPath path = SimulationPath::representation;
  TrainingDistribution training = TrainingDistribution::student;
  Hypothesis hypothesis = Hypothesis::h0;
  TtildeCoupling coupling = kDefaultTtildeCoupling;
  int threads = 0;
};

struct PathSamples {
  EmpiricalDistribution rho;
  EmpiricalDistribution beta;
  EmpiricalDistribution t_tilde;
};

struct MonteCarloOutput {
  std::optional<PathSamples> direct;
  std::optional<PathSamples> representation;
};

// Default geometry used throughout: Sigma = I_N and v = e_N.
SignalModel default_signal_model(int n_channels);

// Runs the configured number of trials down the requested path(s), with the
// default signal model.  Bit-identical results for a fixed (seed, config).
MonteCarloOutput run_monte_carlo(const RunConfig& config);

// Same, with an explicit signal model for the direct path (invariance
// studies).
MonteCarloOutput run_monte_carlo(const RunConfig& config,
                                 const SignalModel& model);

// KS distances between the direct and representation paths for one
// configuration, with the t_tilde representation evaluated under both
// denominator couplings (config.trials per sample set).
struct TwoPathKs {
  double rho = 0.0;
  double beta = 0.0;
  double t_tilde_independent = 0.0;
  double t_tilde_shared = 0.0;
};
TwoPathKs two_path_ks(const RunConfig& config);

// ----- Tabular output --------------------------------------------------------

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

// CSV with shortest round-trip decimal formatting; byte-identical for a
// fixed (seed, config) regardless of worker count.
void write_csv(const Table& table, std::ostream& os);
void write_json(const Table& table, std::ostream& os);

// ----- Figure data generators -------------------------------------------------

struct FigureConfig {
  int n_channels = 16;
  std::vector<int> k_list;   // empty = per-figure default
  std::vector<int> nu_list;  // empty = per-figure default
  std::optional<double> mu;  // empty = nu - N rule
  double snr_bar = 10.0;
  std::int64_t trials = 1000000;
  std::int64_t pfa_trials = 10000000;
  double pfa_target = 1e-3;
  std::uint64_t seed = 1;
  SimulationPath path = SimulationPath::representation;
  TtildeCoupling coupling = kDefaultTtildeCoupling;
  int threads = 0;
  int bins = 200;
};

// CDF/pdf table of the SNR loss rho per (K, nu), with the Gaussian
// reference and the closed-form density overlay.
Table generate_fig_snrloss(const FigureConfig& config);

// CDF tables of the Kelly loss factor beta or statistic t_tilde.
enum class DetectorStatistic { beta, t_tilde };
Table generate_fig_statistic_cdf(DetectorStatistic statistic,
                                 Hypothesis hypothesis,
                                 const FigureConfig& config);

// Analytic mean SNR loss versus K per nu, with MC cross-check columns.
Table generate_fig_mean_vs_k(const FigureConfig& config);

// Training-size requirement: smallest K whose mean loss is at least 1/2.
Table generate_fig_find_k(const FigureConfig& config);
int find_k_for_half_loss(int n, int nu, int k_max = 8192);
int find_k_for_half_loss_gaussian(int n, int k_max = 8192);

// False-alarm probability of the Kelly detector under Student training at
// the Gaussian-calibrated threshold, per (nu, K).
Table generate_fig_pfa(const FigureConfig& config);

// ----- Verification suite ------------------------------------------------------

struct VerifyOptions {
  std::uint64_t seed = 1;
  int threads = 0;
  int n_channels = 16;
  std::int64_t ks_trials = 100000;     // two-path comparisons per cell
  std::int64_t block_trials = 200000;  // block-law histogram draws
  std::int64_t mean_trials = 1000000;  // analytic-vs-MC means
  bool full_grid = true;               // false = single (K, nu) cell
};

struct VerifyCheck {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  TtildeCoupling selected_coupling = kDefaultTtildeCoupling;
  bool all_pass() const;
};

// Two-path agreement over the (K, nu) grid, density normalization and
// marginalization checks, analytic-vs-MC means, partitioned-F block laws, a
// deliberately corrupted representation that must fail, and the empirical
// choice between the two t_tilde denominator couplings.
VerifyReport run_verify_suite(const VerifyOptions& options);

void print_verify_report(const VerifyReport& report, std::ostream& os);

}  // namespace amfloss
