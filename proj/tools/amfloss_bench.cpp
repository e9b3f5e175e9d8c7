// Benchmark comparing the serial reference engine against the OpenMP
// engine on the two simulation paths.  Both must produce identical
// numbers; this target reports wall-clock times and the speedup.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "amfloss/experiments.hpp"

namespace {

double run_case(amfloss::RunConfig config, int threads, double* checksum) {
  config.threads = threads;
  const auto start = std::chrono::steady_clock::now();
  const amfloss::MonteCarloOutput out = amfloss::run_monte_carlo(config);
  const auto stop = std::chrono::steady_clock::now();
  double sum = 0.0;
  if (out.representation) {
    for (double v : out.representation->rho.sorted_samples()) sum += v;
  }
  if (out.direct) {
    for (double v : out.direct->rho.sorted_samples()) sum += v;
  }
  *checksum = sum;
  return std::chrono::duration<double>(stop - start).count();
}

}  // namespace

int main(int argc, char** argv) {
  std::int64_t trials = 200000;
  if (argc > 1) trials = std::stoll(argv[1]);

  int max_threads = 1;
#ifdef _OPENMP
  max_threads = omp_get_max_threads();
#endif

  amfloss::RunConfig config;
  config.scenario.n_channels = 16;
  config.scenario.k_training = 32;
  config.scenario.nu = 18;
  config.scenario.mu = 2.0;
  config.scenario.snr_bar = 10.0;
  config.trials = trials;
  config.seed = 1;

  struct Case {
    const char* name;
    amfloss::SimulationPath path;
    std::int64_t trials;
  };
  const Case cases[] = {
      {"representation", amfloss::SimulationPath::representation, trials},
      {"direct", amfloss::SimulationPath::direct, trials / 20},
  };

  std::printf("threads available: %d\n", max_threads);
  std::printf("%-16s %12s %12s %12s %9s  %s\n", "path", "trials", "serial[s]",
              "parallel[s]", "speedup", "identical");
  bool all_identical = true;
  for (const Case& c : cases) {
    amfloss::RunConfig run = config;
    run.path = c.path;
    run.trials = c.trials;
    double sum_serial = 0.0;
    double sum_parallel = 0.0;
    const double t_serial = run_case(run, 1, &sum_serial);
    const double t_parallel = run_case(run, 0, &sum_parallel);
    const bool identical = sum_serial == sum_parallel;
    all_identical = all_identical && identical;
    std::printf("%-16s %12lld %12.3f %12.3f %8.2fx  %s\n", c.name,
                static_cast<long long>(c.trials), t_serial, t_parallel,
                t_serial / t_parallel, identical ? "yes" : "NO");
  }
  if (!all_identical) {
    std::fprintf(stderr, "serial and parallel results differ\n");
    return 2;
  }
  return 0;
}
