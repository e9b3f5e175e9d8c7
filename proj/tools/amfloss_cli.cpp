// Command-line driver for the adaptive-filter loss experiments.
//
// Subcommands produce the figure data tables (CSV or JSON) or run the
// verification suite.  Exit codes: 0 success, 1 argument errors,
// 2 numerical failure, 3 verification failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "amfloss/experiments.hpp"

namespace {

using amfloss::FigureConfig;
using amfloss::Table;

struct CommonArgs {
  int n = 16;
  std::vector<int> k_list;
  std::vector<int> nu_list;
  std::string mu = "nu-N";
  double snr_bar = 10.0;
  std::int64_t trials = 1000000;
  std::uint64_t seed = 1;
  std::string path = "rep";
  std::string out;
  std::string format = "csv";
  int threads = 0;
  std::string coupling = "independent";
};

void add_common_options(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--n", args.n, "Number of channels N");
  cmd->add_option("--k", args.k_list, "Training sizes K (comma list)")
      ->delimiter(',');
  cmd->add_option("--nu", args.nu_list, "Student shapes nu (comma list)")
      ->delimiter(',');
  cmd->add_option("--mu", args.mu,
                  "Training scale mu: a number or 'nu-N' (default)");
  cmd->add_option("--snr-bar", args.snr_bar, "Target SNR under H1");
  cmd->add_option("--trials", args.trials, "Monte Carlo trials per curve");
  cmd->add_option("--seed", args.seed, "Base RNG seed");
  cmd->add_option("--path", args.path, "Sampling path: direct or rep")
      ->check(CLI::IsMember({"direct", "rep"}));
  cmd->add_option("--out", args.out, "Output file (default: stdout)");
  cmd->add_option("--format", args.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--threads", args.threads,
                  "Worker threads (0 = all available; results are identical "
                  "for any value)");
  cmd->add_option("--coupling", args.coupling,
                  "t_tilde denominator coupling: independent or shared")
      ->check(CLI::IsMember({"independent", "shared"}));
}

FigureConfig to_config(const CommonArgs& args) {
  FigureConfig config;
  config.n_channels = args.n;
  config.k_list = args.k_list;
  config.nu_list = args.nu_list;
  if (args.mu != "nu-N") config.mu = std::stod(args.mu);
  config.snr_bar = args.snr_bar;
  config.trials = args.trials;
  config.seed = args.seed;
  config.path = (args.path == "direct") ? amfloss::SimulationPath::direct
                                        : amfloss::SimulationPath::representation;
  config.coupling = (args.coupling == "shared")
                        ? amfloss::TtildeCoupling::shared_denominator
                        : amfloss::TtildeCoupling::independent_denominator;
  config.threads = args.threads;
  return config;
}

int emit(const Table& table, const CommonArgs& args) {
  std::ofstream file;
  std::ostream* os = &std::cout;
  if (!args.out.empty()) {
    file.open(args.out);
    if (!file) {
      std::cerr << "error: cannot open output file " << args.out << '\n';
      return 1;
    }
    os = &file;
  }
  if (args.format == "json") {
    amfloss::write_json(table, *os);
  } else {
    amfloss::write_csv(table, *os);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Distribution of adaptive matched filter and Kelly detector statistics "
      "under Gaussian and heavy-tailed (matrix-t) training"};
  app.require_subcommand(1);

  CommonArgs args;
  double pfa_target = 1e-3;
  std::int64_t pfa_trials = 10000000;
  std::string hypothesis = "h0";
  bool verify_quick = false;

  CLI::App* snr = app.add_subcommand(
      "snr-loss", "CDF/pdf table of the SNR loss per (K, nu)");
  add_common_options(snr, args);

  CLI::App* beta = app.add_subcommand(
      "beta", "CDF table of the Kelly loss factor per (K, nu)");
  add_common_options(beta, args);

  CLI::App* ttilde = app.add_subcommand(
      "ttilde", "CDF table of the Kelly statistic per (K, nu)");
  add_common_options(ttilde, args);
  ttilde->add_option("--hypothesis", hypothesis, "h0 or h1")
      ->check(CLI::IsMember({"h0", "h1"}));

  CLI::App* mean = app.add_subcommand(
      "mean-vs-k", "Analytic mean SNR loss vs K with MC cross-checks");
  add_common_options(mean, args);

  CLI::App* findk = app.add_subcommand(
      "find-k", "Smallest K with mean SNR loss >= 1/2 per nu");
  add_common_options(findk, args);

  CLI::App* pfa = app.add_subcommand(
      "pfa", "False-alarm probability at the Gaussian-calibrated threshold");
  add_common_options(pfa, args);
  pfa->add_option("--pfa-target", pfa_target, "Nominal false-alarm rate");
  pfa->add_option("--pfa-trials", pfa_trials, "Trials per (nu, K) cell");

  CLI::App* verify = app.add_subcommand(
      "verify", "Run the two-path validation and analytic cross-checks");
  verify->add_option("--seed", args.seed, "Base RNG seed");
  verify->add_option("--threads", args.threads, "Worker threads");
  verify->add_option("--trials", args.trials,
                     "Trials per two-path comparison (default 100000)");
  verify->add_flag("--quick", verify_quick,
                   "Single-cell grid instead of the full (K, nu) grid");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (snr->parsed()) {
      return emit(amfloss::generate_fig_snrloss(to_config(args)), args);
    }
    if (beta->parsed()) {
      return emit(amfloss::generate_fig_statistic_cdf(
                      amfloss::DetectorStatistic::beta, amfloss::Hypothesis::h0,
                      to_config(args)),
                  args);
    }
    if (ttilde->parsed()) {
      const auto hyp = (hypothesis == "h1") ? amfloss::Hypothesis::h1
                                            : amfloss::Hypothesis::h0;
      return emit(amfloss::generate_fig_statistic_cdf(
                      amfloss::DetectorStatistic::t_tilde, hyp,
                      to_config(args)),
                  args);
    }
    if (mean->parsed()) {
      return emit(amfloss::generate_fig_mean_vs_k(to_config(args)), args);
    }
    if (findk->parsed()) {
      return emit(amfloss::generate_fig_find_k(to_config(args)), args);
    }
    if (pfa->parsed()) {
      FigureConfig config = to_config(args);
      config.pfa_target = pfa_target;
      config.pfa_trials = pfa_trials;
      return emit(amfloss::generate_fig_pfa(config), args);
    }
    if (verify->parsed()) {
      amfloss::VerifyOptions options;
      options.seed = args.seed;
      options.threads = args.threads;
      options.full_grid = !verify_quick;
      if (verify->count("--trials") > 0) options.ks_trials = args.trials;
      const amfloss::VerifyReport report = amfloss::run_verify_suite(options);
      amfloss::print_verify_report(report, std::cout);
      return report.all_pass() ? 0 : 3;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
