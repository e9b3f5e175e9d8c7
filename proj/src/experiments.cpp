#include "amfloss/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "amfloss/analytic.hpp"

namespace amfloss {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// Stream-offset regions keeping the sub-runs of one seed disjoint.
constexpr std::uint64_t kRepOffset = std::uint64_t{1} << 40;
constexpr std::uint64_t kRepTtildeIndependentOffset = std::uint64_t{2} << 40;
constexpr std::uint64_t kRepTtildeSharedOffset = std::uint64_t{3} << 40;

std::string cell_tag(const char* what, int k, int nu) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s:k=%d:nu=%d", what, k, nu);
  return buf;
}

}  // namespace

// ----- Empirical distributions ------------------------------------------------

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> samples)
    : samples_(std::move(samples)) {
  require(!samples_.empty(), "EmpiricalDistribution: requires samples");
  std::sort(samples_.begin(), samples_.end());
}

double EmpiricalDistribution::cdf_at(double x) const {
  require(!samples_.empty(), "EmpiricalDistribution: empty");
  const auto it = std::upper_bound(samples_.begin(), samples_.end(), x);
  return static_cast<double>(it - samples_.begin()) /
         static_cast<double>(samples_.size());
}

double EmpiricalDistribution::quantile(double p) const {
  require(!samples_.empty(), "EmpiricalDistribution: empty");
  require(p >= 0.0 && p <= 1.0, "quantile: p must be in [0, 1]");
  if (p == 0.0) return samples_.front();
  const auto n = static_cast<double>(samples_.size());
  const auto idx = static_cast<std::size_t>(std::ceil(p * n)) - 1;
  return samples_[std::min(idx, samples_.size() - 1)];
}

double ks_distance(const EmpiricalDistribution& a,
                   const EmpiricalDistribution& b) {
  const auto& as = a.sorted_samples();
  const auto& bs = b.sorted_samples();
  const double na = static_cast<double>(as.size());
  const double nb = static_cast<double>(bs.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < as.size() || j < bs.size()) {
    double x;
    if (i < as.size() && (j >= bs.size() || as[i] <= bs[j])) {
      x = as[i];
    } else {
      x = bs[j];
    }
    while (i < as.size() && as[i] == x) ++i;
    while (j < bs.size() && bs[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  return d;
}

double ks_distance_to(const EmpiricalDistribution& a,
                      const std::function<double(double)>& cdf) {
  const auto& as = a.sorted_samples();
  const double n = static_cast<double>(as.size());
  double d = 0.0;
  for (std::size_t i = 0; i < as.size(); ++i) {
    const double f = cdf(as[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(f - static_cast<double>(i + 1) / n));
  }
  return d;
}

std::vector<std::pair<double, double>> empirical_cdf_at(
    const EmpiricalDistribution& dist, std::span<const double> grid) {
  std::vector<std::pair<double, double>> out;
  out.reserve(grid.size());
  for (const double x : grid) out.emplace_back(x, dist.cdf_at(x));
  return out;
}

// ----- Seed derivation ---------------------------------------------------------

std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) {
  // FNV-1a over the tag, then a splitmix64-style finalizer mixing in the seed.
  std::uint64_t h = 14695981039346656037ULL;
  for (const char ch : tag) {
    h ^= static_cast<unsigned char>(ch);
    h *= 1099511628211ULL;
  }
  std::uint64_t z = seed ^ h;
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// ----- Monte Carlo runs --------------------------------------------------------

SignalModel default_signal_model(int n_channels) {
  require(n_channels >= 2, "default_signal_model: requires N >= 2");
  SignalModel model{HermitianPd::identity(n_channels),
                    ComplexVector::Zero(n_channels)};
  model.v(n_channels - 1) = 1.0;
  return model;
}

namespace {

TrialStatistics representation_trial(const RunConfig& config, RngStream& s) {
  const auto& sc = config.scenario;
  const double snr =
      (config.hypothesis == Hypothesis::h1) ? sc.snr_bar : 0.0;
  TrialStatistics out;
  if (config.training == TrainingDistribution::student) {
    out.rho = draw_rho_student(sc.n_channels, sc.k_training, sc.nu, s).value;
    out.beta =
        draw_beta_student(sc.n_channels, sc.k_training, sc.nu, sc.mu, s).value;
    out.t_tilde = draw_ttilde_student(sc.n_channels, sc.k_training, sc.nu,
                                      sc.mu, snr, config.coupling, s)
                      .value;
  } else {
    out.rho = draw_rho_gaussian(sc.n_channels, sc.k_training, s).value;
    out.beta = draw_beta_gaussian(sc.n_channels, sc.k_training, s).value;
    out.t_tilde =
        draw_ttilde_gaussian(sc.n_channels, sc.k_training, snr, s).value;
  }
  return out;
}

PathSamples collect_paths(const std::vector<TrialStatistics>& stats) {
  std::vector<double> rho(stats.size());
  std::vector<double> beta(stats.size());
  std::vector<double> tt(stats.size());
  for (std::size_t i = 0; i < stats.size(); ++i) {
    rho[i] = stats[i].rho;
    beta[i] = stats[i].beta;
    tt[i] = stats[i].t_tilde;
  }
  return PathSamples{EmpiricalDistribution(std::move(rho)),
                     EmpiricalDistribution(std::move(beta)),
                     EmpiricalDistribution(std::move(tt))};
}

}  // namespace

MonteCarloOutput run_monte_carlo(const RunConfig& config,
                                 const SignalModel& model) {
  config.scenario.validate();
  require(config.trials > 0, "run_monte_carlo: requires trials > 0");
  MonteCarloOutput out;
  if (config.path != SimulationPath::representation) {
    auto stats = map_trials<TrialStatistics>(
        config.trials, config.seed, 0, config.threads, [&](RngStream& s) {
          return simulate_direct(config.scenario, model, config.training,
                                 config.hypothesis, s);
        });
    out.direct = collect_paths(stats);
  }
  if (config.path != SimulationPath::direct) {
    auto stats = map_trials<TrialStatistics>(
        config.trials, config.seed, kRepOffset, config.threads,
        [&](RngStream& s) { return representation_trial(config, s); });
    out.representation = collect_paths(stats);
  }
  return out;
}

MonteCarloOutput run_monte_carlo(const RunConfig& config) {
  return run_monte_carlo(config, default_signal_model(config.scenario.n_channels));
}

TwoPathKs two_path_ks(const RunConfig& config) {
  RunConfig both = config;
  both.path = SimulationPath::both;
  both.coupling = TtildeCoupling::independent_denominator;
  const MonteCarloOutput base = run_monte_carlo(both);

  TwoPathKs out;
  out.rho = ks_distance(base.direct->rho, base.representation->rho);
  out.beta = ks_distance(base.direct->beta, base.representation->beta);
  out.t_tilde_independent =
      ks_distance(base.direct->t_tilde, base.representation->t_tilde);

  if (config.training == TrainingDistribution::student) {
    const auto& sc = config.scenario;
    const double snr =
        (config.hypothesis == Hypothesis::h1) ? sc.snr_bar : 0.0;
    auto shared = map_trials<double>(
        config.trials, config.seed, kRepTtildeSharedOffset, config.threads,
        [&](RngStream& s) {
          return draw_ttilde_student(sc.n_channels, sc.k_training, sc.nu,
                                     sc.mu, snr,
                                     TtildeCoupling::shared_denominator, s)
              .value;
        });
    out.t_tilde_shared = ks_distance(
        base.direct->t_tilde, EmpiricalDistribution(std::move(shared)));
  } else {
    out.t_tilde_shared = out.t_tilde_independent;
  }
  return out;
}

// ----- Tabular output ----------------------------------------------------------

namespace {

std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace

void write_csv(const Table& table, std::ostream& os) {
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c > 0) os << ',';
    os << table.columns[c];
  }
  os << '\n';
  for (const auto& row : table.rows) {
    require(row.size() == table.columns.size(),
            "write_csv: row width must match header");
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) os << ',';
      os << format_double(row[c]);
    }
    os << '\n';
  }
}

void write_json(const Table& table, std::ostream& os) {
  nlohmann::json j;
  j["columns"] = table.columns;
  j["rows"] = table.rows;
  os << j.dump(2) << '\n';
}

// ----- Figure data generators ---------------------------------------------------

namespace {

std::vector<int> default_nu_list(int n) { return {n + 2, 2 * n, 10 * n}; }

double mu_of(const FigureConfig& config, int nu) {
  const double mu = config.mu.value_or(
      ScenarioParams::default_mu(nu, config.n_channels));
  require(mu > 0.0, "figure config: mu must be positive");
  return mu;
}

std::vector<double> histogram_density(const EmpiricalDistribution& dist,
                                      double lo, double hi, int bins) {
  const auto& xs = dist.sorted_samples();
  std::vector<double> density(bins, 0.0);
  const double width = (hi - lo) / bins;
  const double norm = 1.0 / (static_cast<double>(xs.size()) * width);
  for (const double x : xs) {
    if (x <= lo || x > hi) continue;
    int b = static_cast<int>(std::ceil((x - lo) / width)) - 1;
    b = std::clamp(b, 0, bins - 1);
    density[static_cast<std::size_t>(b)] += norm;
  }
  return density;
}

std::string col_name(const char* prefix, int k, int nu) {
  char buf[64];
  if (nu >= 0) {
    std::snprintf(buf, sizeof(buf), "%s_k%d_nu%d", prefix, k, nu);
  } else {
    std::snprintf(buf, sizeof(buf), "%s_k%d", prefix, k);
  }
  return buf;
}

ScenarioParams make_scenario(const FigureConfig& config, int k, int nu) {
  ScenarioParams sc;
  sc.n_channels = config.n_channels;
  sc.k_training = k;
  sc.nu = nu;
  sc.mu = mu_of(config, nu);
  sc.snr_bar = config.snr_bar;
  return sc;
}

}  // namespace

Table generate_fig_snrloss(const FigureConfig& config) {
  const int n = config.n_channels;
  const int bins = config.bins;
  require(bins >= 10, "generate_fig_snrloss: requires at least 10 bins");
  const std::vector<int> k_list =
      config.k_list.empty() ? std::vector<int>{2 * n} : config.k_list;
  const std::vector<int> nu_list =
      config.nu_list.empty() ? default_nu_list(n) : config.nu_list;

  Table table;
  table.columns.push_back("rho");
  table.rows.assign(bins, {});
  const double width = 1.0 / bins;
  for (int i = 0; i < bins; ++i) {
    table.rows[i].push_back(width * (i + 1));
  }

  auto append_curve = [&](const EmpiricalDistribution& dist,
                          const std::function<double(double)>& pdf,
                          const std::string& cdf_col,
                          const std::string& pdf_mc_col,
                          const std::string& pdf_eq_col) {
    const std::vector<double> density =
        histogram_density(dist, 0.0, 1.0, bins);
    table.columns.push_back(cdf_col);
    table.columns.push_back(pdf_mc_col);
    table.columns.push_back(pdf_eq_col);
    for (int i = 0; i < bins; ++i) {
      const double value = table.rows[i][0];
      table.rows[i].push_back(dist.cdf_at(value));
      table.rows[i].push_back(density[static_cast<std::size_t>(i)]);
      table.rows[i].push_back(pdf(value));
    }
  };

  for (const int k : k_list) {
    for (const int nu : nu_list) {
      const bool direct = config.path == SimulationPath::direct;
      const std::uint64_t seed =
          derive_seed(config.seed, cell_tag("snrloss", k, nu));
      std::vector<double> samples;
      if (direct) {
        const ScenarioParams sc = make_scenario(config, k, nu);
        const SignalModel model = default_signal_model(n);
        auto stats = map_trials<TrialStatistics>(
            config.trials, seed, 0, config.threads, [&](RngStream& s) {
              return simulate_direct(sc, model, TrainingDistribution::student,
                                     Hypothesis::h0, s);
            });
        samples.resize(stats.size());
        for (std::size_t i = 0; i < stats.size(); ++i) samples[i] = stats[i].rho;
      } else {
        samples = map_trials<double>(
            config.trials, seed, 0, config.threads,
            [&](RngStream& s) { return draw_rho_student(n, k, nu, s).value; });
      }
      append_curve(EmpiricalDistribution(std::move(samples)),
                   [&](double rho) { return pdf_rho_student(rho, n, k, nu); },
                   col_name("cdf_student", k, nu),
                   col_name("pdf_mc_student", k, nu),
                   col_name("pdf_eq_student", k, nu));
    }
    // Gaussian reference for this K.
    const std::uint64_t seed =
        derive_seed(config.seed, cell_tag("snrloss_gauss", k, -1));
    auto samples = map_trials<double>(
        config.trials, seed, 0, config.threads,
        [&](RngStream& s) { return draw_rho_gaussian(n, k, s).value; });
    append_curve(EmpiricalDistribution(std::move(samples)),
                 [&](double rho) { return pdf_rho_given_f1(rho, 0.0, n, k); },
                 col_name("cdf_gaussian", k, -1),
                 col_name("pdf_mc_gaussian", k, -1),
                 col_name("pdf_eq_gaussian", k, -1));
  }
  return table;
}

Table generate_fig_statistic_cdf(DetectorStatistic statistic,
                                 Hypothesis hypothesis,
                                 const FigureConfig& config) {
  const int n = config.n_channels;
  const int bins = config.bins;
  require(bins >= 10, "generate_fig_statistic_cdf: requires at least 10 bins");
  const std::vector<int> k_list =
      config.k_list.empty() ? std::vector<int>{2 * n} : config.k_list;
  const std::vector<int> nu_list =
      config.nu_list.empty() ? default_nu_list(n) : config.nu_list;
  const double snr = (hypothesis == Hypothesis::h1) ? config.snr_bar : 0.0;

  struct Curve {
    std::string name;
    EmpiricalDistribution dist;
  };
  std::vector<Curve> curves;
  const char* what =
      (statistic == DetectorStatistic::beta) ? "beta" : "ttilde";
  for (const int k : k_list) {
    for (const int nu : nu_list) {
      const double mu = mu_of(config, nu);
      const std::uint64_t seed = derive_seed(config.seed, cell_tag(what, k, nu));
      auto samples = map_trials<double>(
          config.trials, seed, 0, config.threads, [&](RngStream& s) {
            if (statistic == DetectorStatistic::beta) {
              return draw_beta_student(n, k, nu, mu, s).value;
            }
            return draw_ttilde_student(n, k, nu, mu, snr, config.coupling, s)
                .value;
          });
      curves.push_back(Curve{col_name((std::string("cdf_student_") + what).c_str(), k, nu),
                             EmpiricalDistribution(std::move(samples))});
    }
    const std::uint64_t seed =
        derive_seed(config.seed, cell_tag((std::string(what) + "_gauss").c_str(), k, -1));
    auto samples = map_trials<double>(
        config.trials, seed, 0, config.threads, [&](RngStream& s) {
          if (statistic == DetectorStatistic::beta) {
            return draw_beta_gaussian(n, k, s).value;
          }
          return draw_ttilde_gaussian(n, k, snr, s).value;
        });
    curves.push_back(Curve{col_name((std::string("cdf_gaussian_") + what).c_str(), k, -1),
                           EmpiricalDistribution(std::move(samples))});
  }

  // A loss factor lives on (0, 1]; the detection statistic gets a grid up
  // to a rounded high quantile of the pooled curves.
  double hi = 1.0;
  if (statistic == DetectorStatistic::t_tilde) {
    double q = 0.0;
    for (const Curve& c : curves) q = std::max(q, c.dist.quantile(0.995));
    const double mag = std::pow(10.0, std::floor(std::log10(q)) - 1.0);
    hi = std::ceil(q / mag) * mag;
  }

  Table table;
  table.columns.push_back(what);
  table.rows.assign(bins, {});
  for (int i = 0; i < bins; ++i) {
    table.rows[i].push_back(hi * (i + 1) / bins);
  }
  for (const Curve& c : curves) {
    table.columns.push_back(c.name);
    for (int i = 0; i < bins; ++i) {
      table.rows[i].push_back(c.dist.cdf_at(table.rows[i][0]));
    }
  }
  return table;
}

Table generate_fig_mean_vs_k(const FigureConfig& config) {
  const int n = config.n_channels;
  std::vector<int> k_list = config.k_list;
  if (k_list.empty()) {
    for (int k = n; k <= 4 * n; k += 4) k_list.push_back(k);
  }
  const std::vector<int> nu_list =
      config.nu_list.empty() ? default_nu_list(n) : config.nu_list;

  Table table;
  table.columns.push_back("k");
  table.columns.push_back("mean_gaussian");
  for (const int nu : nu_list) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "mean_student_nu%d", nu);
    table.columns.push_back(buf);
    std::snprintf(buf, sizeof(buf), "mc_mean_nu%d", nu);
    table.columns.push_back(buf);
  }

  for (const int k : k_list) {
    std::vector<double> row;
    row.push_back(k);
    row.push_back(mean_rho_gaussian(n, k));
    for (const int nu : nu_list) {
      row.push_back(mean_rho_student(n, k, nu));
      const std::uint64_t seed =
          derive_seed(config.seed, cell_tag("meanvk", k, nu));
      const double mc =
          sum_trials(config.trials, seed, 0, config.threads,
                     [&](RngStream& s) {
                       return draw_rho_student(n, k, nu, s).value;
                     }) /
          static_cast<double>(config.trials);
      row.push_back(mc);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

int find_k_for_half_loss(int n, int nu, int k_max) {
  for (int k = n; k <= k_max; ++k) {
    if (mean_rho_student(n, k, nu) >= 0.5) return k;
  }
  throw std::runtime_error("find_k_for_half_loss: no K up to k_max reaches 1/2");
}

int find_k_for_half_loss_gaussian(int n, int k_max) {
  // The nu -> infinity route: evaluate the Student mean at a shape large
  // enough to be indistinguishable from Gaussian training at this scale.
  constexpr int kGaussianProxyNu = 1000000;
  return find_k_for_half_loss(n, kGaussianProxyNu, k_max);
}

Table generate_fig_find_k(const FigureConfig& config) {
  const int n = config.n_channels;
  std::vector<int> nu_list = config.nu_list;
  if (nu_list.empty()) {
    nu_list = {n + 2,     (5 * n) / 4, (3 * n) / 2, 2 * n, 3 * n,
               4 * n,     6 * n,       8 * n,       10 * n};
  }
  Table table;
  table.columns = {"nu", "k_half"};
  // nu = 0 encodes the Gaussian reference row.
  table.rows.push_back({0.0, static_cast<double>(find_k_for_half_loss_gaussian(n))});
  for (const int nu : nu_list) {
    table.rows.push_back(
        {static_cast<double>(nu),
         static_cast<double>(find_k_for_half_loss(n, nu))});
  }
  return table;
}

Table generate_fig_pfa(const FigureConfig& config) {
  const int n = config.n_channels;
  const std::vector<int> k_list =
      config.k_list.empty() ? std::vector<int>{2 * n, 4 * n} : config.k_list;
  std::vector<int> nu_list = config.nu_list;
  if (nu_list.empty()) {
    nu_list = {n + 2, (3 * n) / 2, 2 * n, 3 * n, 4 * n,
               6 * n, 8 * n,       10 * n, 12 * n};
  }

  Table table;
  table.columns.push_back("nu");
  for (const int k : k_list) {
    table.columns.push_back(col_name("pfa_student", k, -1));
    table.columns.push_back(col_name("se_student", k, -1));
    table.columns.push_back(col_name("pfa_gaussian", k, -1));
  }
  table.columns.push_back("target");

  for (const int nu : nu_list) {
    std::vector<double> row;
    row.push_back(nu);
    for (const int k : k_list) {
      const double eta = gaussian_pfa_threshold(config.pfa_target, n, k);
      const double mu = mu_of(config, nu);
      const std::uint64_t seed = derive_seed(config.seed, cell_tag("pfa", k, nu));
      const std::int64_t hits = count_trials(
          config.pfa_trials, seed, 0, config.threads, [&](RngStream& s) {
            return draw_ttilde_student(n, k, nu, mu, 0.0, config.coupling, s)
                       .value > eta;
          });
      const double pfa =
          static_cast<double>(hits) / static_cast<double>(config.pfa_trials);
      row.push_back(pfa);
      row.push_back(std::sqrt(pfa * (1.0 - pfa) /
                              static_cast<double>(config.pfa_trials)));
      const std::uint64_t gseed =
          derive_seed(config.seed, cell_tag("pfa_gauss", k, nu));
      const std::int64_t ghits = count_trials(
          config.pfa_trials, gseed, 0, config.threads, [&](RngStream& s) {
            return draw_ttilde_gaussian(n, k, 0.0, s).value > eta;
          });
      row.push_back(static_cast<double>(ghits) /
                    static_cast<double>(config.pfa_trials));
    }
    row.push_back(config.pfa_target);
    table.rows.push_back(std::move(row));
  }
  return table;
}

// ----- Verification suite ---------------------------------------------------------

bool VerifyReport::all_pass() const {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

namespace {

void add_check(VerifyReport& report, std::string name, double measured,
               double threshold, bool below_is_pass = true) {
  VerifyCheck c;
  c.name = std::move(name);
  c.measured = measured;
  c.threshold = threshold;
  c.pass = below_is_pass ? (measured < threshold) : (measured > threshold);
  report.checks.push_back(std::move(c));
}

double max_abs_correlation(const std::vector<double>& xs,
                           const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  return std::abs(sxy / std::sqrt(sxx * syy));
}

// Sup distance between a histogram density of the samples and an analytic
// density evaluated at bin midpoints.
double density_sup_distance(const std::vector<double>& samples, double lo,
                            double hi, int bins,
                            const std::function<double(double)>& pdf) {
  EmpiricalDistribution dist{samples};
  const std::vector<double> density = histogram_density(dist, lo, hi, bins);
  const double width = (hi - lo) / bins;
  double sup = 0.0;
  for (int b = 0; b < bins; ++b) {
    const double mid = lo + width * (b + 0.5);
    sup = std::max(sup,
                   std::abs(density[static_cast<std::size_t>(b)] - pdf(mid)));
  }
  return sup;
}

}  // namespace

VerifyReport run_verify_suite(const VerifyOptions& options) {
  VerifyReport report;
  const int n = options.n_channels;
  require(n >= 2, "run_verify_suite: requires N >= 2");

  // --- Two-path agreement over the (K, nu) grid, both hypotheses ---
  const std::vector<int> k_grid = options.full_grid
                                      ? std::vector<int>{(3 * n) / 2, 2 * n, 4 * n}
                                      : std::vector<int>{2 * n};
  const std::vector<int> nu_grid = options.full_grid
                                       ? std::vector<int>{n + 2, 2 * n, 10 * n}
                                       : std::vector<int>{2 * n};
  struct CellResult {
    int k, nu;
    Hypothesis hyp;
    TwoPathKs ks;
  };
  std::vector<CellResult> cells;
  for (const int k : k_grid) {
    for (const int nu : nu_grid) {
      for (const Hypothesis hyp : {Hypothesis::h0, Hypothesis::h1}) {
        RunConfig config;
        config.scenario.n_channels = n;
        config.scenario.k_training = k;
        config.scenario.nu = nu;
        config.scenario.mu = ScenarioParams::default_mu(nu, n);
        config.scenario.snr_bar = 10.0;
        config.trials = options.ks_trials;
        config.seed = derive_seed(options.seed,
                                  cell_tag(hyp == Hypothesis::h0 ? "verify_h0"
                                                                 : "verify_h1",
                                           k, nu));
        config.hypothesis = hyp;
        config.threads = options.threads;
        cells.push_back(CellResult{k, nu, hyp, two_path_ks(config)});
      }
    }
  }

  // Select the t_tilde denominator coupling with the smaller worst-case KS.
  double worst_independent = 0.0;
  double worst_shared = 0.0;
  for (const auto& cell : cells) {
    worst_independent = std::max(worst_independent, cell.ks.t_tilde_independent);
    worst_shared = std::max(worst_shared, cell.ks.t_tilde_shared);
  }
  report.selected_coupling = (worst_shared < worst_independent)
                                 ? TtildeCoupling::shared_denominator
                                 : TtildeCoupling::independent_denominator;

  for (const auto& cell : cells) {
    char buf[96];
    const char* hyp = (cell.hyp == Hypothesis::h0) ? "H0" : "H1";
    std::snprintf(buf, sizeof(buf), "two-path KS rho (K=%d, nu=%d, %s)",
                  cell.k, cell.nu, hyp);
    add_check(report, buf, cell.ks.rho, 0.01);
    std::snprintf(buf, sizeof(buf), "two-path KS beta (K=%d, nu=%d, %s)",
                  cell.k, cell.nu, hyp);
    add_check(report, buf, cell.ks.beta, 0.01);
    const double tt =
        (report.selected_coupling == TtildeCoupling::shared_denominator)
            ? cell.ks.t_tilde_shared
            : cell.ks.t_tilde_independent;
    std::snprintf(buf, sizeof(buf), "two-path KS t_tilde (K=%d, nu=%d, %s)",
                  cell.k, cell.nu, hyp);
    add_check(report, buf, tt, 0.01);
  }

  // --- Density normalization and marginalization ---
  const int k_ref = 2 * n;
  for (const int nu : nu_grid) {
    const QuadratureResult norm = integrate(
        [&](double rho) { return pdf_rho_student(rho, n, k_ref, nu); }, 0.0,
        1.0, 1e-10, 0.0);
    char buf[96];
    std::snprintf(buf, sizeof(buf), "|pdf_rho_student integral - 1| (nu=%d)", nu);
    add_check(report, buf, std::abs(norm.value - 1.0), 1e-6);
  }
  {
    // Marginalizing the conditional density over F1 must recover the
    // closed-form marginal.
    const int nu = 2 * n;
    double worst_rel = 0.0;
    for (int i = 1; i <= 10; ++i) {
      const double rho = static_cast<double>(i) / 11.0;
      const QuadratureResult marg = integrate(
          [&](double u) {
            // Map f1 = u/(1-u) onto [0, 1).
            const double f1 = u / (1.0 - u);
            const double jac = 1.0 / ((1.0 - u) * (1.0 - u));
            return pdf_rho_given_f1(rho, f1, n, k_ref) *
                   pdf_f1(f1, n, k_ref, nu) * jac;
          },
          0.0, 1.0, 1e-10, 0.0);
      const double direct_value = pdf_rho_student(rho, n, k_ref, nu);
      worst_rel = std::max(worst_rel,
                           std::abs(marg.value - direct_value) / direct_value);
    }
    add_check(report, "pdf_rho_student vs marginalized conditional (rel)",
              worst_rel, 1e-6);
  }

  // --- Means: series, quadrature, Monte Carlo ---
  for (const int nu : nu_grid) {
    const double analytic = mean_rho_student(n, k_ref, nu);
    const QuadratureResult quad = integrate(
        [&](double rho) { return rho * pdf_rho_student(rho, n, k_ref, nu); },
        0.0, 1.0, 1e-10, 0.0);
    const std::uint64_t seed =
        derive_seed(options.seed, cell_tag("verify_mean", k_ref, nu));
    const double mc = sum_trials(options.mean_trials, seed, 0, options.threads,
                                 [&](RngStream& s) {
                                   return draw_rho_student(n, k_ref, nu, s).value;
                                 }) /
                      static_cast<double>(options.mean_trials);
    char buf[96];
    std::snprintf(buf, sizeof(buf), "|mean series - quadrature| (nu=%d)", nu);
    add_check(report, buf, std::abs(analytic - quad.value), 1e-6);
    std::snprintf(buf, sizeof(buf), "|mean series - MC| (nu=%d)", nu);
    add_check(report, buf, std::abs(analytic - mc), 0.002);
  }

  // --- Partitioned-F block laws ---
  {
    // Independence of the Schur complement and the trailing block.
    const std::uint64_t seed = derive_seed(options.seed, "verify_block_corr");
    struct BlockDraw {
      double tr_schur, f22;
    };
    auto draws = map_trials<BlockDraw>(
        std::min<std::int64_t>(options.block_trials, 100000), seed, 0,
        options.threads, [&](RngStream& s) {
          const HermitianPd f = sample_complex_f(3, 8, 12, s);
          const PartitionedF pf = partition_f(f, 2);
          const HermitianPd schur = schur_f(pf);
          return BlockDraw{schur.mat().trace().real(), pf.f22(0, 0).real()};
        });
    std::vector<double> xs(draws.size());
    std::vector<double> ys(draws.size());
    for (std::size_t i = 0; i < draws.size(); ++i) {
      xs[i] = draws[i].tr_schur;
      ys[i] = draws[i].f22;
    }
    add_check(report, "|corr(tr F1.2, F22)| (p=3, 8, 12)",
              max_abs_correlation(xs, ys), 0.01);
  }
  {
    // Trailing-block density against the closed form.
    const int q = 2 * n;
    const int dof2 = 2 * n;
    const std::uint64_t seed = derive_seed(options.seed, "verify_block_f22");
    auto f22 = map_trials<double>(
        options.block_trials, seed, 0, options.threads, [&](RngStream& s) {
          const HermitianPd f = sample_complex_f(n, q, dof2, s);
          return f.mat()(n - 1, n - 1).real();
        });
    add_check(report, "sup |F22 histogram - pdf_f22| (p=16 geometry)",
              density_sup_distance(f22, 0.0, 5.0, 100,
                                   [&](double x) {
                                     return pdf_f22(x, n, q, dof2);
                                   }),
              0.05);
  }
  {
    // Block-ratio norm density against the closed form.
    const int p = 4;
    const int q = 8;
    const int dof2 = 16;
    const std::uint64_t seed = derive_seed(options.seed, "verify_block_t12");
    auto t12 = map_trials<double>(
        options.block_trials, seed, 0, options.threads, [&](RngStream& s) {
          const HermitianPd f = sample_complex_f(p, q, dof2, s);
          const PartitionedF pf = partition_f(f, p - 1);
          const double f22 = pf.f22(0, 0).real();
          return (pf.f12 / f22).squaredNorm();
        });
    add_check(report, "sup ||t12||^2 histogram - pdf (p=4, q=8, n=16)",
              density_sup_distance(t12, 0.0, 3.0, 100,
                                   [&](double s) {
                                     return pdf_t12_norm_sq(s, p, q, dof2);
                                   }),
              0.05);
  }

  // --- Corrupted representation must fail ---
  {
    // Dropping the (1 + F22^{-1}) mismatch factor reduces the Student
    // representation to the Gaussian one; it must be far from the direct
    // Student path.
    RunConfig config;
    config.scenario.n_channels = n;
    config.scenario.k_training = 2 * n;
    config.scenario.nu = 2 * n;
    config.scenario.mu = ScenarioParams::default_mu(2 * n, n);
    config.scenario.snr_bar = 0.0;
    config.trials = options.ks_trials;
    config.seed = derive_seed(options.seed, "verify_mutation");
    config.path = SimulationPath::direct;
    config.training = TrainingDistribution::student;
    config.threads = options.threads;
    const MonteCarloOutput direct = run_monte_carlo(config);
    auto corrupted = map_trials<double>(
        config.trials, config.seed, kRepOffset, options.threads,
        [&](RngStream& s) { return draw_rho_gaussian(n, 2 * n, s).value; });
    add_check(report, "corrupted representation KS (must exceed)",
              ks_distance(direct.direct->rho,
                          EmpiricalDistribution(std::move(corrupted))),
              0.05, /*below_is_pass=*/false);
  }

  // --- Gaussian false-alarm calibration ---
  {
    const double target = 1e-3;
    const double eta = gaussian_pfa_threshold(target, n, 2 * n);
    const std::int64_t trials = 1000000;
    const std::uint64_t seed = derive_seed(options.seed, "verify_pfa");
    const std::int64_t hits =
        count_trials(trials, seed, 0, options.threads, [&](RngStream& s) {
          return draw_ttilde_gaussian(n, 2 * n, 0.0, s).value > eta;
        });
    const double pfa = static_cast<double>(hits) / static_cast<double>(trials);
    add_check(report, "Gaussian Pfa relative error at calibrated threshold",
              std::abs(pfa / target - 1.0), 0.15);
  }

  return report;
}

void print_verify_report(const VerifyReport& report, std::ostream& os) {
  std::size_t width = 0;
  for (const auto& c : report.checks) width = std::max(width, c.name.size());
  for (const auto& c : report.checks) {
    os << (c.pass ? "[PASS] " : "[FAIL] ") << c.name
       << std::string(width - c.name.size() + 2, ' ') << "measured "
       << format_double(c.measured) << "  vs  " << format_double(c.threshold)
       << '\n';
  }
  os << "t_tilde denominator coupling selected: "
     << (report.selected_coupling == TtildeCoupling::shared_denominator
             ? "shared"
             : "independent")
     << '\n';
  os << (report.all_pass() ? "RESULT: PASS" : "RESULT: FAIL") << '\n';
}

}  // namespace amfloss
