#pragma once

// Small statistical helpers shared by the test binaries: sample moments,
// histogram sup-norm against a reference density, and correlation.  All
// tolerances in the tests are several MC standard errors wide at the stated
// trial counts, and every stream is seeded with a fixed constant, so the
// checks are deterministic.

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace testutil {

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double variance(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

inline double correlation(const std::vector<double>& a,
                          const std::vector<double>& b) {
  const double ma = mean(a);
  const double mb = mean(b);
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

// Sup-norm between the normalized histogram of `samples` on [lo, hi] with
// `bins` equal bins and `density` evaluated at bin centers.  Samples outside
// [lo, hi] contribute no mass (consistent with comparing a density tail that
// has been truncated away).
inline double histogram_sup_norm(const std::vector<double>& samples, double lo,
                                 double hi, int bins,
                                 const std::function<double(double)>& density) {
  std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
  const double width = (hi - lo) / bins;
  for (double x : samples) {
    if (x < lo || x >= hi) continue;
    const int b = static_cast<int>((x - lo) / width);
    if (b >= 0 && b < bins) counts[static_cast<std::size_t>(b)] += 1.0;
  }
  const double norm = 1.0 / (static_cast<double>(samples.size()) * width);
  double sup = 0.0;
  for (int b = 0; b < bins; ++b) {
    const double center = lo + (b + 0.5) * width;
    const double diff =
        std::fabs(counts[static_cast<std::size_t>(b)] * norm - density(center));
    if (diff > sup) sup = diff;
  }
  return sup;
}

}  // namespace testutil
