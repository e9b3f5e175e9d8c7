#pragma once

#include <array>
#include <complex>
#include <cstdint>

// Seedable random streams and the scalar complex variates built on them.
//
// Every stream is identified by a (seed, stream_id) pair and produces a
// bit-identical sequence for a fixed pair, independent of any other stream.
// Parallel Monte Carlo loops give each trial its own stream_id, so results
// do not depend on how trials are scheduled across threads.

namespace amfloss {

using Complex = std::complex<double>;

// xoshiro256++ generator whose state is derived from (seed, stream_id) by a
// splitmix64 hash chain.  Distinct stream ids yield statistically
// independent sequences without any shared mutable state.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64();

  // Uniform on the open interval (0, 1); never returns 0 or 1, so logs of
  // the result are always finite.
  double next_uniform();

  // Real standard normal N(0, 1) via Box-Muller (second value cached).
  double next_normal();

  // Standard circular complex normal CN(0, 1): E|z|^2 = 1, i.e. real and
  // imaginary parts are independent N(0, 1/2).
  Complex next_complex_normal();

 private:
  std::array<std::uint64_t, 4> state_;
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

// Gamma(shape, 1) via the Marsaglia-Tsang squeeze method; requires
// shape >= 1 (all shapes in this project are integers or integers minus
// small offsets, never below 1).  O(1) draws even for very large shapes.
double draw_gamma(double shape, RngStream& stream);

Complex draw_standard_complex_normal(RngStream& stream);

// Central complex chi-square with q complex degrees of freedom,
// i.e. |z_1|^2 + ... + |z_q|^2 for iid CN(0,1) entries: a Gamma(q, 1)
// variate with mean q.  Requires q >= 1.
double draw_complex_chi_square(int q, RngStream& stream);

// Noncentral complex chi-square with one complex degree of freedom and
// noncentrality delta >= 0: |sqrt(delta) + z|^2 with z ~ CN(0,1).
// Mean 1 + delta, variance 1 + 2*delta.
double draw_noncentral_complex_chi_square_1(double delta, RngStream& stream);

}  // namespace amfloss
