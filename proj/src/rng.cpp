#include "amfloss/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace amfloss {

namespace {

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

// splitmix64 step: advances the counter and returns a mixed output.
inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  // Hash seed and stream id together, then expand into the xoshiro state.
  std::uint64_t x = seed;
  std::uint64_t h = splitmix64(x);
  x = h ^ (stream_id * 0xD2B74407B1CE6E93ULL + 0x8BB84B93962EACC9ULL);
  for (auto& s : state_) s = splitmix64(x);
  if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) {
    state_[0] = 0x9E3779B97F4A7C15ULL;  // xoshiro state must not be all zero
  }
}

std::uint64_t RngStream::next_u64() {
  // xoshiro256++
  const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double RngStream::next_uniform() {
  // 53 random bits mapped to bin centers of a 2^53 grid: strictly in (0,1).
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::next_normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  const double u1 = next_uniform();
  const double u2 = next_uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  cached_normal_ = r * std::sin(t);
  has_cached_normal_ = true;
  return r * std::cos(t);
}

Complex RngStream::next_complex_normal() {
  // |z|^2 ~ Exp(1) and an independent uniform phase give CN(0,1) directly.
  const double u1 = next_uniform();
  const double u2 = next_uniform();
  const double r = std::sqrt(-std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(t), r * std::sin(t)};
}

double draw_gamma(double shape, RngStream& stream) {
  if (shape < 1.0) throw std::invalid_argument("draw_gamma: shape must be >= 1");
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = stream.next_normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = stream.next_uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

Complex draw_standard_complex_normal(RngStream& stream) {
  return stream.next_complex_normal();
}

double draw_complex_chi_square(int q, RngStream& stream) {
  if (q < 1) throw std::invalid_argument("draw_complex_chi_square: q must be >= 1");
  return draw_gamma(static_cast<double>(q), stream);
}

double draw_noncentral_complex_chi_square_1(double delta, RngStream& stream) {
  if (delta < 0.0) {
    throw std::invalid_argument(
        "draw_noncentral_complex_chi_square_1: delta must be >= 0");
  }
  const Complex z = stream.next_complex_normal();
  const double re = std::sqrt(delta) + z.real();
  const double im = z.imag();
  return re * re + im * im;
}

}  // namespace amfloss
