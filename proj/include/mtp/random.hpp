#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>

#include "mtp/errors.hpp"
#include "mtp/math.hpp"

namespace mtp::random {

/// splitmix64 step: advances `state` and returns a well-mixed 64-bit word.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Derives an independent sub-seed from a master seed and a fixed tag.
/// Used to decouple RNG consumers that share one user-facing seed
/// (e.g. the weighted-Bonferroni comparison inside a sensitivity run).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t s = seed ^ (0xD1B54A32D192ED03ull * (tag + 1));
  splitmix64(s);
  return splitmix64(s);
}

/// Counter-style random stream: the generator state is a pure function of
/// (master seed, stream id), so draw s of a Monte Carlo run can be computed
/// by any worker in any order with identical results. The core generator is
/// xoshiro256++ seeded through splitmix64.
class Stream {
 public:
  Stream(std::uint64_t master_seed, std::uint64_t stream_id) {
    std::uint64_t s = master_seed;
    const std::uint64_t a = splitmix64(s);
    s = stream_id ^ 0x6A09E667F3BCC909ull;
    const std::uint64_t b = splitmix64(s);
    s = a ^ (b + 0x9E3779B97F4A7C15ull);
    for (auto& w : state_) w = splitmix64(s);
  }

  std::uint64_t next_u64() {
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

  /// Uniform on [0,1), 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on the open interval (0,1); safe under log().
  double open_uniform() {
    return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::array<std::uint64_t, 4> state_;
};

/// Standard normal draw via the AS 241 inverse CDF: one uniform per normal,
/// no rejection loop, reproducible across platforms to printable precision.
inline double normal(Stream& g) { return norm_quantile(g.open_uniform()); }

inline double exponential(Stream& g, double rate = 1.0) {
  return -std::log(g.open_uniform()) / rate;
}

/// Marsaglia-Tsang squeeze sampler for Gamma(shape, 1), shape >= 1.
inline double gamma_large(Stream& g, double shape) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / (3.0 * std::sqrt(d));
  for (;;) {
    double x, v;
    do {
      x = normal(g);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    if (v <= 0.0) continue;  // cube underflowed
    const double u = g.open_uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

/// log of a Gamma(shape, 1) draw. Shapes below 1 use the boost
/// Gamma(shape) = Gamma(shape+1) * U^(1/shape) applied in log space, which
/// stays finite for shapes as small as ~1e-300 where a direct draw would
/// underflow to zero.
inline double log_gamma_draw(Stream& g, double shape) {
  if (shape == 1.0) return std::log(exponential(g));
  if (shape >= 1.0) return std::log(gamma_large(g, shape));
  return std::log(gamma_large(g, shape + 1.0)) + std::log(g.open_uniform()) / shape;
}

/// Gamma(shape, 1) on the linear scale; may underflow to 0 for tiny shapes.
inline double gamma_draw(Stream& g, double shape) {
  if (shape >= 1.0) return gamma_large(g, shape);
  return std::exp(log_gamma_draw(g, shape));
}

inline double beta(Stream& g, double a, double b) {
  const double la = log_gamma_draw(g, a);
  const double lb = log_gamma_draw(g, b);
  if (la >= lb) return 1.0 / (1.0 + std::exp(lb - la));
  const double e = std::exp(la - lb);
  return e / (1.0 + e);
}

/// One Dirichlet(concentration) draw written into `out`. Components with
/// zero concentration are exactly zero. Normalization happens in log space
/// (log-sum-exp), so concentrations far below 1 yield valid near-point-mass
/// vectors instead of the all-zero vectors a linear-scale sampler produces.
/// Resamples up to 100 times if a draw carries no mass, then reports
/// errc::degenerate_draw.
inline void dirichlet(Stream& g, std::span<const double> concentration,
                      std::span<double> out) {
  if (concentration.size() != out.size())
    raise(errc::length_mismatch, "dirichlet: output size mismatch");
  if (concentration.empty())
    raise(errc::empty_input, "dirichlet: no concentration parameters");
  const std::size_t m = concentration.size();

  bool all_at_least_one = true;
  for (double c : concentration) {
    if (!(c >= 0.0)) raise(errc::invalid_config, "dirichlet: negative concentration");
    if (c < 1.0) all_at_least_one = false;
  }

  for (int attempt = 0; attempt < 100; ++attempt) {
    if (all_at_least_one) {
      long double total = 0.0L;
      for (std::size_t i = 0; i < m; ++i) {
        out[i] = concentration[i] == 0.0 ? 0.0 : gamma_large(g, concentration[i]);
        total += out[i];
      }
      if (total > 0.0L && std::isfinite(static_cast<double>(total))) {
        for (std::size_t i = 0; i < m; ++i)
          out[i] = static_cast<double>(out[i] / total);
        return;
      }
      continue;
    }
    double max_log = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      out[i] = concentration[i] == 0.0
                   ? -std::numeric_limits<double>::infinity()
                   : log_gamma_draw(g, concentration[i]);
      max_log = std::max(max_log, out[i]);
    }
    if (!std::isfinite(max_log)) continue;
    long double total = 0.0L;
    for (std::size_t i = 0; i < m; ++i) {
      out[i] = std::exp(out[i] - max_log);
      total += out[i];
    }
    for (std::size_t i = 0; i < m; ++i)
      out[i] = static_cast<double>(out[i] / total);
    return;
  }
  raise(errc::degenerate_draw, "dirichlet: draw carried no mass after 100 attempts");
}

}  // namespace mtp::random
