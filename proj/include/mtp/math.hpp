#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "mtp/errors.hpp"

namespace mtp {

/// H_m = sum_{j=1..m} 1/j, forward summation in an extended-precision
/// accumulator so that threshold comparisons never see accumulation error.
inline double harmonic_number(std::size_t m) {
  long double acc = 0.0L;
  for (std::size_t j = 1; j <= m; ++j) acc += 1.0L / static_cast<long double>(j);
  return static_cast<double>(acc);
}

/// Standard normal CDF.
inline double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// Two-sided p-value of a standard normal statistic, 2(1 - Phi(|z|)).
inline double two_sided_pvalue(double z) { return std::erfc(std::fabs(z) / std::sqrt(2.0)); }

/// Standard normal quantile function, Wichura's AS 241 (PPND16).
/// Relative error below 1e-15 across the double range; this is the rational
/// approximation used by R's qnorm.
inline double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    return std::numeric_limits<double>::quiet_NaN();
  }
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                  6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
              1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                  3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
              4.2313330701600911252e1) * r + 1.0);
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double x;
  if (r <= 5.0) {
    r -= 1.6;
    x = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
               2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
             3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
           4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
               1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
             6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
           2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
               1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
             2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
           5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
               1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
             1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
           5.99832206555887937690e-1) * r + 1.0);
  }
  return (q < 0.0) ? -x : x;
}

inline double mean_of(std::span<const double> xs) {
  if (xs.empty()) raise(errc::empty_draws, "mean of empty sample");
  long double acc = 0.0L;
  for (double x : xs) acc += x;
  return static_cast<double>(acc / static_cast<long double>(xs.size()));
}

/// Sample standard deviation (n-1 denominator); 0 for fewer than two points.
inline double sample_sd(std::span<const double> xs) {
  if (xs.empty()) raise(errc::empty_draws, "sd of empty sample");
  if (xs.size() < 2) return 0.0;
  const long double mu = mean_of(xs);
  long double acc = 0.0L;
  for (double x : xs) {
    const long double d = x - mu;
    acc += d * d;
  }
  return static_cast<double>(std::sqrt(acc / static_cast<long double>(xs.size() - 1)));
}

/// Empirical quantile with linear interpolation between order statistics
/// (R type 7). `sorted` must be nondecreasing, `prob` in [0,1].
inline double quantile_sorted(std::span<const double> sorted, double prob) {
  if (sorted.empty()) raise(errc::empty_draws, "quantile of empty sample");
  if (sorted.size() == 1) return sorted[0];
  const double h = prob * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline double quantile_of(std::span<const double> xs, double prob) {
  std::vector<double> s(xs.begin(), xs.end());
  std::sort(s.begin(), s.end());
  return quantile_sorted(s, prob);
}

/// Lag-1 autocorrelation; 0 for samples shorter than 3 or with zero variance.
inline double lag1_autocorrelation(std::span<const double> xs) {
  if (xs.size() < 3) return 0.0;
  const long double mu = mean_of(xs);
  long double num = 0.0L, den = 0.0L;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const long double d = xs[i] - mu;
    den += d * d;
    if (i + 1 < xs.size()) num += d * (xs[i + 1] - mu);
  }
  if (den <= 0.0L) return 0.0;
  return static_cast<double>(num / den);
}

}  // namespace mtp
