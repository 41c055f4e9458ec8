#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "mtp/math.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("harmonic numbers") {
  REQUIRE(mtp::harmonic_number(1) == 1.0);
  REQUIRE_THAT(mtp::harmonic_number(4), WithinRel(25.0 / 12.0, 1e-15));
  REQUIRE_THAT(mtp::harmonic_number(2), WithinRel(1.5, 1e-15));
}

TEST_CASE("normal quantile inverts the normal CDF") {
  REQUIRE_THAT(mtp::norm_quantile(0.5), WithinAbs(0.0, 1e-16));
  REQUIRE_THAT(mtp::norm_quantile(0.975), WithinAbs(1.959963984540054, 1e-12));
  // central region round trip
  for (double z = -2.0; z <= 2.0; z += 0.125) {
    const double back = mtp::norm_quantile(mtp::norm_cdf(z));
    REQUIRE_THAT(back, WithinAbs(z, 1e-12));
  }
  // tails through the lower-side CDF, which keeps full relative precision
  // (p near 1 is only representable to ~1e-16 absolute, so the upper-side
  // round trip is limited by the input, not the approximation)
  for (double z = 2.0; z <= 8.0; z += 0.25) {
    const double back = mtp::norm_quantile(mtp::norm_cdf(-z));
    REQUIRE_THAT(back, WithinAbs(-z, 1e-9 * z));
  }
  REQUIRE(mtp::norm_quantile(0.0) == -std::numeric_limits<double>::infinity());
  REQUIRE(mtp::norm_quantile(1.0) == std::numeric_limits<double>::infinity());
}

TEST_CASE("two-sided p-value") {
  REQUIRE_THAT(mtp::two_sided_pvalue(0.0), WithinAbs(1.0, 1e-15));
  REQUIRE_THAT(mtp::two_sided_pvalue(1.959963984540054), WithinAbs(0.05, 1e-12));
  REQUIRE(mtp::two_sided_pvalue(-3.0) == mtp::two_sided_pvalue(3.0));
}

TEST_CASE("summary helpers") {
  const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
  REQUIRE_THAT(mtp::mean_of(xs), WithinAbs(2.5, 1e-15));
  REQUIRE_THAT(mtp::sample_sd(xs), WithinRel(std::sqrt(5.0 / 3.0), 1e-14));
  REQUIRE(mtp::sample_sd(std::vector<double>{7.0}) == 0.0);

  REQUIRE_THAT(mtp::quantile_sorted(xs, 0.5), WithinAbs(2.5, 1e-15));
  REQUIRE(mtp::quantile_sorted(xs, 0.0) == 1.0);
  REQUIRE(mtp::quantile_sorted(xs, 1.0) == 4.0);
  REQUIRE_THAT(mtp::quantile_of(std::vector<double>{3.0, 1.0, 2.0}, 0.5),
               WithinAbs(2.0, 1e-15));
}

TEST_CASE("lag-1 autocorrelation") {
  REQUIRE(mtp::lag1_autocorrelation(std::vector<double>{2.0, 2.0, 2.0}) == 0.0);
  std::vector<double> alternating;
  for (int i = 0; i < 200; ++i) alternating.push_back(i % 2 ? 1.0 : -1.0);
  REQUIRE(mtp::lag1_autocorrelation(alternating) < -0.9);
}
