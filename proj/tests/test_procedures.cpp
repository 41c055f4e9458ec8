#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <vector>

#include "mtp/procedures.hpp"
#include "oracles.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

mtp::errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const mtp::Error& e) {
    return e.code();
  }
  FAIL("expected an mtp::Error");
  return mtp::errc::io_error;
}

mtp::PValueSet make_set(std::vector<double> values) {
  mtp::PValueSet ps;
  ps.values = std::move(values);
  for (std::size_t i = 0; i < ps.values.size(); ++i)
    ps.labels.push_back(std::to_string(i + 1));
  return ps;
}

}  // namespace

TEST_CASE("threshold functions") {
  SECTION("Benjamini-Hochberg: alpha r / m") {
    const auto t = mtp::thresholds(mtp::benjamini_hochberg(0.05), 4);
    REQUIRE(t.regime == mtp::Regime::step_up);
    const std::vector<double> expect{0.0125, 0.025, 0.0375, 0.05};
    for (int i = 0; i < 4; ++i) REQUIRE_THAT(t.deltas[i], WithinRel(expect[i], 1e-14));
  }
  SECTION("Benjamini-Yekutieli: alpha r / (m H_m)") {
    const auto t = mtp::thresholds(mtp::benjamini_yekutieli(0.05), 4);
    REQUIRE(t.regime == mtp::Regime::step_up);
    const std::vector<double> expect{0.006, 0.012, 0.018, 0.024};  // H_4 = 25/12
    for (int i = 0; i < 4; ++i) REQUIRE_THAT(t.deltas[i], WithinRel(expect[i], 1e-12));
  }
  SECTION("Bonferroni reduces to the plain level at m = 1") {
    const auto t = mtp::thresholds(mtp::bonferroni(0.037), 1);
    REQUIRE(t.regime == mtp::Regime::single_step);
    REQUIRE(t.deltas == std::vector<double>{0.037});
  }
  SECTION("Holm: alpha / (m - r + 1)") {
    const auto t = mtp::thresholds(mtp::holm(0.05), 3);
    REQUIRE(t.regime == mtp::Regime::step_down);
    REQUIRE_THAT(t.deltas[0], WithinRel(0.05 / 3, 1e-15));
    REQUIRE_THAT(t.deltas[1], WithinRel(0.025, 1e-15));
    REQUIRE_THAT(t.deltas[2], WithinRel(0.05, 1e-15));
  }
  SECTION("Sidak critical constant") {
    const auto t = mtp::thresholds(mtp::sidak(0.05), 2);
    REQUIRE_THAT(t.deltas[0], WithinAbs(1.0 - std::sqrt(0.95), 1e-14));
  }
  SECTION("alpha domain") {
    REQUIRE(code_of([] { mtp::thresholds(mtp::bonferroni(0.0), 3); }) ==
            mtp::errc::invalid_alpha);
    REQUIRE(code_of([] { mtp::thresholds(mtp::bonferroni(1.0), 3); }) ==
            mtp::errc::invalid_alpha);
  }
  SECTION("weight length mismatch") {
    REQUIRE(code_of([] {
              mtp::thresholds(mtp::weighted_bonferroni({0.5, 0.5}, 0.05), 3);
            }) == mtp::errc::weight_mismatch);
  }
  SECTION("generic step-up shape must be nondecreasing and bounded") {
    REQUIRE(code_of([] {
              mtp::thresholds(mtp::generic_step_up({1.0, 0.5}, 0.05), 2);
            }) == mtp::errc::invalid_config);
    REQUIRE(code_of([] {
              mtp::thresholds(mtp::generic_step_up({1.0, 5.0}, 0.05), 2);
            }) == mtp::errc::invalid_config);
  }
}

TEST_CASE("step-up engine") {
  const auto ps = make_set({0.02, 0.04, 0.045});
  const auto sp = mtp::order_statistics(ps);
  const auto t = mtp::thresholds(mtp::benjamini_hochberg(0.05), 3);
  // r = 1 fails (0.02 > 0.01667) but r = 3 passes; step-up takes the max
  REQUIRE(oracles::brute_force_step_up(sp.sorted, t.deltas) == 3);
  REQUIRE(mtp::step_up(ps, sp, t).count == 3);

  const auto ones = make_set({1.0, 1.0, 1.0});
  REQUIRE(mtp::step_up(ones, mtp::order_statistics(ones), t).count == 0);

  const auto zeros = make_set({0.0, 0.0, 0.0});
  REQUIRE(mtp::step_up(zeros, mtp::order_statistics(zeros), t).count == 3);

  const auto holm_t = mtp::thresholds(mtp::holm(0.05), 3);
  REQUIRE(code_of([&] { mtp::step_up(ps, sp, holm_t); }) == mtp::errc::regime_mismatch);
}

TEST_CASE("step-down engine") {
  const auto t = mtp::thresholds(mtp::holm(0.05), 3);

  const auto ps_a = make_set({0.02, 0.04, 0.045});
  const auto sp_a = mtp::order_statistics(ps_a);
  REQUIRE(oracles::sequential_step_down(sp_a.sorted, t.deltas) == 0);
  REQUIRE(mtp::step_down(ps_a, sp_a, t).count == 0);  // first step fails

  const auto ps_b = make_set({0.01, 0.02, 0.03});
  const auto sp_b = mtp::order_statistics(ps_b);
  REQUIRE(oracles::sequential_step_down(sp_b.sorted, t.deltas) == 3);
  REQUIRE(mtp::step_down(ps_b, sp_b, t).count == 3);

  const auto zeros = make_set({0.0, 0.0, 0.0});
  REQUIRE(mtp::step_down(zeros, mtp::order_statistics(zeros), t).count == 3);
}

TEST_CASE("single-step engine") {
  SECTION("equal weights at alpha = 0.05") {
    const auto ps = make_set({0.01, 0.04});
    const auto t = mtp::thresholds(mtp::weighted_bonferroni({0.5, 0.5}, 0.05), 2);
    REQUIRE(t.deltas == std::vector<double>{0.025, 0.025});
    const auto res = mtp::single_step(ps, t);
    REQUIRE(res.count == 1);
    REQUIRE(res.rejected_labels == std::vector<std::string>{"1"});
  }
  SECTION("Sidak at m = 2") {
    const auto ps = make_set({0.0253, 0.9});
    const auto res = mtp::single_step(ps, mtp::thresholds(mtp::sidak(0.05), 2));
    REQUIRE(res.count == 1);
  }
  SECTION("m = 1 equals the plain level-alpha test") {
    const auto t = mtp::thresholds(mtp::bonferroni(0.05), 1);
    REQUIRE(mtp::single_step(make_set({0.049}), t).count == 1);
    REQUIRE(mtp::single_step(make_set({0.051}), t).count == 0);
  }
  SECTION("broadcast constant") {
    mtp::ThresholdSeq t{{0.5}, mtp::Regime::single_step};
    REQUIRE(mtp::single_step(make_set({0.1, 0.9, 0.4}), t).count == 2);
  }
  SECTION("length mismatch") {
    mtp::ThresholdSeq t{{0.5, 0.5}, mtp::Regime::single_step};
    REQUIRE(code_of([&] { mtp::single_step(make_set({0.1, 0.9, 0.4}), t); }) ==
            mtp::errc::length_mismatch);
  }
}

TEST_CASE("step-up counts on a small batch") {
  const auto ps = make_set({0.001, 0.01, 0.03, 0.2});
  REQUIRE(mtp::apply_mtp(mtp::benjamini_hochberg(0.05), ps).count == 3);
  REQUIRE(mtp::apply_mtp(mtp::benjamini_yekutieli(0.05), ps).count == 2);
}

TEST_CASE("rejections are the count smallest p-values in stable order") {
  const auto ps = make_set({0.9, 0.01, 0.02, 0.01});
  const auto sp = mtp::order_statistics(ps);
  mtp::ThresholdSeq t{{0.05, 0.05, 0.05, 0.05}, mtp::Regime::step_up};
  const auto res = mtp::step_up(ps, sp, t);
  REQUIRE(res.count == 3);
  REQUIRE(res.rejected_indices == std::vector<std::size_t>{1, 3, 2});
  REQUIRE(res.rejected_labels == std::vector<std::string>{"2", "4", "3"});
}

namespace {

std::vector<double> random_nondecreasing_thresholds(mtp::random::Stream& g,
                                                    std::size_t m) {
  std::vector<double> t(m);
  for (double& x : t) x = g.uniform();
  std::sort(t.begin(), t.end());
  return t;
}

}  // namespace

TEST_CASE("step engines agree with brute-force oracles on random instances") {
  mtp::random::Stream g(2024, 0);
  for (int instance = 0; instance < 300; ++instance) {
    const std::size_t m = 1 + static_cast<std::size_t>(g.uniform() * 10);
    std::vector<double> values(m);
    for (double& v : values) v = g.uniform();
    const auto ps = make_set(values);
    const auto sp = mtp::order_statistics(ps);
    const auto deltas = random_nondecreasing_thresholds(g, m);

    mtp::ThresholdSeq up{deltas, mtp::Regime::step_up};
    mtp::ThresholdSeq down{deltas, mtp::Regime::step_down};
    const std::size_t up_count = mtp::step_up(ps, sp, up).count;
    const std::size_t down_count = mtp::step_down(ps, sp, down).count;

    REQUIRE(up_count == oracles::brute_force_step_up(sp.sorted, deltas));
    REQUIRE(down_count == oracles::sequential_step_down(sp.sorted, deltas));
    // a step-down pass can never reject more than the step-up max
    REQUIRE(down_count <= up_count);
  }
}

TEST_CASE("threshold dominance and method orderings") {
  mtp::random::Stream g(2025, 0);
  for (int instance = 0; instance < 200; ++instance) {
    const std::size_t m = 1 + static_cast<std::size_t>(g.uniform() * 12);
    std::vector<double> values(m);
    for (double& v : values) v = g.uniform() * (instance % 2 ? 0.1 : 1.0);
    const auto ps = make_set(values);
    const auto sp = mtp::order_statistics(ps);

    // pointwise-dominated thresholds reject no more
    const auto lo = random_nondecreasing_thresholds(g, m);
    std::vector<double> hi = lo;
    for (double& x : hi) x = std::min(1.0, x + 0.05);
    REQUIRE(mtp::step_up_count(sp.sorted, lo) <= mtp::step_up_count(sp.sorted, hi));

    const double alpha = 0.05;
    const std::size_t n_bonf = mtp::apply_mtp(mtp::bonferroni(alpha), ps).count;
    REQUIRE(mtp::apply_mtp(mtp::holm(alpha), ps).count >= n_bonf);
    REQUIRE(mtp::apply_mtp(mtp::sidak(alpha), ps).count >= n_bonf);
    REQUIRE(mtp::apply_mtp(mtp::benjamini_yekutieli(alpha), ps).count <=
            mtp::apply_mtp(mtp::benjamini_hochberg(alpha), ps).count);

    // constant-threshold step-up equals the single-step rule
    const double c = g.uniform();
    mtp::ThresholdSeq const_up{std::vector<double>(m, c), mtp::Regime::step_up};
    mtp::ThresholdSeq const_ss{std::vector<double>(m, c), mtp::Regime::single_step};
    REQUIRE(mtp::step_up(ps, sp, const_up).count ==
            mtp::single_step(ps, const_ss).count);
  }
}

TEST_CASE("weighted Bonferroni Monte Carlo") {
  SECTION("m = 1 is degenerate: w = [1] every draw") {
    const auto ps = make_set({0.03});
    const auto mc = mtp::weighted_bonferroni_mc(ps, 0.05, 100, 7);
    REQUIRE(mc.mean == 1.0);
    REQUIRE(mc.sd == 0.0);
    for (std::size_t s : mc.samples) REQUIRE(s == 1);
    const auto mc2 = mtp::weighted_bonferroni_mc(make_set({0.07}), 0.05, 100, 7);
    REQUIRE(mc2.mean == 0.0);
  }
  SECTION("needs at least two draws") {
    REQUIRE(code_of([] {
              mtp::weighted_bonferroni_mc(make_set({0.1}), 0.05, 1, 0);
            }) == mtp::errc::invalid_config);
  }
  SECTION("deterministic given the seed") {
    const auto ps = make_set({0.001, 0.2, 0.9});
    const auto a = mtp::weighted_bonferroni_mc(ps, 0.05, 500, 11);
    const auto b = mtp::weighted_bonferroni_mc(ps, 0.05, 500, 11);
    REQUIRE(a.samples == b.samples);
  }
  SECTION("identical for any worker count") {
    const auto ps = make_set({0.001, 0.2, 0.9, 0.004, 0.03});
    setenv("MTP_THREADS", "1", 1);
    const auto serial = mtp::weighted_bonferroni_mc(ps, 0.05, 400, 13);
    setenv("MTP_THREADS", "4", 1);
    const auto parallel = mtp::weighted_bonferroni_mc(ps, 0.05, 400, 13);
    unsetenv("MTP_THREADS");
    REQUIRE(serial.samples == parallel.samples);
  }
  SECTION("mean matches an independent Monte Carlo oracle") {
    const std::vector<double> values{0.001, 0.9, 0.9};
    const auto ps = make_set(values);
    const auto mc = mtp::weighted_bonferroni_mc(ps, 0.05, 10000, 21);
    const auto oracle = oracles::mc_weighted_bonferroni(values, 0.05, 200000, 555);
    // analytic guard on the oracle itself: P(W >= p/alpha) = (1 - p/alpha)^(m-1)
    REQUIRE_THAT(oracle.mean, WithinAbs(0.98 * 0.98, 4 * oracle.se + 1e-6));
    const double se =
        std::sqrt(std::pow(mc.sd / std::sqrt(10000.0), 2) + oracle.se * oracle.se);
    REQUIRE_THAT(mc.mean, WithinAbs(oracle.mean, 3 * se));
  }
}
