#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mtp/dirichlet_process.hpp"
#include "mtp/errors.hpp"
#include "mtp/math.hpp"
#include "mtp/parallel.hpp"
#include "mtp/procedures.hpp"
#include "mtp/pvalues.hpp"
#include "mtp/random.hpp"

namespace mtp {

/// Configuration of a DP sensitivity run. The baseline defaults to
/// baseline_by(m) when unset.
struct SensitivityConfig {
  double alpha = 0.05;
  std::size_t draws = 1000;
  MassSpec mass = MassSpec::exponential(1.0);
  std::optional<MeasureBaseline> baseline;
  std::uint64_t seed = 0;
};

/// Discovery counts of the fixed comparison procedures at the same level.
struct FixedMtpCounts {
  std::size_t bonferroni = 0;
  std::size_t sidak = 0;
  std::size_t holm = 0;
  std::size_t bh = 0;
  std::size_t by = 0;
  double wbonferroni_mean = 0.0;
  double wbonferroni_sd = 0.0;
};

/// Half-open integer bin [lo, hi) of the discovery-count histogram.
struct HistogramBin {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  std::size_t count = 0;
};

/// Prior-predictive distribution of the discovery count plus per-p-value
/// significance probabilities. sig_prob[i] = #{s : rank(i) <= R_s} / S,
/// indexed by original position; nonincreasing in the p-value.
struct SensitivityReport {
  std::vector<std::size_t> r_samples;
  double mean_r = 0.0;
  double sd_r = 0.0;
  std::vector<HistogramBin> histogram;
  std::vector<double> sig_prob;
  std::vector<double> mass_draws;
  FixedMtpCounts comparison;
};

namespace detail {

/// Freedman-Diaconis binning clamped to integer-aligned bins of width >= 1.
inline std::vector<HistogramBin> integer_histogram(
    const std::vector<std::size_t>& samples) {
  std::vector<double> as_double(samples.begin(), samples.end());
  std::sort(as_double.begin(), as_double.end());
  const double iqr =
      quantile_sorted(as_double, 0.75) - quantile_sorted(as_double, 0.25);
  const double fd =
      2.0 * iqr / std::cbrt(static_cast<double>(samples.size()));
  const std::int64_t width =
      std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(fd)));
  const std::int64_t lo = static_cast<std::int64_t>(as_double.front());
  const std::int64_t hi = static_cast<std::int64_t>(as_double.back());
  const std::size_t nbins = static_cast<std::size_t>((hi - lo) / width) + 1;

  std::vector<HistogramBin> bins(nbins);
  for (std::size_t b = 0; b < nbins; ++b) {
    bins[b].lo = lo + static_cast<std::int64_t>(b) * width;
    bins[b].hi = bins[b].lo + width;
  }
  for (std::size_t s : samples)
    ++bins[static_cast<std::size_t>((static_cast<std::int64_t>(s) - lo) / width)]
         .count;
  return bins;
}

inline constexpr std::uint64_t kWeightedBonferroniSeedTag = 1;

}  // namespace detail

/// Monte Carlo pass over DP draws of (M, nu): draw s uses the stream
/// (seed, s), samples M (fresh per draw when the hyperprior is active),
/// samples nu ~ Dirichlet_m(M nu0), forms thresholds (alpha/m) *
/// sum_{j<=r} j nu_j, and records the step-up discovery count. Draws run in
/// parallel; output is identical for any worker count.
inline SensitivityReport run_sensitivity(const PValueSet& ps,
                                         const SensitivityConfig& cfg) {
  validate(ps);
  detail::check_alpha(cfg.alpha);
  if (cfg.draws < 1) raise(errc::invalid_config, "need at least 1 draw");
  validate(cfg.mass);
  const std::size_t m = ps.size();
  const MeasureBaseline base = cfg.baseline ? *cfg.baseline : baseline_by(m);
  validate(base);
  if (base.probs.size() != m)
    raise(errc::length_mismatch, "baseline size differs from m");

  const SortedPValues sp = order_statistics(ps);
  const std::size_t S = cfg.draws;

  SensitivityReport report;
  report.r_samples.resize(S);
  report.mass_draws.resize(S);

  parallel_for(S, [&](std::size_t s) {
    random::Stream g(cfg.seed, s);
    const double mass = sample_mass(cfg.mass, g);
    std::vector<double> concentration(m);
    for (std::size_t i = 0; i < m; ++i) concentration[i] = mass * base.probs[i];
    std::vector<double> nu(m);
    random::dirichlet(g, concentration, nu);
    // thresholds (alpha/m) * beta(r) built in place over the measure
    long double beta_acc = 0.0L;
    const double scale = cfg.alpha / static_cast<double>(m);
    for (std::size_t j = 1; j <= m; ++j) {
      beta_acc += static_cast<long double>(j) * nu[j - 1];
      nu[j - 1] = scale * static_cast<double>(beta_acc);
    }
    report.r_samples[s] = step_up_count(sp.sorted, nu);
    report.mass_draws[s] = mass;
  });

  std::vector<double> as_double(report.r_samples.begin(), report.r_samples.end());
  report.mean_r = mean_of(as_double);
  report.sd_r = sample_sd(as_double);
  report.histogram = detail::integer_histogram(report.r_samples);

  // tail counts: #{s : R_s >= r} for r = 1..m, exact rational over S
  std::vector<std::size_t> count_at(m + 1, 0);
  for (std::size_t r : report.r_samples) ++count_at[r];
  std::vector<std::size_t> tail(m + 2, 0);
  for (std::size_t r = m + 1; r-- > 1;) tail[r] = tail[r + 1] + count_at[r];
  report.sig_prob.resize(m);
  for (std::size_t r = 1; r <= m; ++r)
    report.sig_prob[sp.rank_to_original[r - 1]] =
        static_cast<double>(tail[r]) / static_cast<double>(S);

  const ThresholdSeq bonf = thresholds(bonferroni(cfg.alpha), m);
  const ThresholdSeq sid = thresholds(sidak(cfg.alpha), m);
  report.comparison.bonferroni = single_step(ps, bonf).count;
  report.comparison.sidak = single_step(ps, sid).count;
  report.comparison.holm =
      step_down_count(sp.sorted, thresholds(holm(cfg.alpha), m).deltas);
  report.comparison.bh =
      step_up_count(sp.sorted, thresholds(benjamini_hochberg(cfg.alpha), m).deltas);
  report.comparison.by =
      step_up_count(sp.sorted, thresholds(benjamini_yekutieli(cfg.alpha), m).deltas);
  const McCountSummary wb = weighted_bonferroni_mc(
      ps, cfg.alpha, std::max<std::size_t>(2, S),
      random::derive_seed(cfg.seed, detail::kWeightedBonferroniSeedTag));
  report.comparison.wbonferroni_mean = wb.mean;
  report.comparison.wbonferroni_sd = wb.sd;

  return report;
}

/// Randomized DP procedure: one fresh (M, nu) per invocation, routed through
/// the generic step-up engine. This is the per-trial semantics the
/// error-rate simulation uses.
inline MtpHandle make_dp_mtp(double alpha,
                             MassSpec mass = MassSpec::exponential(1.0),
                             std::optional<MeasureBaseline> baseline = std::nullopt) {
  return [alpha, mass = std::move(mass), baseline = std::move(baseline)](
             const PValueSet& ps, random::Stream& g) {
    const std::size_t m = ps.size();
    const MeasureBaseline base = baseline ? *baseline : baseline_by(m);
    const double mass_value = sample_mass(mass, g);
    const RandomMeasure nu = sample_measure(mass_value, base, g);
    ShapeSeq shape = shape_from_measure(nu);
    const ThresholdSeq t = thresholds(generic_step_up(std::move(shape.betas), alpha), m);
    return step_up(ps, order_statistics(ps), t);
  };
}

/// One table row of the bottom-panel report: label, p-value, probability of
/// significance over the DP prior predictive.
struct SignificanceRow {
  std::string label;
  double p = 0.0;
  double sig_prob = 0.0;
};

/// Rows for all p <= cutoff, ascending in p with stable ties.
inline std::vector<SignificanceRow> significance_table(
    const SensitivityReport& report, const PValueSet& ps, double cutoff) {
  if (!(cutoff >= 0.0 && cutoff <= 1.0))
    raise(errc::value_out_of_range, "cutoff must lie in [0,1]");
  if (report.sig_prob.size() != ps.size())
    raise(errc::length_mismatch, "report does not match the p-value set");
  const SortedPValues sp = order_statistics(ps);
  std::vector<SignificanceRow> rows;
  for (std::size_t r = 0; r < sp.size() && sp.sorted[r] <= cutoff; ++r) {
    const std::size_t idx = sp.rank_to_original[r];
    rows.push_back({ps.labels[idx], ps.values[idx], report.sig_prob[idx]});
  }
  return rows;
}

}  // namespace mtp
