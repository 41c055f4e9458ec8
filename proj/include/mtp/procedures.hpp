#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mtp/errors.hpp"
#include "mtp/math.hpp"
#include "mtp/parallel.hpp"
#include "mtp/pvalues.hpp"
#include "mtp/random.hpp"

namespace mtp {

enum class Regime { step_up, step_down, single_step };

inline const char* regime_name(Regime r) {
  switch (r) {
    case Regime::step_up: return "step_up";
    case Regime::step_down: return "step_down";
    case Regime::single_step: return "single_step";
  }
  return "unknown";
}

/// Per-rank rejection thresholds of a procedure. For step regimes deltas[r-1]
/// is the threshold of the r-th order statistic and the sequence is
/// nondecreasing; for single_step the thresholds align with original indices
/// (a size-1 vector broadcasts a constant).
struct ThresholdSeq {
  std::vector<double> deltas;
  Regime regime = Regime::step_up;
};

/// A fixed multiple testing procedure: family tag plus level alpha.
struct MtpMethod {
  struct Bonferroni {};
  struct WeightedBonferroni {
    std::vector<double> weights;
  };
  struct Sidak {};
  struct Holm {};
  struct BenjaminiHochberg {};
  struct BenjaminiYekutieli {};
  /// Any nondecreasing shape beta(1..m) with beta(m) <= m; thresholds are
  /// (alpha/m) * beta(r). This is how a sampled random measure plugs into the
  /// classic step-up engine.
  struct GenericStepUp {
    std::vector<double> shape;
  };

  using Kind = std::variant<Bonferroni, WeightedBonferroni, Sidak, Holm,
                            BenjaminiHochberg, BenjaminiYekutieli, GenericStepUp>;

  Kind kind;
  double alpha = 0.05;
};

inline MtpMethod bonferroni(double alpha) { return {MtpMethod::Bonferroni{}, alpha}; }
inline MtpMethod weighted_bonferroni(std::vector<double> weights, double alpha) {
  return {MtpMethod::WeightedBonferroni{std::move(weights)}, alpha};
}
inline MtpMethod sidak(double alpha) { return {MtpMethod::Sidak{}, alpha}; }
inline MtpMethod holm(double alpha) { return {MtpMethod::Holm{}, alpha}; }
inline MtpMethod benjamini_hochberg(double alpha) {
  return {MtpMethod::BenjaminiHochberg{}, alpha};
}
inline MtpMethod benjamini_yekutieli(double alpha) {
  return {MtpMethod::BenjaminiYekutieli{}, alpha};
}
inline MtpMethod generic_step_up(std::vector<double> shape, double alpha) {
  return {MtpMethod::GenericStepUp{std::move(shape)}, alpha};
}

namespace detail {

inline void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    raise(errc::invalid_alpha, "alpha must lie in (0,1)");
}

inline void check_weights(std::span<const double> weights, std::size_t m) {
  if (weights.size() != m)
    raise(errc::weight_mismatch, "weight length differs from m");
  long double total = 0.0L;
  for (double w : weights) {
    if (!(w >= 0.0)) raise(errc::weight_mismatch, "negative weight");
    total += w;
  }
  if (std::fabs(static_cast<double>(total) - 1.0) > kWeightSumTolerance)
    raise(errc::weight_mismatch, "weights do not sum to 1");
}

inline void check_shape(std::span<const double> shape, std::size_t m) {
  if (shape.size() != m)
    raise(errc::length_mismatch, "shape length differs from m");
  double prev = 0.0;
  for (double b : shape) {
    if (!(b >= prev))
      raise(errc::invalid_config, "shape function must be nondecreasing");
    prev = b;
  }
  if (shape.back() > static_cast<double>(m) * (1.0 + 1e-12) + 1e-12)
    raise(errc::invalid_config, "shape function exceeds m");
}

}  // namespace detail

/// Rejection thresholds of a fixed procedure for m hypotheses.
inline ThresholdSeq thresholds(const MtpMethod& method, std::size_t m) {
  if (m == 0) raise(errc::empty_input, "m must be positive");
  detail::check_alpha(method.alpha);
  const double alpha = method.alpha;
  ThresholdSeq t;

  if (std::holds_alternative<MtpMethod::Bonferroni>(method.kind)) {
    t.regime = Regime::single_step;
    t.deltas.assign(m, alpha / static_cast<double>(m));
  } else if (const auto* wb = std::get_if<MtpMethod::WeightedBonferroni>(&method.kind)) {
    detail::check_weights(wb->weights, m);
    t.regime = Regime::single_step;
    t.deltas.resize(m);
    for (std::size_t i = 0; i < m; ++i) t.deltas[i] = alpha * wb->weights[i];
  } else if (std::holds_alternative<MtpMethod::Sidak>(method.kind)) {
    t.regime = Regime::single_step;
    // 1 - (1-alpha)^(1/m), evaluated through log1p/expm1
    const double c = -std::expm1(std::log1p(-alpha) / static_cast<double>(m));
    t.deltas.assign(m, c);
  } else if (std::holds_alternative<MtpMethod::Holm>(method.kind)) {
    t.regime = Regime::step_down;
    t.deltas.resize(m);
    for (std::size_t r = 1; r <= m; ++r)
      t.deltas[r - 1] = alpha / static_cast<double>(m - r + 1);
  } else if (std::holds_alternative<MtpMethod::BenjaminiHochberg>(method.kind)) {
    t.regime = Regime::step_up;
    t.deltas.resize(m);
    for (std::size_t r = 1; r <= m; ++r)
      t.deltas[r - 1] = alpha * static_cast<double>(r) / static_cast<double>(m);
  } else if (std::holds_alternative<MtpMethod::BenjaminiYekutieli>(method.kind)) {
    t.regime = Regime::step_up;
    const double h = harmonic_number(m);
    t.deltas.resize(m);
    for (std::size_t r = 1; r <= m; ++r)
      t.deltas[r - 1] =
          alpha * static_cast<double>(r) / (static_cast<double>(m) * h);
  } else {
    const auto& gs = std::get<MtpMethod::GenericStepUp>(method.kind);
    detail::check_shape(gs.shape, m);
    t.regime = Regime::step_up;
    t.deltas.resize(m);
    for (std::size_t r = 0; r < m; ++r)
      t.deltas[r] = (alpha / static_cast<double>(m)) * gs.shape[r];
  }
  return t;
}

/// Outcome of applying a procedure: discovery count and the rejected
/// hypotheses (original 0-based indices plus their labels).
struct DiscoveryResult {
  std::size_t count = 0;
  std::vector<std::size_t> rejected_indices;
  std::vector<std::string> rejected_labels;
};

/// Step-up count max{r in 0..m : p_(r) <= delta_r} with p_(0) == 0.
/// Comparisons are exact (no epsilon), so golden outputs are bit-stable.
inline std::size_t step_up_count(std::span<const double> sorted,
                                 std::span<const double> deltas) {
  for (std::size_t r = sorted.size(); r >= 1; --r)
    if (sorted[r - 1] <= deltas[r - 1]) return r;
  return 0;
}

/// Step-down count: scans ranks upward and stops at the first failure.
inline std::size_t step_down_count(std::span<const double> sorted,
                                   std::span<const double> deltas) {
  std::size_t r = 0;
  while (r < sorted.size() && sorted[r] <= deltas[r]) ++r;
  return r;
}

namespace detail {

inline DiscoveryResult take_smallest(const PValueSet& ps, const SortedPValues& sp,
                                     std::size_t count) {
  DiscoveryResult res;
  res.count = count;
  res.rejected_indices.reserve(count);
  res.rejected_labels.reserve(count);
  for (std::size_t r = 0; r < count; ++r) {
    const std::size_t idx = sp.rank_to_original[r];
    res.rejected_indices.push_back(idx);
    res.rejected_labels.push_back(ps.labels[idx]);
  }
  return res;
}

inline void check_step_lengths(const SortedPValues& sp, const ThresholdSeq& t) {
  if (t.deltas.size() != sp.size())
    raise(errc::length_mismatch, "threshold length differs from m");
}

}  // namespace detail

/// Step-up procedure, Benjamini-Hochberg style: rejects the R smallest
/// p-values where R is the largest rank whose order statistic clears its
/// threshold. `sp` must be order_statistics(ps).
inline DiscoveryResult step_up(const PValueSet& ps, const SortedPValues& sp,
                               const ThresholdSeq& t) {
  if (t.regime != Regime::step_up)
    raise(errc::regime_mismatch, std::string("expected step_up thresholds, got ") +
                                     regime_name(t.regime));
  detail::check_step_lengths(sp, t);
  return detail::take_smallest(ps, sp, step_up_count(sp.sorted, t.deltas));
}

/// Step-down (Holm style): scans ranks upward, stops at the first failure.
inline DiscoveryResult step_down(const PValueSet& ps, const SortedPValues& sp,
                                 const ThresholdSeq& t) {
  if (t.regime != Regime::step_down)
    raise(errc::regime_mismatch, std::string("expected step_down thresholds, got ") +
                                     regime_name(t.regime));
  detail::check_step_lengths(sp, t);
  return detail::take_smallest(ps, sp, step_down_count(sp.sorted, t.deltas));
}

/// Single-step rule: rejects exactly {i : p_i <= t_i}, thresholds aligned to
/// original indices; a size-1 threshold vector broadcasts.
inline DiscoveryResult single_step(const PValueSet& ps, const ThresholdSeq& t) {
  if (t.regime != Regime::single_step)
    raise(errc::regime_mismatch, std::string("expected single_step thresholds, got ") +
                                     regime_name(t.regime));
  const std::size_t m = ps.size();
  if (t.deltas.size() != m && t.deltas.size() != 1)
    raise(errc::length_mismatch, "threshold length differs from m");
  DiscoveryResult res;
  for (std::size_t i = 0; i < m; ++i) {
    const double ti = t.deltas.size() == 1 ? t.deltas[0] : t.deltas[i];
    if (ps.values[i] <= ti) {
      res.rejected_indices.push_back(i);
      res.rejected_labels.push_back(ps.labels[i]);
    }
  }
  res.count = res.rejected_indices.size();
  return res;
}

/// Applies any fixed method end to end.
inline DiscoveryResult apply_mtp(const MtpMethod& method, const PValueSet& ps) {
  const ThresholdSeq t = thresholds(method, ps.size());
  switch (t.regime) {
    case Regime::single_step: return single_step(ps, t);
    case Regime::step_down: return step_down(ps, order_statistics(ps), t);
    case Regime::step_up: return step_up(ps, order_statistics(ps), t);
  }
  raise(errc::invalid_config, "unreachable regime");
}

/// A rejection engine as consumed by the error-rate simulator: fixed
/// procedures ignore the stream, randomized ones (the DP procedure) draw
/// fresh parameters from it on every call.
using MtpHandle = std::function<DiscoveryResult(const PValueSet&, random::Stream&)>;

inline MtpHandle make_fixed_mtp(MtpMethod method) {
  return [method = std::move(method)](const PValueSet& ps, random::Stream&) {
    return apply_mtp(method, ps);
  };
}

/// Monte Carlo summary of the weighted Bonferroni discovery count under
/// w ~ Dirichlet_m(1,...,1) weight draws.
struct McCountSummary {
  double mean = 0.0;
  double sd = 0.0;
  std::vector<std::size_t> samples;
};

/// Draws `draws` weight vectors from the flat Dirichlet, applies the
/// per-hypothesis rule p_i <= alpha*w_i, and summarizes the counts. Draw d
/// uses the stream (seed, d), so results do not depend on the worker count.
inline McCountSummary weighted_bonferroni_mc(const PValueSet& ps, double alpha,
                                             std::size_t draws, std::uint64_t seed) {
  validate(ps);
  detail::check_alpha(alpha);
  if (draws < 2) raise(errc::invalid_config, "need at least 2 draws");
  const std::size_t m = ps.size();

  McCountSummary out;
  out.samples.resize(draws);
  parallel_for(draws, [&](std::size_t d) {
    random::Stream g(seed, d);
    std::vector<double> w(m);
    long double total = 0.0L;
    for (std::size_t i = 0; i < m; ++i) {
      w[i] = random::exponential(g);
      total += w[i];
    }
    std::size_t count = 0;
    for (std::size_t i = 0; i < m; ++i)
      if (ps.values[i] <= alpha * static_cast<double>(w[i] / total)) ++count;
    out.samples[d] = count;
  });

  std::vector<double> as_double(out.samples.begin(), out.samples.end());
  out.mean = mean_of(as_double);
  out.sd = sample_sd(as_double);
  return out;
}

/// Weighted Bonferroni with a fresh flat-Dirichlet weight vector drawn from
/// the stream on every call; the randomized single-step procedure behind the
/// Monte Carlo summary above.
inline MtpHandle make_random_weighted_bonferroni(double alpha) {
  return [alpha](const PValueSet& ps, random::Stream& g) {
    const std::size_t m = ps.size();
    std::vector<double> concentration(m, 1.0);
    std::vector<double> weights(m);
    random::dirichlet(g, concentration, weights);
    ThresholdSeq t;
    t.regime = Regime::single_step;
    t.deltas.resize(m);
    for (std::size_t i = 0; i < m; ++i) t.deltas[i] = alpha * weights[i];
    return single_step(ps, t);
  };
}

}  // namespace mtp
