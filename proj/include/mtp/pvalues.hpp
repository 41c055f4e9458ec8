#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "mtp/errors.hpp"

namespace mtp {

inline constexpr double kWeightSumTolerance = 1e-9;

/// A batch of p-values with hypothesis identifiers and optional
/// per-hypothesis Bonferroni weights.
struct PValueSet {
  std::vector<double> values;
  std::vector<std::string> labels;
  std::optional<std::vector<double>> weights;

  std::size_t size() const { return values.size(); }
};

inline void validate(const PValueSet& ps) {
  if (ps.values.empty()) raise(errc::empty_input, "p-value set is empty");
  if (ps.labels.size() != ps.values.size())
    raise(errc::length_mismatch, "labels and values differ in length");
  for (std::size_t i = 0; i < ps.values.size(); ++i) {
    const double p = ps.values[i];
    if (!(p >= 0.0 && p <= 1.0))
      raise(errc::value_out_of_range,
            "p-value out of [0,1] at index " + std::to_string(i + 1));
  }
  std::unordered_set<std::string> seen;
  seen.reserve(ps.labels.size());
  for (const auto& label : ps.labels) {
    if (!seen.insert(label).second)
      raise(errc::parse_error, "duplicate hypothesis label: " + label);
  }
  if (ps.weights) {
    const auto& w = *ps.weights;
    if (w.size() != ps.values.size())
      raise(errc::weight_mismatch, "weights and values differ in length");
    long double total = 0.0L;
    for (double wi : w) {
      if (!(wi >= 0.0)) raise(errc::weight_mismatch, "negative weight");
      total += wi;
    }
    if (std::fabs(static_cast<double>(total) - 1.0) > kWeightSumTolerance)
      raise(errc::weight_mismatch, "weights do not sum to 1");
  }
}

/// Order statistics p_(1) <= ... <= p_(m) of a batch. rank_to_original maps
/// rank r (1-based, stored at index r-1) to the 0-based original index; ties
/// keep the original relative order (stable sort). The sentinel p_(0) == 0
/// is implicit in the step-rule engines.
struct SortedPValues {
  std::vector<double> sorted;
  std::vector<std::size_t> rank_to_original;

  std::size_t size() const { return sorted.size(); }
};

inline SortedPValues order_statistics(const PValueSet& ps) {
  validate(ps);
  SortedPValues sp;
  sp.rank_to_original.resize(ps.size());
  std::iota(sp.rank_to_original.begin(), sp.rank_to_original.end(), std::size_t{0});
  std::stable_sort(sp.rank_to_original.begin(), sp.rank_to_original.end(),
                   [&ps](std::size_t a, std::size_t b) {
                     return ps.values[a] < ps.values[b];
                   });
  sp.sorted.resize(ps.size());
  for (std::size_t r = 0; r < ps.size(); ++r)
    sp.sorted[r] = ps.values[sp.rank_to_original[r]];
  return sp;
}

/// Number of distinct floating-point values in the batch (the k fed to the
/// mass-parameter posterior; exposed in reports so users can override it).
inline std::size_t distinct_value_count(const PValueSet& ps) {
  std::vector<double> v = ps.values;
  std::sort(v.begin(), v.end());
  return static_cast<std::size_t>(std::unique(v.begin(), v.end()) - v.begin());
}

}  // namespace mtp
