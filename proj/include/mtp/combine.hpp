#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "mtp/csv.hpp"
#include "mtp/errors.hpp"

namespace mtp {

/// Tippett / Dunn-Sidak combination of q p-values:
/// p_c = 1 - (1 - min(p_1..p_q))^q, evaluated through log1p/expm1 so tiny
/// minima keep full precision.
inline double tippett_combine(std::span<const double> pvalues) {
  if (pvalues.empty()) raise(errc::empty_input, "no p-values to combine");
  double min_p = 1.0;
  for (double p : pvalues) {
    if (!(p >= 0.0 && p <= 1.0))
      raise(errc::value_out_of_range, "p-value out of [0,1]");
    min_p = std::min(min_p, p);
  }
  if (min_p == 0.0) return 0.0;
  const double q = static_cast<double>(pvalues.size());
  const double combined = -std::expm1(q * std::log1p(-min_p));
  return std::min(combined, 1.0);
}

struct CombinedGroup {
  std::string group;
  std::size_t q = 0;
  double p_combined = 0.0;
};

/// One combined p-value per group, keeping group order.
inline std::vector<CombinedGroup> combine_groups(
    const std::vector<PValueGroup>& groups) {
  std::vector<CombinedGroup> out;
  out.reserve(groups.size());
  for (const auto& g : groups)
    out.push_back({g.group, g.pvalues.size(), tippett_combine(g.pvalues)});
  return out;
}

}  // namespace mtp
