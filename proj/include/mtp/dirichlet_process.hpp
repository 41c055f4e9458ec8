#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "mtp/errors.hpp"
#include "mtp/math.hpp"
#include "mtp/random.hpp"

namespace mtp {

/// Baseline probability measure nu0 over the partition bins (r-1, r],
/// r = 1..m. Mass beyond m never enters the step-up thresholds, so the
/// support is truncated to the first m bins by construction.
struct MeasureBaseline {
  std::vector<double> probs;
  std::string name;
};

/// One random probability measure nu over the same bins (one DP draw).
struct RandomMeasure {
  std::vector<double> probs;
};

/// Shape function beta(r) = sum_{j<=r} j * nu(j-1, j]; nondecreasing,
/// beta(m) <= m. Plugs into the generic step-up thresholds (alpha/m)*beta(r).
struct ShapeSeq {
  std::vector<double> betas;
};

inline void validate(const MeasureBaseline& base) {
  if (base.probs.empty()) raise(errc::empty_input, "baseline measure is empty");
  long double total = 0.0L;
  for (double p : base.probs) {
    if (!(p >= 0.0)) raise(errc::invalid_config, "baseline has a negative mass");
    total += p;
  }
  if (std::fabs(static_cast<double>(total) - 1.0) > 1e-9)
    raise(errc::invalid_config, "baseline masses do not sum to 1");
}

inline void validate(const RandomMeasure& nu) {
  if (nu.probs.empty()) raise(errc::empty_input, "measure is empty");
  long double total = 0.0L;
  for (double p : nu.probs) {
    if (!(p >= 0.0)) raise(errc::invalid_config, "measure has a negative mass");
    total += p;
  }
  if (std::fabs(static_cast<double>(total) - 1.0) > 1e-9)
    raise(errc::invalid_config, "measure masses do not sum to 1");
}

/// The baseline nu0(r-1, r] = 1/(r * H_m): its shape function is r/H_m, the
/// Benjamini-Yekutieli procedure, so the DP prior matches BY in expectation.
inline MeasureBaseline baseline_by(std::size_t m) {
  if (m == 0) raise(errc::empty_input, "m must be positive");
  const double h = harmonic_number(m);
  MeasureBaseline base;
  base.name = "by";
  base.probs.resize(m);
  for (std::size_t r = 1; r <= m; ++r)
    base.probs[r - 1] = 1.0 / (static_cast<double>(r) * h);
  return base;
}

/// One draw (nu(B_1),...,nu(B_m)) ~ Dirichlet_m(M*nu0(B_1),...,M*nu0(B_m)).
/// Deterministic given the stream. Concentrations M*nu0 can drop to ~1e-6
/// and far below; the log-space Dirichlet sampler keeps those draws valid.
inline RandomMeasure sample_measure(double mass, const MeasureBaseline& base,
                                    random::Stream& g) {
  if (!(mass > 0.0)) raise(errc::invalid_config, "mass parameter must be positive");
  validate(base);
  const std::size_t m = base.probs.size();
  std::vector<double> concentration(m);
  for (std::size_t i = 0; i < m; ++i) concentration[i] = mass * base.probs[i];
  RandomMeasure nu;
  nu.probs.resize(m);
  random::dirichlet(g, concentration, nu.probs);
  return nu;
}

/// Prefix sums beta(r) = sum_{j<=r} j*nu_j, accumulated in extended
/// precision so beta(r) of the BY baseline matches r/H_m to ~1e-10 relative.
inline ShapeSeq shape_from_measure(const RandomMeasure& nu) {
  ShapeSeq shape;
  shape.betas.resize(nu.probs.size());
  long double acc = 0.0L;
  for (std::size_t j = 1; j <= nu.probs.size(); ++j) {
    acc += static_cast<long double>(j) * nu.probs[j - 1];
    shape.betas[j - 1] = static_cast<double>(acc);
  }
  return shape;
}

/// Expected number of clusters among m draws from DP(M nu0):
/// sum_{i=1..m} M/(M+i-1). Strictly increasing in M, bounded by m.
inline double expected_clusters(double mass, std::size_t m) {
  if (!(mass > 0.0)) raise(errc::invalid_config, "mass parameter must be positive");
  if (m == 0) raise(errc::empty_input, "m must be positive");
  long double acc = 0.0L;
  for (std::size_t i = 1; i <= m; ++i)
    acc += mass / (mass + static_cast<long double>(i - 1));
  return static_cast<double>(acc);
}

/// Prior variance of nu(B_bin): nu0(1-nu0)/(M+1). `bin` is 1-based.
/// mass = 0 is accepted as the M -> 0+ limit.
inline double measure_variance(double mass, const MeasureBaseline& base,
                               std::size_t bin) {
  if (!(mass >= 0.0)) raise(errc::invalid_config, "mass parameter must be nonnegative");
  if (bin < 1 || bin > base.probs.size())
    raise(errc::index_out_of_range, "bin index out of range");
  const double p = base.probs[bin - 1];
  return p * (1.0 - p) / (mass + 1.0);
}

/// How the DP mass parameter is chosen per draw: held fixed, or drawn from
/// an Exponential hyperprior (rate 1 by default).
struct MassSpec {
  struct Fixed {
    double mass;
  };
  struct ExponentialHyperprior {
    double rate = 1.0;
  };
  std::variant<Fixed, ExponentialHyperprior> mode = ExponentialHyperprior{};

  static MassSpec fixed(double mass) { return {Fixed{mass}}; }
  static MassSpec exponential(double rate = 1.0) {
    return {ExponentialHyperprior{rate}};
  }
};

inline void validate(const MassSpec& spec) {
  if (const auto* f = std::get_if<MassSpec::Fixed>(&spec.mode)) {
    if (!(f->mass > 0.0)) raise(errc::invalid_config, "fixed mass must be positive");
  } else {
    const auto& e = std::get<MassSpec::ExponentialHyperprior>(spec.mode);
    if (!(e.rate > 0.0)) raise(errc::invalid_config, "hyperprior rate must be positive");
  }
}

/// One mass value per measure draw. Hyperprior draws at or below 1e-12 are
/// rejected and redrawn so downstream Dirichlet concentrations stay positive.
inline double sample_mass(const MassSpec& spec, random::Stream& g) {
  validate(spec);
  if (const auto* f = std::get_if<MassSpec::Fixed>(&spec.mode)) return f->mass;
  const auto& e = std::get<MassSpec::ExponentialHyperprior>(spec.mode);
  double draw;
  do {
    draw = random::exponential(g, e.rate);
  } while (draw <= 1e-12);
  return draw;
}

inline std::string describe(const MassSpec& spec) {
  if (const auto* f = std::get_if<MassSpec::Fixed>(&spec.mode))
    return "fixed:" + std::to_string(f->mass);
  const auto& e = std::get<MassSpec::ExponentialHyperprior>(spec.mode);
  return e.rate == 1.0 ? "exp1" : "exp:" + std::to_string(e.rate);
}

}  // namespace mtp
