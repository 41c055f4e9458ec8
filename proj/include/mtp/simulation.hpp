#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <string>
#include <vector>

#include "mtp/errors.hpp"
#include "mtp/math.hpp"
#include "mtp/parallel.hpp"
#include "mtp/procedures.hpp"
#include "mtp/pvalues.hpp"
#include "mtp/random.hpp"

namespace mtp {

/// A synthetic correlated-p-value scenario: m tests of which the first m0
/// are true nulls, latent equicorrelated Gaussians with correlation rho,
/// alternatives shifted by mu.
struct Scenario {
  std::size_t m = 1;
  std::size_t m0 = 1;
  double rho = 0.0;
  double mu = 0.0;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
};

inline void validate(const Scenario& sc) {
  if (sc.m < 1) raise(errc::invalid_config, "m must be positive");
  if (sc.m0 > sc.m) raise(errc::invalid_config, "m0 cannot exceed m");
  if (!(sc.rho >= 0.0 && sc.rho < 1.0))
    raise(errc::invalid_config, "rho must lie in [0,1)");
  if (!(sc.mu >= 0.0)) raise(errc::invalid_config, "mu must be nonnegative");
  if (sc.trials < 1) raise(errc::invalid_config, "trials must be positive");
}

/// Table-of-outcomes accounting for one trial: U true non-discoveries,
/// V false discoveries, T false non-discoveries, S true discoveries.
struct TrialAccounting {
  std::size_t true_nondiscoveries = 0;   // U
  std::size_t false_discoveries = 0;     // V
  std::size_t false_nondiscoveries = 0;  // T
  std::size_t true_discoveries = 0;      // S

  std::size_t discoveries() const {  // R
    return false_discoveries + true_discoveries;
  }
  double false_discovery_proportion() const {  // V / max(R, 1)
    const std::size_t r = discoveries();
    return r == 0 ? 0.0
                  : static_cast<double>(false_discoveries) / static_cast<double>(r);
  }
};

struct ErrorRateEstimate {
  double fdr_hat = 0.0;
  double fwer_hat = 0.0;
  double power_hat = 0.0;
  double se_fdr = 0.0;
  double se_fwer = 0.0;
};

/// One simulated trial: p-values plus the truth mask (is_null[i] says the
/// i-th null hypothesis is true).
struct SimulatedTrial {
  PValueSet pvalues;
  std::vector<bool> is_null;
};

/// Single-factor equicorrelated Gaussians: Z_i = sqrt(rho) Z0 +
/// sqrt(1-rho) eps_i, alternatives shifted by mu, two-sided
/// p_i = 2(1 - Phi(|Z_i|)). Null coordinates are exactly uniform marginally
/// for any rho. Trial t draws from the stream (seed, t).
inline SimulatedTrial simulate_pvalues(const Scenario& sc, std::uint64_t trial_index) {
  validate(sc);
  random::Stream g(sc.seed, trial_index);
  SimulatedTrial trial;
  trial.pvalues.values.resize(sc.m);
  trial.pvalues.labels.resize(sc.m);
  trial.is_null.resize(sc.m);
  const double shared = std::sqrt(sc.rho);
  const double own = std::sqrt(1.0 - sc.rho);
  const double z0 = random::normal(g);
  for (std::size_t i = 0; i < sc.m; ++i) {
    double z = shared * z0 + own * random::normal(g);
    const bool null_true = i < sc.m0;
    if (!null_true) z += sc.mu;
    trial.pvalues.values[i] = two_sided_pvalue(z);
    trial.pvalues.labels[i] = std::to_string(i + 1);
    trial.is_null[i] = null_true;
  }
  return trial;
}

inline TrialAccounting account(const DiscoveryResult& res,
                               const std::vector<bool>& is_null) {
  TrialAccounting acc;
  std::size_t m0 = 0;
  for (bool b : is_null)
    if (b) ++m0;
  for (std::size_t idx : res.rejected_indices) {
    if (idx >= is_null.size())
      raise(errc::index_out_of_range, "rejected index outside the trial");
    if (is_null[idx])
      ++acc.false_discoveries;
    else
      ++acc.true_discoveries;
  }
  acc.true_nondiscoveries = m0 - acc.false_discoveries;
  acc.false_nondiscoveries = (is_null.size() - m0) - acc.true_discoveries;
  return acc;
}

namespace detail {

inline constexpr std::uint64_t kMtpStreamTag = 2;

}  // namespace detail

/// Monte Carlo estimate of FDR / FWER / power of a procedure over the
/// scenario. Trial t regenerates its data from (seed, t) and hands the
/// procedure an independent per-trial stream, so randomized procedures draw
/// fresh parameters each trial and results are worker-count independent.
inline ErrorRateEstimate estimate_error_rates(const MtpHandle& mtp,
                                              const Scenario& sc) {
  validate(sc);
  const std::size_t trials = sc.trials;
  const std::size_t m1 = sc.m - sc.m0;

  std::vector<double> fdp(trials), any_false(trials), power(trials);
  parallel_for(trials, [&](std::size_t t) {
    const SimulatedTrial trial = simulate_pvalues(sc, t);
    random::Stream mg(random::derive_seed(sc.seed, detail::kMtpStreamTag), t);
    const DiscoveryResult res = mtp(trial.pvalues, mg);
    const TrialAccounting acc = account(res, trial.is_null);
    fdp[t] = acc.false_discovery_proportion();
    any_false[t] = acc.false_discoveries >= 1 ? 1.0 : 0.0;
    power[t] = m1 == 0 ? 0.0
                       : static_cast<double>(acc.true_discoveries) /
                             static_cast<double>(m1);
  });

  ErrorRateEstimate est;
  est.fdr_hat = mean_of(fdp);
  est.fwer_hat = mean_of(any_false);
  est.power_hat = mean_of(power);
  const double root_trials = std::sqrt(static_cast<double>(trials));
  est.se_fdr = sample_sd(fdp) / root_trials;
  est.se_fwer = sample_sd(any_false) / root_trials;
  return est;
}

/// A scenario file is flat key=value text: m, m0, rho, mu, trials, alpha,
/// seed. Blank lines and '#' comments are ignored.
struct ScenarioFile {
  Scenario scenario;
  double alpha = 0.05;
};

inline ScenarioFile load_scenario(std::istream& in) {
  ScenarioFile out;
  bool seen[7] = {false, false, false, false, false, false, false};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string s;
    s.reserve(line.size());
    for (char c : line) {
      if (c == '#') break;
      if (c != ' ' && c != '\t' && c != '\r') s.push_back(c);
    }
    if (s.empty()) continue;
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos)
      raise(errc::parse_error, "expected key=value at line " + std::to_string(line_no));
    const std::string key = s.substr(0, eq);
    const std::string value = s.substr(eq + 1);
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end != value.c_str() + value.size())
      raise(errc::parse_error, "cannot parse value at line " + std::to_string(line_no));
    if (key == "m") {
      out.scenario.m = static_cast<std::size_t>(v);
      seen[0] = true;
    } else if (key == "m0") {
      out.scenario.m0 = static_cast<std::size_t>(v);
      seen[1] = true;
    } else if (key == "rho") {
      out.scenario.rho = v;
      seen[2] = true;
    } else if (key == "mu") {
      out.scenario.mu = v;
      seen[3] = true;
    } else if (key == "trials") {
      out.scenario.trials = static_cast<std::size_t>(v);
      seen[4] = true;
    } else if (key == "alpha") {
      out.alpha = v;
      seen[5] = true;
    } else if (key == "seed") {
      out.scenario.seed = static_cast<std::uint64_t>(v);
      seen[6] = true;
    } else {
      raise(errc::parse_error, "unknown key '" + key + "' at line " +
                                   std::to_string(line_no));
    }
  }
  static const char* names[7] = {"m", "m0", "rho", "mu", "trials", "alpha", "seed"};
  for (int i = 0; i < 7; ++i)
    if (!seen[i])
      raise(errc::parse_error, std::string("scenario file misses key '") + names[i] + "'");
  validate(out.scenario);
  if (!(out.alpha > 0.0 && out.alpha < 1.0))
    raise(errc::invalid_alpha, "alpha must lie in (0,1)");
  return out;
}

}  // namespace mtp
