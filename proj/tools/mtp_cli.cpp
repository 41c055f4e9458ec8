// mtp: multiple testing procedures under arbitrary dependence, plus the
// Dirichlet-process sensitivity analysis over the space of such procedures.
//
// Subcommands: run, simulate, combine, mass-posterior.
// Exit codes: 0 success, 1 data error, 2 usage error.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mtp/mtp.hpp"

namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::vector<std::string> kMethodOrder = {
    "bonferroni", "wbonferroni", "sidak", "holm", "bh", "by", "dp"};

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= csv.size(); ++i) {
    if (i == csv.size() || csv[i] == ',') {
      if (i > start) out.push_back(csv.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

// Expands "all" and returns the requested methods in canonical order.
std::vector<std::string> expand_methods(const std::string& csv) {
  std::vector<std::string> requested = split_list(csv);
  if (requested.empty()) throw UsageError("--methods must not be empty");
  bool want[7] = {};
  for (const auto& name : requested) {
    if (name == "all") {
      for (bool& w : want) w = true;
      continue;
    }
    const auto it = std::find(kMethodOrder.begin(), kMethodOrder.end(), name);
    if (it == kMethodOrder.end())
      throw UsageError("unknown method '" + name +
                       "' (choose from bonferroni, wbonferroni, sidak, holm, "
                       "bh, by, dp, all)");
    want[static_cast<std::size_t>(it - kMethodOrder.begin())] = true;
  }
  std::vector<std::string> out;
  for (std::size_t i = 0; i < kMethodOrder.size(); ++i)
    if (want[i]) out.push_back(kMethodOrder[i]);
  return out;
}

mtp::MassSpec parse_mass(const std::string& text) {
  if (text == "exp1") return mtp::MassSpec::exponential(1.0);
  if (text.rfind("fixed:", 0) == 0) {
    const std::string num = text.substr(6);
    char* end = nullptr;
    const double v = std::strtod(num.c_str(), &end);
    if (end != num.c_str() + num.size() || !(v > 0.0))
      throw UsageError("--mass fixed:<M> needs a positive number");
    return mtp::MassSpec::fixed(v);
  }
  throw UsageError("--mass must be 'exp1' or 'fixed:<M>'");
}

struct Formats {
  bool json = true;
  bool csv = true;
};

Formats parse_formats(const std::string& csv) {
  Formats f{false, false};
  for (const auto& name : split_list(csv)) {
    if (name == "json") f.json = true;
    else if (name == "csv") f.csv = true;
    else throw UsageError("unknown format '" + name + "' (json, csv)");
  }
  if (!f.json && !f.csv) throw UsageError("--formats must not be empty");
  return f;
}

void check_alpha_flag(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw UsageError("--alpha must lie in (0,1)");
}

// Files written into an output directory; on failure everything written so
// far is removed (the directory too, when this run created it).
class OutputTracker {
 public:
  explicit OutputTracker(const fs::path& dir) : dir_(dir) {
    created_dir_ = !fs::exists(dir_);
    fs::create_directories(dir_);
  }

  std::ofstream open(const std::string& name) {
    const fs::path path = dir_ / name;
    files_.push_back(path);
    std::ofstream out(path, std::ios::binary);
    if (!out) mtp::raise(mtp::errc::io_error, "cannot write file: " + path.string());
    return out;
  }

  void discard() noexcept {
    std::error_code ec;
    if (created_dir_) {
      fs::remove_all(dir_, ec);
      return;
    }
    for (const auto& f : files_) fs::remove(f, ec);
  }

 private:
  fs::path dir_;
  bool created_dir_ = false;
  std::vector<fs::path> files_;
};

std::string fmt_stat(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", x);
  return buf;
}

// ---------------------------------------------------------------------------
// run

struct RunOptions {
  std::string input;
  std::string column = "p";
  double alpha = 0.05;
  std::string methods = "all";
  std::size_t draws = 1000;
  std::uint64_t seed = 0;
  std::string mass = "exp1";
  std::string out = "out";
  std::string formats = "json,csv";
  bool debug = false;
};

int cmd_run(const RunOptions& opt) {
  check_alpha_flag(opt.alpha);
  if (opt.draws < 1) throw UsageError("--draws must be at least 1");
  const std::vector<std::string> methods = expand_methods(opt.methods);
  const Formats formats = parse_formats(opt.formats);
  const mtp::MassSpec mass = parse_mass(opt.mass);
  const bool want_dp =
      std::find(methods.begin(), methods.end(), "dp") != methods.end();

  const mtp::PValueSet ps = mtp::load_pvalues_file(opt.input, opt.column);
  const std::size_t m = ps.size();

  std::optional<mtp::SensitivityReport> report;
  if (want_dp) {
    mtp::SensitivityConfig cfg;
    cfg.alpha = opt.alpha;
    cfg.draws = opt.draws;
    cfg.mass = mass;
    cfg.seed = opt.seed;
    report = mtp::run_sensitivity(ps, cfg);
  }

  auto fixed_count = [&](const std::string& name) -> std::size_t {
    if (report) {
      const auto& c = report->comparison;
      if (name == "bonferroni") return c.bonferroni;
      if (name == "sidak") return c.sidak;
      if (name == "holm") return c.holm;
      if (name == "bh") return c.bh;
      if (name == "by") return c.by;
    }
    if (name == "bonferroni") return mtp::apply_mtp(mtp::bonferroni(opt.alpha), ps).count;
    if (name == "sidak") return mtp::apply_mtp(mtp::sidak(opt.alpha), ps).count;
    if (name == "holm") return mtp::apply_mtp(mtp::holm(opt.alpha), ps).count;
    if (name == "bh") return mtp::apply_mtp(mtp::benjamini_hochberg(opt.alpha), ps).count;
    return mtp::apply_mtp(mtp::benjamini_yekutieli(opt.alpha), ps).count;
  };

  std::vector<mtp::MethodResult> results;
  for (const std::string& name : methods) {
    mtp::MethodResult r;
    r.name = name;
    if (name == "dp") {
      r.mean = report->mean_r;
      r.sd = report->sd_r;
    } else if (name == "wbonferroni") {
      if (report) {
        r.mean = report->comparison.wbonferroni_mean;
        r.sd = report->comparison.wbonferroni_sd;
      } else {
        const mtp::McCountSummary wb = mtp::weighted_bonferroni_mc(
            ps, opt.alpha, std::max<std::size_t>(2, opt.draws),
            mtp::random::derive_seed(opt.seed,
                                     mtp::detail::kWeightedBonferroniSeedTag));
        r.mean = wb.mean;
        r.sd = wb.sd;
      }
    } else {
      r.count = fixed_count(name);
    }
    results.push_back(std::move(r));
  }

  for (const auto& r : results) {
    if (r.count)
      std::cout << r.name << " R=" << *r.count << "\n";
    else
      std::cout << r.name << " R=" << fmt_stat(*r.mean) << " sd=" << fmt_stat(*r.sd)
                << "\n";
  }

  mtp::RunEcho echo;
  echo.input = opt.input;
  echo.column = opt.column;
  echo.alpha = opt.alpha;
  echo.methods = methods;
  echo.draws = opt.draws;
  echo.seed = opt.seed;
  echo.mass = mtp::describe(mass);

  OutputTracker tracker((fs::path(opt.out)));
  try {
    if (formats.json) {
      auto f = tracker.open("summary.json");
      mtp::write_summary_json(f, echo, m, mtp::distinct_value_count(ps), results);
    }
    if (report && formats.csv) {
      {
        auto f = tracker.open("r_hist.csv");
        mtp::write_r_hist_csv(f, *report);
      }
      {
        auto f = tracker.open("sig_prob.csv");
        mtp::write_sig_prob_csv(f, *report, ps);
      }
    }
    if (report && opt.debug) {
      auto f = tracker.open("r_samples.csv");
      mtp::write_r_samples_csv(f, *report);
    }
  } catch (...) {
    tracker.discard();
    throw;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOptions {
  std::string scenario;
  std::string methods = "all";
  std::string mass = "exp1";
  std::string out = "sim_results.json";
};

int cmd_simulate(const SimulateOptions& opt) {
  const std::vector<std::string> methods = expand_methods(opt.methods);
  const mtp::MassSpec mass = parse_mass(opt.mass);

  std::ifstream in(opt.scenario);
  if (!in)
    mtp::raise(mtp::errc::io_error, "cannot open scenario file: " + opt.scenario);
  const mtp::ScenarioFile sf = mtp::load_scenario(in);
  const double alpha = sf.alpha;

  auto handle_for = [&](const std::string& name) -> mtp::MtpHandle {
    if (name == "bonferroni") return mtp::make_fixed_mtp(mtp::bonferroni(alpha));
    if (name == "wbonferroni") return mtp::make_random_weighted_bonferroni(alpha);
    if (name == "sidak") return mtp::make_fixed_mtp(mtp::sidak(alpha));
    if (name == "holm") return mtp::make_fixed_mtp(mtp::holm(alpha));
    if (name == "bh") return mtp::make_fixed_mtp(mtp::benjamini_hochberg(alpha));
    if (name == "by") return mtp::make_fixed_mtp(mtp::benjamini_yekutieli(alpha));
    return mtp::make_dp_mtp(alpha, mass);
  };

  std::vector<mtp::SimulationRecord> records;
  for (const std::string& name : methods) {
    mtp::SimulationRecord rec;
    rec.method = name;
    rec.estimate = mtp::estimate_error_rates(handle_for(name), sf.scenario);
    std::cout << name << " fdr=" << fmt_stat(rec.estimate.fdr_hat)
              << " fwer=" << fmt_stat(rec.estimate.fwer_hat)
              << " power=" << fmt_stat(rec.estimate.power_hat) << "\n";
    records.push_back(std::move(rec));
  }

  const fs::path out_path(opt.out);
  std::ofstream out(out_path, std::ios::binary);
  if (!out)
    mtp::raise(mtp::errc::io_error, "cannot write file: " + out_path.string());
  try {
    mtp::write_simulation_json(out, sf, records);
  } catch (...) {
    out.close();
    std::error_code ec;
    fs::remove(out_path, ec);
    throw;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// combine

struct CombineOptions {
  std::string input;
  std::string group = "group";
  std::string column = "p";
  std::string out = "combined.csv";
};

int cmd_combine(const CombineOptions& opt) {
  const auto groups = mtp::load_grouped_pvalues_file(opt.input, opt.group, opt.column);
  const auto combined = mtp::combine_groups(groups);

  const fs::path out_path(opt.out);
  std::ofstream out(out_path, std::ios::binary);
  if (!out)
    mtp::raise(mtp::errc::io_error, "cannot write file: " + out_path.string());
  mtp::write_combined_csv(out, combined);
  std::cout << "combined " << combined.size() << " groups -> " << opt.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// mass-posterior

struct MassPosteriorOptions {
  std::size_t k = 0;
  std::size_t n = 0;
  std::size_t m = 0;  // 0: defaults to n
  double prior_shape = 1.0;
  double prior_rate = 1.0;
  std::size_t burnin = 10000;
  std::size_t samples = 10000;
  std::uint64_t seed = 0;
  std::string out = "out";
};

int cmd_mass_posterior(const MassPosteriorOptions& opt) {
  if (opt.k < 1 || opt.k > opt.n) throw UsageError("need 1 <= --k <= --n");
  if (!(opt.prior_shape > 0.0 && opt.prior_rate > 0.0))
    throw UsageError("--prior-shape and --prior-rate must be positive");
  if (opt.samples < 1) throw UsageError("--samples must be at least 1");

  mtp::MassPosteriorConfig cfg;
  cfg.distinct_values = opt.k;
  cfg.total_values = opt.n;
  cfg.prior_shape = opt.prior_shape;
  cfg.prior_rate = opt.prior_rate;
  cfg.burnin = opt.burnin;
  cfg.samples = opt.samples;
  cfg.seed = opt.seed;

  const mtp::MassSamples ms = mtp::gibbs_mass(cfg);

  const std::size_t m_bins = opt.m == 0 ? opt.n : opt.m;
  const mtp::MeasureBaseline base = mtp::baseline_by(m_bins);
  double peak = 0.0;  // max_r nu0(1-nu0) is fixed across draws
  for (std::size_t r = 1; r <= m_bins; ++r)
    peak = std::max(peak, base.probs[r - 1] * (1.0 - base.probs[r - 1]));
  std::vector<double> max_var(ms.draws.size());
  for (std::size_t i = 0; i < ms.draws.size(); ++i)
    max_var[i] = peak / (ms.draws[i] + 1.0);

  mtp::MassPosteriorOutput mp;
  mp.config = cfg;
  mp.m_bins = m_bins;
  mp.mass_summary = ms.summary;
  mp.max_measure_variance_mean = mtp::mean_of(max_var);
  mp.max_measure_variance_sd = mtp::sample_sd(max_var);
  mp.lag1_autocorrelation = ms.lag1_autocorrelation;
  mp.nonconvergence_warning = ms.nonconvergence_warning;

  if (ms.nonconvergence_warning)
    std::cerr << "warning: lag-1 autocorrelation "
              << fmt_stat(ms.lag1_autocorrelation)
              << " exceeds 0.99; chain may not have converged\n";

  std::cout << "M mean=" << fmt_stat(ms.summary.mean)
            << " sd=" << fmt_stat(ms.summary.sd)
            << " median=" << fmt_stat(ms.summary.quantiles[2])
            << " max_var=" << fmt_stat(mp.max_measure_variance_mean) << "\n";

  OutputTracker tracker((fs::path(opt.out)));
  try {
    auto f = tracker.open("m_posterior.json");
    mtp::write_mass_posterior_json(f, mp);
  } catch (...) {
    tracker.discard();
    throw;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiple testing procedures valid under arbitrary dependence, "
               "with Dirichlet-process sensitivity analysis"};
  app.require_subcommand(1);

  RunOptions run_opt;
  CLI::App* run = app.add_subcommand(
      "run", "Apply fixed procedures and/or the DP sensitivity analysis to a "
             "CSV of p-values");
  run->add_option("--input", run_opt.input, "CSV file with a p-value column")
      ->required();
  run->add_option("--column", run_opt.column, "p-value column name (default p)");
  run->add_option("--alpha", run_opt.alpha, "significance level in (0,1)");
  run->add_option("--methods", run_opt.methods,
                  "comma list: bonferroni,wbonferroni,sidak,holm,bh,by,dp,all");
  run->add_option("--draws", run_opt.draws, "Monte Carlo draws S");
  run->add_option("--seed", run_opt.seed, "master RNG seed");
  run->add_option("--mass", run_opt.mass, "DP mass: exp1 or fixed:<M>");
  run->add_option("--out", run_opt.out, "output directory");
  run->add_option("--formats", run_opt.formats, "comma list: json,csv");
  run->add_flag("--debug", run_opt.debug, "also dump raw r_samples.csv");

  SimulateOptions sim_opt;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Estimate FWER/FDR/power of procedures on a synthetic "
                  "correlated-p-value scenario");
  simulate->add_option("--scenario", sim_opt.scenario,
                       "key=value scenario file (m, m0, rho, mu, trials, alpha, seed)")
      ->required();
  simulate->add_option("--methods", sim_opt.methods, "comma list as in run");
  simulate->add_option("--mass", sim_opt.mass, "DP mass: exp1 or fixed:<M>");
  simulate->add_option("--out", sim_opt.out, "output JSON file");

  CombineOptions comb_opt;
  CLI::App* combine = app.add_subcommand(
      "combine", "Combine grouped p-values (Tippett / Dunn-Sidak minimum rule)");
  combine->add_option("--input", comb_opt.input, "CSV with group and p columns")
      ->required();
  combine->add_option("--group", comb_opt.group, "group column name (default group)");
  combine->add_option("--column", comb_opt.column, "p-value column name (default p)");
  combine->add_option("--out", comb_opt.out, "output CSV file");

  MassPosteriorOptions mass_opt;
  CLI::App* mass = app.add_subcommand(
      "mass-posterior", "Gibbs sampler for the DP mass parameter given k "
                        "distinct values among n");
  mass->add_option("--k", mass_opt.k, "number of distinct values")->required();
  mass->add_option("--n", mass_opt.n, "number of values")->required();
  mass->add_option("--m", mass_opt.m,
                   "bins of the BY baseline for the measure-variance summary "
                   "(default n)");
  mass->add_option("--prior-shape", mass_opt.prior_shape, "Gamma prior shape a");
  mass->add_option("--prior-rate", mass_opt.prior_rate, "Gamma prior rate b");
  mass->add_option("--burnin", mass_opt.burnin, "burn-in iterations");
  mass->add_option("--samples", mass_opt.samples, "kept draws");
  mass->add_option("--seed", mass_opt.seed, "RNG seed");
  mass->add_option("--out", mass_opt.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    if (run->parsed()) return cmd_run(run_opt);
    if (simulate->parsed()) return cmd_simulate(sim_opt);
    if (combine->parsed()) return cmd_combine(comb_opt);
    if (mass->parsed()) return cmd_mass_posterior(mass_opt);
    std::cerr << "no subcommand given\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const mtp::Error& e) {
    std::cerr << "error [" << mtp::errc_name(e.code()) << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
