#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mtp/combine.hpp"
#include "mtp/errors.hpp"
#include "mtp/mass_posterior.hpp"
#include "mtp/pvalues.hpp"
#include "mtp/sensitivity.hpp"
#include "mtp/simulation.hpp"

namespace mtp {

/// Serializes a double with 17 significant digits (lossless round trip).
inline std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace detail {

inline std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);  // LF line endings everywhere
  if (!out) raise(errc::io_error, "cannot write file: " + path.string());
  return out;
}

}  // namespace detail

/// Echo of the run configuration, frozen into summary.json (schema v1).
struct RunEcho {
  std::string input;
  std::string column = "p";
  double alpha = 0.05;
  std::vector<std::string> methods;
  std::size_t draws = 1000;
  std::uint64_t seed = 0;
  std::string mass = "exp1";
};

/// Result line of one method: deterministic procedures carry a count,
/// Monte Carlo ones a mean (and sd).
struct MethodResult {
  std::string name;
  std::optional<std::size_t> count;
  std::optional<double> mean;
  std::optional<double> sd;
};

inline void write_summary_json(std::ostream& out, const RunEcho& echo,
                               std::size_t m, std::size_t k_distinct,
                               const std::vector<MethodResult>& results) {
  out << "{\n";
  out << "  \"schema\": \"v1\",\n";
  out << "  \"config\": {\n";
  out << "    \"input\": \"" << detail::json_escape(echo.input) << "\",\n";
  out << "    \"column\": \"" << detail::json_escape(echo.column) << "\",\n";
  out << "    \"alpha\": " << format_number(echo.alpha) << ",\n";
  out << "    \"methods\": [";
  for (std::size_t i = 0; i < echo.methods.size(); ++i) {
    if (i) out << ", ";
    out << '"' << detail::json_escape(echo.methods[i]) << '"';
  }
  out << "],\n";
  out << "    \"draws\": " << echo.draws << ",\n";
  out << "    \"seed\": " << echo.seed << ",\n";
  out << "    \"mass\": \"" << detail::json_escape(echo.mass) << "\"\n";
  out << "  },\n";
  out << "  \"m\": " << m << ",\n";
  out << "  \"k_distinct\": " << k_distinct << ",\n";
  out << "  \"results\": {\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    const MethodResult& r = results[i];
    out << "    \"" << detail::json_escape(r.name) << "\": {";
    bool first = true;
    if (r.count) {
      out << "\"count\": " << *r.count;
      first = false;
    }
    if (r.mean) {
      if (!first) out << ", ";
      out << "\"mean\": " << format_number(*r.mean);
      first = false;
    }
    if (r.sd) {
      if (!first) out << ", ";
      out << "\"sd\": " << format_number(*r.sd);
    }
    out << "}" << (i + 1 < results.size() ? "," : "") << "\n";
  }
  out << "  }\n";
  out << "}\n";
}

inline void write_r_hist_csv(std::ostream& out, const SensitivityReport& report) {
  out << "bin_lo,bin_hi,count\n";
  for (const HistogramBin& b : report.histogram)
    out << b.lo << ',' << b.hi << ',' << b.count << '\n';
}

inline void write_sig_prob_csv(std::ostream& out, const SensitivityReport& report,
                               const PValueSet& ps) {
  out << "label,p,sig_prob\n";
  for (const SignificanceRow& row : significance_table(report, ps, 1.0))
    out << detail::csv_escape(row.label) << ',' << format_number(row.p) << ','
        << format_number(row.sig_prob) << '\n';
}

inline void write_r_samples_csv(std::ostream& out, const SensitivityReport& report) {
  out << "r\n";
  for (std::size_t r : report.r_samples) out << r << '\n';
}

/// m_posterior.json: posterior summary of the mass parameter plus the
/// posterior mean of the maximum measure variance (BY baseline with m bins).
struct MassPosteriorOutput {
  MassPosteriorConfig config;
  std::size_t m_bins = 1;
  SummaryStats mass_summary;
  double max_measure_variance_mean = 0.0;
  double max_measure_variance_sd = 0.0;
  double lag1_autocorrelation = 0.0;
  bool nonconvergence_warning = false;
};

inline void write_mass_posterior_json(std::ostream& out,
                                      const MassPosteriorOutput& mp) {
  const auto& q = mp.mass_summary.quantiles;
  out << "{\n";
  out << "  \"schema\": \"v1\",\n";
  out << "  \"config\": {\n";
  out << "    \"k\": " << mp.config.distinct_values << ",\n";
  out << "    \"n\": " << mp.config.total_values << ",\n";
  out << "    \"m\": " << mp.m_bins << ",\n";
  out << "    \"prior_shape\": " << format_number(mp.config.prior_shape) << ",\n";
  out << "    \"prior_rate\": " << format_number(mp.config.prior_rate) << ",\n";
  out << "    \"burnin\": " << mp.config.burnin << ",\n";
  out << "    \"samples\": " << mp.config.samples << ",\n";
  out << "    \"seed\": " << mp.config.seed << "\n";
  out << "  },\n";
  out << "  \"mass\": {\n";
  out << "    \"mean\": " << format_number(mp.mass_summary.mean) << ",\n";
  out << "    \"sd\": " << format_number(mp.mass_summary.sd) << ",\n";
  out << "    \"quantiles\": {\n";
  out << "      \"p0\": " << format_number(q[0]) << ",\n";
  out << "      \"p25\": " << format_number(q[1]) << ",\n";
  out << "      \"p50\": " << format_number(q[2]) << ",\n";
  out << "      \"p75\": " << format_number(q[3]) << ",\n";
  out << "      \"p100\": " << format_number(q[4]) << "\n";
  out << "    }\n";
  out << "  },\n";
  out << "  \"max_measure_variance\": {\n";
  out << "    \"mean\": " << format_number(mp.max_measure_variance_mean) << ",\n";
  out << "    \"sd\": " << format_number(mp.max_measure_variance_sd) << "\n";
  out << "  },\n";
  out << "  \"lag1_autocorrelation\": " << format_number(mp.lag1_autocorrelation)
      << ",\n";
  out << "  \"nonconvergence_warning\": "
      << (mp.nonconvergence_warning ? "true" : "false") << "\n";
  out << "}\n";
}

/// Simulation results: one JSON record per method over a scenario.
struct SimulationRecord {
  std::string method;
  ErrorRateEstimate estimate;
};

inline void write_simulation_json(std::ostream& out, const ScenarioFile& sf,
                                  const std::vector<SimulationRecord>& records) {
  const Scenario& sc = sf.scenario;
  out << "{\n";
  out << "  \"schema\": \"v1\",\n";
  out << "  \"scenario\": {\n";
  out << "    \"m\": " << sc.m << ",\n";
  out << "    \"m0\": " << sc.m0 << ",\n";
  out << "    \"rho\": " << format_number(sc.rho) << ",\n";
  out << "    \"mu\": " << format_number(sc.mu) << ",\n";
  out << "    \"trials\": " << sc.trials << ",\n";
  out << "    \"alpha\": " << format_number(sf.alpha) << ",\n";
  out << "    \"seed\": " << sc.seed << "\n";
  out << "  },\n";
  out << "  \"results\": [\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    out << "    {\"method\": \"" << detail::json_escape(r.method) << "\", "
        << "\"fdr_hat\": " << format_number(r.estimate.fdr_hat) << ", "
        << "\"se_fdr\": " << format_number(r.estimate.se_fdr) << ", "
        << "\"fwer_hat\": " << format_number(r.estimate.fwer_hat) << ", "
        << "\"se_fwer\": " << format_number(r.estimate.se_fwer) << ", "
        << "\"power_hat\": " << format_number(r.estimate.power_hat) << "}"
        << (i + 1 < records.size() ? "," : "") << "\n";
  }
  out << "  ]\n";
  out << "}\n";
}

inline void write_combined_csv(std::ostream& out,
                               const std::vector<CombinedGroup>& groups) {
  out << "group,q,p_combined\n";
  for (const CombinedGroup& g : groups)
    out << detail::csv_escape(g.group) << ',' << g.q << ','
        << format_number(g.p_combined) << '\n';
}

}  // namespace mtp
