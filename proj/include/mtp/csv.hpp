#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "mtp/errors.hpp"
#include "mtp/pvalues.hpp"

namespace mtp {

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      cells.push_back(trim(std::string_view(line).substr(start, i - start)));
      start = i + 1;
    }
  }
  return cells;
}

inline std::size_t find_column(const std::vector<std::string>& header,
                               const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  raise(errc::missing_column, "missing column '" + name + "' in CSV header");
}

/// Parses a decimal or scientific-notation number occupying the whole cell.
inline double parse_cell_number(const std::string& cell, std::size_t row) {
  if (cell.empty())
    raise(errc::parse_error, "empty value at row " + std::to_string(row));
  const char* begin = cell.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end != begin + cell.size())
    raise(errc::parse_error,
          "cannot parse value '" + cell + "' at row " + std::to_string(row));
  return v;
}

}  // namespace detail

/// Loads a p-value batch from CSV. The header must contain `column`
/// (default "p"); labels come from a `label` column when present, else from
/// 1-based row numbers. Any invalid value rejects the whole file.
namespace detail {

inline void strip_bom(std::string& line) {
  if (line.size() >= 3 && line[0] == '\xEF' && line[1] == '\xBB' && line[2] == '\xBF')
    line.erase(0, 3);
}

}  // namespace detail

inline PValueSet load_pvalues(std::istream& in, const std::string& column = "p") {
  std::string line;
  if (!std::getline(in, line)) raise(errc::empty_input, "empty CSV input");
  detail::strip_bom(line);
  const auto header = detail::split_csv_line(line);
  const std::size_t p_col = detail::find_column(header, column);
  std::size_t label_col = header.size();
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == "label") label_col = i;

  PValueSet ps;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    ++row;
    const auto cells = detail::split_csv_line(line);
    if (p_col >= cells.size())
      raise(errc::parse_error, "too few cells at row " + std::to_string(row));
    const double p = detail::parse_cell_number(cells[p_col], row);
    if (!(p >= 0.0 && p <= 1.0))
      raise(errc::value_out_of_range,
            "p-value out of [0,1] at row " + std::to_string(row));
    ps.values.push_back(p);
    if (label_col < header.size()) {
      if (label_col >= cells.size())
        raise(errc::parse_error, "missing label at row " + std::to_string(row));
      ps.labels.push_back(cells[label_col]);
    } else {
      ps.labels.push_back(std::to_string(row));
    }
  }
  if (ps.values.empty()) raise(errc::empty_input, "CSV contains no data rows");
  validate(ps);
  return ps;
}

inline PValueSet load_pvalues_file(const std::filesystem::path& path,
                                   const std::string& column = "p") {
  std::ifstream in(path);
  if (!in) raise(errc::io_error, "cannot open input file: " + path.string());
  return load_pvalues(in, column);
}

/// A group of p-values to be combined into one (plausible-value style
/// repeated tests).
struct PValueGroup {
  std::string group;
  std::vector<double> pvalues;
};

/// Reads a grouped CSV (group label column + p column). Groups keep their
/// first-appearance order.
inline std::vector<PValueGroup> load_grouped_pvalues(
    std::istream& in, const std::string& group_column = "group",
    const std::string& p_column = "p") {
  std::string line;
  if (!std::getline(in, line)) raise(errc::empty_input, "empty CSV input");
  detail::strip_bom(line);
  const auto header = detail::split_csv_line(line);
  const std::size_t g_col = detail::find_column(header, group_column);
  const std::size_t p_col = detail::find_column(header, p_column);

  std::vector<PValueGroup> groups;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    ++row;
    const auto cells = detail::split_csv_line(line);
    if (g_col >= cells.size() || p_col >= cells.size())
      raise(errc::parse_error, "too few cells at row " + std::to_string(row));
    const double p = detail::parse_cell_number(cells[p_col], row);
    if (!(p >= 0.0 && p <= 1.0))
      raise(errc::value_out_of_range,
            "p-value out of [0,1] at row " + std::to_string(row));
    const std::string& g = cells[g_col];
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&g](const PValueGroup& pg) { return pg.group == g; });
    if (it == groups.end()) {
      groups.push_back({g, {p}});
    } else {
      it->pvalues.push_back(p);
    }
  }
  if (groups.empty()) raise(errc::empty_input, "CSV contains no data rows");
  return groups;
}

inline std::vector<PValueGroup> load_grouped_pvalues_file(
    const std::filesystem::path& path, const std::string& group_column = "group",
    const std::string& p_column = "p") {
  std::ifstream in(path);
  if (!in) raise(errc::io_error, "cannot open input file: " + path.string());
  return load_grouped_pvalues(in, group_column, p_column);
}

}  // namespace mtp
