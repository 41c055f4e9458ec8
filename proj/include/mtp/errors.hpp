#pragma once

#include <stdexcept>
#include <string>

namespace mtp {

enum class errc {
  missing_column,
  parse_error,
  value_out_of_range,
  empty_input,
  invalid_alpha,
  weight_mismatch,
  regime_mismatch,
  length_mismatch,
  degenerate_draw,
  index_out_of_range,
  empty_draws,
  invalid_config,
  io_error,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::missing_column: return "missing_column";
    case errc::parse_error: return "parse_error";
    case errc::value_out_of_range: return "value_out_of_range";
    case errc::empty_input: return "empty_input";
    case errc::invalid_alpha: return "invalid_alpha";
    case errc::weight_mismatch: return "weight_mismatch";
    case errc::regime_mismatch: return "regime_mismatch";
    case errc::length_mismatch: return "length_mismatch";
    case errc::degenerate_draw: return "degenerate_draw";
    case errc::index_out_of_range: return "index_out_of_range";
    case errc::empty_draws: return "empty_draws";
    case errc::invalid_config: return "invalid_config";
    case errc::io_error: return "io_error";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace mtp
