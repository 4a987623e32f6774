#pragma once

#include <stdexcept>
#include <string>

namespace ubw1 {

enum class errc {
  invalid_argument,
  unknown_name,
  negative_mass,
  mass_mismatch,
  empty_space,
  space_mismatch,
  infeasible_model,
  infeasible_change,
  infeasible_pair,
  model_mismatch,
  non_convergence,
  degenerate_slope,
  cycle_guard,
  not_optimal,
  out_of_range,
  inconclusive,
  parse_error,
  io_error,
  internal
};

const char* errc_name(errc c);

class error : public std::runtime_error {
 public:
  error(errc c, const std::string& what)
      : std::runtime_error(std::string(errc_name(c)) + ": " + what), code_(c) {}
  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc c, const std::string& what) { throw error(c, what); }

inline void require(bool ok, errc c, const std::string& what) {
  if (!ok) fail(c, what);
}

}  // namespace ubw1
