#pragma once

#include <stdexcept>
#include <string>

namespace acim {

// Failure modes surfaced by the library. Checks that merely degrade a result
// (non-convergence, degenerate fits) are reported as flags on the result
// structs instead of being thrown.
enum class errc {
  point_in_tail_gap,    // x lies beyond every materialized branch
  malformed_branch,     // overlapping / unordered / out-of-range branch data
  truncation_overflow,  // materialized cell or branch count exceeds the cap
  non_affine_branch,    // exact step pushforward asked for on analytic branches
  method_unavailable,   // requested algorithm needs affine branches
  input_not_monotone,   // a non-increasing input was required
  alpha_not_contractive,// contraction coefficient came out >= 1
  not_centered,         // observable has nonzero mean under the given measure
  orbit_escape,         // an orbit left [0,1] by more than 1e-9
  no_return_found,      // first-return capture fell short of 1 - tail_tol
  unknown_name,         // no builtin with that name
  empty_samples,        // statistic of an empty sample set
  bad_config,           // map config file rejected
  usage_error,          // bad CLI invocation
  io_error,             // file could not be read or written
  validation_failure,   // map required to be admissible but is not
};

inline const char* errc_name(errc code) {
  switch (code) {
    case errc::point_in_tail_gap: return "point-in-tail-gap";
    case errc::malformed_branch: return "malformed-branch";
    case errc::truncation_overflow: return "truncation-overflow";
    case errc::non_affine_branch: return "non-affine-branch";
    case errc::method_unavailable: return "method-unavailable";
    case errc::input_not_monotone: return "input-not-monotone";
    case errc::alpha_not_contractive: return "alpha-not-contractive";
    case errc::not_centered: return "not-centered";
    case errc::orbit_escape: return "orbit-escape";
    case errc::no_return_found: return "no-return-found";
    case errc::unknown_name: return "unknown-name";
    case errc::empty_samples: return "empty-samples";
    case errc::bad_config: return "bad-config";
    case errc::usage_error: return "usage-error";
    case errc::io_error: return "io-error";
    case errc::validation_failure: return "validation-failure";
  }
  return "error";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

}  // namespace acim
