#pragma once

namespace acim::cli {

// Entry point of the acim tool. Commands: validate, density, spectrum,
// correlations, clt, sample, ly-check, first-return.
// Exit codes: 0 success, 1 usage or I/O error, 2 validation failure.
int run(int argc, const char* const* argv);

}  // namespace acim::cli
