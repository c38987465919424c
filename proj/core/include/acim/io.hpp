#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "acim/piecewise_map.hpp"
#include "acim/step_function.hpp"

namespace acim {

// All numeric artifact output goes through this: shortest representation with
// 17 significant digits, so round-trips are exact and reruns are byte-stable.
std::string g17(double x);

// CSV with header "left,right,value", one row per piece.
void write_step_csv(const StepFunction& f, std::ostream& os);
StepFunction read_step_csv(std::istream& is);

// CSV with header "n,C_n".
void write_sequence_csv(const std::vector<double>& values, std::ostream& os,
                        const std::string& value_header = "C_n");

// Map graph sampled on a grid, one "x,tau" section per branch separated by
// blank lines (plotting tools treat the blanks as pen lifts).
void write_map_graph(const PiecewiseMap& map, std::ostream& os, std::size_t points = 2048,
                     double tail_tol = 1e-4);

// Writes text to a file, LF line endings. Throws errc::io_error.
void write_file(const std::string& path, const std::string& text);
std::string read_file(const std::string& path);

}  // namespace acim
