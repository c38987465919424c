#include "acim/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include "acim/common.hpp"

namespace acim {

std::string g17(double x) {
  char buf[40];
  // Shortest form that still round-trips: widen until the parse comes back
  // bit-identical, ending at 17 significant digits which always does.
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

void write_step_csv(const StepFunction& f, std::ostream& os) {
  os << "left,right,value\n";
  const auto& t = f.breakpoints();
  const auto& v = f.values();
  for (std::size_t j = 0; j < v.size(); ++j)
    os << g17(t[j]) << ',' << g17(t[j + 1]) << ',' << g17(v[j]) << '\n';
}

StepFunction read_step_csv(std::istream& is) {
  std::string line;
  std::vector<double> t, v;
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.find("left") != std::string::npos) continue;  // header
    }
    std::istringstream row(line);
    std::string a, b, c;
    if (!std::getline(row, a, ',') || !std::getline(row, b, ',') || !std::getline(row, c))
      fail(errc::io_error, "malformed step csv row: " + line);
    const double left = std::strtod(a.c_str(), nullptr);
    const double right = std::strtod(b.c_str(), nullptr);
    const double value = std::strtod(c.c_str(), nullptr);
    if (t.empty()) {
      t.push_back(left);
    } else if (std::abs(t.back() - left) > 1e-12) {
      fail(errc::io_error, "step csv rows are not contiguous");
    }
    t.push_back(right);
    v.push_back(value);
  }
  if (v.empty()) fail(errc::io_error, "step csv holds no rows");
  return StepFunction(std::move(t), std::move(v));
}

void write_sequence_csv(const std::vector<double>& values, std::ostream& os,
                        const std::string& value_header) {
  os << "n," << value_header << '\n';
  for (std::size_t n = 0; n < values.size(); ++n) os << n << ',' << g17(values[n]) << '\n';
}

void write_map_graph(const PiecewiseMap& map, std::ostream& os, std::size_t points,
                     double tail_tol) {
  const std::size_t n0 = map.ensure_slope_sum(tail_tol, std::size_t{1} << 14);
  os << "x,tau\n";
  for (std::size_t i = 1; i <= n0; ++i) {
    Branch br = map.branch(i);
    // at least the two endpoints; long branches get their share of the grid
    auto steps = static_cast<std::size_t>(std::ceil(br.length() * static_cast<double>(points)));
    steps = std::max<std::size_t>(steps, 2);
    if (i > 1) os << '\n';
    for (std::size_t s = 0; s <= steps; ++s) {
      const double u = static_cast<double>(s) / static_cast<double>(steps);
      const double x = br.a() + u * (br.b() - br.a());
      const double y = s == 0 ? br.image_left() : s == steps ? br.image_right() : br.value(x);
      os << g17(x) << ',' << g17(y) << '\n';
    }
  }
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(errc::io_error, "cannot open for writing: " + path);
  os << text;
  os.flush();
  if (!os) fail(errc::io_error, "write failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(errc::io_error, "cannot open: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace acim
