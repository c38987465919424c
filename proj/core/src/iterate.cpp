#include "acim/iterate.hpp"

#include <algorithm>
#include <cmath>

#include "acim/common.hpp"
#include "detail.hpp"

namespace acim {

namespace {

// Pulls a partition back one level: the cells of tau^(k+1) are the preimages
// of the tau^k cells under every materialized branch. Left endpoints pull
// back exactly (each branch value vanishes at its own left endpoint), so
// composed slopes stay products of branch derivatives at exact points.
std::vector<IterateCell> pull_back(const PiecewiseMap& map,
                                   const std::vector<std::size_t>& order,
                                   const std::vector<IterateCell>& prev,
                                   std::size_t cell_cap) {
  std::vector<IterateCell> next;
  for (std::size_t idx : order) {
    Branch br = map.branch(idx);
    const double img_r = br.image_right();
    for (const IterateCell& c : prev) {
      if (c.left >= img_r) break;  // prev cells are ordered; nothing further intersects
      double x_lo = c.left <= 0.0 ? br.a() : br.inverse(c.left);
      double x_hi = c.right >= img_r ? br.b() : br.inverse(c.right);
      x_lo = std::clamp(x_lo, br.a(), br.b());
      x_hi = std::clamp(x_hi, br.a(), br.b());
      if (!(x_hi - x_lo > 1e-15)) continue;
      IterateCell cell;
      cell.left = x_lo;
      cell.right = x_hi;
      cell.path.reserve(c.path.size() + 1);
      cell.path.push_back(static_cast<std::uint32_t>(idx));
      cell.path.insert(cell.path.end(), c.path.begin(), c.path.end());
      cell.slope_left = br.derivative(x_lo) * c.slope_left;
      next.push_back(std::move(cell));
      if (next.size() > cell_cap)
        fail(errc::truncation_overflow, "iterate partition exceeds the cell cap");
    }
  }
  return next;
}

// Shared driver: builds levels 1..n, handing each level's cells and summary
// to the sink; the sink returns false to stop refining.
template <class Sink>
void build_levels(const PiecewiseMap& map, std::size_t n, const IterateOptions& opt,
                  Sink&& sink) {
  if (n < 1) fail(errc::bad_config, "iterate order must be at least 1");
  detail::ensure_tail_length(map, opt.tail_tol, kPrefixCap);
  auto order = detail::spatial_order(map);

  std::vector<IterateCell> cells;
  cells.reserve(order.size());
  for (std::size_t idx : order) {
    Branch br = map.branch(idx);
    cells.push_back({br.a(), br.b(), {static_cast<std::uint32_t>(idx)}, br.min_derivative()});
  }
  // Level-1 mesh must account for tail branches too: none of them is longer
  // than the hull of the remaining domains.
  double tail_mesh = 0.0;
  if (!map.finite()) {
    auto hull = map.tail_hull(map.stored_count());
    tail_mesh = std::max(0.0, hull.second - hull.first);
  }

  double min_branch_slope = cells.empty() ? 0.0 : cells.front().slope_left;
  for (const IterateCell& c : cells) min_branch_slope = std::min(min_branch_slope, c.slope_left);
  // The reported minimum is trustworthy when no tail branch can undercut the
  // materialized ones: every tail reciprocal slope is bounded by the tail sum.
  double tss = map.tail_slope_sum(map.stored_count());
  bool sound = map.finite() || tss == 0.0 || 1.0 / tss >= min_branch_slope;

  for (std::size_t level = 1; level <= n; ++level) {
    if (level > 1) cells = pull_back(map, order, cells, opt.cell_cap);
    IteratePartition part;
    part.n = level;
    part.min_slope = cells.empty() ? 0.0 : cells.front().slope_left;
    double covered = 0.0;
    for (const IterateCell& c : cells) {
      part.mesh = std::max(part.mesh, c.right - c.left);
      part.min_slope = std::min(part.min_slope, c.slope_left);
      covered += c.right - c.left;
    }
    if (level == 1) part.mesh = std::max(part.mesh, tail_mesh);
    part.min_slope_sound = sound;
    part.truncation_error = std::max(0.0, 1.0 - covered);
    if (!sink(part, cells)) return;
  }
}

}  // namespace

IteratePartition iterate_partition(const PiecewiseMap& map, std::size_t n,
                                   const IterateOptions& opt) {
  IteratePartition out;
  build_levels(map, n, opt, [&](IteratePartition& part, const std::vector<IterateCell>& cells) {
    if (part.n == n) {
      out = part;
      out.cells = cells;
      return false;
    }
    return true;
  });
  return out;
}

std::vector<double> mesh_decay(const PiecewiseMap& map, std::size_t n_max,
                               const IterateOptions& opt) {
  std::vector<double> meshes;
  meshes.reserve(n_max);
  build_levels(map, n_max, opt, [&](IteratePartition& part, const std::vector<IterateCell>&) {
    meshes.push_back(part.mesh);
    return true;
  });
  return meshes;
}

SlopeCertificate min_slope_certificate(const PiecewiseMap& map, double target,
                                       std::size_t n_cap, const IterateOptions& opt) {
  SlopeCertificate best;
  build_levels(map, n_cap, opt, [&](IteratePartition& part, const std::vector<IterateCell>&) {
    if (part.min_slope > best.min_slope) {
      best.n = part.n;
      best.min_slope = part.min_slope;
    }
    if (part.min_slope >= target && part.min_slope_sound) {
      best = {true, part.n, part.min_slope};
      return false;
    }
    return true;
  });
  return best;
}

double compose_value(const PiecewiseMap& map, const std::vector<std::uint32_t>& path, double x) {
  double v = x;
  for (std::uint32_t idx : path) v = map.branch(idx).value(v);
  return v;
}

double compose_derivative(const PiecewiseMap& map, const std::vector<std::uint32_t>& path,
                          double x) {
  double v = x;
  double d = 1.0;
  for (std::uint32_t idx : path) {
    Branch br = map.branch(idx);
    d *= br.derivative(v);
    v = br.value(v);
  }
  return d;
}

}  // namespace acim
