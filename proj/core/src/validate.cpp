#include "acim/validate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "acim/common.hpp"

namespace acim {

namespace {

constexpr double kZeroTol = 1e-10;      // tau(a+) must vanish to this
constexpr double kConvexSlack = 1e-12;  // derivative may dip by this between samples
constexpr double kInverseTol = 1e-12;
constexpr double kCoverTol = 1e-12;

void check_branch(const Branch& br, std::size_t index, std::size_t grid,
                  std::vector<Violation>& out) {
  if (grid < 2) grid = 2;
  double len = br.length();
  // Forward values and derivative on the closure.
  double prev_val = br.value(br.a());
  double prev_d = br.derivative(br.a());
  if (std::abs(prev_val) > kZeroTol)
    out.push_back({"vanishing-left", index,
                   "tau(a) = " + std::to_string(prev_val) + " but must vanish"});
  if (!(prev_d > 0.0))
    out.push_back({"contraction", index, "derivative at the left endpoint is not positive"});
  for (std::size_t j = 1; j < grid; ++j) {
    double x = br.a() + len * static_cast<double>(j) / static_cast<double>(grid - 1);
    double val = br.value(x);
    double d = br.derivative(x);
    if (!(val > prev_val))
      out.push_back({"monotone", index, "forward map is not strictly increasing"});
    if (d < prev_d - kConvexSlack)
      out.push_back({"convex", index, "derivative decreases along the branch"});
    if (d < 0.0) out.push_back({"monotone", index, "negative derivative"});
    prev_val = val;
    prev_d = d;
    if (out.size() > 64) return;  // enough evidence
  }
  if (br.image_left() < -kZeroTol || br.image_right() > 1.0 + kZeroTol)
    out.push_back({"image", index, "branch image leaves [0,1]"});
  // inverse must be a right inverse of the forward map on the image.
  for (std::size_t j = 0; j < grid; ++j) {
    double y = br.image_left() +
               (br.image_right() - br.image_left()) * static_cast<double>(j) /
                   static_cast<double>(grid - 1);
    double x = std::clamp(br.inverse(y), br.a(), br.b());
    // Round-trip error grows with the branch slope, so the tolerance is relative.
    double scale = std::max(1.0, std::abs(br.derivative(x)));
    if (std::abs(br.value(x) - y) > kInverseTol * scale) {
      out.push_back({"inverse", index, "inverse is not a right inverse of the forward map"});
      break;
    }
  }
}

}  // namespace

CutPoint select_cut_point(const PiecewiseMap& map, double tail_tol) {
  CutPoint best;
  // Deep enough that the tail is both small and confined near 0.
  std::size_t n = map.ensure_slope_sum(std::min(tail_tol, 1e-6), 1 << 16);
  for (int attempt = 0; attempt < 8; ++attempt) {
    double tail_sum = map.tail_slope_sum(n);
    double hull_hi = map.finite() ? 0.0 : map.tail_hull(n).second;
    // Candidate cut points: materialized branch endpoints, descending, staying
    // above the tail hull so the tail is entirely left of every candidate.
    std::set<double, std::greater<double>> candidates;
    for (std::size_t i = 1; i <= n; ++i) {
      const Branch br = map.branch(i);
      if (br.a() >= hull_hi && br.a() > 0.0) candidates.insert(br.a());
      if (br.b() >= hull_hi && br.b() < 1.0) candidates.insert(br.b());
    }
    for (double r : candidates) {
      double s = tail_sum;
      for (std::size_t i = 1; i <= n; ++i) {
        const Branch br = map.branch(i);
        if (br.a() < r) s += 1.0 / br.min_derivative();
      }
      if (s <= 0.5) {
        best.r = r;
        best.alpha = s;
        best.relaxed = false;
        best.found = true;
        return best;
      }
      if (s < 1.0 && (!best.found || s < best.alpha)) {
        best.r = r;
        best.alpha = s;
        best.relaxed = true;
        best.found = true;
      }
    }
    if (best.found) return best;
    std::size_t deeper = map.ensure_count(n * 2);
    if (deeper == n) break;  // generator is exhausted
    n = deeper;
  }
  return best;
}

ClassReport validate(const PiecewiseMap& map, const ValidateOptions& opt) {
  ClassReport rep;
  rep.accumulates_at_zero = map.accumulates_at_zero();
  rep.finite_family = map.finite();

  std::size_t n = map.ensure_slope_sum(std::max(opt.tail_tol, 1e-8), 1 << 16);
  rep.branches_checked = n;

  // Per-branch shape checks on a prefix, plus spot checks deeper in.
  std::size_t detailed = std::min(n, opt.check_limit);
  for (std::size_t i = 1; i <= detailed; ++i)
    check_branch(map.branch(i), i, opt.grid, rep.violations);
  if (n > detailed) {
    for (std::size_t i : {detailed + 1, (detailed + n) / 2, n})
      check_branch(map.branch(i), i, opt.grid, rep.violations);
  }

  // Domain structure: ordered, disjoint, covering [0,1] up to the tail.
  std::vector<std::pair<double, double>> spans;
  spans.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) {
    const Branch br = map.branch(i);
    spans.emplace_back(br.a(), br.b());
  }
  std::sort(spans.begin(), spans.end());
  double covered = 0.0;
  for (std::size_t j = 0; j < spans.size(); ++j) {
    covered += spans[j].second - spans[j].first;
    if (j > 0 && spans[j].first < spans[j - 1].second - kCoverTol)
      rep.violations.push_back({"coverage", 0, "branch domains overlap"});
  }
  double tail_len = map.tail_length(n);
  if (covered + tail_len < 1.0 - 1e-9)
    rep.violations.push_back(
        {"coverage", 0, "branch domains cover " + std::to_string(covered + tail_len)});

  // Reciprocal slope sum with the tail bound folded in, and the expansion sup.
  double slope_sum = map.tail_slope_sum(n);
  double beta = map.finite() ? 0.0 : map.tail_slope_sum(n);
  bool slopes_ok = true;
  for (std::size_t i = 1; i <= n; ++i) {
    double d = map.branch(i).min_derivative();
    if (!(d > 0.0)) {
      slopes_ok = false;
      continue;
    }
    slope_sum += 1.0 / d;
    beta = std::max(beta, 1.0 / d);
  }
  if (!slopes_ok) {
    rep.violations.push_back({"slope-sum", 0, "a branch has vanishing derivative at its left endpoint"});
    rep.slope_sum = std::numeric_limits<double>::infinity();
  } else {
    rep.slope_sum = slope_sum;
  }
  rep.beta = slopes_ok ? beta : std::numeric_limits<double>::infinity();

  // Contraction coefficient.
  if (!rep.accumulates_at_zero) {
    std::size_t at_zero = 0, origin = 0;
    for (std::size_t i = 1; i <= n; ++i) {
      if (std::abs(map.branch(i).a()) <= kCoverTol) {
        ++at_zero;
        origin = i;
      }
    }
    if (at_zero != 1) {
      rep.violations.push_back(
          {"origin-branch", 0, "expected exactly one branch starting at 0"});
    } else {
      double d0 = map.branch(origin).min_derivative();
      if (d0 > 0.0) rep.alpha = 1.0 / d0;
      else rep.alpha = std::numeric_limits<double>::infinity();
      if (!(rep.alpha < 1.0))
        rep.violations.push_back({"contraction", origin, "slope at 0 must exceed 1"});
    }
  } else {
    CutPoint cut = select_cut_point(map, opt.tail_tol);
    if (!cut.found) {
      rep.violations.push_back({"contraction", 0, "no cut point with partial slope sum < 1"});
    } else {
      rep.r = cut.r;
      rep.alpha = cut.alpha;
      rep.r_relaxed = cut.relaxed;
    }
  }

  rep.in_T = rep.violations.empty() && rep.alpha < 1.0 && std::isfinite(rep.slope_sum);
  rep.in_TE = rep.in_T && rep.beta < 1.0;
  return rep;
}

}  // namespace acim
