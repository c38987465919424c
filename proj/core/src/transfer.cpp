#include "acim/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "acim/common.hpp"
#include "acim/validate.hpp"
#include "detail.hpp"

namespace acim {

namespace {

// Materializes branches until the tail hull contains no breakpoint of f in
// its interior, so f is constant across every unmaterialized branch domain
// and the tail acts in closed form. Best effort: stops at the prefix cap.
// Tails without the closed form are instead shrunk below tail_tol and their
// remainder dropped with an explicit bound.
std::size_t clear_hull(const PiecewiseMap& map, const StepFunction& f, double tail_tol) {
  if (map.finite()) return map.stored_count();
  if (!map.tail_full_affine()) return map.ensure_slope_sum(tail_tol, kPrefixCap);
  const auto& t = f.breakpoints();
  auto clean = [&](std::size_t k) {
    auto [lo, hi] = map.tail_hull(k);
    if (!(hi > lo)) return true;
    auto it = std::upper_bound(t.begin(), t.end(), lo);
    return !(it != t.end() && *it < hi);
  };
  if (!map.tail()->generator) return map.stored_count();
  // smallest prefix whose hull is breakpoint-free: the tail then acts as one
  // constant and the walk stays short no matter how much is materialized.
  // ensure_count reports the total stored, so clamp back to the prefix asked
  // for -- callers walk every branch up to the returned index.
  auto need = [&](std::size_t k) { return std::min(k, map.ensure_count(k)); };
  std::size_t lo = 1;
  if (clean(lo)) return need(lo);
  const std::size_t cap = std::min(kPrefixCap, map.tail()->max_index);
  std::size_t hi = 16;
  while (hi < cap && !clean(hi)) {
    lo = hi;
    hi *= 2;
  }
  hi = std::min(hi, cap);
  if (!clean(hi)) return need(hi);  // capped; the caller bounds the residual
  while (lo + 1 < hi) {
    std::size_t mid = lo + (hi - lo) / 2;
    if (clean(mid)) hi = mid; else lo = mid;
  }
  return need(hi);
}

// Range of f over the closed tail hull (exact: f is a step function).
std::pair<double, double> hull_range(const StepFunction& f, double lo, double hi) {
  double mn = std::numeric_limits<double>::infinity(), mx = -mn;
  const auto& t = f.breakpoints();
  const auto& v = f.values();
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (t[j + 1] <= lo || t[j] >= hi) continue;
    mn = std::min(mn, v[j]);
    mx = std::max(mx, v[j]);
  }
  if (mn > mx) mn = mx = f.value_at(std::clamp(lo, 0.0, 1.0));
  return {mn, mx};
}

struct TailTerm {
  double add = 0.0;    // constant added across [0,1) (full-affine tails)
  double bound = 0.0;  // residual uncertainty
};

TailTerm tail_term(const PiecewiseMap& map, const StepFunction& f, std::size_t n0) {
  TailTerm out;
  if (map.finite()) return out;
  double tss = map.tail_slope_sum(n0);
  double tl = map.tail_length(n0);
  if (tss <= 0.0 && tl <= 0.0) return out;
  auto [lo, hi] = map.tail_hull(n0);
  auto [mn, mx] = hull_range(f, lo, hi);
  if (map.tail_full_affine()) {
    // Every tail branch is affine onto [0,1): its contribution to Pf is its
    // reciprocal slope times the f-value on its domain, a constant in x.
    out.add = 0.5 * (mn + mx) * tss;
    out.bound = 0.5 * (mx - mn) * tss;
  } else {
    // Unknown tail images: the pushforward drops that mass and reports it.
    out.bound = std::max(std::abs(mn), std::abs(mx)) * std::max(tss, tl);
  }
  return out;
}

void require_affine(const PiecewiseMap& map, std::size_t n0) {
  for (std::size_t i = 1; i <= n0; ++i)
    if (!map.branch(i).is_affine())
      fail(errc::non_affine_branch, "exact pushforward needs affine branches; use the pointwise form");
}

}  // namespace

Pushforward fp_step(const PiecewiseMap& map, const StepFunction& f, double tail_tol) {
  const std::size_t n0 = clear_hull(map, f, tail_tol);
  require_affine(map, n0);

  const auto& T = f.breakpoints();
  const auto& V = f.values();

  // One weighted image interval per (branch, overlapped piece of f).
  std::vector<std::pair<double, double>> events;  // (position, value delta)
  events.reserve(4 * n0 + 4 * V.size());
  for (std::size_t i = 1; i <= n0; ++i) {
    Branch br = map.branch(i);
    std::size_t j = f.piece_index(br.a());
    double x0 = br.a();
    while (true) {
      double x1 = std::min(br.b(), T[j + 1]);
      double y0 = x0 <= br.a() ? br.image_left() : br.value(x0);
      double y1 = x1 >= br.b() ? br.image_right() : br.value(x1);
      double w = V[j] / br.slope();
      if (y1 > y0) {
        events.emplace_back(y0, w);
        events.emplace_back(y1, -w);
      }
      if (x1 >= br.b() || j + 1 >= V.size()) break;
      x0 = x1;
      ++j;
    }
  }

  TailTerm tail = tail_term(map, f, n0);

  std::vector<double> cuts;
  cuts.reserve(events.size() + 2);
  cuts.push_back(0.0);
  cuts.push_back(1.0);
  for (const auto& [y, w] : events)
    if (y > 0.0 && y < 1.0) cuts.push_back(y);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::sort(events.begin(), events.end());
  std::vector<double> values(cuts.size() - 1, 0.0);
  double running = tail.add;
  std::size_t e = 0;
  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
    while (e < events.size() && events[e].first <= cuts[p]) running += events[e++].second;
    values[p] = running;
  }

  Pushforward out;
  out.density = StepFunction(std::move(cuts), std::move(values)).compacted();
  out.mass_in = f.integral();
  out.mass_out = out.density.integral();
  out.tail_bound = tail.bound;
  return out;
}

PointValue fp_pointwise(const PiecewiseMap& map, const StepFunction& f, double x,
                        double tail_tol) {
  const std::size_t n0 = clear_hull(map, f, tail_tol);
  double sum = 0.0;
  for (std::size_t i = 1; i <= n0; ++i) {
    Branch br = map.branch(i);
    bool closed = br.b() >= 1.0;
    if (!br.image_contains(x, closed)) continue;
    double y = std::clamp(br.inverse(x), br.a(), br.b());
    sum += f.value_at(std::min(y, std::nextafter(br.b(), 0.0))) / br.derivative(y);
  }
  TailTerm tail = tail_term(map, f, n0);
  return PointValue{sum + (x < 1.0 ? tail.add : 0.0), tail.bound};
}

PointValue fp_pointwise(const PiecewiseMap& map, const std::function<double(double)>& f,
                        double x, double tail_tol) {
  const std::size_t n0 = map.ensure_slope_sum(tail_tol, kPreimageCap);
  double sum = 0.0;
  for (std::size_t i = 1; i <= n0; ++i) {
    Branch br = map.branch(i);
    bool closed = br.b() >= 1.0;
    if (!br.image_contains(x, closed)) continue;
    double y = std::clamp(br.inverse(x), br.a(), br.b());
    sum += f(y) / br.derivative(y);
  }
  PointValue out{sum, 0.0};
  if (!map.finite()) {
    double tss = map.tail_slope_sum(n0);
    if (tss > 0.0) {
      auto [lo, hi] = map.tail_hull(n0);
      double s0 = f(lo), s1 = f(0.5 * (lo + hi)), s2 = f(hi);
      double mn = std::min({s0, s1, s2}), mx = std::max({s0, s1, s2});
      if (map.tail_full_affine() && x < 1.0) {
        out.value += 0.5 * (mn + mx) * tss;
        out.tail_bound = 0.5 * (mx - mn) * tss;
      } else {
        out.tail_bound = std::max(std::abs(mn), std::abs(mx)) * tss;
      }
    }
  }
  return out;
}

MonotoneCheck monotone_check(const PiecewiseMap& map, const StepFunction& f, double tail_tol) {
  if (!f.non_increasing())
    fail(errc::input_not_monotone, "monotone_check needs a non-increasing input");

  bool all_affine = map.finite() || map.tail_full_affine();
  const std::size_t n0 = clear_hull(map, f, tail_tol);
  for (std::size_t i = 1; i <= n0 && all_affine; ++i)
    if (!map.branch(i).is_affine()) all_affine = false;

  MonotoneCheck out;
  const double slack = 1e-12 * std::max(1.0, f.sup_abs());
  if (all_affine) {
    StepFunction g = fp_step(map, f, tail_tol).density;
    const auto& T = g.breakpoints();
    const auto& V = g.values();
    for (std::size_t j = 0; j + 1 < V.size(); ++j) {
      if (V[j + 1] > V[j] + slack) {
        out.pass = false;
        out.at_left = T[j];
        out.at_right = T[j + 1];
        out.value_left = V[j];
        out.value_right = V[j + 1];
        return out;
      }
    }
    return out;
  }

  // Analytic branches: sample the pushforward at the images of the input
  // breakpoints plus a uniform grid.
  std::vector<double> pts{0.0};
  for (std::size_t i = 1; i <= n0; ++i) {
    Branch br = map.branch(i);
    for (double t : f.breakpoints())
      if (t > br.a() && t < br.b()) pts.push_back(br.value(t));
  }
  for (std::size_t g = 1; g < 128; ++g) pts.push_back(static_cast<double>(g) / 128.0);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  double prev_x = 0.0, prev_v = 0.0;
  bool first = true;
  for (double x : pts) {
    if (x < 0.0 || x >= 1.0) continue;
    double v = fp_pointwise(map, f, x, tail_tol).value;
    if (!first && v > prev_v + slack) {
      out.pass = false;
      out.at_left = prev_x;
      out.at_right = x;
      out.value_left = prev_v;
      out.value_right = v;
      return out;
    }
    prev_x = x;
    prev_v = v;
    first = false;
  }
  return out;
}

LyConstants ly_constants(const PiecewiseMap& map, double tail_tol) {
  LyConstants c;
  const std::size_t n0 = map.ensure_slope_sum(tail_tol, kPrefixCap);
  const auto order = detail::spatial_order(map);
  if (order.empty()) fail(errc::malformed_branch, "map has no branches");

  if (!map.accumulates_at_zero()) {
    Branch origin = map.branch(order[0]);
    if (origin.a() > 1e-12)
      fail(errc::malformed_branch, "no branch starts at 0 in the non-accumulating case");
    c.alpha = 1.0 / origin.min_derivative();
    double d = 0.0, comp = 0.0;  // Kahan: the prefix can run to 2^18 terms
    for (std::size_t k = 1; k < order.size(); ++k) {
      Branch br = map.branch(order[k]);
      const double term = 1.0 / (br.a() * br.min_derivative()) - comp;
      const double next = d + term;
      comp = (next - d) - term;
      d = next;
    }
    if (!map.finite()) {
      double tss = map.tail_slope_sum(n0);
      if (tss > 0.0) {
        auto [lo, hi] = map.tail_hull(n0);
        if (!(lo > 0.0))
          fail(errc::malformed_branch, "tail hull reaches 0 but the map is not flagged as accumulating");
        // Each tail term 1/(a_i tau_i'(a_i)) lies between tss/hi and tss/lo;
        // take the midpoint and carry the half-width as truncation slack.
        d += 0.5 * tss * (1.0 / lo + 1.0 / hi);
        c.truncation_bound = 0.5 * tss * (1.0 / lo - 1.0 / hi);
      }
    }
    c.D = d;
  } else {
    CutPoint cp = select_cut_point(map, tail_tol);
    if (!cp.found)
      fail(errc::alpha_not_contractive, "no cut point with a contractive left slope sum");
    c.r = cp.r;
    c.alpha = cp.alpha;
    double d = 0.0, comp = 0.0;
    for (std::size_t idx : order) {
      Branch br = map.branch(idx);
      if (br.a() < cp.r - 1e-15) continue;
      const double term = 1.0 / (br.a() * br.min_derivative()) - comp;
      const double next = d + term;
      comp = (next - d) - term;
      d = next;
    }
    c.D = d;  // tail branches lie below r; their mass is inside alpha
  }
  if (!(c.alpha < 1.0))
    fail(errc::alpha_not_contractive, "alpha = " + std::to_string(c.alpha) + " is not below 1");
  c.K = 1.0 + c.D / (1.0 - c.alpha);
  return c;
}

SupBoundCheck sup_bound_check(const PiecewiseMap& map, const StepFunction& f,
                              const LyConstants& c, double tail_tol) {
  if (!f.non_increasing())
    fail(errc::input_not_monotone, "the sup-norm inequality is stated for non-increasing densities");
  SupBoundCheck out;
  // Decide the path from the same prefix fp_step would walk, not from however
  // many branches happen to be materialized already.
  bool all_affine = map.finite() || map.tail_full_affine();
  const std::size_t n0 = all_affine ? clear_hull(map, f, tail_tol) : 0;
  for (std::size_t i = 1; i <= n0 && all_affine; ++i)
    if (!map.branch(i).is_affine()) all_affine = false;
  if (all_affine) {
    out.lhs = fp_step(map, f, tail_tol).density.max_value();
  } else {
    out.lhs = fp_pointwise(map, f, 0.0, tail_tol).value;
  }
  out.rhs = c.alpha * f.max_value() + c.D * f.integral() + c.truncation_bound;
  out.slack = out.rhs - out.lhs;
  out.pass = out.lhs <= out.rhs + 1e-9 * std::max(1.0, std::abs(out.rhs));
  return out;
}

StepFunction lower_function(const LyConstants& c) {
  return StepFunction::indicator(0.0, 1.0 / (2.0 * c.K), 0.5);
}

bool dominates(const StepFunction& f, const StepFunction& h, double hi_limit, double tol) {
  std::vector<double> pts{0.0};
  for (double t : f.breakpoints())
    if (t > 0.0 && t < hi_limit) pts.push_back(t);
  for (double t : h.breakpoints())
    if (t > 0.0 && t < hi_limit) pts.push_back(t);
  for (double t : pts)
    if (f.value_at(t) < h.value_at(t) - tol) return false;
  return true;
}

DominationScan find_domination_order(const PiecewiseMap& map, const StepFunction& f,
                                     const StepFunction& h, std::size_t n_max,
                                     double tail_tol) {
  std::vector<bool> ok(n_max + 1, false);
  StepFunction g = f;
  for (std::size_t n = 1; n <= n_max; ++n) {
    g = fp_step(map, g, tail_tol).density;
    ok[n] = dominates(g, h, 1.0, 1e-9);
  }
  DominationScan out;
  for (std::size_t n = n_max; n >= 1; --n) {
    if (!ok[n]) break;
    out.found = true;
    out.n1 = n;
    if (n == 1) break;
  }
  return out;
}

}  // namespace acim
