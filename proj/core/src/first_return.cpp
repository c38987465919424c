#include "acim/first_return.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "acim/common.hpp"
#include "acim/iterate.hpp"
#include "detail.hpp"

namespace acim {

namespace {

// A piece of [eps,1] that has not returned yet, with the composed map
// sigma = tau^depth restricted to it. Affine compositions stay exact.
struct Pending {
  double a = 0.0, b = 0.0;  // base coordinates
  std::size_t depth = 0;
  bool affine = true;
  double slope = 1.0, intercept = 0.0;
  std::vector<std::uint32_t> path;  // applied first-to-last

  double fwd(const PiecewiseMap& map, double x) const {
    return affine ? slope * x + intercept : compose_value(map, path, x);
  }
  double inv(const PiecewiseMap& map, double y) const {
    if (affine) return (y - intercept) / slope;
    double v = y;
    for (auto it = path.rbegin(); it != path.rend(); ++it) v = map.branch(*it).inverse(v);
    return v;
  }
  double deriv_left(const PiecewiseMap& map) const {
    return affine ? slope : compose_derivative(map, path, a);
  }
};

struct Collected {
  std::size_t return_time = 0;
  double a = 0.0, b = 0.0;
  Pending comp;  // composition covering [a, b]
};

}  // namespace

FirstReturnResult first_return_map(const PiecewiseMap& map, double eps,
                                   const FirstReturnOptions& opt) {
  if (!(eps > 0.0 && eps < 1.0)) fail(errc::bad_config, "eps must lie strictly inside (0,1)");
  const double span = 1.0 - eps;
  detail::ensure_tail_length(map, std::max(opt.tail_tol * span * 0.25, 1e-15), kPrefixCap);
  const auto order = detail::spatial_order(map);

  std::deque<Pending> queue;
  queue.push_back({eps, 1.0, 0, true, 1.0, 0.0, {}});

  std::vector<Collected> returned;
  std::vector<Pending> leftovers;
  std::size_t processed = 0;

  // Base-coordinate mass whose tracking was abandoned: pieces landing beyond
  // the materialized branches, plus slivers too short to keep subdividing.
  // They are counted as unreturned and folded into the tail descriptor.
  double dropped = 0.0;
  double drop_lo = std::numeric_limits<double>::infinity();
  double drop_hi = -std::numeric_limits<double>::infinity();
  double drop_tss = 0.0;
  auto abandon = [&](double a, double b, double recip_slope) {
    if (!(b > a)) return;
    dropped += b - a;
    drop_lo = std::min(drop_lo, a);
    drop_hi = std::max(drop_hi, b);
    drop_tss += recip_slope;
  };

  while (!queue.empty()) {
    Pending cell = std::move(queue.front());
    queue.pop_front();
    if (cell.depth >= opt.max_return_time) {
      leftovers.push_back(std::move(cell));
      continue;
    }
    if (++processed > opt.cell_cap)
      fail(errc::truncation_overflow, "first-return construction exceeds the cell cap");

    const double jlo = cell.fwd(map, cell.a);
    const double jhi = cell.fwd(map, cell.b);
    double covered_to = jlo;
    for (std::size_t idx : order) {
      Branch br = map.branch(idx);
      if (br.b() <= jlo) continue;
      if (br.a() >= jhi) break;
      const double y0 = std::max(jlo, br.a());
      const double y1 = std::min(jhi, br.b());
      if (!(y1 - y0 > 1e-15)) continue;
      // Image not covered by any materialized branch before this one is lost.
      if (y0 > covered_to + 1e-15) {
        const double ga = cell.inv(map, covered_to);
        abandon(ga, cell.inv(map, y0),
                cell.affine ? 1.0 / cell.slope : 1.0 / compose_derivative(map, cell.path, ga));
      }
      covered_to = y1;

      Pending sub;
      sub.a = y0 <= jlo ? cell.a : cell.inv(map, y0);
      sub.b = y1 >= jhi ? cell.b : cell.inv(map, y1);
      sub.depth = cell.depth + 1;
      // The path is the full composition history; the affine fields are an
      // exact fast path used while every factor is affine.
      sub.path = cell.path;
      sub.path.push_back(static_cast<std::uint32_t>(idx));
      sub.affine = cell.affine && br.is_affine();
      if (sub.affine) {
        sub.slope = br.slope() * cell.slope;
        sub.intercept = br.slope() * cell.intercept + br.intercept();
      }

      const double img_lo = br.value(y0);
      const double img_hi = br.value(y1);
      if (img_hi <= eps) {
        queue.push_back(std::move(sub));  // nothing returned yet
        continue;
      }
      double cut = sub.a;  // base point whose image is eps
      if (img_lo < eps) cut = sub.inv(map, eps);
      cut = std::clamp(cut, sub.a, sub.b);
      if (cut - sub.a > 1e-15) {
        Pending stay = sub;
        stay.b = cut;
        queue.push_back(std::move(stay));
      } else {
        abandon(sub.a, cut, 1.0 / sub.deriv_left(map));
      }
      if (sub.b - cut > 1e-15) {
        Collected got;
        got.return_time = sub.depth;
        got.a = cut;
        got.b = sub.b;
        got.comp = sub;
        returned.push_back(std::move(got));
      } else {
        abandon(cut, sub.b,
                sub.affine ? 1.0 / sub.slope : 1.0 / compose_derivative(map, sub.path, cut));
      }
    }
    if (jhi > covered_to + 1e-15) {
      const double ga = cell.inv(map, covered_to);
      abandon(ga, cell.inv(map, jhi),
              cell.affine ? 1.0 / cell.slope : 1.0 / compose_derivative(map, cell.path, ga));
    }
  }

  double returned_len = 0.0;
  for (const Collected& c : returned) returned_len += c.b - c.a;
  double pending_len = dropped;
  for (const Pending& p : leftovers) pending_len += p.b - p.a;

  FirstReturnResult out;
  out.eps = eps;
  out.captured_fraction = returned_len / span;
  out.unreturned_fraction = pending_len / span;
  if (out.captured_fraction < 1.0 - opt.tail_tol)
    fail(errc::no_return_found,
         "captured fraction " + std::to_string(out.captured_fraction) +
             " stays below 1 - tail_tol within the return-time cap");

  // Rescale [eps,1] to [0,1]. The rescaling x -> (x-eps)/(1-eps) conjugates
  // each composed piece without changing its slope.
  auto rescale = [&](double x) { return (x - eps) / span; };

  std::sort(returned.begin(), returned.end(), [](const Collected& x, const Collected& y) {
    return x.return_time != y.return_time ? x.return_time < y.return_time : x.a < y.a;
  });

  out.branches.reserve(returned.size());
  for (const Collected& c : returned) {
    ReturnBranch rb;
    rb.return_time = c.return_time;
    rb.base_a = c.a;
    rb.base_b = c.b;
    rb.affine = c.comp.affine;
    if (rb.affine) {
      rb.slope = c.comp.slope;
      rb.intercept = c.comp.intercept;
    } else {
      rb.slope = compose_derivative(map, c.comp.path, c.a);
      rb.intercept = 0.0;
    }
    out.branches.push_back(rb);
  }

  // The map itself wants branches in spatial order.
  std::vector<const Collected*> spatial;
  spatial.reserve(returned.size());
  for (const Collected& c : returned) spatial.push_back(&c);
  std::sort(spatial.begin(), spatial.end(),
            [](const Collected* x, const Collected* y) { return x->a < y->a; });

  std::vector<Branch> branches;
  branches.reserve(spatial.size());
  for (const Collected* c : spatial) {
    const double a = rescale(c->a);
    const double b = c->b >= 1.0 ? 1.0 : rescale(c->b);
    if (c->comp.affine) {
      const double slope = c->comp.slope;
      const double intercept = (c->comp.slope * eps + c->comp.intercept - eps) / span;
      const double left_value = slope * a + intercept;
      if (std::abs(left_value) <= 1e-9)
        branches.push_back(Branch::affine_vanishing(a, b, slope));
      else
        branches.push_back(Branch::affine(a, b, slope, intercept));
    } else {
      const Pending comp = c->comp;
      const PiecewiseMap base = map;
      const double e = eps, w = span;
      AnalyticForm form;
      form.forward = [comp, base, e, w](double y) {
        return (comp.fwd(base, e + y * w) - e) / w;
      };
      form.derivative = [comp, base, e, w](double y) {
        return compose_derivative(base, comp.path, e + y * w);
      };
      form.inverse = [comp, base, e, w](double z) {
        return (comp.inv(base, e + z * w) - e) / w;
      };
      branches.push_back(Branch::analytic(a, b, std::move(form)));
    }
  }

  std::optional<TailDescriptor> tail;
  bool accumulates = false;
  if (pending_len > 0.0) {
    double hull_lo = std::numeric_limits<double>::infinity();
    double hull_hi = -std::numeric_limits<double>::infinity();
    double tss = drop_tss;
    for (const Pending& p : leftovers) {
      hull_lo = std::min(hull_lo, rescale(p.a));
      hull_hi = std::max(hull_hi, rescale(p.b));
      tss += 1.0 / p.deriv_left(map);
    }
    if (drop_hi > drop_lo) {
      hull_lo = std::min(hull_lo, rescale(drop_lo));
      hull_hi = std::max(hull_hi, rescale(drop_hi));
    }
    if (!(hull_hi >= hull_lo)) {
      hull_lo = 0.0;
      hull_hi = 0.0;
    }
    const double tl = pending_len / span;
    TailDescriptor td;
    td.generator = nullptr;
    td.slope_sum_beyond = [tss](std::size_t) { return tss; };
    td.length_beyond = [tl](std::size_t) { return tl; };
    td.hull_beyond = [hull_lo, hull_hi](std::size_t) { return std::make_pair(hull_lo, hull_hi); };
    td.full_affine = false;
    td.max_index = 0;
    tail = std::move(td);
    accumulates = hull_lo <= 1e-12;
  }

  out.map = PiecewiseMap(std::move(branches), std::move(tail), accumulates,
                         map.name().empty() ? "first_return" : map.name() + "_first_return");
  return out;
}

}  // namespace acim
