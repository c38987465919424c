#include "acim/piecewise_map.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "acim/common.hpp"

namespace acim {

struct PiecewiseMap::State {
  mutable std::shared_mutex mu;
  std::vector<Branch> branches;                        // 1-based index i -> branches[i-1]
  std::vector<std::pair<double, std::uint32_t>> by_left;  // (a_i, i-1), sorted by a_i

  void rebuild_spatial() {
    by_left.clear();
    by_left.reserve(branches.size());
    for (std::uint32_t k = 0; k < branches.size(); ++k)
      by_left.emplace_back(branches[k].a(), k);
    std::sort(by_left.begin(), by_left.end());
  }
};

PiecewiseMap::PiecewiseMap()
    : PiecewiseMap({Branch::affine(0.0, 1.0, 1.0, 0.0)}, std::nullopt, false, "identity") {}

PiecewiseMap::PiecewiseMap(std::vector<Branch> branches, std::optional<TailDescriptor> tail,
                           bool accumulates_at_zero, std::string name)
    : state_(std::make_shared<State>()),
      tail_(std::move(tail)),
      accumulates_at_zero_(accumulates_at_zero),
      name_(std::move(name)) {
  if (branches.empty() && !tail_) fail(errc::malformed_branch, "map has no branches");
  state_->branches = std::move(branches);
  state_->rebuild_spatial();
  // Reject overlapping domains among the initial branches.
  const auto& sp = state_->by_left;
  for (std::size_t k = 1; k < sp.size(); ++k) {
    const Branch& prev = state_->branches[sp[k - 1].second];
    if (sp[k].first < prev.b() - 1e-12)
      fail(errc::malformed_branch, "branch domains overlap");
  }
}

std::size_t PiecewiseMap::stored_count() const {
  std::shared_lock lk(state_->mu);
  return state_->branches.size();
}

std::size_t PiecewiseMap::grow_locked(State& st, std::size_t target) const {
  // Caller holds the exclusive lock. Appends branches from the generator up
  // to `target` total, clamped by the generator's index bound.
  if (!tail_ || !tail_->generator) return st.branches.size();
  target = std::min(target, tail_->max_index);
  bool grew = false;
  while (st.branches.size() < target) {
    st.branches.push_back(tail_->generator(st.branches.size() + 1));
    grew = true;
  }
  if (grew) st.rebuild_spatial();
  return st.branches.size();
}

std::size_t PiecewiseMap::ensure_count(std::size_t n) const {
  {
    std::shared_lock lk(state_->mu);
    if (state_->branches.size() >= n) return state_->branches.size();
  }
  std::unique_lock lk(state_->mu);
  return grow_locked(*state_, n);
}

Branch PiecewiseMap::branch(std::size_t index) const {
  if (index == 0) fail(errc::malformed_branch, "branch indices are 1-based");
  if (ensure_count(index) < index)
    fail(errc::point_in_tail_gap, "branch index beyond the generator bound");
  std::shared_lock lk(state_->mu);
  return state_->branches[index - 1];
}

double PiecewiseMap::tail_slope_sum(std::size_t n) const {
  if (!tail_) return 0.0;
  return tail_->slope_sum_beyond ? tail_->slope_sum_beyond(n) : 0.0;
}

double PiecewiseMap::tail_length(std::size_t n) const {
  if (!tail_) return 0.0;
  return tail_->length_beyond ? tail_->length_beyond(n) : 0.0;
}

std::pair<double, double> PiecewiseMap::tail_hull(std::size_t n) const {
  if (!tail_ || !tail_->hull_beyond) return {0.0, 0.0};
  return tail_->hull_beyond(n);
}

std::size_t PiecewiseMap::ensure_slope_sum(double tol, std::size_t cap) const {
  if (!tail_) return stored_count();
  cap = std::min(cap, tail_->max_index);
  if (!tail_->generator) return stored_count();  // recorded remainder, nothing to grow
  // The bound is a pure function of the count, so return the smallest adequate
  // count even when the map is already materialized much deeper: callers walk
  // every branch up to the returned index.
  std::size_t lo = 0, hi = 1;
  while (hi < cap && tail_slope_sum(hi) > tol) {
    lo = hi;
    hi *= 2;
  }
  hi = std::min(hi, cap);
  while (lo + 1 < hi) {
    std::size_t mid = lo + (hi - lo) / 2;
    if (tail_slope_sum(mid) > tol) lo = mid; else hi = mid;
  }
  ensure_count(hi);
  return hi;
}

double PiecewiseMap::covered_right() const {
  std::shared_lock lk(state_->mu);
  double r = 0.0;
  for (const auto& br : state_->branches) r = std::max(r, br.b());
  return r;
}

std::size_t PiecewiseMap::locate(double x) const {
  std::shared_lock lk(state_->mu);
  const auto& sp = state_->by_left;
  if (sp.empty()) return 0;
  auto it = std::upper_bound(sp.begin(), sp.end(), std::make_pair(x, UINT32_MAX));
  if (it == sp.begin()) return 0;
  --it;
  const Branch& br = state_->branches[it->second];
  bool closed = br.b() >= 1.0;  // the branch touching 1 owns x == 1
  if (br.contains(x, closed)) return static_cast<std::size_t>(it->second) + 1;
  return 0;
}

PiecewiseMap::Hit PiecewiseMap::apply(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) fail(errc::orbit_escape, "apply called outside [0,1]");
  std::size_t idx = locate(x);
  if (idx == 0 && tail_ && tail_->generator) {
    // Work toward an accumulation point until x is covered or the generator
    // gives out.
    std::size_t have = stored_count();
    while (idx == 0 && have < tail_->max_index) {
      have = ensure_count(std::max<std::size_t>(have * 2, 64));
      idx = locate(x);
      if (have >= tail_->max_index) break;
    }
    if (idx == 0) idx = locate(x);
  }
  if (idx == 0)
    fail(errc::point_in_tail_gap, "no materialized branch covers x=" + std::to_string(x));
  Branch br = branch(idx);
  return Hit{br.value(x), br.derivative(x), idx};
}

std::vector<std::pair<double, std::size_t>> PiecewiseMap::preimages(double y,
                                                                    double tail_tol) const {
  if (!(y >= 0.0 && y <= 1.0)) return {};
  ensure_slope_sum(tail_tol, kPreimageCap);
  std::vector<std::pair<double, std::size_t>> out;
  std::shared_lock lk(state_->mu);
  for (std::size_t k = 0; k < state_->branches.size(); ++k) {
    const Branch& br = state_->branches[k];
    bool closed = br.b() >= 1.0;
    if (!br.image_contains(y, closed)) continue;
    double x = br.inverse(y);
    x = std::clamp(x, br.a(), br.b());
    out.emplace_back(x, k + 1);
  }
  return out;
}

}  // namespace acim
