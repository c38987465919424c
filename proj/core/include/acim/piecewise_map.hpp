#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "acim/branch.hpp"
#include "acim/tail.hpp"

namespace acim {

// Caps on lazy materialization. Operations that would need more branches than
// this fall back to honest truncation bounds instead of exhausting memory.
inline constexpr std::size_t kPrefixCap = std::size_t{1} << 18;
inline constexpr std::size_t kPreimageCap = std::size_t{1} << 20;

// A piecewise monotone interval map on [0,1] with countably many branches.
// A finite prefix of branches is stored; an optional TailDescriptor supplies
// the rest on demand. Instances share state, so copies are cheap and lazy
// materialization is memoized. Concurrent readers are safe: growth of the
// prefix happens under an exclusive lock.
class PiecewiseMap {
 public:
  PiecewiseMap();  // identity on [0,1], single branch
  PiecewiseMap(std::vector<Branch> branches, std::optional<TailDescriptor> tail,
               bool accumulates_at_zero, std::string name = "");

  const std::string& name() const { return name_; }
  bool finite() const { return !tail_.has_value(); }
  bool accumulates_at_zero() const { return accumulates_at_zero_; }
  const std::optional<TailDescriptor>& tail() const { return tail_; }

  // Number of branches currently materialized.
  std::size_t stored_count() const;

  // Branch by 1-based index; materializes intermediate branches as needed.
  Branch branch(std::size_t index) const;

  // Tail bounds beyond the first n branches (0 when the family is finite and
  // n covers it).
  double tail_slope_sum(std::size_t n) const;
  double tail_length(std::size_t n) const;
  std::pair<double, double> tail_hull(std::size_t n) const;
  bool tail_full_affine() const { return tail_ && tail_->full_affine; }

  // Smallest prefix length (capped) whose tail reciprocal-slope sum is <= tol.
  // Materializes up to that length and returns it.
  std::size_t ensure_slope_sum(double tol, std::size_t cap = kPrefixCap) const;
  // Materializes at least n branches (capped by the generator bound).
  std::size_t ensure_count(std::size_t n) const;

  struct Hit {
    double value = 0.0;
    double slope = 0.0;
    std::size_t index = 0;  // 1-based
  };

  // Branch application at x. Materializes toward an accumulation point when
  // needed; throws errc::point_in_tail_gap when x is covered by no branch the
  // map can produce.
  Hit apply(double x) const;

  // 1-based index of the branch whose domain contains x, 0 when none.
  std::size_t locate(double x) const;

  // All solutions of tau(x) = y together with their branch index, ordered by
  // branch index. Branches are materialized until the tail reciprocal-slope
  // sum falls below tail_tol (subject to the global caps).
  std::vector<std::pair<double, std::size_t>> preimages(double y, double tail_tol) const;

  // Largest stored b_i (right edge of the covered region near 1).
  double covered_right() const;

 private:
  struct State;
  std::size_t grow_locked(State& st, std::size_t target) const;

  std::shared_ptr<State> state_;
  std::optional<TailDescriptor> tail_;
  bool accumulates_at_zero_ = false;
  std::string name_;
};

}  // namespace acim
