#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <atomic>
#include <cmath>
#include <thread>
#include <vector>

#include "acim/builtins.hpp"
#include "acim/rng.hpp"
#include "acim/ulam.hpp"

using namespace acim;

// doctest assertions are not thread safe; workers record into atomics and the
// main thread asserts.

TEST_CASE("concurrent readers can grow the branch prefix") {
  PiecewiseMap map = harmonic_map();  // copies share the memoized prefix
  std::atomic<int> defects{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < 8; ++t) {
    pool.emplace_back([map, t, &defects] {
      Rng rng(100 + static_cast<std::uint64_t>(t));
      for (int it = 0; it < 300; ++it) {
        double x = rng.uniform(1e-5, 1.0);
        PiecewiseMap::Hit hit = map.apply(x);
        if (hit.index == 0 || hit.value < 0.0 || hit.value >= 1.0 + 1e-15) ++defects;
        if (map.locate(x) != hit.index) ++defects;
        Branch br = map.branch(1 + rng.below(2000));  // forces deep materialization
        if (!(br.b() > br.a()) || br.value(br.a()) > 1e-15) ++defects;
        if (it % 16 == 0) {
          auto pre = map.preimages(rng.uniform(), 1e-3);
          if (pre.empty()) ++defects;
          // every preimage must actually map to y under its branch
          for (const auto& [x0, idx] : pre)
            if (idx == 0 || x0 < 0.0 || x0 > 1.0) ++defects;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  CHECK(defects.load() == 0);
  CHECK(map.stored_count() >= 2000);
}

TEST_CASE("simultaneous matrix builds agree with a serial one") {
  PiecewiseMap map = harmonic_map();
  constexpr int kBuilders = 4;
  std::vector<UlamMatrix> built(kBuilders);
  std::atomic<int> errors{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < kBuilders; ++t) {
    pool.emplace_back([&map, &built, &errors, t] {
      try {
        built[static_cast<std::size_t>(t)] = build_ulam(map, 256);
      } catch (...) {
        ++errors;
      }
    });
  }
  for (auto& th : pool) th.join();
  REQUIRE(errors.load() == 0);
  UlamMatrix reference = build_ulam(harmonic_map(), 256);
  for (const UlamMatrix& m : built) {
    REQUIRE(m.bins == reference.bins);
    CHECK(m.rows == reference.rows);
    CHECK(m.row_defect == reference.row_defect);
  }
}

TEST_CASE("interleaved growth and application stay consistent") {
  PiecewiseMap map = shifted_linear_map();
  std::atomic<int> defects{0};
  std::thread grower([map, &defects] {
    for (std::size_t n = 100; n <= 6000; n += 100)
      if (map.ensure_count(n) < n) ++defects;
  });
  std::thread prober([map, &defects] {
    Rng rng(7);
    for (int it = 0; it < 5000; ++it) {
      double x = rng.uniform();
      PiecewiseMap::Hit hit = map.apply(x);
      // branches of this family have slope i(i+1) on ((i-1)/i, i/(i+1))
      double di = static_cast<double>(hit.index);
      if (std::abs(hit.slope - di * (di + 1.0)) > 1e-9 * hit.slope) ++defects;
    }
  });
  grower.join();
  prober.join();
  CHECK(defects.load() == 0);
  CHECK(map.stored_count() >= 6000);
}
