#include <doctest.h>

#include <algorithm>
#include <set>

#include "mtc/engine.hpp"
#include "mtc/rach.hpp"

using namespace mtc;
using namespace mtc::engine;

namespace {

SimConfig small() {
  SimConfig c;
  c.width = 30;
  c.length = 30;
  c.lambda = 1;
  return c;
}

}  // namespace

TEST_CASE("a lone critical device succeeds in the first slot") {
  SimConfig c = small();
  c.p_c = 2;
  c.p_f = 62;
  c.trigger_radius = 0.4;
  int seen = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const MetricsRecord r = run(c, seed);
    if (r.critical_count != 1) continue;
    ++seen;
    REQUIRE(r.delays.size() == 1);
    CHECK(r.delays[0].slots == 1);
    CHECK_FALSE(r.delays[0].censored);
  }
  CHECK(seen > 10);
}

TEST_CASE("without learning p_c = 1 contention needs the schedule") {
  SimConfig c = small();
  c.k.reset();
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const MetricsRecord r = run(c, seed);
    if (r.critical_count < 2) continue;
    // Nobody can win the shared contention preamble while two or more
    // criticals are pending, so the earliest success is a scheduled one.
    std::int64_t first = r.max_slots;
    for (const auto& d : r.delays) first = std::min(first, d.slots);
    int via_schedule_at_first = 0;
    for (const auto& d : r.delays)
      if (d.slots == first) via_schedule_at_first += d.via_schedule;
    CHECK(via_schedule_at_first >= 1);
    for (const auto& d : r.delays) {
      CHECK(d.slots >= 1);
      CHECK(d.slots <= r.t_min + 1);
    }
  }
}

TEST_CASE("runs are deterministic in (config, seed)") {
  const SimConfig c = small();
  CHECK(run(c, 42) == run(c, 42));
  CHECK_FALSE(run(c, 42) == run(c, 43));
}

TEST_CASE("per-slot conservation and bounded learned fraction") {
  const SimConfig c = small();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::vector<SlotTally> slots;
    const MetricsRecord r = run(c, seed, {nullptr, &slots});
    REQUIRE(slots.size() == r.learned_fraction.size());
    for (const auto& s : slots) CHECK(s.successes + s.collided + s.silent == r.devices);
    for (double f : r.learned_fraction) {
      CHECK(f >= 0.0);
      CHECK(f <= 1.0);
    }
  }
}

TEST_CASE("devices decide at most once and correct means learned H_T") {
  const SimConfig c = small();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::vector<std::pair<std::int64_t, learning::HopRecord>> hops;
    const MetricsRecord r = run(c, seed, {&hops, nullptr});
    std::set<geometry::DeviceId> decided;
    std::size_t correct = 0;
    for (const auto& [slot, h] : hops) {
      if (!h.outcome.decided()) continue;
      CHECK(decided.insert(h.receiver).second);
      correct += h.outcome.decision == learning::Decision::learned &&
                 h.outcome.learned_state == r.critical_count;
    }
    CHECK(r.learned_fraction.back() * static_cast<double>(r.devices) ==
          doctest::Approx(static_cast<double>(correct)));
  }
}

TEST_CASE("censored delays sit at the cap and are flagged") {
  SimConfig c = small();
  c.max_slots = 2;
  bool any = false;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const MetricsRecord r = run(c, seed);
    CHECK(r.delays.size() == static_cast<std::size_t>(r.critical_count));
    for (const auto& d : r.delays) {
      if (!d.censored) continue;
      any = true;
      CHECK(d.slots == 2);
      CHECK_FALSE(d.within_threshold);
    }
  }
  CHECK(any);
}

TEST_CASE("run_to_cap simulates every slot") {
  const SimConfig c = small();
  RunTrace t;
  t.run_to_cap = true;
  const MetricsRecord r = run(c, 3, t);
  CHECK(static_cast<std::int64_t>(r.learned_fraction.size()) == r.max_slots);
  CHECK(r.max_slots == 4 * r.t_min);
}

TEST_CASE("errors") {
  SimConfig c = small();
  c.trigger_radius = 0.0;
  CHECK_THROWS_AS(run(c, 1), std::runtime_error);
  c = small();
  c.p_f = 10;
  CHECK_THROWS_AS(run(c, 1), std::invalid_argument);
  CHECK_THROWS_AS(monte_carlo(small(), 0, 1), std::invalid_argument);
}

TEST_CASE("monte carlo aggregation") {
  const SimConfig c = small();
  const Aggregate one = monte_carlo(c, 1, 77);
  const MetricsRecord r = run(c, run_seed(77, 0));
  CHECK(one.pooled_delay_ms.size() == r.delays.size());
  CHECK(one.mean_learned_fraction == r.learned_fraction);

  const Aggregate serial = monte_carlo(c, 12, 5, 1);
  const Aggregate threaded = monte_carlo(c, 12, 5, 4);
  CHECK(serial.pooled_delay_ms == threaded.pooled_delay_ms);
  CHECK(serial.mean_learned_fraction == threaded.mean_learned_fraction);
  CHECK(serial.within_threshold == threaded.within_threshold);

  std::size_t within = 0;
  for (double d : serial.pooled_delay_ms) within += d <= c.d_th_ms + 1e-9;
  CHECK(serial.threshold_satisfaction() ==
        doctest::Approx(static_cast<double>(within) / serial.pooled_delay_ms.size()));
  CHECK(serial.cdf_at(c.d_th_ms) == doctest::Approx(serial.threshold_satisfaction()));
  CHECK(std::is_sorted(serial.pooled_delay_ms.begin(), serial.pooled_delay_ms.end()));
  const auto cdf = serial.delay_cdf();
  REQUIRE_FALSE(cdf.empty());
  CHECK(cdf.back().second == doctest::Approx(1.0));
}

TEST_CASE("near-perfect observations make decided devices right") {
  SimConfig c;
  c.width = 25;
  c.length = 25;
  c.lambda = 2;
  c.p_11 = 0.98;
  c.p_01_outside = 0.02;
  c.m = 7;
  std::size_t decided = 0, correct = 0;
  for (int i = 0; i < 20; ++i) {
    std::vector<std::pair<std::int64_t, learning::HopRecord>> hops;
    const MetricsRecord r = run(c, run_seed(11, i), {&hops, nullptr});
    for (const auto& [slot, h] : hops) {
      if (!h.outcome.decided()) continue;
      ++decided;
      correct += h.outcome.decision == learning::Decision::learned &&
                 h.outcome.learned_state == r.critical_count;
    }
  }
  REQUIRE(decided > 0);
  CHECK(static_cast<double>(correct) / decided >= 0.95);
}
