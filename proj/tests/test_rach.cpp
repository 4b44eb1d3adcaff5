#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "mtc/analytics.hpp"
#include "mtc/rach.hpp"

using namespace mtc;
using namespace mtc::rach;

TEST_CASE("schedule shapes") {
  Rng rng = make_rng(1);
  const analytics::PreambleSplit split(64, 1);
  Schedule s = build_schedule(63, split, rng);
  CHECK(s.t_min == 1);
  for (DeviceId i = 0; i < 63; ++i) CHECK(s.scheduled(i, 17));

  s = build_schedule(126, split, rng);
  CHECK(s.t_min == 2);
  CHECK(s.groups[0].size() == 63);
  CHECK(s.groups[1].size() == 63);
}

TEST_CASE("schedule validity over many seeds") {
  const analytics::PreambleSplit split(64, 1);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng = make_rng(seed);
    const std::size_t n = 500 + 37 * seed;
    const Schedule s = build_schedule(n, split, rng);
    CHECK(s.t_min == analytics::min_period(static_cast<std::int64_t>(n), 63));
    std::size_t total = 0;
    for (std::size_t g = 0; g < s.groups.size(); ++g) {
      const auto& grp = s.groups[g];
      CHECK(grp.size() <= 63u);
      total += grp.size();
      std::set<int> used;
      for (DeviceId d : grp) {
        CHECK(s.slot_of[d] == static_cast<int>(g));
        CHECK(s.cf_index[d] >= 0);
        CHECK(s.cf_index[d] < 63);
        CHECK(used.insert(s.cf_index[d]).second);
      }
    }
    CHECK(total == n);
  }
}

TEST_CASE("periodic intents respect reallocation") {
  Rng rng = make_rng(2);
  const Schedule s = build_schedule(630, analytics::PreambleSplit(64, 1), rng);
  for (DeviceId id = 0; id < 630; ++id) {
    const std::int64_t slot = s.slot_of[id];
    CHECK(device_intent(id, {false, 0}, s, slot, rng) == s.own_preamble(id));
    CHECK_FALSE(device_intent(id, {false, 0}, s, slot + 1, rng).has_value());
    const auto with_beta = device_intent(id, {false, 3}, s, slot, rng);
    if (s.cf_index[id] < 3)
      CHECK_FALSE(with_beta.has_value());
    else
      CHECK(with_beta == s.own_preamble(id));
  }
}

TEST_CASE("critical intents") {
  Rng rng = make_rng(3);
  const Schedule s = build_schedule(630, analytics::PreambleSplit(64, 1), rng);
  const DeviceId id = 17;
  const std::int64_t off = s.slot_of[id] + 1;
  for (int i = 0; i < 100; ++i) CHECK(device_intent(id, {true, 0}, s, off, rng) == 0);
  CHECK(device_intent(id, {true, 5}, s, s.slot_of[id], rng) == s.own_preamble(id));

  int zero = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const auto p = device_intent(id, {true, 1}, s, off, rng);
    REQUIRE(p.has_value());
    CHECK((*p == 0 || *p == 1));
    zero += *p == 0;
  }
  CHECK(std::abs(static_cast<double>(zero) / n - 0.5) < 0.02);
}

TEST_CASE("resolve_slot") {
  CHECK(resolve_slot({{4, 9}}).successes.size() == 1);
  const SlotOutcome both = resolve_slot({{1, 0}, {2, 0}});
  CHECK(both.successes.empty());
  CHECK(both.collisions == std::vector<Preamble>{0});
  CHECK(both.collided_intents == 2);

  const SlotOutcome mixed = resolve_slot({{1, 0}, {2, 0}, {3, 1}, {4, 1}, {5, 2}});
  REQUIRE(mixed.successes.size() == 1);
  CHECK(mixed.successes[0].device == 5);
  CHECK(mixed.collided_intents == 4);
}

namespace {

// Slots until a tagged device among n_a contenders on p_c preambles gets a
// sole-user slot.
double empirical_contention_delay(int p_c, int n_a, int trials, Rng& rng) {
  double sum = 0.0;
  for (int t = 0; t < trials; ++t) {
    for (int slot = 1;; ++slot) {
      std::vector<Intent> intents;
      for (int d = 0; d < n_a; ++d)
        intents.push_back({static_cast<DeviceId>(d),
                           static_cast<Preamble>(uniform_index(rng, static_cast<std::uint32_t>(p_c)))});
      const SlotOutcome out = resolve_slot(std::move(intents));
      if (std::any_of(out.successes.begin(), out.successes.end(),
                      [](const Intent& i) { return i.device == 0; })) {
        sum += slot;
        break;
      }
    }
  }
  return sum / trials;
}

}  // namespace

TEST_CASE("empirical contention matches the closed forms") {
  Rng rng = make_rng(4);
  for (int n_a : {2, 3, 5}) {
    const int trials = 100000;
    int wins = 0;
    for (int t = 0; t < trials; ++t) {
      std::vector<Intent> intents;
      for (int d = 0; d < n_a; ++d)
        intents.push_back({static_cast<DeviceId>(d), static_cast<Preamble>(uniform_index(rng, 10))});
      for (const auto& s : resolve_slot(std::move(intents)).successes) wins += s.device == 0;
    }
    const double p = analytics::critical_success_prob(10, n_a);
    CHECK(std::abs(static_cast<double>(wins) / trials - p) < 3 * std::sqrt(p * (1 - p) / trials));
    CHECK(empirical_contention_delay(10, n_a, 10000, rng) ==
          doctest::Approx(analytics::contention_delay(10, n_a).value()).epsilon(0.02));
  }
}

TEST_CASE("empirical scheduled-slot wait matches the closed form") {
  Rng rng = make_rng(5);
  const std::size_t n = 20000;
  const Schedule s = build_schedule(n, analytics::PreambleSplit(64, 1), rng);
  double sum = 0.0;
  const int trials = 100000;
  for (int t = 0; t < trials; ++t) {
    const auto id = static_cast<DeviceId>(uniform_index(rng, static_cast<std::uint32_t>(n)));
    const auto start = static_cast<std::int64_t>(uniform_index(rng, static_cast<std::uint32_t>(s.t_min)));
    sum += static_cast<double>((s.slot_of[id] - start + s.t_min) % s.t_min);
  }
  CHECK(sum / trials ==
        doctest::Approx(analytics::contention_free_delay(s.t_min).value()).epsilon(0.02));
}

TEST_CASE("full knowledge frees exactly beta contention-free preambles") {
  Rng rng = make_rng(6);
  const Schedule s = build_schedule(6300, analytics::PreambleSplit(64, 1), rng);
  for (int beta : {0, 1, 4, 9}) {
    for (std::int64_t slot = 0; slot < s.t_min; ++slot) {
      std::set<Preamble> used;
      for (DeviceId id : s.group_at(slot))
        if (auto p = device_intent(id, {false, beta}, s, slot, rng)) used.insert(*p);
      CHECK(63 - static_cast<int>(used.size()) == beta);
    }
    CHECK(analytics::expected_realloc(63, 63, beta) == doctest::Approx(beta));
  }
}
