#include "mtc/rach.hpp"

#include <algorithm>
#include <numeric>

namespace mtc::rach {

Schedule build_schedule(std::size_t devices, const analytics::PreambleSplit& split, Rng& rng) {
  Schedule s;
  s.p_c = split.contention();
  s.p_f = split.contention_free();
  s.t_min = devices == 0 ? 1 : analytics::min_period(static_cast<std::int64_t>(devices), s.p_f);
  s.slot_of.assign(devices, 0);
  s.cf_index.assign(devices, 0);
  s.groups.assign(static_cast<std::size_t>(s.t_min), {});

  std::vector<DeviceId> order(devices);
  std::iota(order.begin(), order.end(), DeviceId{0});
  std::shuffle(order.begin(), order.end(), rng);
  // Dealing the shuffled devices round-robin gives group g the positions
  // g, g + T, g + 2T, ...; position / T is unique inside a group and < p_f.
  for (std::size_t pos = 0; pos < devices; ++pos) {
    const DeviceId id = order[pos];
    const auto group = static_cast<std::int32_t>(pos % static_cast<std::size_t>(s.t_min));
    s.slot_of[id] = group;
    s.cf_index[id] = static_cast<std::int32_t>(pos / static_cast<std::size_t>(s.t_min));
    s.groups[static_cast<std::size_t>(group)].push_back(id);
  }
  for (auto& g : s.groups) std::sort(g.begin(), g.end());
  return s;
}

std::optional<Preamble> device_intent(DeviceId id, const DeviceView& dev, const Schedule& sched,
                                      std::int64_t slot, Rng& rng) {
  const bool on_schedule = sched.scheduled(id, slot);
  if (dev.critical_pending) {
    if (on_schedule) return sched.own_preamble(id);
    const int pool = sched.p_c + std::clamp(dev.beta, 0, sched.p_f);
    return static_cast<Preamble>(uniform_index(rng, static_cast<std::uint32_t>(pool)));
  }
  if (!on_schedule) return std::nullopt;
  if (sched.cf_index[id] < dev.beta) return std::nullopt;  // handed to the contention pool
  return sched.own_preamble(id);
}

SlotOutcome resolve_slot(std::vector<Intent> intents) {
  std::sort(intents.begin(), intents.end(), [](const Intent& a, const Intent& b) {
    return a.preamble != b.preamble ? a.preamble < b.preamble : a.device < b.device;
  });
  SlotOutcome out;
  for (std::size_t i = 0; i < intents.size();) {
    std::size_t j = i + 1;
    while (j < intents.size() && intents[j].preamble == intents[i].preamble) ++j;
    if (j - i == 1) {
      out.successes.push_back(intents[i]);
    } else {
      out.collisions.push_back(intents[i].preamble);
      out.collided_intents += j - i;
    }
    i = j;
  }
  return out;
}

}  // namespace mtc::rach
