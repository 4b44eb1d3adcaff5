#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mtc/analytics.hpp"
#include "mtc/geometry.hpp"
#include "mtc/rng.hpp"

namespace mtc::rach {

using geometry::DeviceId;

/// Global preamble numbering: [0, p_c) contention-based, then the
/// contention-free preambles in reallocation order, so contention-free index
/// k is global preamble p_c + k and the first beta of the order are
/// p_c .. p_c + beta - 1.
using Preamble = int;

/// Periodic contention-free schedule: T_min groups of at most p_f devices,
/// distinct contention-free preambles within a group.
struct Schedule {
  int p_c = 1;
  int p_f = 1;
  std::int64_t t_min = 1;
  std::vector<std::int32_t> slot_of;   // tau_i in [0, t_min)
  std::vector<std::int32_t> cf_index;  // in [0, p_f)
  std::vector<std::vector<DeviceId>> groups;

  std::span<const DeviceId> group_at(std::int64_t slot) const {
    return groups[static_cast<std::size_t>(slot % t_min)];
  }
  Preamble own_preamble(DeviceId id) const { return p_c + cf_index[id]; }
  bool scheduled(DeviceId id, std::int64_t slot) const { return slot % t_min == slot_of[id]; }
};

/// Uniformly random group membership; group sizes differ by at most one.
Schedule build_schedule(std::size_t devices, const analytics::PreambleSplit& split, Rng& rng);

struct DeviceView {
  bool critical_pending = false;  // holds an unsent critical message
  int beta = 0;                   // reallocated preambles per this device's learned N_a
};

/// Preamble this device transmits on in `slot`, if any.
///
/// Periodic traffic uses the assigned contention-free preamble on scheduled
/// slots unless it falls within the device's first beta of the reallocation
/// order. A pending critical message goes out on the device's own scheduled
/// preamble when the slot is scheduled, otherwise on a uniform draw over the
/// p_c contention preambles plus the first beta reallocated ones.
std::optional<Preamble> device_intent(DeviceId id, const DeviceView& dev, const Schedule& sched,
                                      std::int64_t slot, Rng& rng);

struct Intent {
  DeviceId device = 0;
  Preamble preamble = 0;
};

struct SlotOutcome {
  std::vector<Intent> successes;     // ascending by preamble
  std::vector<Preamble> collisions;  // preambles with two or more users
  std::size_t collided_intents = 0;
};

/// Sole user of a preamble succeeds; every user of a shared preamble fails.
SlotOutcome resolve_slot(std::vector<Intent> intents);

}  // namespace mtc::rach
