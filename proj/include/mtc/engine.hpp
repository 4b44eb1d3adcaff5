#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mtc/config.hpp"
#include "mtc/learning.hpp"

namespace mtc::engine {

using geometry::DeviceId;

/// Redraws of the event site before a run with no usable critical set is
/// rejected.
inline constexpr int kEventRedraws = 100;

struct CriticalDelay {
  DeviceId device = 0;
  std::int64_t slots = 0;  // slot index of first success + 1, or the cap when censored
  bool censored = false;
  bool via_schedule = false;  // success on the device's own scheduled preamble
  bool within_threshold = false;

  friend bool operator==(const CriticalDelay&, const CriticalDelay&) = default;
};

struct SlotTally {
  std::size_t successes = 0;
  std::size_t collided = 0;
  std::size_t silent = 0;
};

struct MetricsRecord {
  std::size_t devices = 0;
  int critical_count = 0;  // N_a == H_T
  std::int64_t t_min = 0;
  std::int64_t max_slots = 0;
  double slot_ms = 0.25;
  std::vector<CriticalDelay> delays;
  std::vector<double> learned_fraction;  // per slot, over all devices

  friend bool operator==(const MetricsRecord&, const MetricsRecord&) = default;
};

/// Optional per-run traces for debugging and invariant checks.
struct RunTrace {
  std::vector<std::pair<std::int64_t, learning::HopRecord>>* hops = nullptr;
  std::vector<SlotTally>* slots = nullptr;
  bool run_to_cap = false;  // ignore the stationarity stop and simulate every slot
};

/// One replication: deploy, place the event, then alternate one learning
/// hop and one RACH slot until every critical message is through and the
/// learned population has been stationary for T_min slots, or the slot cap.
/// Deterministic in (config, seed). Throws std::runtime_error when no event
/// placement yields 1 <= N_a <= s_max within kEventRedraws attempts.
MetricsRecord run(const SimConfig& cfg, std::uint64_t seed, const RunTrace& trace = {});

struct Aggregate {
  int runs = 0;
  std::uint64_t master_seed = 0;
  double slot_ms = 0.25;
  double d_th_ms = 0.0;
  std::vector<double> pooled_delay_ms;  // ascending; censored delays sit at their cap
  std::size_t censored = 0;
  std::size_t within_threshold = 0;
  std::vector<double> mean_learned_fraction;

  double mean_delay_ms() const;
  double threshold_satisfaction() const;
  double censored_fraction() const;
  double peak_learned_pct() const;
  /// (delay_ms, cumulative probability) at each distinct pooled delay.
  std::vector<std::pair<double, double>> delay_cdf() const;
  /// Empirical CDF at x.
  double cdf_at(double delay_ms) const;
};

std::uint64_t run_seed(std::uint64_t master_seed, int run_index);

/// Replications with seeds derived from the master seed, spread over at
/// most `parallel` workers. Output does not depend on `parallel`.
Aggregate monte_carlo(const SimConfig& cfg, int runs, std::uint64_t master_seed, int parallel = 1);

/// Pools already computed records in index order.
Aggregate aggregate(const std::vector<MetricsRecord>& records, double d_th_ms,
                    std::uint64_t master_seed);

}  // namespace mtc::engine
