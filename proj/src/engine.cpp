#include "mtc/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "mtc/analytics.hpp"
#include "mtc/geometry.hpp"
#include "mtc/observe.hpp"
#include "mtc/rach.hpp"

namespace mtc::engine {

namespace {

// Independent streams per concern so changing one consumer never shifts
// another's draws.
enum Stream : std::uint64_t { kDeploy = 1, kEvent = 2, kSchedule = 3, kLearn = 4, kChannel = 5 };

learning::Params learning_params(const SimConfig& cfg) {
  learning::Params p;
  p.k = cfg.k.value_or(1);
  p.alpha = cfg.alpha;
  p.m = cfg.m;
  p.l_s = cfg.l_s;
  p.l_r = cfg.l_r;
  p.revert_pivot = cfg.revert_pivot();
  p.revert_scale = cfg.c;
  return p;
}

}  // namespace

MetricsRecord run(const SimConfig& cfg, std::uint64_t seed, const RunTrace& trace) {
  require_valid(cfg);

  Rng deploy_rng = make_rng(derive_seed(seed, kDeploy));
  Rng event_rng = make_rng(derive_seed(seed, kEvent));
  Rng schedule_rng = make_rng(derive_seed(seed, kSchedule));
  Rng learn_rng = make_rng(derive_seed(seed, kLearn));
  Rng channel_rng = make_rng(derive_seed(seed, kChannel));

  const geometry::Deployment dep = geometry::deploy(cfg.width, cfg.length, cfg.lambda, deploy_rng);
  if (dep.size() == 0) throw std::runtime_error("run: deployment drew no devices");
  const std::size_t n = dep.size();

  geometry::EventPlacement event;
  bool placed = false;
  for (int attempt = 0; attempt < kEventRedraws && !placed; ++attempt) {
    event = geometry::place_event(dep, cfg.trigger_radius, event_rng);
    const int n_a = event.critical_count();
    placed = n_a >= 1 && (!cfg.learning_enabled() || n_a <= cfg.s_max);
  }
  if (!placed)
    throw std::runtime_error("run: no event placement produced 1 <= N_a <= s_max");
  const int truth = event.critical_count();

  const analytics::PreambleSplit split(cfg.p, cfg.p_c);
  const rach::Schedule schedule = rach::build_schedule(n, split, schedule_rng);

  MetricsRecord rec;
  rec.devices = n;
  rec.critical_count = truth;
  rec.t_min = schedule.t_min;
  rec.max_slots = cfg.max_slots > 0 ? cfg.max_slots : 4 * schedule.t_min;
  rec.slot_ms = cfg.slot_ms;

  std::vector<bool> critical(n, false);
  for (DeviceId id : event.critical) critical[id] = true;
  std::vector<bool> pending = critical;
  std::size_t pending_count = event.critical.size();
  std::vector<int> beta(n, 0);

  // beta per learned N_a, capped at p_f
  const analytics::DelaySlots threshold(cfg.d_th_slots());
  std::vector<int> beta_for(static_cast<std::size_t>(cfg.s_max) + 1, 0);
  for (int s = 1; s <= cfg.s_max; ++s)
    beta_for[s] = std::min(cfg.p_f, analytics::reallocation_count(cfg.p_c, s, threshold));

  geometry::Adjacency adjacency;
  std::optional<learning::Propagation> prop;
  if (cfg.learning_enabled()) {
    adjacency = geometry::neighbors(dep, cfg.r_c);
    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i)
      dist[i] = geometry::distance(dep.positions[i], event.site.position);
    prop.emplace(adjacency, std::move(dist),
                 observe::ObservationModel(cfg.s_max, cfg.p_01_inside(), cfg.p_01_outside, cfg.r_d),
                 truth, learning_params(cfg), critical);
  }

  std::vector<std::int64_t> first_success(n, -1);
  std::vector<bool> success_via_schedule(n, false);
  std::vector<rach::Intent> intents;
  std::int64_t last_change = 0;

  for (std::int64_t slot = 0; slot < rec.max_slots; ++slot) {
    // (1) one learning hop
    if (prop) {
      std::vector<learning::HopRecord> hops =
          slot == 0 ? prop->start(event.critical, learn_rng) : prop->advance(learn_rng);
      for (const auto& h : hops) {
        if (h.outcome.decided()) {
          last_change = slot;
          beta[h.receiver] = h.outcome.decision == learning::Decision::learned
                                 ? beta_for[static_cast<std::size_t>(h.outcome.learned_state)]
                                 : 0;
        }
        if (trace.hops) trace.hops->emplace_back(slot, h);
      }
    }

    // (2) channel
    intents.clear();
    for (DeviceId id : schedule.group_at(slot)) {
      if (auto p = rach::device_intent(id, {pending[id], beta[id]}, schedule, slot, channel_rng))
        intents.push_back({id, *p});
    }
    if (pending_count > 0) {
      for (DeviceId id : event.critical) {
        if (!pending[id] || schedule.scheduled(id, slot)) continue;
        if (auto p = rach::device_intent(id, {true, beta[id]}, schedule, slot, channel_rng))
          intents.push_back({id, *p});
      }
    }
    const std::size_t attempts = intents.size();
    const rach::SlotOutcome outcome = rach::resolve_slot(std::move(intents));
    intents = {};
    for (const rach::Intent& s : outcome.successes) {
      if (!pending[s.device]) continue;
      pending[s.device] = false;
      --pending_count;
      first_success[s.device] = slot;
      success_via_schedule[s.device] = schedule.scheduled(s.device, slot);
    }
    if (trace.slots)
      trace.slots->push_back({outcome.successes.size(), outcome.collided_intents, n - attempts});

    // (3) population metric
    const double correct = prop ? static_cast<double>(prop->correct_count()) : 0.0;
    rec.learned_fraction.push_back(correct / static_cast<double>(n));

    if (!trace.run_to_cap && pending_count == 0 && slot - last_change >= schedule.t_min) break;
  }

  for (DeviceId id : event.critical) {
    CriticalDelay d;
    d.device = id;
    if (first_success[id] >= 0) {
      d.slots = first_success[id] + 1;
      d.via_schedule = success_via_schedule[id];
      d.within_threshold = static_cast<double>(d.slots) <= cfg.d_th_slots() + 1e-9;
    } else {
      d.slots = rec.max_slots;
      d.censored = true;
    }
    rec.delays.push_back(d);
  }
  return rec;
}

double Aggregate::mean_delay_ms() const {
  if (pooled_delay_ms.empty()) return 0.0;
  double sum = 0.0;
  for (double d : pooled_delay_ms) sum += d;
  return sum / static_cast<double>(pooled_delay_ms.size());
}

double Aggregate::threshold_satisfaction() const {
  if (pooled_delay_ms.empty()) return 0.0;
  return static_cast<double>(within_threshold) / static_cast<double>(pooled_delay_ms.size());
}

double Aggregate::censored_fraction() const {
  if (pooled_delay_ms.empty()) return 0.0;
  return static_cast<double>(censored) / static_cast<double>(pooled_delay_ms.size());
}

double Aggregate::peak_learned_pct() const {
  if (mean_learned_fraction.empty()) return 0.0;
  return 100.0 * *std::max_element(mean_learned_fraction.begin(), mean_learned_fraction.end());
}

std::vector<std::pair<double, double>> Aggregate::delay_cdf() const {
  std::vector<std::pair<double, double>> out;
  const auto total = static_cast<double>(pooled_delay_ms.size());
  for (std::size_t i = 0; i < pooled_delay_ms.size(); ++i) {
    if (i + 1 < pooled_delay_ms.size() && pooled_delay_ms[i + 1] == pooled_delay_ms[i]) continue;
    out.emplace_back(pooled_delay_ms[i], static_cast<double>(i + 1) / total);
  }
  return out;
}

double Aggregate::cdf_at(double delay_ms) const {
  if (pooled_delay_ms.empty()) return 0.0;
  const auto it = std::upper_bound(pooled_delay_ms.begin(), pooled_delay_ms.end(), delay_ms);
  return static_cast<double>(it - pooled_delay_ms.begin()) /
         static_cast<double>(pooled_delay_ms.size());
}

std::uint64_t run_seed(std::uint64_t master_seed, int run_index) {
  return derive_seed(master_seed, 0x100000000ULL + static_cast<std::uint64_t>(run_index));
}

Aggregate aggregate(const std::vector<MetricsRecord>& records, double d_th_ms,
                    std::uint64_t master_seed) {
  Aggregate agg;
  agg.runs = static_cast<int>(records.size());
  agg.master_seed = master_seed;
  agg.d_th_ms = d_th_ms;
  std::size_t longest = 0;
  for (const auto& r : records) {
    agg.slot_ms = r.slot_ms;
    for (const auto& d : r.delays) {
      agg.pooled_delay_ms.push_back(static_cast<double>(d.slots) * r.slot_ms);
      if (d.censored) ++agg.censored;
      if (d.within_threshold) ++agg.within_threshold;
    }
    longest = std::max(longest, r.learned_fraction.size());
  }
  std::sort(agg.pooled_delay_ms.begin(), agg.pooled_delay_ms.end());

  // Runs stop once stationary; carry each run's final value forward.
  agg.mean_learned_fraction.assign(longest, 0.0);
  for (const auto& r : records) {
    if (r.learned_fraction.empty()) continue;
    for (std::size_t t = 0; t < longest; ++t)
      agg.mean_learned_fraction[t] +=
          r.learned_fraction[std::min(t, r.learned_fraction.size() - 1)];
  }
  if (!records.empty())
    for (double& v : agg.mean_learned_fraction) v /= static_cast<double>(records.size());
  return agg;
}

Aggregate monte_carlo(const SimConfig& cfg, int runs, std::uint64_t master_seed, int parallel) {
  if (runs < 1) throw std::invalid_argument("monte_carlo: runs must be >= 1");
  require_valid(cfg);
  std::vector<MetricsRecord> records(static_cast<std::size_t>(runs));

  const int workers = std::clamp(parallel, 1, runs);
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto work = [&] {
    for (int i = next++; i < runs; i = next++) {
      try {
        records[static_cast<std::size_t>(i)] = run(cfg, run_seed(master_seed, i));
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return aggregate(records, cfg.d_th_ms, master_seed);
}

}  // namespace mtc::engine
