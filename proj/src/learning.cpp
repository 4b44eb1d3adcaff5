#include "mtc/learning.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "mtc/analytics.hpp"

namespace mtc::learning {

State choose_favored(std::span<const State> observations) {
  if (observations.empty()) throw std::invalid_argument("choose_favored: no observations");
  // K is small; a sorted count map keeps the larger-state tie-break trivial.
  std::map<State, int> counts;
  for (State s : observations) ++counts[s];
  State best = 0;
  int best_count = -1;
  for (const auto& [state, count] : counts) {
    if (count >= best_count) {
      best = state;
      best_count = count;
    }
  }
  return best;
}

int private_belief(std::span<const std::uint8_t> window, int own_bit) {
  if (own_bit != 0) return 1;
  return std::any_of(window.begin(), window.end(), [](std::uint8_t b) { return b != 0; }) ? 1 : 0;
}

std::vector<std::uint8_t> seed_window(std::span<const State> observations, State favored,
                                      int window_bits) {
  std::vector<std::uint8_t> out(static_cast<std::size_t>(std::max(window_bits, 0)), 0);
  const auto take = std::min(out.size(), observations.size());
  const auto src = observations.subspan(observations.size() - take);
  const auto dst = out.size() - take;
  for (std::size_t i = 0; i < take; ++i)
    out[dst + i] = static_cast<std::uint8_t>(observe::binarize(src[i], favored));
  return out;
}

LearnOutcome phase1_step(const LearningMessage& msg, State own, const Params& params) {
  if (msg.phase != Phase::one) throw std::logic_error("phase1_step: phase-2 message");
  if (static_cast<int>(msg.states.size()) >= params.k)
    throw std::logic_error("phase1_step: window already holds K observations");

  LearnOutcome out;
  std::vector<State> window = msg.states;
  window.push_back(own);
  if (static_cast<int>(window.size()) < params.k) {
    out.forward.phase = Phase::one;
    out.forward.states = std::move(window);
    return out;
  }

  const State favored = choose_favored(window);
  out.decision = Decision::learned;
  out.learned_state = favored;
  LearningMessage& fwd = out.forward;
  fwd.phase = Phase::two;
  fwd.favored = favored;
  fwd.bits = seed_window(window, favored, params.window_bits());
  fwd.f = true;
  fwd.q = false;
  fwd.block = Block::r;
  fwd.block_pos = 0;
  fwd.run_count = 0;
  fwd.n_e = 0;
  return out;
}

LearnOutcome phase2_step(const LearningMessage& msg, State own, const Params& params, Rng& rng) {
  if (msg.phase != Phase::two) throw std::logic_error("phase2_step: phase-1 message");
  if (static_cast<int>(msg.bits.size()) != params.window_bits())
    throw std::logic_error("phase2_step: window length differs from m - 2");

  const int own_bit = observe::binarize(own, msg.favored);
  const int belief = private_belief(msg.bits, own_bit);

  LearnOutcome out;
  LearningMessage fwd = msg;
  fwd.n_e = msg.n_e + 1;
  fwd.run_count = belief == 0 ? std::min(msg.run_count + 1, params.alpha) : 0;

  // S/R block test on F.
  const int target = fwd.block == Block::s ? 1 : 0;
  const bool match = belief == target;
  fwd.q = fwd.block_pos == 0 ? match : (msg.q && match);
  ++fwd.block_pos;
  const int block_len = fwd.block == Block::s ? params.l_s : params.l_r;
  if (fwd.block_pos >= block_len) {
    if (fwd.q) fwd.f = fwd.block == Block::s;
    fwd.block = fwd.block == Block::s ? Block::r : Block::s;
    fwd.block_pos = 0;
    fwd.q = false;
  }

  if (fwd.run_count >= params.alpha) {
    const double p_back =
        analytics::revert_probability(fwd.n_e, params.revert_pivot, params.revert_scale);
    if (uniform01(rng) < p_back) {
      // Revert wins over any block flip in the same step; the device restarts
      // phase 1 from its own observation.
      LearnOutcome restart = phase1_step(LearningMessage{}, own, params);
      restart.revert = true;
      return restart;
    }
    fwd.run_count = 0;
  }

  // Slide the observation window: drop the oldest, append own bit.
  if (!fwd.bits.empty()) {
    std::rotate(fwd.bits.begin(), fwd.bits.begin() + 1, fwd.bits.end());
    fwd.bits.back() = static_cast<std::uint8_t>(own_bit);
  }

  out.decision = fwd.f ? Decision::learned : Decision::rejected;
  out.learned_state = fwd.f ? fwd.favored : 0;
  out.forward = std::move(fwd);
  return out;
}

Propagation::Propagation(const geometry::Adjacency& adjacency, std::vector<double> dist_to_event,
                         observe::ObservationModel model, State truth, Params params,
                         std::vector<bool> receptive)
    : adjacency_(adjacency),
      dist_(std::move(dist_to_event)),
      model_(model),
      truth_(truth),
      params_(params),
      receptive_(std::move(receptive)),
      devices_(adjacency.size()),
      offer_count_(adjacency.size(), 0),
      chosen_(adjacency.size(), 0) {
  if (dist_.size() != devices_.size() || receptive_.size() != devices_.size())
    throw std::invalid_argument("Propagation: per-device vectors differ in size");
  if (!model_.contains(truth_)) throw std::invalid_argument("Propagation: truth outside S");
  if (params_.m < 2 || params_.k < 1 || params_.alpha < 1 || params_.l_s < 1 || params_.l_r < 1)
    throw std::invalid_argument("Propagation: invalid learning parameters");
}

bool Propagation::eligible(DeviceId id) const {
  const Status s = devices_[id].status;
  if (s == Status::decided) return false;
  return s == Status::idle || receptive_[id];
}

HopRecord Propagation::process(DeviceId receiver, DeviceId sender, const LearningMessage& msg,
                               Rng& rng) {
  DeviceLearning& dev = devices_[receiver];
  if (dev.status == Status::decided)
    throw std::logic_error("Propagation: decided device asked to learn again");

  const State own = observe::sample(model_, dist_[receiver], truth_, rng);
  HopRecord rec{sender, receiver, msg.phase,
                msg.phase == Phase::one ? phase1_step(msg, own, params_)
                                        : phase2_step(msg, own, params_, rng)};
  if (rec.outcome.decided()) {
    dev.status = Status::decided;
    dev.decision = rec.outcome.decision;
    dev.learned_state = rec.outcome.learned_state;
    ++decided_;
    if (dev.decision == Decision::learned && dev.learned_state == truth_) ++correct_;
  } else {
    dev.status = Status::participated;
  }
  return rec;
}

std::vector<HopRecord> Propagation::start(std::span<const DeviceId> initiators, Rng& rng) {
  std::vector<DeviceId> order(initiators.begin(), initiators.end());
  std::sort(order.begin(), order.end());
  order.erase(std::unique(order.begin(), order.end()), order.end());

  std::vector<HopRecord> records;
  std::vector<std::pair<DeviceId, LearningMessage>> next;
  const LearningMessage empty{};
  for (DeviceId id : order) {
    if (devices_[id].status == Status::decided) continue;
    records.push_back(process(id, HopRecord::kInitiator, empty, rng));
    next.emplace_back(id, records.back().outcome.forward);
  }
  outbox_ = std::move(next);
  return records;
}

std::vector<HopRecord> Propagation::advance(Rng& rng) {
  std::vector<DeviceId> touched;
  for (std::uint32_t idx = 0; idx < outbox_.size(); ++idx) {
    const DeviceId sender = outbox_[idx].first;
    for (DeviceId nb : adjacency_.of(sender)) {
      if (!eligible(nb)) continue;
      // Reservoir choice keeps the pick uniform over all offers.
      const std::uint32_t seen = ++offer_count_[nb];
      if (seen == 1) {
        touched.push_back(nb);
        chosen_[nb] = idx;
      } else if (uniform_index(rng, seen) == 0) {
        chosen_[nb] = idx;
      }
    }
  }
  std::sort(touched.begin(), touched.end());

  std::vector<HopRecord> records;
  records.reserve(touched.size());
  std::vector<std::pair<DeviceId, LearningMessage>> next;
  next.reserve(touched.size());
  for (DeviceId receiver : touched) {
    const auto& [sender, msg] = outbox_[chosen_[receiver]];
    records.push_back(process(receiver, sender, msg, rng));
    next.emplace_back(receiver, records.back().outcome.forward);
    offer_count_[receiver] = 0;
  }
  outbox_ = std::move(next);
  return records;
}

}  // namespace mtc::learning
