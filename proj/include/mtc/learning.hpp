#pragma once

// Two-phase finite-memory multi-state sequential learning.
//
// Phase 1 accumulates K multi-state observations along a hop-by-hop sequence
// and picks a favored state s_f by observation count. Phase 2 passes an
// m-bit message {last m-2 binary observations, F, Q} down the sequence; each
// device forms a private belief from the window plus its own observation,
// the S/R blocks test whether F should flip, and a run of alpha unfavored
// beliefs sends the sequence back to phase 1 with a probability that decays
// in the number of phase-2 observations.

#include <cstdint>
#include <span>
#include <vector>

#include "mtc/geometry.hpp"
#include "mtc/observe.hpp"
#include "mtc/rng.hpp"

namespace mtc::learning {

using observe::State;
using geometry::DeviceId;

enum class Phase : std::uint8_t { one = 1, two = 2 };

/// S-blocks test for a flip of F to 1, R-blocks for a flip to 0.
enum class Block : std::uint8_t { s, r };

struct Params {
  int k = 3;
  int alpha = 5;
  int m = 5;
  int l_s = 5;
  int l_r = 5;
  double revert_pivot = 5.0;
  double revert_scale = 0.5;

  int window_bits() const { return m - 2; }
};

struct LearningMessage {
  Phase phase = Phase::one;
  std::vector<State> states;        // phase 1, oldest first, < K entries
  std::vector<std::uint8_t> bits;   // phase 2, oldest first, exactly m-2 entries

  // phase 2 only
  State favored = 0;
  bool f = true;
  bool q = false;
  // Counters riding alongside the m-bit payload.
  Block block = Block::r;
  int block_pos = 0;
  int run_count = 0;
  int n_e = 0;

  /// Observation bits + F + Q. Counters are not part of the budget.
  std::size_t payload_bits() const {
    return phase == Phase::two ? bits.size() + 2 : 0;
  }
};

enum class Decision : std::uint8_t {
  none,
  learned,   // holds learned_state as its estimate of N_a
  rejected,  // rejected the favored state; no usable estimate
};

struct LearnOutcome {
  Decision decision = Decision::none;
  State learned_state = 0;
  bool revert = false;
  LearningMessage forward;

  bool decided() const { return decision != Decision::none; }
};

/// State with the largest observation count; ties go to the larger state.
State choose_favored(std::span<const State> observations);

/// 1 iff the favored state appears anywhere in window + own.
int private_belief(std::span<const std::uint8_t> window, int own_bit);

/// Throws std::logic_error when the window already holds K observations.
/// An empty window with own observation seeds a new sequence.
LearnOutcome phase1_step(const LearningMessage& msg, State own, const Params& params);

LearnOutcome phase2_step(const LearningMessage& msg, State own, const Params& params, Rng& rng);

/// Phase-2 window seeded from the K phase-1 observations, binarized against
/// s_f: the last m-2 bits, zero-padded at the front.
std::vector<std::uint8_t> seed_window(std::span<const State> observations, State favored,
                                      int window_bits);

enum class Status : std::uint8_t { idle, participated, decided };

struct DeviceLearning {
  Status status = Status::idle;
  Decision decision = Decision::none;
  State learned_state = 0;
};

/// One processed hop: `receiver` took `sender`'s message (sender is
/// kInitiator for sequence seeds).
struct HopRecord {
  static constexpr DeviceId kInitiator = static_cast<DeviceId>(-1);
  DeviceId sender = kInitiator;
  DeviceId receiver = 0;
  Phase phase = Phase::one;
  LearnOutcome outcome;
};

/// Slot-by-slot propagation of learning sequences over an adjacency graph.
/// Devices flagged `receptive` (holders of critical messages) keep accepting
/// messages until they decide; every other device processes at most one.
class Propagation {
public:
  Propagation(const geometry::Adjacency& adjacency, std::vector<double> dist_to_event,
              observe::ObservationModel model, State truth, Params params,
              std::vector<bool> receptive);

  /// Seeds one sequence per initiator (slot 0).
  std::vector<HopRecord> start(std::span<const DeviceId> initiators, Rng& rng);

  /// Executes one hop: every device that processed a message last slot
  /// offers its forward message to eligible neighbors; receivers offered
  /// several messages pick one uniformly.
  std::vector<HopRecord> advance(Rng& rng);

  bool active() const { return !outbox_.empty(); }
  const DeviceLearning& device(DeviceId id) const { return devices_[id]; }
  std::size_t size() const { return devices_.size(); }
  std::size_t decided_count() const { return decided_; }
  std::size_t correct_count() const { return correct_; }
  State truth() const { return truth_; }
  const Params& params() const { return params_; }

private:
  bool eligible(DeviceId id) const;
  HopRecord process(DeviceId receiver, DeviceId sender, const LearningMessage& msg, Rng& rng);

  const geometry::Adjacency& adjacency_;
  std::vector<double> dist_;
  observe::ObservationModel model_;
  State truth_;
  Params params_;
  std::vector<bool> receptive_;
  std::vector<DeviceLearning> devices_;
  std::size_t decided_ = 0;
  std::size_t correct_ = 0;

  // Messages sent in the previous hop, ascending by sender.
  std::vector<std::pair<DeviceId, LearningMessage>> outbox_;

  // scratch for offer selection
  std::vector<std::uint32_t> offer_count_;
  std::vector<std::uint32_t> chosen_;
};

}  // namespace mtc::learning
