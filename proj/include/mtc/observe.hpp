#pragma once

#include <stdexcept>

#include "mtc/rng.hpp"

namespace mtc::observe {

/// Candidate critical-message count. States are 1..s_max.
using State = int;

/// Observation law over S = {1, ..., s_max}: the true state is seen with
/// probability 1 - q, otherwise a uniformly drawn wrong state. q is the
/// missed-detection probability for the observer's distance to the event.
class ObservationModel {
public:
  ObservationModel(int s_max, double p01_inside, double p01_outside, double r_d)
      : s_max_(s_max), p01_in_(p01_inside), p01_out_(p01_outside), r_d_(r_d) {
    if (s_max < 1) throw std::invalid_argument("ObservationModel: s_max < 1");
    if (!(p01_inside >= 0 && p01_inside <= 1 && p01_outside >= 0 && p01_outside <= 1))
      throw std::invalid_argument("ObservationModel: probabilities must lie in [0,1]");
  }

  int s_max() const { return s_max_; }
  bool contains(State s) const { return s >= 1 && s <= s_max_; }
  double r_d() const { return r_d_; }
  double missed_detection(double dist_to_event) const {
    return dist_to_event <= r_d_ ? p01_in_ : p01_out_;
  }

  /// Pr(e = observed | truth) at the given distance.
  double pmf(State observed, State truth, double dist_to_event) const;

private:
  int s_max_;
  double p01_in_;
  double p01_out_;
  double r_d_;
};

State sample(const ObservationModel& model, double dist_to_event, State truth, Rng& rng);

/// 1 when the observation equals the favored state, else 0.
inline int binarize(State observed, State favored) { return observed == favored ? 1 : 0; }

}  // namespace mtc::observe
