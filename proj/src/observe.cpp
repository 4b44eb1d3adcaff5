#include "mtc/observe.hpp"

namespace mtc::observe {

double ObservationModel::pmf(State observed, State truth, double dist_to_event) const {
  if (!contains(observed) || !contains(truth)) return 0.0;
  if (s_max_ == 1) return 1.0;
  const double q = missed_detection(dist_to_event);
  return observed == truth ? 1.0 - q : q / (s_max_ - 1);
}

State sample(const ObservationModel& model, double dist_to_event, State truth, Rng& rng) {
  if (!model.contains(truth)) throw std::invalid_argument("observe::sample: truth outside S");
  if (model.s_max() == 1) return truth;
  const double q = model.missed_detection(dist_to_event);
  if (q <= 0.0 || uniform01(rng) >= q) return truth;
  // uniform over S \ {truth}
  State wrong = 1 + static_cast<State>(uniform_index(rng, static_cast<std::uint32_t>(model.s_max() - 1)));
  if (wrong >= truth) ++wrong;
  return wrong;
}

}  // namespace mtc::observe
