#pragma once

// Closed-form delay, reallocation and learning-convergence quantities for a
// RACH split into contention-based and contention-free preambles. Every
// function here is pure; delays are in slots unless the name says otherwise.

#include <cstdint>
#include <limits>
#include <stdexcept>

namespace mtc::analytics {

/// Preamble pool split. p_c contention-based, p_f contention-free.
class PreambleSplit {
public:
  PreambleSplit(int p_total, int p_c) : p_total_(p_total), p_c_(p_c) {
    if (p_c < 1 || p_c > p_total)
      throw std::invalid_argument("PreambleSplit: need 1 <= p_c <= p");
  }
  static PreambleSplit from_counts(int p_c, int p_f) {
    if (p_f < 0) throw std::invalid_argument("PreambleSplit: p_f < 0");
    return PreambleSplit(p_c + p_f, p_c);
  }
  int total() const { return p_total_; }
  int contention() const { return p_c_; }
  int contention_free() const { return p_total_ - p_c_; }

private:
  int p_total_;
  int p_c_;
};

/// Expected delay in slots. Infinity is a legal value (contention that can
/// never succeed), not an error.
class DelaySlots {
public:
  constexpr DelaySlots() = default;
  constexpr explicit DelaySlots(double v) : value_(v) {}
  static constexpr DelaySlots infinite() {
    return DelaySlots(std::numeric_limits<double>::infinity());
  }
  constexpr double value() const { return value_; }
  constexpr bool is_infinite() const {
    return value_ == std::numeric_limits<double>::infinity();
  }
  double to_ms(double slot_ms) const { return value_ * slot_ms; }
  static DelaySlots from_ms(double ms, double slot_ms) { return DelaySlots(ms / slot_ms); }

  friend constexpr bool operator==(DelaySlots a, DelaySlots b) { return a.value_ == b.value_; }
  friend constexpr auto operator<=>(DelaySlots a, DelaySlots b) { return a.value_ <=> b.value_; }

private:
  double value_ = 0.0;
};

constexpr DelaySlots min(DelaySlots a, DelaySlots b) { return a <= b ? a : b; }

/// Success probability per observation for run-length statistics; kept
/// strictly inside (0, 1) so likelihood ratios stay finite.
class RunStats {
public:
  RunStats(int alpha, double p_success) : alpha_(alpha), p_(p_success) {
    if (alpha < 1) throw std::invalid_argument("RunStats: alpha < 1");
    if (!(p_success > 0.0 && p_success < 1.0))
      throw std::invalid_argument("RunStats: p_success must lie in (0,1)");
  }
  int alpha() const { return alpha_; }
  double p_success() const { return p_; }

private:
  int alpha_;
  double p_;
};

// --- channel -------------------------------------------------------------

/// ceil(N / p_f): shortest period at which every device gets a collision-free
/// contention-free slot. Throws std::domain_error when p_f == 0.
std::int64_t min_period(std::int64_t devices, int p_f);

/// ((p_c-1)/p_c)^(N_p-1). N_p may be fractional (N / T on average).
double periodic_success_prob(int p_c, double simultaneous);

double critical_success_prob(int p_c, int critical_count);

/// Mean of the geometric attempt count, 1 / critical_success_prob.
DelaySlots contention_delay(int p_c, int critical_count);

/// Mean wait (T_min - 1) / 2 for a uniformly placed schedule slot.
DelaySlots contention_free_delay(std::int64_t t_min);

/// Delay after beta contention-free preambles move to the contention pool:
/// the smaller of the contention and the (shrunk) contention-free branch.
DelaySlots post_learning_delay(const PreambleSplit& split, int beta, std::int64_t devices,
                               int critical_count);

/// Smallest beta >= 0 with contention_delay(p_c + beta, N_a) <= threshold.
/// N_a == 1 already meets any threshold and yields 0. Throws
/// std::domain_error for threshold <= 1 slot.
int reallocation_count(int p_c, int critical_count, DelaySlots threshold);

// --- learning ------------------------------------------------------------

/// Probability that a run of `alpha` consecutive unfavored observations has
/// occurred within the first `n_e` observations, where each observation is
/// favored with probability p.
double run_probability(std::int64_t n_e, int alpha, double p);
inline double run_probability(std::int64_t n_e, const RunStats& s) {
  return run_probability(n_e, s.alpha(), s.p_success());
}

/// Expected number of observations until the first run of `alpha`
/// unfavored observations.
double expected_return_time(int alpha, double p);

/// Sigmoid revert probability C(1 - (n_e - a) / (1 + |n_e - a|)).
/// `scale` must lie in (0, 0.5] so the result stays in [0, 1].
double revert_probability(double n_e, double pivot, double scale);

/// Pivot for revert_probability: smallest n_e at which the wrong-favored run
/// curve (favored prob p_wrong) has reached 0.9 while the right-favored curve
/// (p_right) is still <= 0.1. Falls back to the first n_e where only the
/// first condition holds.
int default_revert_pivot(int alpha, double p_wrong, double p_right);

/// r_d + (m - 2) r_c. Throws std::domain_error for m < 2.
double effective_detection_radius(double r_d, int memory_bits, double r_c);

/// Expected number of correctly-learned periodic transmitters in a slot,
/// p_f * pi * min(t r_c, r_d')^2 / A, clamped to [0, p_f].
double learned_count(double t, double r_c, double r_d_eff, int p_f, double area);

/// Probability that exactly b of the first beta reallocation-order preambles
/// are held by learned transmitters when n_t of p_f transmitters learned.
double realloc_pmf(int n_t, int p_f, int beta, int b);

/// Sum over b of b * realloc_pmf.
double expected_realloc(int n_t, int p_f, int beta);

/// ((p_c + E[beta_t]) / (p_c + E[beta_t] - 1))^(N_a - 1).
DelaySlots lowest_expected_delay(int p_c, double expected_beta, int critical_count);

}  // namespace mtc::analytics
