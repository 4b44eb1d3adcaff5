#include "mtc/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace mtc::analytics {

namespace {

// log(n! / (n-k)!), or -inf when k > n.
double log_permutations(int n, int k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return std::lgamma(n + 1.0) - std::lgamma(n - k + 1.0);
}

double log_combinations(int n, int k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

DelaySlots contention_branch(int pool, int critical_count) {
  if (critical_count <= 1) return DelaySlots(1.0);
  if (pool <= 1) return DelaySlots::infinite();
  const double ratio = static_cast<double>(pool) / (pool - 1);
  return DelaySlots(std::pow(ratio, critical_count - 1));
}

}  // namespace

std::int64_t min_period(std::int64_t devices, int p_f) {
  if (p_f <= 0) throw std::domain_error("min_period: no contention-free preambles");
  if (devices < 1) throw std::invalid_argument("min_period: need at least one device");
  return (devices + p_f - 1) / p_f;
}

double periodic_success_prob(int p_c, double simultaneous) {
  if (p_c < 1 || simultaneous < 1.0)
    throw std::invalid_argument("periodic_success_prob: need p_c >= 1, N_p >= 1");
  if (simultaneous == 1.0) return 1.0;
  return std::pow(static_cast<double>(p_c - 1) / p_c, simultaneous - 1.0);
}

double critical_success_prob(int p_c, int critical_count) {
  if (p_c < 1 || critical_count < 1)
    throw std::invalid_argument("critical_success_prob: need p_c >= 1, N_a >= 1");
  if (critical_count == 1) return 1.0;
  return std::pow(static_cast<double>(p_c - 1) / p_c, critical_count - 1);
}

DelaySlots contention_delay(int p_c, int critical_count) {
  const double p = critical_success_prob(p_c, critical_count);
  if (p == 0.0) return DelaySlots::infinite();
  return DelaySlots(1.0 / p);
}

DelaySlots contention_free_delay(std::int64_t t_min) {
  if (t_min < 1) throw std::invalid_argument("contention_free_delay: T_min < 1");
  return DelaySlots(static_cast<double>(t_min - 1) / 2.0);
}

DelaySlots post_learning_delay(const PreambleSplit& split, int beta, std::int64_t devices,
                               int critical_count) {
  const int p_c = split.contention();
  const int p_f = split.contention_free();
  if (beta < 0 || beta > p_f) throw std::invalid_argument("post_learning_delay: beta out of range");
  if (critical_count < 1) throw std::invalid_argument("post_learning_delay: N_a < 1");

  const DelaySlots contention = contention_branch(p_c + beta, critical_count);
  const int remaining = p_f - beta;
  const DelaySlots scheduled = remaining == 0
                                   ? DelaySlots::infinite()
                                   : contention_free_delay(min_period(devices, remaining));
  return min(contention, scheduled);
}

int reallocation_count(int p_c, int critical_count, DelaySlots threshold) {
  if (!(threshold.value() > 1.0))
    throw std::domain_error("reallocation_count: threshold must exceed one slot");
  if (p_c < 1 || critical_count < 1)
    throw std::invalid_argument("reallocation_count: need p_c >= 1, N_a >= 1");
  if (critical_count == 1) return 0;

  const double root = std::pow(threshold.value(), 1.0 / (critical_count - 1));
  const double bound = (root * (p_c - 1) - p_c) / (1.0 - root);
  int beta = bound <= 0.0 ? 0 : static_cast<int>(std::ceil(bound));

  // ceil() of a rounded quotient can land one off either way.
  while (beta > 0 && contention_delay(p_c + beta - 1, critical_count) <= threshold) --beta;
  while (contention_delay(p_c + beta, critical_count) > threshold) ++beta;
  return beta;
}

double run_probability(std::int64_t n_e, int alpha, double p) {
  if (n_e < 0 || alpha < 1 || !(p > 0.0 && p < 1.0))
    throw std::invalid_argument("run_probability: need n_e >= 0, alpha >= 1, 0 < p < 1");
  if (n_e < alpha) return 0.0;

  const double q_alpha = std::pow(1.0 - p, alpha);
  // P(n) = q^a + (n-a) p q^a - p q^a sum_{i<n-a} P(i)
  //      = q^a + p q^a sum_{i<n-a} (1 - P(i)), accumulated without cancellation.
  std::vector<double> prob(static_cast<std::size_t>(n_e) + 1, 0.0);
  prob[alpha] = q_alpha;
  double complement_sum = 0.0;
  for (std::int64_t n = alpha + 1; n <= n_e; ++n) {
    complement_sum += 1.0 - prob[n - alpha - 1];
    prob[n] = std::min(1.0, q_alpha + p * q_alpha * complement_sum);
  }
  return prob[n_e];
}

double expected_return_time(int alpha, double p) {
  if (alpha < 1 || !(p > 0.0 && p < 1.0))
    throw std::invalid_argument("expected_return_time: need alpha >= 1, 0 < p < 1");
  const double q = 1.0 - p;
  double weighted = 0.0;
  double q_pow = 1.0;
  for (int j = 0; j < alpha; ++j) {
    weighted += q_pow * (j + 1);
    q_pow *= q;
  }
  // q_pow == q^alpha here
  return (p * weighted + alpha * q_pow) / q_pow;
}

double revert_probability(double n_e, double pivot, double scale) {
  if (!(scale > 0.0 && scale <= 0.5))
    throw std::invalid_argument("revert_probability: scale must lie in (0, 0.5]");
  const double shift = n_e - pivot;
  return scale * (1.0 - shift / (1.0 + std::abs(shift)));
}

int default_revert_pivot(int alpha, double p_wrong, double p_right) {
  constexpr std::int64_t kSearchLimit = 100000;
  std::int64_t first_wrong_high = -1;
  // Walk both curves incrementally; each run_probability call is O(n).
  const RunStats wrong(alpha, p_wrong);
  const RunStats right(alpha, p_right);
  const double qw = std::pow(1.0 - p_wrong, alpha);
  const double qr = std::pow(1.0 - p_right, alpha);
  std::vector<double> pw(kSearchLimit + 1, 0.0), pr(kSearchLimit + 1, 0.0);
  double sw = 0.0, sr = 0.0;
  for (std::int64_t n = alpha; n <= kSearchLimit; ++n) {
    if (n == alpha) {
      pw[n] = qw;
      pr[n] = qr;
    } else {
      sw += 1.0 - pw[n - alpha - 1];
      sr += 1.0 - pr[n - alpha - 1];
      pw[n] = std::min(1.0, qw + wrong.p_success() * qw * sw);
      pr[n] = std::min(1.0, qr + right.p_success() * qr * sr);
    }
    if (pw[n] >= 0.9) {
      if (first_wrong_high < 0) first_wrong_high = n;
      if (pr[n] <= 0.1) return static_cast<int>(n);
    }
  }
  return first_wrong_high >= 0 ? static_cast<int>(first_wrong_high) : alpha;
}

double effective_detection_radius(double r_d, int memory_bits, double r_c) {
  if (memory_bits < 2) throw std::domain_error("effective_detection_radius: m < 2");
  if (!(r_d > 0.0 && r_c > 0.0))
    throw std::invalid_argument("effective_detection_radius: radii must be positive");
  return r_d + (memory_bits - 2) * r_c;
}

double learned_count(double t, double r_c, double r_d_eff, int p_f, double area) {
  if (t < 0.0 || !(area > 0.0)) throw std::invalid_argument("learned_count: need t >= 0, A > 0");
  const double r_t = std::min(t * r_c, r_d_eff);
  const double n_t = p_f * std::numbers::pi * r_t * r_t / area;
  return std::clamp(n_t, 0.0, static_cast<double>(p_f));
}

double realloc_pmf(int n_t, int p_f, int beta, int b) {
  if (!(0 <= b && b <= beta && beta <= p_f && 0 <= n_t && n_t <= p_f))
    throw std::invalid_argument("realloc_pmf: need 0 <= b <= beta <= p_f, 0 <= n_t <= p_f");
  const double log_term = (log_permutations(p_f, beta) * -1.0) + log_permutations(n_t, b) +
                          log_permutations(p_f - n_t, beta - b) + log_combinations(beta, b);
  if (std::isinf(log_term)) return 0.0;
  return std::exp(log_term);
}

double expected_realloc(int n_t, int p_f, int beta) {
  double sum = 0.0;
  for (int b = 1; b <= beta; ++b) sum += b * realloc_pmf(n_t, p_f, beta, b);
  return sum;
}

DelaySlots lowest_expected_delay(int p_c, double expected_beta, int critical_count) {
  const double pool = p_c + expected_beta;
  if (!(pool > 1.0) || critical_count < 1)
    throw std::invalid_argument("lowest_expected_delay: need p_c + E[beta_t] > 1, N_a >= 1");
  return DelaySlots(std::pow(pool / (pool - 1.0), critical_count - 1));
}

}  // namespace mtc::analytics
