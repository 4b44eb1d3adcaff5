#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace mtc {

/// Master seed used when neither the config nor the command line sets one.
inline constexpr std::uint64_t kDefaultMasterSeed = 0x5EED2018ULL;

/// Every experiment parameter. Defaults are the full-scale deployment used
/// for the delay CDF and convergence sweeps.
struct SimConfig {
  // deployment
  double width = 100.0;   // m
  double length = 100.0;  // m
  double lambda = 2.0;    // devices / m^2
  double r_c = 2.0;       // communication range, m
  double r_d = 10.0;      // detection range, m
  double trigger_radius = 1.0;

  double slot_ms = 0.25;

  // preambles
  int p = 64;
  int p_c = 1;
  int p_f = 63;

  // learning; k == nullopt disables learning entirely
  std::optional<int> k = 3;
  int alpha = 5;
  int m = 5;
  int l_s = 5;
  int l_r = 5;
  double p_11 = 0.9;
  double p_01_outside = 0.9;
  int s_max = 20;

  double d_th_ms = 2.5;
  double c = 0.5;
  std::optional<double> a;  // revert pivot; derived from the run curves when unset

  std::int64_t max_slots = 0;  // 0: four schedule periods
  int runs = 200;
  std::uint64_t master_seed = kDefaultMasterSeed;

  double p_01_inside() const { return 1.0 - p_11; }
  double d_th_slots() const { return d_th_ms / slot_ms; }
  bool learning_enabled() const { return k.has_value(); }
  double expected_devices() const { return width * length * lambda; }

  /// Revert pivot in phase-2 observations: the configured override, else the
  /// run-curve pivot for observers inside the detection range.
  double revert_pivot() const;
};

struct RuleCheck {
  std::string rule;
  bool ok = true;
  std::string detail;
};

/// One entry per invariant, in a fixed order.
std::vector<RuleCheck> check_rules(const SimConfig& cfg);
bool is_valid(const SimConfig& cfg);
/// Throws std::invalid_argument naming the first failed rule.
void require_valid(const SimConfig& cfg);

/// Strict JSON mapping: snake_case field names, unknown keys rejected.
/// Throws std::invalid_argument on unknown keys or wrong types.
SimConfig config_from_json(const nlohmann::json& j, const SimConfig& base = {});
nlohmann::json config_to_json(const SimConfig& cfg);

}  // namespace mtc
