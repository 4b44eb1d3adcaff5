#include "mtc/config.hpp"

#include <stdexcept>

#include "mtc/analytics.hpp"

namespace mtc {

double SimConfig::revert_pivot() const {
  if (a) return *a;
  // Favored-observation probabilities inside r_d: right favored state is seen
  // with p_11, a wrong one with its share of the uniform missed-detection mass.
  const double p_right = p_11;
  const double p_wrong = (1.0 - p_11) / (s_max - 1);
  if (!(p_right > 0.0 && p_right < 1.0 && p_wrong > 0.0 && p_wrong < 1.0)) return alpha;
  return analytics::default_revert_pivot(alpha, p_wrong, p_right);
}

std::vector<RuleCheck> check_rules(const SimConfig& c) {
  std::vector<RuleCheck> out;
  auto rule = [&](std::string name, bool ok, std::string detail) {
    out.push_back({std::move(name), ok, ok ? std::string{} : std::move(detail)});
  };

  rule("preamble_split", c.p_c + c.p_f == c.p,
       "p_c + p_f must equal p (" + std::to_string(c.p_c) + " + " + std::to_string(c.p_f) +
           " != " + std::to_string(c.p) + ")");
  rule("preamble_pools", c.p_c >= 1 && c.p_f >= 1, "need p_c >= 1 and p_f >= 1");
  rule("deployment", c.width > 0 && c.length > 0 && c.lambda > 0,
       "width, length and lambda must be positive");
  rule("ranges", c.r_c > 0 && c.r_d > 0 && c.trigger_radius >= 0,
       "r_c, r_d must be positive and trigger_radius nonnegative");
  rule("slot_duration", c.slot_ms > 0, "slot_ms must be positive");
  rule("learning_k", !c.k || *c.k >= 1, "k must be >= 1 (null disables learning)");
  rule("learning_alpha", c.alpha >= 1, "alpha must be >= 1");
  rule("memory", c.m >= 2, "m must be >= 2 bits");
  rule("block_lengths", c.l_s >= 1 && c.l_r >= 1, "l_s and l_r must be >= 1");
  rule("detection", c.p_01_inside() > 0 && c.p_01_inside() <= c.p_01_outside + 1e-12 && c.p_01_outside < 1,
       "need 0 < 1 - p_11 <= p_01_outside < 1");
  rule("state_space", c.s_max >= 2, "s_max must be >= 2");
  rule("threshold_feasible", c.slot_ms > 0 && c.d_th_slots() > 1.0,
       "d_th_ms must exceed one slot (" + std::to_string(c.slot_ms) + " ms)");
  rule("revert", c.c > 0 && c.c <= 0.5 && (!c.a || *c.a >= 0),
       "c must lie in (0, 0.5] and a must be nonnegative");
  rule("max_slots", c.max_slots >= 0, "max_slots must be >= 0 (0 selects the default)");
  rule("runs", c.runs >= 1, "runs must be >= 1");
  return out;
}

bool is_valid(const SimConfig& cfg) {
  for (const auto& r : check_rules(cfg))
    if (!r.ok) return false;
  return true;
}

void require_valid(const SimConfig& cfg) {
  for (const auto& r : check_rules(cfg))
    if (!r.ok) throw std::invalid_argument("config rule '" + r.rule + "' failed: " + r.detail);
}

namespace {

template <typename T>
void read(const nlohmann::json& j, const char* key, T& dst) {
  try {
    dst = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
void read_optional(const nlohmann::json& j, const char* key, std::optional<T>& dst) {
  if (j.at(key).is_null()) {
    dst.reset();
    return;
  }
  T v{};
  read(j, key, v);
  dst = v;
}

}  // namespace

SimConfig config_from_json(const nlohmann::json& j, const SimConfig& base) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  SimConfig c = base;
  for (const auto& [key, _] : j.items()) {
    const char* k = key.c_str();
    if (key == "width") read(j, k, c.width);
    else if (key == "length") read(j, k, c.length);
    else if (key == "lambda") read(j, k, c.lambda);
    else if (key == "r_c") read(j, k, c.r_c);
    else if (key == "r_d") read(j, k, c.r_d);
    else if (key == "trigger_radius") read(j, k, c.trigger_radius);
    else if (key == "slot_ms") read(j, k, c.slot_ms);
    else if (key == "p") read(j, k, c.p);
    else if (key == "p_c") read(j, k, c.p_c);
    else if (key == "p_f") read(j, k, c.p_f);
    else if (key == "k") read_optional(j, k, c.k);
    else if (key == "alpha") read(j, k, c.alpha);
    else if (key == "m") read(j, k, c.m);
    else if (key == "l_s") read(j, k, c.l_s);
    else if (key == "l_r") read(j, k, c.l_r);
    else if (key == "p_11") read(j, k, c.p_11);
    else if (key == "p_01_outside") read(j, k, c.p_01_outside);
    else if (key == "s_max") read(j, k, c.s_max);
    else if (key == "d_th_ms") read(j, k, c.d_th_ms);
    else if (key == "c") read(j, k, c.c);
    else if (key == "a") read_optional(j, k, c.a);
    else if (key == "max_slots") read(j, k, c.max_slots);
    else if (key == "runs") read(j, k, c.runs);
    else if (key == "master_seed") read(j, k, c.master_seed);
    else throw std::invalid_argument("unknown config key '" + key + "'");
  }
  return c;
}

nlohmann::json config_to_json(const SimConfig& c) {
  nlohmann::json j;
  j["width"] = c.width;
  j["length"] = c.length;
  j["lambda"] = c.lambda;
  j["r_c"] = c.r_c;
  j["r_d"] = c.r_d;
  j["trigger_radius"] = c.trigger_radius;
  j["slot_ms"] = c.slot_ms;
  j["p"] = c.p;
  j["p_c"] = c.p_c;
  j["p_f"] = c.p_f;
  j["k"] = c.k ? nlohmann::json(*c.k) : nlohmann::json(nullptr);
  j["alpha"] = c.alpha;
  j["m"] = c.m;
  j["l_s"] = c.l_s;
  j["l_r"] = c.l_r;
  j["p_11"] = c.p_11;
  j["p_01_outside"] = c.p_01_outside;
  j["s_max"] = c.s_max;
  j["d_th_ms"] = c.d_th_ms;
  j["c"] = c.c;
  j["a"] = c.a ? nlohmann::json(*c.a) : nlohmann::json(nullptr);
  j["max_slots"] = c.max_slots;
  j["runs"] = c.runs;
  j["master_seed"] = c.master_seed;
  return j;
}

}  // namespace mtc
