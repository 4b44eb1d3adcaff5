#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mtc/config.hpp"
#include "mtc/experiment.hpp"

using namespace mtc;
using namespace mtc::experiment;
using nlohmann::json;

namespace {

bool rule_ok(const SimConfig& c, const std::string& name) {
  for (const auto& r : check_rules(c))
    if (r.rule == name) return r.ok;
  FAIL("no rule " << name);
  return false;
}

}  // namespace

TEST_CASE("default config is valid and round-trips through JSON") {
  const SimConfig c;
  CHECK(is_valid(c));
  const SimConfig back = config_from_json(config_to_json(c));
  CHECK(config_to_json(back) == config_to_json(c));

  SimConfig d;
  d.k.reset();
  d.a = 12.0;
  const SimConfig d2 = config_from_json(config_to_json(d));
  CHECK_FALSE(d2.k.has_value());
  CHECK(d2.a == 12.0);
}

TEST_CASE("rules name their failures") {
  SimConfig c;
  c.p_c = 2;
  CHECK_FALSE(rule_ok(c, "preamble_split"));
  c = {};
  c.d_th_ms = 0.25;
  CHECK_FALSE(rule_ok(c, "threshold_feasible"));
  c.d_th_ms = 0.26;
  CHECK(rule_ok(c, "threshold_feasible"));
  c = {};
  c.m = 1;
  CHECK_FALSE(rule_ok(c, "memory"));
  c = {};
  c.p_11 = 0.05;  // inside worse than outside
  CHECK_FALSE(rule_ok(c, "detection"));
  c = {};
  c.p_11 = 0.98;
  c.p_01_outside = 0.02;  // equal inside and outside is allowed
  CHECK(rule_ok(c, "detection"));
  c = {};
  c.c = 0.7;
  CHECK_FALSE(rule_ok(c, "revert"));
  c = {};
  c.k = 0;
  CHECK_FALSE(rule_ok(c, "learning_k"));
  CHECK_THROWS_AS(require_valid(c), std::invalid_argument);
}

TEST_CASE("config JSON is strict") {
  CHECK_THROWS_AS(config_from_json(json{{"lamda", 2}}), std::invalid_argument);
  CHECK_THROWS_AS(config_from_json(json{{"m", "five"}}), std::invalid_argument);
  CHECK_THROWS_AS(config_from_json(json::array()), std::invalid_argument);
  CHECK(config_from_json(json{{"m", 7}}).m == 7);
}

TEST_CASE("experiment spec parsing") {
  const json j = json::parse(R"({"base":{"lambda":1},"sweep":{"param":"m","values":[3,10]},"runs":5,"out":"x"})");
  const ExperimentSpec s = spec_from_json(j);
  CHECK(s.base.lambda == 1.0);
  CHECK(s.param == "m");
  CHECK(s.values == std::vector<double>{3, 10});
  CHECK(s.runs == 5);
  CHECK(s.out_dir == "x");

  CHECK_THROWS_AS(spec_from_json(json::parse(R"({"sweep":{"param":"K","values":[1]}})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(spec_from_json(json::parse(R"({"base":{}})")), std::invalid_argument);
  CHECK_THROWS_AS(spec_from_json(json::parse(R"({"sweep":{"param":"m","values":[]}})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(spec_from_json(json::parse(R"({"sweep":{"param":"m","values":[3]},"extra":1})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(apply_sweep(SimConfig{}, "m", 2.5), std::invalid_argument);
  CHECK(apply_sweep(SimConfig{}, "p_11", 0.7).p_11 == 0.7);
}

TEST_CASE("sweep problems list each offending value") {
  ExperimentSpec s;
  s.param = "d_th_ms";
  s.values = {0.2, 2.5, 0.25};
  const auto problems = sweep_problems(s);
  REQUIRE(problems.size() == 2);
  CHECK(problems[0].find("d_th_ms=0.2") == 0);
  CHECK(problems[1].find("d_th_ms=0.25") == 0);
}

TEST_CASE("number formatting") {
  CHECK(format_number(2.5) == "2.5");
  CHECK(format_number(3) == "3");
  CHECK(format_number(0.1) == "0.1");
}

TEST_CASE("run_experiment writes monotone CDFs and a consistent summary") {
  namespace fs = std::filesystem;
  ExperimentSpec s;
  s.base.width = 30;
  s.base.length = 30;
  s.base.lambda = 1;
  s.param = "d_th_ms";
  s.values = {0.75, 2.5};
  s.runs = 6;
  s.out_dir = fs::temp_directory_path() / "mtc_experiment_test";
  fs::remove_all(s.out_dir);
  const auto points = run_experiment(s, 9, 2);
  REQUIRE(points.size() == 2);

  for (const char* tag : {"0.75", "2.5"}) {
    std::ifstream cdf(s.out_dir / (std::string("delay_cdf_d_th_ms_") + tag + ".csv"));
    REQUIRE(cdf);
    std::string line;
    std::getline(cdf, line);
    CHECK(line == "delay_ms,cumulative_probability");
    double prev_x = -1, prev_p = 0, last = 0;
    while (std::getline(cdf, line)) {
      const auto comma = line.find(',');
      const double x = std::stod(line.substr(0, comma));
      const double p = std::stod(line.substr(comma + 1));
      CHECK(x > prev_x);
      CHECK(p >= prev_p);
      prev_x = x;
      prev_p = p;
      last = p;
    }
    CHECK(last == 1.0);

    std::ifstream lf(s.out_dir / (std::string("learned_frac_d_th_ms_") + tag + ".csv"));
    REQUIRE(lf);
    std::getline(lf, line);
    CHECK(line == "time_ms,mean_fraction_correct");
  }

  std::ifstream in(s.out_dir / "summary.json");
  const json summary = json::parse(in);
  CHECK(summary["param"] == "d_th_ms");
  REQUIRE(summary["points"].size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& p = summary["points"][i];
    const auto& agg = points[i].aggregate;
    CHECK(p["runs"] == 6);
    CHECK(p["master_seed"] == 9);
    const double quantum = 1.0 / static_cast<double>(agg.pooled_delay_ms.size());
    CHECK(std::abs(p["threshold_satisfaction"].get<double>() - agg.cdf_at(s.values[i])) <= quantum);
    CHECK(p.contains("mean_delay_ms"));
    CHECK(p.contains("peak_learned_pct"));
    CHECK(p.contains("censored_fraction"));
  }
  fs::remove_all(s.out_dir);
}

TEST_CASE("unwritable output directory is reported") {
  ExperimentSpec s;
  s.param = "m";
  s.values = {5};
  s.runs = 1;
  s.out_dir = "/proc/mtc_no_such_dir";
  CHECK_THROWS_AS(run_experiment(s, 1, 1), std::runtime_error);
}
