#include "mtc/experiment.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace mtc::experiment {

bool is_sweep_param(const std::string& name) {
  return name == "d_th_ms" || name == "lambda" || name == "p_11" || name == "m";
}

SimConfig apply_sweep(const SimConfig& base, const std::string& param, double value) {
  SimConfig c = base;
  if (param == "d_th_ms") {
    c.d_th_ms = value;
  } else if (param == "lambda") {
    c.lambda = value;
  } else if (param == "p_11") {
    c.p_11 = value;
  } else if (param == "m") {
    if (value != std::floor(value)) throw std::invalid_argument("sweep m must be integral");
    c.m = static_cast<int>(value);
  } else {
    throw std::invalid_argument("unknown sweep parameter '" + param + "'");
  }
  return c;
}

ExperimentSpec spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("experiment must be a JSON object");
  ExperimentSpec spec;
  bool have_sweep = false;
  for (const auto& [key, value] : j.items()) {
    if (key == "base") {
      spec.base = config_from_json(value);
    } else if (key == "sweep") {
      if (!value.is_object()) throw std::invalid_argument("'sweep' must be an object");
      for (const auto& [sk, sv] : value.items())
        if (sk != "param" && sk != "values")
          throw std::invalid_argument("unknown sweep key '" + sk + "'");
      try {
        spec.param = value.at("param").get<std::string>();
        spec.values = value.at("values").get<std::vector<double>>();
      } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("sweep: ") + e.what());
      }
      have_sweep = true;
    } else if (key == "runs") {
      spec.runs = value.get<int>();
    } else if (key == "out") {
      spec.out_dir = value.get<std::string>();
    } else {
      throw std::invalid_argument("unknown experiment key '" + key + "'");
    }
  }
  if (!have_sweep) throw std::invalid_argument("experiment needs a 'sweep' object");
  if (!is_sweep_param(spec.param))
    throw std::invalid_argument("sweep param must be one of d_th_ms, lambda, p_11, m (got '" +
                                spec.param + "')");
  if (spec.values.empty()) throw std::invalid_argument("sweep values are empty");
  return spec;
}

std::vector<std::string> sweep_problems(const ExperimentSpec& spec) {
  std::vector<std::string> out;
  for (double v : spec.values) {
    try {
      const SimConfig c = apply_sweep(spec.base, spec.param, v);
      for (const auto& r : check_rules(c))
        if (!r.ok) out.push_back(spec.param + "=" + format_number(v) + ": " + r.rule + " (" + r.detail + ")");
    } catch (const std::invalid_argument& e) {
      out.push_back(spec.param + "=" + format_number(v) + ": " + e.what());
    }
  }
  return out;
}

std::string format_number(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

void write_delay_cdf(std::ostream& os, const engine::Aggregate& agg) {
  os << "delay_ms,cumulative_probability\n";
  for (const auto& [delay, prob] : agg.delay_cdf())
    os << format_number(delay) << ',' << format_number(prob) << '\n';
}

void write_learned_curve(std::ostream& os, const engine::Aggregate& agg) {
  os << "time_ms,mean_fraction_correct\n";
  for (std::size_t t = 0; t < agg.mean_learned_fraction.size(); ++t)
    os << format_number(static_cast<double>(t + 1) * agg.slot_ms) << ','
       << format_number(agg.mean_learned_fraction[t]) << '\n';
}

nlohmann::json summary_json(const ExperimentSpec& spec, std::uint64_t master_seed,
                            const std::vector<PointResult>& points) {
  nlohmann::json j;
  j["param"] = spec.param;
  j["master_seed"] = master_seed;
  j["base"] = config_to_json(spec.base);
  j["points"] = nlohmann::json::array();
  for (const auto& p : points) {
    const auto& a = p.aggregate;
    j["points"].push_back({
        {"value", p.value},
        {"runs", a.runs},
        {"master_seed", a.master_seed},
        {"d_th_ms", a.d_th_ms},
        {"critical_messages", a.pooled_delay_ms.size()},
        {"mean_delay_ms", a.mean_delay_ms()},
        {"threshold_satisfaction", a.threshold_satisfaction()},
        {"censored_fraction", a.censored_fraction()},
        {"peak_learned_pct", a.peak_learned_pct()},
    });
  }
  return j;
}

std::vector<PointResult> run_experiment(const ExperimentSpec& spec, std::uint64_t master_seed,
                                        int parallel) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(spec.out_dir, ec);
  if (ec || !fs::is_directory(spec.out_dir))
    throw std::runtime_error("cannot create output directory " + spec.out_dir.string());

  auto open = [&](const std::string& name) {
    std::ofstream f(spec.out_dir / name, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + (spec.out_dir / name).string());
    return f;
  };

  const int runs = spec.runs > 0 ? spec.runs : spec.base.runs;
  std::vector<PointResult> points;
  for (double v : spec.values) {
    const SimConfig cfg = apply_sweep(spec.base, spec.param, v);
    PointResult pr{v, engine::monte_carlo(cfg, runs, master_seed, parallel)};
    const std::string tag = spec.param + "_" + format_number(v);
    {
      auto f = open("delay_cdf_" + tag + ".csv");
      write_delay_cdf(f, pr.aggregate);
    }
    {
      auto f = open("learned_frac_" + tag + ".csv");
      write_learned_curve(f, pr.aggregate);
    }
    points.push_back(std::move(pr));
  }
  auto f = open("summary.json");
  f << summary_json(spec, master_seed, points).dump(2) << '\n';
  if (!f) throw std::runtime_error("failed writing summary.json");
  return points;
}

}  // namespace mtc::experiment
