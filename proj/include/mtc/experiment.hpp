#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "mtc/config.hpp"
#include "mtc/engine.hpp"

namespace mtc::experiment {

/// A base configuration swept over one parameter.
struct ExperimentSpec {
  SimConfig base;
  std::string param;  // d_th_ms | lambda | p_11 | m
  std::vector<double> values;
  std::filesystem::path out_dir = "out";
  int runs = 0;  // 0: base.runs
};

bool is_sweep_param(const std::string& name);

/// Copy of `base` with the sweep parameter set to `value`. Throws
/// std::invalid_argument for an unknown parameter or a non-integral m.
SimConfig apply_sweep(const SimConfig& base, const std::string& param, double value);

/// Keys: base (object), sweep {param, values}, runs, out. Unknown keys are
/// errors.
ExperimentSpec spec_from_json(const nlohmann::json& j);

/// Offending sweep values with the rule they break; empty when valid.
std::vector<std::string> sweep_problems(const ExperimentSpec& spec);

/// Shortest round-trip decimal for a double, as used in file names and CSV.
std::string format_number(double v);

void write_delay_cdf(std::ostream& os, const engine::Aggregate& agg);
void write_learned_curve(std::ostream& os, const engine::Aggregate& agg);

struct PointResult {
  double value = 0.0;
  engine::Aggregate aggregate;
};

nlohmann::json summary_json(const ExperimentSpec& spec, std::uint64_t master_seed,
                            const std::vector<PointResult>& points);

/// Runs every sweep point and writes the CSV files plus summary.json into
/// spec.out_dir. Throws std::runtime_error when the directory is unwritable.
std::vector<PointResult> run_experiment(const ExperimentSpec& spec, std::uint64_t master_seed,
                                        int parallel);

}  // namespace mtc::experiment
