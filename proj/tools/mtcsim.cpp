// mtcsim: analytic queries, Monte Carlo sweeps and config validation for the
// learned preamble-reallocation RACH simulator.
//
// Exit codes: 0 success, 1 usage/config error, 2 runtime failure.

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mtc/analytics.hpp"
#include "mtc/config.hpp"
#include "mtc/experiment.hpp"

namespace {

namespace an = mtc::analytics;
using mtc::experiment::format_number;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string delay_text(an::DelaySlots d, std::optional<double> slot_ms) {
  if (d.is_infinite()) return "inf slots";
  std::string s = format_number(d.value()) + " slots";
  if (slot_ms) s += " = " + format_number(d.to_ms(*slot_ms)) + " ms";
  return s;
}

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError(path + ": parse error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

// Registers the analytics subcommands; each stores its evaluation in `action`.
void add_analytics(CLI::App& parent, std::function<void()>& action) {
  auto* app = parent.add_subcommand("analytics", "Evaluate a closed-form quantity");
  app->require_subcommand(0, 1);
  app->allow_extras();
  app->callback([app] {
    const auto extra = app->remaining();
    if (!app->get_subcommands().empty()) {
      if (extra.empty()) return;
      throw UsageError("unexpected argument '" + extra.front() + "'");
    }
    throw UsageError(extra.empty() ? "analytics needs a formula name (see --help)"
                                   : "unknown formula '" + extra.front() + "'");
  });

  struct Args {
    long long n = 0, t_min = 0;
    int p_c = 0, p_f = 0, n_a = 0, beta = 0, alpha = 0, m = 0, n_t = 0, b = 0;
    double n_p = 0, p = 0, n_e = 0, a = 0, c = 0.5, r_d = 0, r_c = 0, r_d_eff = 0, t = 0,
           area = 0, e_beta = 0, d_th_slots = 0, d_th_ms = 0;
    std::optional<double> slot_ms;
  };
  auto args = std::make_shared<Args>();
  auto slot = [args](CLI::App* s) {
    s->add_option("--slot-ms", args->slot_ms, "slot duration in ms for unit conversion");
  };

  auto* cmd = app->add_subcommand("min-period", "T_min = ceil(N / p_f)");
  cmd->add_option("--n", args->n)->required();
  cmd->add_option("--p-f", args->p_f)->required();
  cmd->callback([&action, args] {
    action = [args] { std::cout << "T_min = " << an::min_period(args->n, args->p_f) << " slots\n"; };
  });

  cmd = app->add_subcommand("periodic-success", "contention success probability of periodic traffic");
  cmd->add_option("--p-c", args->p_c)->required();
  cmd->add_option("--n-p", args->n_p)->required();
  cmd->callback([&action, args] {
    action = [args] {
      std::cout << "p_ps = " << format_number(an::periodic_success_prob(args->p_c, args->n_p)) << '\n';
    };
  });

  cmd = app->add_subcommand("critical-success", "contention success probability of critical traffic");
  cmd->add_option("--p-c", args->p_c)->required();
  cmd->add_option("--n-a", args->n_a)->required();
  cmd->callback([&action, args] {
    action = [args] {
      std::cout << "p_as = " << format_number(an::critical_success_prob(args->p_c, args->n_a)) << '\n';
    };
  });

  cmd = app->add_subcommand("contention-delay", "D_c in slots");
  cmd->add_option("--p-c", args->p_c)->required();
  cmd->add_option("--n-a", args->n_a)->required();
  slot(cmd);
  cmd->callback([&action, args] {
    action = [args] {
      std::cout << "D_c = " << delay_text(an::contention_delay(args->p_c, args->n_a), args->slot_ms) << '\n';
    };
  });

  cmd = app->add_subcommand("contention-free-delay", "D_f in slots");
  cmd->add_option("--t-min", args->t_min)->required();
  slot(cmd);
  cmd->callback([&action, args] {
    action = [args] {
      std::cout << "D_f = " << delay_text(an::contention_free_delay(args->t_min), args->slot_ms) << '\n';
    };
  });

  cmd = app->add_subcommand("post-learning-delay", "D' after reallocating beta preambles");
  cmd->add_option("--p-c", args->p_c)->required();
  cmd->add_option("--p-f", args->p_f)->required();
  cmd->add_option("--beta", args->beta)->required();
  cmd->add_option("--n", args->n)->required();
  cmd->add_option("--n-a", args->n_a)->required();
  slot(cmd);
  cmd->callback([&action, args] {
    action = [args] {
      const auto split = an::PreambleSplit::from_counts(args->p_c, args->p_f);
      std::cout << "D' = "
                << delay_text(an::post_learning_delay(split, args->beta, args->n, args->n_a), args->slot_ms)
                << '\n';
    };
  });

  cmd = app->add_subcommand("realloc", "beta meeting a delay threshold");
  cmd->add_option("--p-c", args->p_c)->required();
  cmd->add_option("--n-a", args->n_a)->required();
  auto* ms_opt = cmd->add_option("--d-th-ms", args->d_th_ms, "threshold in ms (needs --slot-ms)");
  auto* sl_opt = cmd->add_option("--d-th-slots", args->d_th_slots, "threshold in slots");
  ms_opt->excludes(sl_opt);
  slot(cmd);
  cmd->callback([&action, args, ms_opt, sl_opt] {
    if (!ms_opt->count() && !sl_opt->count()) throw UsageError("realloc needs --d-th-ms or --d-th-slots");
    const bool in_ms = ms_opt->count() > 0;
    if (in_ms && !args->slot_ms) throw UsageError("--d-th-ms needs --slot-ms");
    action = [args, in_ms] {
      const an::DelaySlots th = in_ms ? an::DelaySlots::from_ms(args->d_th_ms, *args->slot_ms)
                                      : an::DelaySlots(args->d_th_slots);
      std::cout << "beta = " << an::reallocation_count(args->p_c, args->n_a, th) << '\n';
    };
  });

  cmd = app->add_subcommand("run-probability", "probability of an alpha-run within n_e observations");
  cmd->add_option("--n-e", args->n_e)->required();
  cmd->add_option("--alpha", args->alpha)->required();
  cmd->add_option("--p", args->p)->required();
  cmd->callback([&action, args] {
    action = [args] {
      std::cout << "Pr = "
                << format_number(an::run_probability(static_cast<std::int64_t>(args->n_e), args->alpha, args->p))
                << '\n';
    };
  });

  cmd = app->add_subcommand("expected-return-time", "expected observations until an alpha-run");
  cmd->add_option("--alpha", args->alpha)->required();
  cmd->add_option("--p", args->p)->required();
  cmd->callback([&action, args] {
    action = [args] {
      std::cout << "E[n] = " << format_number(an::expected_return_time(args->alpha, args->p))
                << " observations\n";
    };
  });

  cmd = app->add_subcommand("revert-probability", "sigmoid probability of returning to phase 1");
  cmd->add_option("--n-e", args->n_e)->required();
  cmd->add_option("--a", args->a)->required();
  cmd->add_option("--c", args->c);
  cmd->callback([&action, args] {
    action = [args] {
      std::cout << "p_b = " << format_number(an::revert_probability(args->n_e, args->a, args->c)) << '\n';
    };
  });

  cmd = app->add_subcommand("effective-radius", "r_d' = r_d + (m - 2) r_c");
  cmd->add_option("--r-d", args->r_d)->required();
  cmd->add_option("--m", args->m)->required();
  cmd->add_option("--r-c", args->r_c)->required();
  cmd->callback([&action, args] {
    action = [args] {
      std::cout << "r_d' = " << format_number(an::effective_detection_radius(args->r_d, args->m, args->r_c))
                << " m\n";
    };
  });

  cmd = app->add_subcommand("learned-count", "expected correctly-learned transmitters per slot");
  cmd->add_option("--t", args->t)->required();
  cmd->add_option("--r-c", args->r_c)->required();
  cmd->add_option("--r-d-eff", args->r_d_eff)->required();
  cmd->add_option("--p-f", args->p_f)->required();
  cmd->add_option("--area", args->area)->required();
  cmd->callback([&action, args] {
    action = [args] {
      std::cout << "n_t = "
                << format_number(an::learned_count(args->t, args->r_c, args->r_d_eff, args->p_f, args->area))
                << '\n';
    };
  });

  cmd = app->add_subcommand("realloc-pmf", "Pr(beta_t = b)");
  cmd->add_option("--n-t", args->n_t)->required();
  cmd->add_option("--p-f", args->p_f)->required();
  cmd->add_option("--beta", args->beta)->required();
  cmd->add_option("--b", args->b)->required();
  cmd->callback([&action, args] {
    action = [args] {
      std::cout << "Pr = " << format_number(an::realloc_pmf(args->n_t, args->p_f, args->beta, args->b)) << '\n';
    };
  });

  cmd = app->add_subcommand("expected-realloc", "E[beta_t]");
  cmd->add_option("--n-t", args->n_t)->required();
  cmd->add_option("--p-f", args->p_f)->required();
  cmd->add_option("--beta", args->beta)->required();
  cmd->callback([&action, args] {
    action = [args] {
      std::cout << "E[beta_t] = " << format_number(an::expected_realloc(args->n_t, args->p_f, args->beta))
                << '\n';
    };
  });

  cmd = app->add_subcommand("lowest-delay", "lowest expected delay given E[beta_t]");
  cmd->add_option("--p-c", args->p_c)->required();
  cmd->add_option("--e-beta", args->e_beta)->required();
  cmd->add_option("--n-a", args->n_a)->required();
  slot(cmd);
  cmd->callback([&action, args] {
    action = [args] {
      std::cout << "D = "
                << delay_text(an::lowest_expected_delay(args->p_c, args->e_beta, args->n_a), args->slot_ms)
                << '\n';
    };
  });

  // Only the formula name itself may be an extra.
  for (auto* sub : app->get_subcommands([](CLI::App*) { return true; })) sub->allow_extras(false);
}

int cmd_validate(const std::string& path) {
  const nlohmann::json j = load_json(path);
  std::vector<std::pair<std::string, mtc::SimConfig>> configs;
  if (j.is_object() && j.contains("sweep")) {
    const auto spec = mtc::experiment::spec_from_json(j);
    for (double v : spec.values)
      configs.emplace_back(spec.param + "=" + format_number(v),
                           mtc::experiment::apply_sweep(spec.base, spec.param, v));
  } else {
    configs.emplace_back("config", mtc::config_from_json(j));
  }

  bool all_ok = true;
  for (const auto& [label, cfg] : configs) {
    for (const auto& r : mtc::check_rules(cfg)) {
      std::cout << (r.ok ? "pass " : "FAIL ") << label << ' ' << r.rule;
      if (!r.ok) std::cout << ": " << r.detail;
      std::cout << '\n';
      all_ok = all_ok && r.ok;
    }
  }
  std::cout << (all_ok ? "valid\n" : "invalid\n");
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learned preamble-reallocation RACH simulator"};
  app.require_subcommand(1);

  std::function<void()> analytics_action;
  add_analytics(app, analytics_action);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> runs;
  int parallel = 1;

  auto* simulate = app.add_subcommand("simulate", "Run a Monte Carlo sweep and write CSV + summary.json");
  simulate->add_option("--config", config_path, "experiment JSON")->required();
  simulate->add_option("--out", out_dir, "output directory (overrides the experiment's 'out')");
  simulate->add_option("--seed", seed, "master seed (overrides base.master_seed)");
  simulate->add_option("--runs", runs, "runs per sweep point")->check(CLI::PositiveNumber);
  simulate->add_option("--parallel", parallel, "worker threads")->check(CLI::PositiveNumber);

  auto* validate = app.add_subcommand("validate", "Check a config or experiment file");
  validate->add_option("--config", config_path, "config or experiment JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (analytics_action) {
      // Buffer so a failed evaluation prints only its diagnostic.
      std::ostringstream buffer;
      auto* saved = std::cout.rdbuf(buffer.rdbuf());
      try {
        analytics_action();
      } catch (...) {
        std::cout.rdbuf(saved);
        throw;
      }
      std::cout.rdbuf(saved);
      std::cout << buffer.str();
      return 0;
    }
    if (validate->parsed()) return cmd_validate(config_path);
    if (simulate->parsed()) {
      auto spec = mtc::experiment::spec_from_json(load_json(config_path));
      if (out_dir) spec.out_dir = *out_dir;
      if (runs) spec.runs = *runs;
      const std::uint64_t master = seed.value_or(spec.base.master_seed);
      spec.base.master_seed = master;
      if (const auto problems = mtc::experiment::sweep_problems(spec); !problems.empty()) {
        for (const auto& p : problems) std::cerr << "invalid sweep value " << p << '\n';
        return 1;
      }
      const auto points = mtc::experiment::run_experiment(spec, master, parallel);
      for (const auto& p : points)
        std::cout << spec.param << '=' << format_number(p.value)
                  << " satisfaction=" << format_number(p.aggregate.threshold_satisfaction())
                  << " mean_delay_ms=" << format_number(p.aggregate.mean_delay_ms())
                  << " peak_learned_pct=" << format_number(p.aggregate.peak_learned_pct()) << '\n';
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
