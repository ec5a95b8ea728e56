#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pacekit/pacekit.h"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Setting {
  const char* flag;
  const char* key;
  const char* help;
};

constexpr Setting kSettings[] = {
    {"--dataset", "dataset", "dataset name, or 'all' for compare"},
    {"--model-file", "model_file", "episodic model JSON, replaces --dataset"},
    {"--ranges-file", "ranges_file", "INI file with dataset parameter ranges"},
    {"--seed", "seed", "root seed"},
    {"-T,--horizon", "horizon", "rounds per campaign"},
    {"-E,--episodes", "episodes", "episodes per campaign"},
    {"-n,--samples", "samples", "training samples per episode"},
    {"--budget-frac", "budget_frac", "fixed budget as a fraction of buy-all spend"},
    {"--budget-frac-lo", "budget_frac_lo", "lower end of the drawn budget fraction"},
    {"--budget-frac-hi", "budget_frac_hi", "upper end of the drawn budget fraction"},
    {"--budget", "budget", "absolute budget, 'none' to draw it"},
    {"--algorithms", "algorithms", "comma-separated algorithm list"},
    {"--repetitions", "repetitions", "paired runs per dataset"},
    {"--kernel", "kernel", "gaussian, exponential or uniform"},
    {"--bandwidth-rule", "bandwidth_rule", "scaled or unit"},
    {"--bandwidth", "bandwidth", "fixed bandwidth, 'auto' for the rule"},
    {"--eta", "eta", "pacer step size, 0 for the default"},
    {"--mu-bar", "mu_bar", "shading cap, 0 for the default"},
    {"--beta", "beta", "fixed multiplier, 0 for the default"},
    {"--warm-start", "warm_start", "start changing_spend at the estimated shading (true/false)"},
    {"--delta-mode", "delta_mode", "theory, zero or fixed"},
    {"--delta", "delta", "delta for --delta-mode fixed"},
    {"--delta-c", "delta_c", "constant in the stochastic-price delta"},
    {"--confidence", "confidence", "failure probability in the fixed-price delta"},
    {"--buy-all-seeds", "buy_all_seeds", "draws averaged for buy-all spend"},
    {"--n-grid", "n_grid", "comma-separated sample sizes for sweep-samples"},
    {"--budget-fracs", "budget_fracs", "comma-separated budget fractions for sweep-samples"},
    {"--drift", "drift", "slow-moving model: declining or dataset"},
    {"--bucket-episodes", "bucket_episodes", "bucket count for slow-moving"},
    {"--threads", "threads", "worker threads"},
};

int exit_code(int status) {
  switch (status) {
    case PK_ERR_INVALID_CONFIG:
    case PK_ERR_PARSE:
    case PK_ERR_UNKNOWN_DATASET:
      return kExitConfig;
    default:
      return kExitRuntime;
  }
}

int fail(int status) {
  std::fprintf(stderr, "pacekit: %s: %s\n", pk_status_name(status), pk_last_error());
  return exit_code(status);
}

const char* opt(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

// Values collected from the command line before they reach the C API.
struct Flags {
  std::string config;
  std::map<std::string, std::string> values;
  std::map<const CLI::App*, std::vector<std::pair<CLI::Option*, const char*>>> options;
  std::vector<std::string> overrides;
  bool show_config = false;
};

void add_settings(CLI::App* cmd, Flags& flags) {
  cmd->add_option("-c,--config", flags.config, "experiment config file (INI)");
  for (const auto& s : kSettings) {
    flags.options[cmd].emplace_back(cmd->add_option(s.flag, flags.values[s.key], s.help), s.key);
  }
  cmd->add_option("--set", flags.overrides, "extra key=value setting")->take_all();
  cmd->add_flag("--show-config", flags.show_config, "print the effective settings");
}

// Loads the config file, then applies flags on top of it.
int build_experiment(CLI::App* cmd, const Flags& flags, pk_experiment** out) {
  pk_experiment* exp = nullptr;
  if (int st = pk_experiment_new(&exp)) return fail(st);
  auto finish = [&](int code) {
    pk_experiment_free(exp);
    return code;
  };
  if (!flags.config.empty()) {
    if (int st = pk_experiment_load(exp, flags.config.c_str())) return finish(fail(st));
  }
  for (const auto& [option, key] : flags.options.at(cmd)) {
    if (option->count() == 0) continue;
    if (int st = pk_experiment_set(exp, key, flags.values.at(key).c_str())) {
      return finish(fail(st));
    }
  }
  for (const auto& kv : flags.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "pacekit: --set expects key=value, got '%s'\n", kv.c_str());
      return finish(kExitConfig);
    }
    const std::string key = kv.substr(0, eq);
    if (int st = pk_experiment_set(exp, key.c_str(), kv.c_str() + eq + 1)) return finish(fail(st));
  }
  if (int st = pk_experiment_validate(exp)) return finish(fail(st));
  if (flags.show_config) std::fputs(pk_experiment_describe(exp), stdout);
  *out = exp;
  return 0;
}

struct Handles {
  pk_experiment* exp = nullptr;
  pk_model* model = nullptr;
  pk_plan* plan = nullptr;
  ~Handles() {
    pk_plan_free(plan);
    pk_model_free(model);
    pk_experiment_free(exp);
  }
};

int cmd_estimate(CLI::App* cmd, const Flags& flags, const std::string& plan_out,
                 const std::string& estimates_csv, const std::string& model_out) {
  Handles h;
  if (int code = build_experiment(cmd, flags, &h.exp)) return code;
  if (int st = pk_model_from_experiment(h.exp, &h.model)) return fail(st);
  double budget = 0.0;
  if (int st = pk_experiment_budget(h.exp, h.model, &budget)) return fail(st);
  if (int st = pk_plan_estimate(h.model, h.exp, budget, &h.plan)) return fail(st);
  if (int st = pk_plan_save(h.plan, plan_out.c_str())) return fail(st);
  if (!estimates_csv.empty()) {
    if (int st = pk_plan_write_estimates(h.plan, estimates_csv.c_str())) return fail(st);
  }
  if (!model_out.empty()) {
    if (int st = pk_model_save(h.model, model_out.c_str())) return fail(st);
  }
  size_t episodes = 0;
  double mu_hat = 0.0;
  double delta = 0.0;
  pk_plan_get(h.plan, nullptr, 0, &episodes, &mu_hat, &delta, nullptr, nullptr);
  std::vector<double> rho(episodes);
  pk_plan_get(h.plan, rho.data(), rho.size(), nullptr, nullptr, nullptr, nullptr, nullptr);
  std::printf("budget %.6g, mu_hat %.6g, delta %.6g\nrho:", budget, mu_hat, delta);
  for (double r : rho) std::printf(" %.6g", r);
  std::printf("\nplan written to %s\n", plan_out.c_str());
  return 0;
}

int cmd_pace(CLI::App* cmd, const Flags& flags, const std::string& plan_path,
             const std::string& trace_csv, std::uint64_t eval_seed) {
  Handles h;
  if (int code = build_experiment(cmd, flags, &h.exp)) return code;
  if (int st = pk_model_from_experiment(h.exp, &h.model)) return fail(st);
  if (int st = pk_plan_load(plan_path.c_str(), &h.plan)) return fail(st);
  double utility = 0.0;
  double spend = 0.0;
  double hindsight = 0.0;
  if (int st = pk_run_pacing(h.model, h.plan, h.exp, eval_seed, opt(trace_csv), &utility, &spend,
                             &hindsight)) {
    return fail(st);
  }
  const double ratio = hindsight > 0.0 ? utility / hindsight : 1.0;
  std::printf("utility %.6g, spend %.6g, hindsight %.6g, ratio %.4f\n", utility, spend,
              hindsight, ratio);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spend planning and budget pacing for repeated second-price auctions"};
  app.set_version_flag("--version", pk_version());
  app.require_subcommand(1);

  Flags flags;
  std::string out_csv;
  std::string runs_csv;
  std::string plot;
  std::string plan_path = "plan.json";
  std::string estimates_csv;
  std::string model_out;
  std::string trace_csv;
  std::uint64_t eval_seed = 1;
  std::string scenario;

  auto* estimate = app.add_subcommand("estimate", "estimate and normalize a spend plan");
  add_settings(estimate, flags);
  estimate->add_option("-o,--plan-out", plan_path, "plan JSON output")->capture_default_str();
  estimate->add_option("--estimates-csv", estimates_csv, "per-episode spend estimates");
  estimate->add_option("--model-out", model_out, "write the resolved model as JSON");

  auto* pace = app.add_subcommand("pace", "run the pacer for a saved plan on one realization");
  add_settings(pace, flags);
  pace->add_option("-p,--plan", plan_path, "plan JSON from 'estimate'")->capture_default_str();
  pace->add_option("--trace", trace_csv, "per-round trace CSV");
  pace->add_option("--eval-seed", eval_seed, "seed of the evaluation realization")
      ->capture_default_str();

  auto* sweep = app.add_subcommand("sweep-samples", "utility ratio against training set size");
  add_settings(sweep, flags);
  sweep->add_option("-o,--out", out_csv, "aggregated CSV");
  sweep->add_option("--plot", plot, "SVG plot path");

  auto* compare = app.add_subcommand("compare", "paired comparison of bidding algorithms");
  add_settings(compare, flags);
  compare->add_option("-o,--out", out_csv, "dataset,budget_frac,algorithm,ratio CSV");
  compare->add_option("--runs", runs_csv, "full run records CSV");
  compare->add_option("--plot", plot, "SVG plot path");

  auto* scen = app.add_subcommand("scenario", "hand-built instances");
  add_settings(scen, flags);
  scen->add_option("name", scenario, "example1 or lemma2")
      ->required()
      ->check(CLI::IsMember({"example1", "lemma2"}));
  scen->add_option("-o,--out", out_csv, "run records CSV");

  auto* slow = app.add_subcommand("slow-moving", "bucketed pacing on a drifting model");
  add_settings(slow, flags);
  slow->add_option("-o,--out", out_csv, "run records CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (estimate->parsed()) return cmd_estimate(estimate, flags, plan_path, estimates_csv, model_out);
  if (pace->parsed()) return cmd_pace(pace, flags, plan_path, trace_csv, eval_seed);

  CLI::App* cmd = sweep->parsed()     ? sweep
                  : compare->parsed() ? compare
                  : scen->parsed()    ? scen
                                      : slow;
  Handles h;
  if (int code = build_experiment(cmd, flags, &h.exp)) return code;
  int st = PK_OK;
  if (cmd == sweep) {
    st = pk_experiment_run_sweep(h.exp, opt(out_csv), opt(plot));
  } else if (cmd == compare) {
    st = pk_experiment_run_compare(h.exp, opt(out_csv), opt(runs_csv), opt(plot));
  } else if (cmd == scen) {
    st = pk_experiment_run_scenario(h.exp, scenario.c_str(), opt(out_csv));
  } else {
    st = pk_experiment_run_slow_moving(h.exp, opt(out_csv));
  }
  if (st != PK_OK) return fail(st);
  std::fputs(pk_experiment_summary(h.exp), stdout);
  return 0;
}
