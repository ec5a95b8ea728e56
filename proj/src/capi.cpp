#include "pacekit/pacekit.h"

#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <new>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pacekit/benchmark.hpp"
#include "pacekit/errors.hpp"
#include "pacekit/harness.hpp"
#include "pacekit/io.hpp"
#include "pacekit/pacing.hpp"
#include "pacekit/plot.hpp"
#include "pacekit/spendplan.hpp"

struct pk_model {
  pacekit::EpisodicModel model;
};

struct pk_plan {
  pacekit::SpendPlan plan;
  std::vector<pacekit::SpendFunctionEstimate> estimates;
};

struct pk_strategy {
  std::unique_ptr<pacekit::Strategy> impl;
};

struct pk_experiment {
  pacekit::ExperimentConfig config;
  std::string description;
  std::string summary;
};

namespace {

using namespace pacekit;

thread_local std::string last_error;

int set_error(int status, const std::string& message) {
  last_error = message;
  return status;
}

// Runs body and maps exceptions to status codes.
template <typename F>
int guarded(F&& body) noexcept {
  try {
    body();
    last_error.clear();
    return PK_OK;
  } catch (const Error& e) {
    return set_error(static_cast<int>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(PK_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(PK_ERR_INTERNAL, e.what());
  }
}

void write_csv(const char* path, auto&& writer) {
  if (path == nullptr) return;
  std::ostringstream out;
  writer(out);
  write_text_file(path, out.str());
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

std::string summarize_by_algorithm(const std::vector<RunRecord>& runs) {
  std::map<std::pair<std::string, Algorithm>, std::vector<double>> ratios;
  std::size_t errors = 0;
  std::size_t overdrafts = 0;
  for (const auto& r : runs) {
    if (!r.error.empty()) ++errors;
    for (const auto& a : r.results) {
      ratios[{r.dataset, a.algorithm}].push_back(a.ratio);
      if (a.overdraft) ++overdrafts;
    }
  }
  std::ostringstream out;
  out << "dataset                  algorithm          runs  median_ratio  mean_ratio\n";
  for (const auto& [key, xs] : ratios) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    char line[160];
    std::snprintf(line, sizeof line, "%-24s %-18s %4zu  %12s  %10s\n", key.first.c_str(),
                  std::string(algorithm_name(key.second)).c_str(), xs.size(),
                  fmt(median(xs)).c_str(), fmt(mean).c_str());
    out << line;
  }
  out << "failed runs: " << errors << ", overdrafts: " << overdrafts << '\n';
  return out.str();
}

}  // namespace

extern "C" {

const char* pk_version(void) { return "1.0.0"; }

const char* pk_last_error(void) { return last_error.c_str(); }

const char* pk_status_name(int status) {
  if (status == PK_OK) return "Ok";
  if (status == PK_ERR_NULL_ARGUMENT) return "NullArgument";
  if (status == PK_ERR_INTERNAL) return "Internal";
  if (status >= PK_ERR_INVALID_ARGUMENT && status <= PK_ERR_PARSE) {
    return error_code_name(static_cast<ErrorCode>(status)).data();
  }
  return "Unknown";
}

int pk_model_dataset(const char* name, uint64_t seed, size_t episodes, size_t horizon,
                     pk_model** out) {
  if (name == nullptr || out == nullptr) return set_error(PK_ERR_NULL_ARGUMENT, "NULL argument");
  return guarded([&] { *out = new pk_model{make_table1_dataset(name, seed, episodes, horizon)}; });
}

int pk_model_dataset_with(const pk_experiment* settings, const char* name, pk_model** out) {
  if (name == nullptr || out == nullptr) return set_error(PK_ERR_NULL_ARGUMENT, "NULL argument");
  return guarded([&] {
    const ExperimentConfig config = settings ? settings->config : ExperimentConfig{};
    *out = new pk_model{
        make_table1_dataset(name, config.seed, config.episodes, config.horizon, config.ranges)};
  });
}

int pk_model_example1(size_t horizon, int high, pk_model** out) {
  if (out == nullptr) return set_error(PK_ERR_NULL_ARGUMENT, "NULL argument");
  return guarded([&] {
    auto inst = make_example1_instance(horizon);
    *out = new pk_model{high ? std::move(inst.high) : std::move(inst.low)};
  });
}

int pk_model_lemma2(size_t tau, double p_high, double v_low, double v_high, pk_model** out) {
  if (out == nullptr) return set_error(PK_ERR_NULL_ARGUMENT, "NULL argument");
  return guarded([&] { *out = new pk_model{make_lemma2_instance(tau, p_high, v_low, v_high).model}; });
}

int pk_model_load(const char* path, pk_model** out) {
  if (path == nullptr || out == nullptr) return set_error(PK_ERR_NULL_ARGUMENT, "NULL argument");
  return guarded([&] { *out = new pk_model{model_from_json(read_text_file(path))}; });
}

int pk_model_save(const pk_model* model, const char* path) {
  if (model == nullptr || path == nullptr) return set_error(PK_ERR_NULL_ARGUMENT, "NULL argument");
  return guarded([&] { write_text_file(path, model_to_json(model->model)); });
}

int pk_model_info(const pk_model* model, size_t* episodes, size_t* tau, double* value_bound) {
  if (model == nullptr) return set_error(PK_ERR_NULL_ARGUMENT, "NULL argument");
  return guarded([&] {
    if (episodes) *episodes = model->model.episodes();
    if (tau) *tau = model->model.tau();
    if (value_bound) *value_bound = model->model.value_bound();
  });
}

int pk_model_buy_all(const pk_model* model, uint64_t seed, size_t seeds, double* out) {
  if (model == nullptr || out == nullptr) return set_error(PK_ERR_NULL_ARGUMENT, "NULL argument");
  return guarded([&] { *out = compute_buy_all_budget(model->model, seed, seeds); });
}

int pk_model_from_experiment(const pk_experiment* settings, pk_model** out) {
  if (settings == nullptr || out == nullptr) return set_error(PK_ERR_NULL_ARGUMENT, "NULL argument");
  return guarded([&] {
    const auto& config = settings->config;
    require(!config.model_file.empty() || config.dataset != "all", ErrorCode::invalid_config,
            "a single dataset or a model file is required here");
    *out = new pk_model{resolve_model(config, config.dataset)};
  });
}

void pk_model_free(pk_model* model) { delete model; }

int pk_plan_estimate(const pk_model* model, const pk_experiment* settings, double budget,
                     pk_plan** out) {
  if (model == nullptr || settings == nullptr || out == nullptr) {
    return set_error(PK_ERR_NULL_ARGUMENT, "NULL argument");
  }
  return guarded([&] {
    const auto& config = settings->config;
    const auto samples = sample_episodes(model->model, config.samples,
                                         RandomStream(config.seed, streams::training).split(0));
    auto planned = plan_from_samples(config, samples, budget, model->model.horizon());
    *out = new pk_plan{std::move(planned.normalized), std::move(planned.estimates)};
  });
}

int pk_plan_exact(const pk_model* model, double budget, pk_plan** out) {
  if (model == nullptr || out == nullptr) return set_error(PK_ERR_NULL_ARGUMENT, "NULL argument");
  return guarded([&] {
    const SpendRates rates = true_optimal_spend_rates(model->model, budget);
    SpendPlan plan;
    plan.rho = rates.rho;
    plan.mu_hat = rates.mu_star;
    plan.budget = budget;
    plan.horizon = model->model.horizon();
    plan.provenance = "exact";
    *out = new pk_plan{normalize_plan(plan, 0.0), {}};
  });
}

int pk_plan_load(const char* path, pk_plan** out) {
  if (path == nullptr || out == nullptr) return set_error(PK_ERR_NULL_ARGUMENT, "NULL argument");
  return guarded([&] { *out = new pk_plan{plan_from_json(read_text_file(path)), {}}; });
}

int pk_plan_save(const pk_plan* plan, const char* path) {
  if (plan == nullptr || path == nullptr) return set_error(PK_ERR_NULL_ARGUMENT, "NULL argument");
  return guarded([&] { write_text_file(path, plan_to_json(plan->plan)); });
}

int pk_plan_write_estimates(const pk_plan* plan, const char* path) {
  if (plan == nullptr || path == nullptr) return set_error(PK_ERR_NULL_ARGUMENT, "NULL argument");
  return guarded([&] {
    require(!plan->estimates.empty(), ErrorCode::empty_table, "plan carries no estimates");
    write_csv(path, [&](std::ostream& o) { write_estimates_csv(o, plan->estimates); });
  });
}

int pk_plan_get(const pk_plan* plan, double* rho, size_t capacity, size_t* episodes,
                double* mu_hat, double* delta_used, double* budget, size_t* horizon) {
  if (plan == nullptr) return set_error(PK_ERR_NULL_ARGUMENT, "NULL argument");
  return guarded([&] {
    const auto& p = plan->plan;
    if (rho) {
      for (size_t i = 0; i < capacity && i < p.rho.size(); ++i) rho[i] = p.rho[i];
    }
    if (episodes) *episodes = p.rho.size();
    if (mu_hat) *mu_hat = p.mu_hat;
    if (delta_used) *delta_used = p.delta_used;
    if (budget) *budget = p.budget;
    if (horizon) *horizon = p.horizon;
  });
}

void pk_plan_free(pk_plan* plan) { delete plan; }

int pk_strategy_pacer(const pk_plan* plan, double value_bound, double eta, double mu_bar,
                      pk_strategy** out) {
  if (plan == nullptr || out == nullptr) return set_error(PK_ERR_NULL_ARGUMENT, "NULL argument");
  return guarded([&] {
    *out = new pk_strategy{
        std::make_unique<EpisodicPacer>(make_pacer_config(plan->plan, value_bound, eta, mu_bar))};
  });
}

int pk_strategy_fixed_rate(double budget, size_t horizon, double eta, double mu_bar,
                           pk_strategy** out) {
  if (out == nullptr) return set_error(PK_ERR_NULL_ARGUMENT, "NULL argument");
  return guarded([&] { *out = new pk_strategy{fixed_rate_pacer(budget, horizon, eta, mu_bar)}; });
}

int pk_strategy_truthful(double budget, pk_strategy** out) {
  if (out == nullptr) return set_error(PK_ERR_NULL_ARGUMENT, "NULL argument");
  return guarded([&] { *out = new pk_strategy{truthful_strategy(budget)}; });
}

int pk_strategy_fixed_multiplier(double beta, double budget, pk_strategy** out) {
  if (out == nullptr) return set_error(PK_ERR_NULL_ARGUMENT, "NULL argument");
  return guarded([&] { *out = new pk_strategy{fixed_multiplier_strategy(beta, budget)}; });
}

int pk_strategy_bid(pk_strategy* strategy, double value, double* bid) {
  if (strategy == nullptr || bid == nullptr) return set_error(PK_ERR_NULL_ARGUMENT, "NULL argument");
  return guarded([&] { *bid = strategy->impl->bid(value); });
}

int pk_strategy_observe(pk_strategy* strategy, double expenditure) {
  if (strategy == nullptr) return set_error(PK_ERR_NULL_ARGUMENT, "NULL argument");
  return guarded([&] { strategy->impl->observe(expenditure); });
}

int pk_strategy_state(const pk_strategy* strategy, double* mu, double* remaining,
                      size_t* episode) {
  if (strategy == nullptr) return set_error(PK_ERR_NULL_ARGUMENT, "NULL argument");
  return guarded([&] {
    if (mu) *mu = strategy->impl->shading();
    if (remaining) *remaining = strategy->impl->remaining_budget();
    if (episode) *episode = strategy->impl->episode();
  });
}

void pk_strategy_free(pk_strategy* strategy) { delete strategy; }

int pk_run_pacing(const pk_model* model, const pk_plan* plan, const pk_experiment* settings,
                  uint64_t seed,
                  const char* trace_csv, double* utility, double* spend, double* hindsight) {
  if (model == nullptr || plan == nullptr) return set_error(PK_ERR_NULL_ARGUMENT, "NULL argument");
  return guarded([&] {
    require(plan->plan.normalized, ErrorCode::invalid_argument, "pacing needs a normalized plan");
    require(plan->plan.horizon == model->model.horizon() &&
                plan->plan.episodes() == model->model.episodes(),
            ErrorCode::invalid_argument, "plan and model disagree on T or E");
    RandomStream rng = RandomStream(seed, streams::evaluation).split(0);
    const Realization r = draw_realization(model->model, rng);
    const double eta = settings ? settings->config.eta : 0.0;
    const double mu_bar = settings ? settings->config.mu_bar : 0.0;
    const bool warm = settings ? settings->config.warm_start : ExperimentConfig{}.warm_start;
    EpisodicPacer pacer(make_pacer_config(plan->plan, model->model.value_bound(), eta, mu_bar,
                                          warm ? plan->plan.mu_hat : 0.0));
    const Outcome out = run_strategy(pacer, r, plan->plan.budget, trace_csv != nullptr);
    write_csv(trace_csv, [&](std::ostream& o) { write_trace_csv(o, out.trace); });
    if (utility) *utility = out.utility;
    if (spend) *spend = out.spend;
    if (hindsight) *hindsight = hindsight_value(r, plan->plan.budget).value;
  });
}

int pk_experiment_new(pk_experiment** out) {
  if (out == nullptr) return set_error(PK_ERR_NULL_ARGUMENT, "NULL argument");
  return guarded([&] { *out = new pk_experiment{}; });
}

int pk_experiment_load(pk_experiment* experiment, const char* path) {
  if (experiment == nullptr || path == nullptr) {
    return set_error(PK_ERR_NULL_ARGUMENT, "NULL argument");
  }
  return guarded([&] {
    std::string text;
    try {
      text = read_text_file(path);
    } catch (const Error& e) {
      throw Error(ErrorCode::invalid_config, e.what());
    }
    experiment->config = experiment_from_ini(text);
  });
}

int pk_experiment_set(pk_experiment* experiment, const char* key, const char* value) {
  if (experiment == nullptr || key == nullptr || value == nullptr) {
    return set_error(PK_ERR_NULL_ARGUMENT, "NULL argument");
  }
  return guarded([&] { apply_setting(experiment->config, key, value); });
}

int pk_experiment_validate(const pk_experiment* experiment) {
  if (experiment == nullptr) return set_error(PK_ERR_NULL_ARGUMENT, "NULL argument");
  return guarded([&] { experiment->config.validate(); });
}

int pk_experiment_budget(const pk_experiment* experiment, const pk_model* model, double* out) {
  if (experiment == nullptr || model == nullptr || out == nullptr) {
    return set_error(PK_ERR_NULL_ARGUMENT, "NULL argument");
  }
  return guarded([&] {
    const auto& config = experiment->config;
    *out = config.budget ? *config.budget
                         : draw_budget_frac(config, 0) *
                               compute_buy_all_budget(model->model, config.seed,
                                                      config.buy_all_seeds);
  });
}

const char* pk_experiment_describe(pk_experiment* experiment) {
  if (experiment == nullptr) return "";
  experiment->description = experiment_to_ini(experiment->config);
  return experiment->description.c_str();
}

int pk_experiment_run_compare(pk_experiment* experiment, const char* csv_path,
                              const char* runs_csv_path, const char* plot_path) {
  if (experiment == nullptr) return set_error(PK_ERR_NULL_ARGUMENT, "NULL argument");
  return guarded([&] {
    const auto runs = compare_algorithms(experiment->config);
    write_csv(csv_path, [&](std::ostream& o) { write_compare_csv(o, runs); });
    write_csv(runs_csv_path, [&](std::ostream& o) { write_runs_csv(o, runs); });
    if (plot_path) emit_plot(compare_plot(runs), plot_path);
    experiment->summary = summarize_by_algorithm(runs);
  });
}

int pk_experiment_run_sweep(pk_experiment* experiment, const char* csv_path,
                            const char* plot_path) {
  if (experiment == nullptr) return set_error(PK_ERR_NULL_ARGUMENT, "NULL argument");
  return guarded([&] {
    const auto& config = experiment->config;
    const SweepResult result = sweep_samples(config, config.n_grid);
    write_csv(csv_path, [&](std::ostream& o) { write_sweep_csv(o, result.rows); });
    if (plot_path) emit_plot(sweep_plot(result.rows), plot_path);
    std::ostringstream s;
    s << "       n  budget_frac  mean_ratio  stderr  runs\n";
    for (const auto& row : result.rows) {
      char line[128];
      std::snprintf(line, sizeof line, "%8zu  %11s  %10s  %6s  %4zu\n", row.n,
                    fmt(row.budget_frac).c_str(), fmt(row.mean).c_str(),
                    fmt(row.std_error).c_str(), row.runs);
      s << line;
    }
    experiment->summary = s.str();
  });
}

int pk_experiment_run_slow_moving(pk_experiment* experiment, const char* csv_path) {
  if (experiment == nullptr) return set_error(PK_ERR_NULL_ARGUMENT, "NULL argument");
  return guarded([&] {
    const auto& config = experiment->config;
    const SlowMovingModel model = make_drift_model(config);
    const auto cmp = compare_slow_moving(config, model);
    std::vector<RunRecord> all = cmp.coarse;
    all.insert(all.end(), cmp.fine.begin(), cmp.fine.end());
    write_csv(csv_path, [&](std::ostream& o) { write_runs_csv(o, all); });

    std::vector<double> coarse;
    std::vector<double> fine;
    std::size_t wins = 0;
    std::size_t paired = 0;
    for (std::size_t i = 0; i < cmp.coarse.size(); ++i) {
      const auto* a = cmp.coarse[i].find(Algorithm::changing_spend);
      const auto* b = cmp.fine[i].find(Algorithm::changing_spend);
      if (a == nullptr || b == nullptr) continue;
      coarse.push_back(a->ratio);
      fine.push_back(b->ratio);
      ++paired;
      if (b->ratio > a->ratio) ++wins;
    }
    std::ostringstream s;
    s << "declared zeta " << fmt(model.declared_zeta()) << ", theta "
      << fmt(model.declared_theta()) << '\n';
    if (paired > 0) {
      s << "median changing_spend ratio, 1 bucket: " << fmt(median(coarse)) << '\n'
        << "median changing_spend ratio, " << config.bucket_episodes
        << " buckets: " << fmt(median(fine)) << '\n'
        << "bucketed run ahead in " << wins << " of " << paired << " paired seeds\n";
    } else {
      s << "no successful paired runs\n";
    }
    experiment->summary = s.str();
  });
}

int pk_experiment_run_scenario(pk_experiment* experiment, const char* scenario,
                               const char* csv_path) {
  if (experiment == nullptr || scenario == nullptr) {
    return set_error(PK_ERR_NULL_ARGUMENT, "NULL argument");
  }
  return guarded([&] {
    const std::string name = scenario;
    std::vector<RunRecord> runs;
    std::ostringstream extra;
    if (name == "example1") {
      runs = run_example1(experiment->config);
    } else if (name == "lemma2") {
      constexpr double p_high = 1.0;
      constexpr double v_low = 1.0;
      constexpr double v_high = 2.0;
      runs = run_lemma2(experiment->config, p_high, v_low, v_high);
      const double bound =
          0.5 * static_cast<double>(experiment->config.horizon) * v_high - 2.0 * v_low;
      std::size_t hits = 0;
      std::size_t total = 0;
      for (const auto& r : runs) {
        if (const auto* a = r.find(Algorithm::fixed_multiplier)) {
          ++total;
          if (r.hindsight - a->utility >= bound - 1e-9) ++hits;
        }
      }
      extra << "fixed_multiplier regret >= " << fmt(bound) << " in " << hits << " of " << total
            << " runs\n";
    } else {
      throw Error(ErrorCode::invalid_config, "unknown scenario '" + name + "'");
    }
    write_csv(csv_path, [&](std::ostream& o) { write_runs_csv(o, runs); });
    experiment->summary = summarize_by_algorithm(runs) + extra.str();
  });
}

const char* pk_experiment_summary(const pk_experiment* experiment) {
  return experiment ? experiment->summary.c_str() : "";
}

void pk_experiment_free(pk_experiment* experiment) { delete experiment; }

}  // extern "C"
