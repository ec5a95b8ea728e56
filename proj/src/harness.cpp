#include "pacekit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <memory>
#include <mutex>
#include <numeric>
#include <ostream>
#include <thread>

#include "pacekit/errors.hpp"
#include "pacekit/io.hpp"
#include "pacekit/pacing.hpp"

namespace pacekit {
namespace {

constexpr std::string_view kAlgorithmNames[] = {"changing_spend", "fixed_spend_bg19",
                                                 "truthful", "fixed_multiplier"};

// Runs body(i) for i in [0, n) on up to `threads` workers. Each index writes
// only its own output slot, so results do not depend on scheduling.
template <typename F>
void parallel_for(std::size_t n, std::size_t threads, F&& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

double buy_all_spend(const Realization& r) {
  double spend = 0.0;
  for (std::size_t t = 0; t < r.horizon(); ++t) {
    if (r.values[t] >= r.prices[t]) spend += r.prices[t];
  }
  return spend;
}

RandomStream stream_for(const ExperimentConfig& config, std::uint64_t stream,
                        std::size_t repetition) {
  return RandomStream(config.seed, stream).split(repetition);
}

double max_price(std::span<const SampleSet> samples) {
  double p = 0.0;
  for (const auto& s : samples) {
    for (double x : s.prices) p = std::max(p, x);
  }
  return p;
}

std::unique_ptr<Strategy> make_strategy(Algorithm a, const ExperimentConfig& config,
                                        const SpendPlan& normalized, double value_bound,
                                        double beta, double mu_hat) {
  const double budget = normalized.budget;
  switch (a) {
    case Algorithm::changing_spend:
      return std::make_unique<EpisodicPacer>(
          make_pacer_config(normalized, value_bound, config.eta, config.mu_bar,
                            config.warm_start ? mu_hat : 0.0));
    case Algorithm::fixed_spend_bg19: {
      const double flat = budget / static_cast<double>(normalized.horizon);
      const double eta = config.eta > 0.0 ? config.eta : default_step_size(normalized.horizon);
      const double mu_bar =
          config.mu_bar > 0.0 ? config.mu_bar : default_max_shading(value_bound, {flat});
      return fixed_rate_pacer(budget, normalized.horizon, eta, mu_bar);
    }
    case Algorithm::truthful:
      return truthful_strategy(budget);
    case Algorithm::fixed_multiplier:
      return fixed_multiplier_strategy(beta, budget);
  }
  fail(ErrorCode::invalid_argument, "unknown algorithm");
}

// Shared tail of the episodic and slow-moving pipelines.
RunRecord run_pipeline(const ExperimentConfig& config, RunRecord rec,
                       const std::vector<SampleSet>& samples, const Realization& realization,
                       double value_bound) {
  try {
    const PipelinePlan planned = plan_from_samples(config, samples, rec.budget, rec.horizon);
    const SpendPlan& raw = planned.raw;
    const SpendPlan& plan = planned.normalized;
    rec.delta_used = plan.delta_used;
    rec.mu_hat = raw.mu_hat;
    rec.provenance = raw.provenance;
    rec.bracket_failure = raw.bracket_failure;
    rec.plan = plan.rho;
    rec.beta = config.beta > 0.0 ? config.beta : 1.0 / (1.0 + raw.mu_hat);

    rec.realization_hash = realization.hash();
    rec.hindsight = hindsight_value(realization, rec.budget).value;
    rec.hindsight_zero = !(rec.hindsight > 0.0);

    for (Algorithm a : config.algorithms) {
      auto strategy = make_strategy(a, config, plan, value_bound, rec.beta, raw.mu_hat);
      const Outcome out = run_strategy(*strategy, realization, rec.budget);
      AlgorithmResult r;
      r.algorithm = a;
      r.utility = out.utility;
      r.spend = out.spend;
      r.wins = out.wins;
      r.overdraft = out.overdraft;
      r.ratio = rec.hindsight_zero ? 1.0 : out.utility / rec.hindsight;
      rec.results.push_back(r);
    }
  } catch (const Error& e) {
    rec.error = std::string(error_code_name(e.code())) + ": " + e.what();
    rec.results.clear();
  } catch (const std::exception& e) {
    rec.error = std::string("Internal: ") + e.what();
    rec.results.clear();
  }
  return rec;
}

RunRecord base_record(const ExperimentConfig& config, std::string dataset, std::size_t episodes,
                      double buy_all, std::size_t repetition, std::optional<double> budget_frac) {
  RunRecord rec;
  rec.dataset = std::move(dataset);
  rec.seed = config.seed;
  rec.repetition = repetition;
  rec.horizon = config.horizon;
  rec.episodes = episodes;
  rec.samples = config.samples;
  rec.buy_all = buy_all;
  if (config.budget && !budget_frac) {
    rec.budget = *config.budget;
    rec.budget_frac = buy_all > 0.0 ? rec.budget / buy_all : 0.0;
  } else {
    rec.budget_frac = budget_frac ? *budget_frac : draw_budget_frac(config, repetition);
    rec.budget = rec.budget_frac * buy_all;
  }
  return rec;
}

std::vector<std::string> expand_datasets(const ExperimentConfig& config) {
  if (config.dataset == "all") return table1_dataset_names();
  return {config.dataset};
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

PipelinePlan plan_from_samples(const ExperimentConfig& config,
                               std::span<const SampleSet> samples, double budget,
                               std::size_t horizon) {
  SpendRateOptions options;
  options.kernel = config.kernel;
  options.bandwidth_rule = config.bandwidth_rule;
  options.bandwidth = config.bandwidth;
  auto estimate = approx_spend_rate(budget, horizon, samples, options);

  const std::size_t episodes = samples.size();
  const std::size_t n = samples.front().values.size();
  double delta = 0.0;
  switch (config.delta_mode) {
    case DeltaMode::theory:
      delta = estimate.plan.provenance == "fp"
                  ? default_delta_fixed_price(episodes, max_price(samples), n, config.confidence)
                  : default_delta_stochastic_price(episodes, n, config.delta_c);
      break;
    case DeltaMode::zero:
      break;
    case DeltaMode::fixed:
      delta = config.delta_value;
      break;
  }
  PipelinePlan out;
  out.normalized = normalize_plan(estimate.plan, delta);
  out.raw = std::move(estimate.plan);
  out.estimates = std::move(estimate.estimates);
  return out;
}

std::string_view algorithm_name(Algorithm a) noexcept {
  return kAlgorithmNames[static_cast<std::size_t>(a)];
}

Algorithm parse_algorithm(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kAlgorithmNames); ++i) {
    if (kAlgorithmNames[i] == name) return static_cast<Algorithm>(i);
  }
  fail(ErrorCode::invalid_argument, "unknown algorithm '" + std::string(name) + "'");
}

const std::vector<Algorithm>& all_algorithms() {
  static const std::vector<Algorithm> all{Algorithm::changing_spend, Algorithm::fixed_spend_bg19,
                                          Algorithm::truthful, Algorithm::fixed_multiplier};
  return all;
}

std::string_view delta_mode_name(DeltaMode m) noexcept {
  switch (m) {
    case DeltaMode::theory: return "theory";
    case DeltaMode::zero: return "zero";
    case DeltaMode::fixed: return "fixed";
  }
  return "theory";
}

DeltaMode parse_delta_mode(std::string_view name) {
  if (name == "theory") return DeltaMode::theory;
  if (name == "zero") return DeltaMode::zero;
  if (name == "fixed") return DeltaMode::fixed;
  fail(ErrorCode::invalid_argument, "unknown delta mode '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  auto check = [](bool ok, const std::string& msg) { require(ok, ErrorCode::invalid_config, msg); };
  check(schema_version == 1, "unsupported schema_version");
  check(horizon >= 1 && episodes >= 1, "horizon and episodes must be positive");
  check(horizon % episodes == 0, "episodes must divide the horizon");
  check(samples >= 2, "need at least two training samples per episode");
  check(repetitions >= 1, "repetitions must be at least 1");
  check(!algorithms.empty(), "algorithm list is empty");
  if (budget) {
    check(*budget > 0.0 && std::isfinite(*budget), "budget must be positive");
  } else {
    check(budget_frac_lo >= 0.0 && budget_frac_lo <= budget_frac_hi && budget_frac_hi <= 1.5 &&
              budget_frac_hi > 0.0,
          "budget fractions must satisfy 0 <= lo <= hi <= 1.5 with hi > 0");
  }
  for (double f : budget_fracs) check(f > 0.0 && f <= 1.5, "budget_fracs must lie in (0, 1.5]");
  for (std::size_t n : n_grid) check(n >= 2, "n_grid entries must be at least 2");
  check(!bandwidth || *bandwidth > 0.0, "bandwidth must be positive");
  check(eta >= 0.0 && mu_bar >= 0.0, "eta and mu_bar must be nonnegative");
  check(beta >= 0.0 && beta <= 1.0, "beta must lie in [0, 1]");
  check(delta_mode != DeltaMode::fixed || delta_value >= 0.0, "delta must be nonnegative");
  check(delta_c >= 0.0, "delta_c must be nonnegative");
  check(confidence > 0.0 && confidence < 1.0, "confidence must lie in (0, 1)");
  check(buy_all_seeds >= 1, "buy_all_seeds must be at least 1");
  check(bucket_episodes >= 1 && horizon % bucket_episodes == 0,
        "bucket_episodes must divide the horizon");
  check(drift == "declining" || drift == "dataset", "drift must be 'declining' or 'dataset'");
  if (dataset != "all" && model_file.empty()) {
    const auto& names = table1_dataset_names();
    check(std::find(names.begin(), names.end(), dataset) != names.end(),
          "unknown dataset '" + dataset + "'");
  }
}

const AlgorithmResult* RunRecord::find(Algorithm a) const noexcept {
  for (const auto& r : results) {
    if (r.algorithm == a) return &r;
  }
  return nullptr;
}

double compute_buy_all_budget(const EpisodicModel& model, std::uint64_t seed, std::size_t seeds) {
  require(seeds >= 1, ErrorCode::invalid_argument, "need at least one seed");
  const RandomStream base(seed, streams::buy_all);
  double total = 0.0;
  for (std::size_t i = 0; i < seeds; ++i) {
    RandomStream rng = base.split(i);
    total += buy_all_spend(draw_realization(model, rng));
  }
  return total / static_cast<double>(seeds);
}

double compute_buy_all_budget(const SlowMovingModel& model, std::uint64_t seed,
                              std::size_t seeds) {
  require(seeds >= 1, ErrorCode::invalid_argument, "need at least one seed");
  const RandomStream base(seed, streams::buy_all);
  double total = 0.0;
  for (std::size_t i = 0; i < seeds; ++i) {
    RandomStream rng = base.split(i);
    total += buy_all_spend(draw_realization(model, rng));
  }
  return total / static_cast<double>(seeds);
}

EpisodicModel resolve_model(const ExperimentConfig& config, std::string_view dataset) {
  if (!config.model_file.empty()) return model_from_json(read_text_file(config.model_file));
  return make_table1_dataset(dataset, config.seed, config.episodes, config.horizon, config.ranges);
}

double draw_budget_frac(const ExperimentConfig& config, std::size_t repetition) {
  RandomStream rng = stream_for(config, streams::budget, repetition);
  // 1 - u lies in (0, 1], so the fraction never hits a zero lower end.
  const double u = 1.0 - rng.uniform();
  return config.budget_frac_lo + (config.budget_frac_hi - config.budget_frac_lo) * u;
}

RunRecord run_end_to_end(const ExperimentConfig& config, const EpisodicModel& model,
                         double buy_all, std::size_t repetition,
                         std::optional<double> budget_frac) {
  RunRecord rec = base_record(config, model.name(), model.episodes(), buy_all, repetition,
                              budget_frac);
  rec.horizon = model.horizon();
  try {
    require(rec.budget > 0.0, ErrorCode::invalid_argument, "budget must be positive");
    const auto samples =
        sample_episodes(model, config.samples, stream_for(config, streams::training, repetition));
    RandomStream eval = stream_for(config, streams::evaluation, repetition);
    const Realization realization = draw_realization(model, eval);
    return run_pipeline(config, std::move(rec), samples, realization, model.value_bound());
  } catch (const Error& e) {
    rec.error = std::string(error_code_name(e.code())) + ": " + e.what();
    return rec;
  }
}

RunRecord run_slow_moving(const ExperimentConfig& config, const SlowMovingModel& model,
                          std::size_t bucket_episodes, double buy_all, std::size_t repetition,
                          std::optional<double> budget_frac) {
  RunRecord rec = base_record(config, model.name(), bucket_episodes, buy_all, repetition,
                              budget_frac);
  rec.horizon = model.horizon();
  try {
    require(rec.budget > 0.0, ErrorCode::invalid_argument, "budget must be positive");
    const auto samples =
        bucket_slow_moving(model, bucket_episodes, config.samples,
                           stream_for(config, streams::training, repetition));
    RandomStream eval = stream_for(config, streams::evaluation, repetition);
    const Realization realization = draw_realization(model, eval);
    return run_pipeline(config, std::move(rec), samples, realization, model.value_bound());
  } catch (const Error& e) {
    rec.error = std::string(error_code_name(e.code())) + ": " + e.what();
    return rec;
  }
}

SweepResult sweep_samples(const ExperimentConfig& config, std::span<const std::size_t> n_grid) {
  config.validate();
  require(!n_grid.empty(), ErrorCode::invalid_config, "n_grid is empty");
  require(!config.budget_fracs.empty(), ErrorCode::invalid_config, "budget_fracs is empty");
  const EpisodicModel model = resolve_model(config, config.dataset);
  const double buy_all = compute_buy_all_budget(model, config.seed, config.buy_all_seeds);

  ExperimentConfig run_config = config;
  run_config.algorithms = {Algorithm::changing_spend};
  run_config.budget.reset();

  const std::size_t reps = config.repetitions;
  const std::size_t fracs = config.budget_fracs.size();
  SweepResult result;
  result.runs.resize(n_grid.size() * fracs * reps);
  parallel_for(result.runs.size(), config.threads, [&](std::size_t i) {
    const std::size_t rep = i % reps;
    const std::size_t f = (i / reps) % fracs;
    const std::size_t k = i / (reps * fracs);
    ExperimentConfig c = run_config;
    c.samples = n_grid[k];
    result.runs[i] = run_end_to_end(c, model, buy_all, rep, config.budget_fracs[f]);
  });

  for (std::size_t k = 0; k < n_grid.size(); ++k) {
    for (std::size_t f = 0; f < fracs; ++f) {
      std::vector<double> ratios;
      for (std::size_t rep = 0; rep < reps; ++rep) {
        const auto& rec = result.runs[(k * fracs + f) * reps + rep];
        if (const auto* r = rec.find(Algorithm::changing_spend)) ratios.push_back(r->ratio);
      }
      SweepRow row;
      row.n = n_grid[k];
      row.budget_frac = config.budget_fracs[f];
      row.runs = ratios.size();
      if (!ratios.empty()) {
        const double m = static_cast<double>(ratios.size());
        row.mean = std::accumulate(ratios.begin(), ratios.end(), 0.0) / m;
        double ss = 0.0;
        for (double r : ratios) ss += (r - row.mean) * (r - row.mean);
        row.std_error = ratios.size() > 1 ? std::sqrt(ss / (m - 1.0) / m) : 0.0;
      }
      result.rows.push_back(row);
    }
  }
  return result;
}

std::vector<RunRecord> compare_algorithms(const ExperimentConfig& config) {
  config.validate();
  std::vector<RunRecord> out;
  for (const auto& name : expand_datasets(config)) {
    const EpisodicModel model = resolve_model(config, name);
    const double buy_all = compute_buy_all_budget(model, config.seed, config.buy_all_seeds);
    std::vector<RunRecord> runs(config.repetitions);
    parallel_for(runs.size(), config.threads, [&](std::size_t rep) {
      runs[rep] = run_end_to_end(config, model, buy_all, rep);
    });
    std::move(runs.begin(), runs.end(), std::back_inserter(out));
  }
  return out;
}

SlowMovingModel make_drift_model(const ExperimentConfig& config) {
  if (config.drift == "declining") {
    const Distribution price = Distribution::atom(config.ranges.fixed_price);
    return make_slow_moving_interpolation({Distribution::uniform(1.0, 3.0), price},
                                          {Distribution::uniform(0.0, 1.5), price},
                                          config.horizon);
  }
  require(config.drift == "dataset", ErrorCode::invalid_config,
          "drift must be 'declining' or 'dataset'");
  const EpisodicModel model = resolve_model(config, config.dataset);
  return make_slow_moving_interpolation(model.all_episodes().front(),
                                        model.all_episodes().back(), config.horizon);
}

SlowMovingComparison compare_slow_moving(const ExperimentConfig& config,
                                         const SlowMovingModel& model) {
  config.validate();
  require(model.horizon() % config.bucket_episodes == 0, ErrorCode::indivisible_horizon,
          "bucket_episodes must divide the horizon");
  const double buy_all = compute_buy_all_budget(model, config.seed, config.buy_all_seeds);
  SlowMovingComparison out;
  out.coarse.resize(config.repetitions);
  out.fine.resize(config.repetitions);
  parallel_for(config.repetitions, config.threads, [&](std::size_t rep) {
    out.coarse[rep] = run_slow_moving(config, model, 1, buy_all, rep);
    out.fine[rep] = run_slow_moving(config, model, config.bucket_episodes, buy_all, rep);
  });
  return out;
}

std::vector<RunRecord> run_example1(const ExperimentConfig& config) {
  const Example1Instances inst = make_example1_instance(config.horizon);
  ExperimentConfig c = config;
  c.episodes = 2;
  c.budget = inst.budget;
  c.validate();
  std::vector<RunRecord> out(2 * c.repetitions);
  parallel_for(out.size(), c.threads, [&](std::size_t i) {
    const EpisodicModel& model = i < c.repetitions ? inst.low : inst.high;
    out[i] = run_end_to_end(c, model, 0.0, i % c.repetitions);
  });
  return out;
}

std::vector<RunRecord> run_lemma2(const ExperimentConfig& config, double p_high, double v_low,
                                  double v_high) {
  require(config.horizon % 2 == 0, ErrorCode::invalid_config, "horizon must be even");
  const Lemma2Instance inst = make_lemma2_instance(config.horizon / 2, p_high, v_low, v_high);
  ExperimentConfig c = config;
  c.episodes = 2;
  c.budget = inst.budget;
  if (!(c.beta > 0.0)) c.beta = inst.beta_star;
  c.validate();
  std::vector<RunRecord> out(c.repetitions);
  parallel_for(out.size(), c.threads, [&](std::size_t rep) {
    out[rep] = run_end_to_end(c, inst.model, 0.0, rep);
  });
  return out;
}

void write_runs_csv(std::ostream& out, std::span<const RunRecord> runs) {
  out << "dataset,seed,repetition,horizon,episodes,samples,budget_frac,budget,buy_all,"
         "hindsight,hindsight_zero,delta_used,mu_hat,beta,provenance,bracket_failure,"
         "realization_hash,algorithm,utility,spend,wins,ratio,overdraft,error\n";
  const auto old_precision = out.precision(17);
  for (const auto& r : runs) {
    auto prefix = [&] {
      out << csv_escape(r.dataset) << ',' << r.seed << ',' << r.repetition << ',' << r.horizon
          << ',' << r.episodes << ',' << r.samples << ',' << r.budget_frac << ',' << r.budget
          << ',' << r.buy_all << ',' << r.hindsight << ',' << (r.hindsight_zero ? 1 : 0) << ','
          << r.delta_used << ',' << r.mu_hat << ',' << r.beta << ',' << r.provenance << ','
          << (r.bracket_failure ? 1 : 0) << ',' << r.realization_hash << ',';
    };
    if (r.results.empty()) {
      prefix();
      out << ",,,,,," << csv_escape(r.error) << '\n';
      continue;
    }
    for (const auto& a : r.results) {
      prefix();
      out << algorithm_name(a.algorithm) << ',' << a.utility << ',' << a.spend << ',' << a.wins
          << ',' << a.ratio << ',' << (a.overdraft ? 1 : 0) << ",\n";
    }
  }
  out.precision(old_precision);
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << "n,budget_frac,mean_ratio,stderr,runs\n";
  const auto old_precision = out.precision(17);
  for (const auto& r : rows) {
    out << r.n << ',' << r.budget_frac << ',' << r.mean << ',' << r.std_error << ',' << r.runs
        << '\n';
  }
  out.precision(old_precision);
}

void write_compare_csv(std::ostream& out, std::span<const RunRecord> runs) {
  out << "dataset,budget_frac,algorithm,ratio\n";
  const auto old_precision = out.precision(17);
  for (const auto& r : runs) {
    for (const auto& a : r.results) {
      out << csv_escape(r.dataset) << ',' << r.budget_frac << ',' << algorithm_name(a.algorithm)
          << ',' << a.ratio << '\n';
    }
  }
  out.precision(old_precision);
}

double median(std::vector<double> xs) {
  require(!xs.empty(), ErrorCode::empty_lists, "median of an empty list");
  const std::size_t mid = xs.size() / 2;
  std::nth_element(xs.begin(), xs.begin() + static_cast<long>(mid), xs.end());
  if (xs.size() % 2 == 1) return xs[mid];
  const double hi = xs[mid];
  const double lo = *std::max_element(xs.begin(), xs.begin() + static_cast<long>(mid));
  return 0.5 * (lo + hi);
}

}  // namespace pacekit
