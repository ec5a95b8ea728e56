#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pacekit/benchmark.hpp"
#include "pacekit/distributions.hpp"
#include "pacekit/estimation.hpp"
#include "pacekit/spendplan.hpp"

namespace pacekit {

enum class Algorithm { changing_spend, fixed_spend_bg19, truthful, fixed_multiplier };

std::string_view algorithm_name(Algorithm a) noexcept;
Algorithm parse_algorithm(std::string_view name);
const std::vector<Algorithm>& all_algorithms();

enum class DeltaMode {
  theory,  // fixed-price or stochastic-price default depending on the plan
  zero,
  fixed,
};

std::string_view delta_mode_name(DeltaMode m) noexcept;
DeltaMode parse_delta_mode(std::string_view name);

struct ExperimentConfig {
  int schema_version = 1;
  std::string dataset = "uniform_v_fix_p";  // or "all" for compare
  std::string model_file;                   // JSON episodic model, replaces dataset
  Table1Ranges ranges;
  std::uint64_t seed = 1;
  std::size_t horizon = 1000;
  std::size_t episodes = 10;
  std::size_t samples = 1000;
  // The budget is frac * C_bar with frac ~ U[budget_frac_lo, budget_frac_hi],
  // unless an absolute budget is given.
  double budget_frac_lo = 0.0;
  double budget_frac_hi = 1.0;
  std::optional<double> budget;
  std::vector<Algorithm> algorithms = all_algorithms();
  std::size_t repetitions = 150;
  Kernel kernel = Kernel::gaussian;
  BandwidthRule bandwidth_rule = BandwidthRule::scaled;
  std::optional<double> bandwidth;
  double eta = 0.0;     // 0 selects tau^(-1/2)
  double mu_bar = 0.0;  // 0 selects the plan-based default
  double beta = 0.0;    // 0 selects 1 / (1 + mu_hat) from the estimated plan
  bool warm_start = true;  // changing_spend starts at the estimated mu_hat
  std::string drift = "declining";  // slow-moving model: "declining" or "dataset"
  DeltaMode delta_mode = DeltaMode::zero;
  double delta_value = 0.0;
  double delta_c = 1.0;
  double confidence = 0.1;
  std::size_t buy_all_seeds = 20;
  std::vector<std::size_t> n_grid{10, 100, 1000, 10000};
  std::vector<double> budget_fracs{0.25, 0.5, 0.75, 1.0};
  std::size_t bucket_episodes = 10;
  std::string output;
  std::size_t threads = 1;  // 0 uses every hardware thread

  // Throws invalid_config.
  void validate() const;
};

struct AlgorithmResult {
  Algorithm algorithm = Algorithm::changing_spend;
  double utility = 0.0;
  double spend = 0.0;
  std::size_t wins = 0;
  double ratio = 0.0;
  bool overdraft = false;
};

struct RunRecord {
  std::string dataset;
  std::uint64_t seed = 0;
  std::size_t repetition = 0;
  std::size_t horizon = 0;
  std::size_t episodes = 0;
  std::size_t samples = 0;
  double budget_frac = 0.0;
  double budget = 0.0;
  double buy_all = 0.0;
  double hindsight = 0.0;
  bool hindsight_zero = false;  // ratios set to 1
  double delta_used = 0.0;
  double mu_hat = 0.0;
  double beta = 0.0;
  std::string provenance;
  bool bracket_failure = false;
  std::uint64_t realization_hash = 0;
  std::vector<double> plan;
  std::vector<AlgorithmResult> results;
  std::string error;  // error name and message when the run failed

  const AlgorithmResult* find(Algorithm a) const noexcept;
};

struct PipelinePlan {
  SpendPlan raw;
  SpendPlan normalized;
  std::vector<SpendFunctionEstimate> estimates;
};

// Spend-rate estimation and normalization with the config's kernel,
// bandwidth and delta settings.
PipelinePlan plan_from_samples(const ExperimentConfig& config,
                               std::span<const SampleSet> samples, double budget,
                               std::size_t horizon);

// Mean buy-all expenditure sum_t p_t 1{v_t >= p_t} over `seeds` realizations.
double compute_buy_all_budget(const EpisodicModel& model, std::uint64_t seed,
                              std::size_t seeds = 20);
double compute_buy_all_budget(const SlowMovingModel& model, std::uint64_t seed,
                              std::size_t seeds = 20);

// The model named by config.dataset or loaded from config.model_file.
EpisodicModel resolve_model(const ExperimentConfig& config, std::string_view dataset);

// Budget fraction for one repetition, drawn from its own stream.
double draw_budget_frac(const ExperimentConfig& config, std::size_t repetition);

// Samples, plan, normalization and pacing on a fresh realization. Failures
// are caught and recorded in RunRecord::error.
RunRecord run_end_to_end(const ExperimentConfig& config, const EpisodicModel& model,
                         double buy_all, std::size_t repetition,
                         std::optional<double> budget_frac = std::nullopt);

RunRecord run_slow_moving(const ExperimentConfig& config, const SlowMovingModel& model,
                          std::size_t bucket_episodes, double buy_all, std::size_t repetition,
                          std::optional<double> budget_frac = std::nullopt);

struct SweepRow {
  std::size_t n = 0;
  double budget_frac = 0.0;
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t runs = 0;
};

struct SweepResult {
  std::vector<RunRecord> runs;
  std::vector<SweepRow> rows;
};

// changing_spend ratio over n_grid x budget_fracs x repetitions. Runs at the
// same repetition share the evaluation trace and nest their training samples.
SweepResult sweep_samples(const ExperimentConfig& config, std::span<const std::size_t> n_grid);

// Paired runs of every configured algorithm on each dataset ("all" expands to
// the six synthetic datasets).
std::vector<RunRecord> compare_algorithms(const ExperimentConfig& config);

struct SlowMovingComparison {
  std::vector<RunRecord> coarse;  // one bucket
  std::vector<RunRecord> fine;    // config.bucket_episodes buckets
};

// "declining": uniform values sliding from [1, 3] to [0, 1.5] at the fixed
// price. "dataset": linear drift from the first to the last episode of the
// configured dataset.
SlowMovingModel make_drift_model(const ExperimentConfig& config);

// One bucket against config.bucket_episodes buckets on paired seeds.
SlowMovingComparison compare_slow_moving(const ExperimentConfig& config,
                                         const SlowMovingModel& model);

// Each repetition uses the instance's own budget and the algorithms in the
// config; fixed_multiplier defaults to the instance's beta*.
std::vector<RunRecord> run_example1(const ExperimentConfig& config);
std::vector<RunRecord> run_lemma2(const ExperimentConfig& config, double p_high = 1.0,
                                  double v_low = 1.0, double v_high = 2.0);

void write_runs_csv(std::ostream& out, std::span<const RunRecord> runs);
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);
// dataset,budget_frac,algorithm,ratio
void write_compare_csv(std::ostream& out, std::span<const RunRecord> runs);

double median(std::vector<double> xs);

}  // namespace pacekit
