#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pacekit/distributions.hpp"
#include "pacekit/estimation.hpp"
#include "pacekit/rng.hpp"

namespace pacekit {

// Per-round target spend for each episode of a campaign with budget B over
// T rounds.
struct SpendPlan {
  std::vector<double> rho;
  double mu_hat = 0.0;
  double budget = 0.0;
  std::size_t horizon = 0;
  bool normalized = false;
  double delta_used = 0.0;
  std::string provenance;  // "fp", "sp", "mixed", "exact" or "manual"
  bool bracket_failure = false;

  std::size_t episodes() const noexcept { return rho.size(); }
  std::size_t tau() const noexcept { return rho.empty() ? 0 : horizon / rho.size(); }
};

struct SampleSet {
  std::vector<double> values;
  std::vector<double> prices;
};

enum class PriceMode {
  automatic,   // fixed-price estimator when an episode's prices are all equal
  fixed,
  stochastic,
};

struct SpendRateOptions {
  Kernel kernel = Kernel::gaussian;
  BandwidthRule bandwidth_rule = BandwidthRule::scaled;
  std::optional<double> bandwidth;  // overrides the rule for every episode
  PriceMode price_mode = PriceMode::automatic;
  double mu_tol = 1e-8;
  SpGridOptions grid;
};

struct SpendRateResult {
  SpendPlan plan;
  std::vector<SpendFunctionEstimate> estimates;
};

// Fits one spend-function estimate per episode, averages them and picks the
// smallest multiplier whose average spend fits B / T. When no multiplier on
// the estimate grid fits, mu_hat is clamped to the grid end and
// plan.bracket_failure is set.
SpendRateResult approx_spend_rate(double budget, std::size_t horizon,
                                  std::span<const SampleSet> episode_samples,
                                  const SpendRateOptions& options = {});

// Smallest mu in [0, mu_max] with g_bar(mu) <= target, to absolute tolerance
// tol; g_bar must be nonincreasing. Returns exactly 0 when g_bar(0) fits and
// throws bisection_bracket_failure when g_bar(mu_max) does not.
double solve_mu_hat(const std::function<double(double)>& g_bar, double target, double mu_max,
                    double tol = 1e-8);

// rho'_e = (rho_e + delta) * B / (tau * sum_k (rho_k + delta)). The last entry
// absorbs rounding so that tau * sum rho' equals B.
SpendPlan normalize_plan(const SpendPlan& plan, double delta);

// n training samples per episode; sample i of episode e is drawn from a
// round picked uniformly among that episode's tau rounds. Episode e reads
// rng.split(e + 1), so a larger n extends the smaller sample.
std::vector<SampleSet> bucket_slow_moving(const SlowMovingModel& model, std::size_t episodes,
                                          std::size_t samples_per_episode,
                                          const RandomStream& rng);

// n (value, price) draws from each episode's distributions, with the same
// per-episode streams as above.
std::vector<SampleSet> sample_episodes(const EpisodicModel& model, std::size_t samples_per_episode,
                                       const RandomStream& rng);

// (E + 1) p sqrt(log(2E / delta) / (2n)).
double default_delta_fixed_price(std::size_t episodes, double price, std::size_t n, double delta);
// c (E + 1) n^(-1/3).
double default_delta_stochastic_price(std::size_t episodes, std::size_t n, double c = 1.0);

}  // namespace pacekit
