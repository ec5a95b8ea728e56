#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "pacekit/distributions.hpp"
#include "pacekit/pacing.hpp"
#include "pacekit/rng.hpp"

namespace pacekit {

struct Realization {
  std::vector<double> values;
  std::vector<double> prices;

  std::size_t horizon() const noexcept { return values.size(); }
  void validate() const;
  // FNV-1a over the raw bytes; equal hashes identify the paired trace.
  std::uint64_t hash() const noexcept;
};

Realization draw_realization(const EpisodicModel& model, RandomStream& rng);
Realization draw_realization(const SlowMovingModel& model, RandomStream& rng);

struct HindsightResult {
  double value = 0.0;
  std::vector<double> allocation;
};

// Fractional knapsack: max sum (v - p) x s.t. sum p x <= B, x in [0, 1].
HindsightResult hindsight_value(const Realization& realization, double budget);

struct RoundRecord {
  std::size_t t;
  std::size_t e;
  double v;
  double p;
  double b;
  double z;
  double mu;
  double budget;
};

struct Outcome {
  double utility = 0.0;
  double spend = 0.0;
  std::size_t wins = 0;
  bool overdraft = false;
  std::vector<RoundRecord> trace;
};

// Second-price rounds: win iff b_t >= p_t, paying p_t.
Outcome run_strategy(Strategy& strategy, const Realization& realization, double budget,
                     bool record_trace = false);

void write_trace_csv(std::ostream& out, std::span<const RoundRecord> trace);

// alpha * mean(H) - mean(sigma) over paired runs.
double alpha_regret(std::span<const double> strategy_utilities,
                    std::span<const double> hindsight_values, double alpha);

struct DualResult {
  double mu_star = 0.0;
  double dual_value = 0.0;
  double interval_lo = 0.0;
  double interval_hi = 0.0;  // infinity when the dual stays flat
};

// Minimizes psi(mu) = sum_t [v_t - (1 + mu) p_t]^+ + mu B over mu >= 0.
DualResult expost_dual_mu(const Realization& realization, double budget);

struct SpendRates {
  double mu_star = 0.0;
  std::vector<double> rho;
};

// mu* = min{mu >= 0 : (1/E) sum_e G_e(mu) <= B/T} and rho_e = G_e(mu*) from
// the true spend functions.
SpendRates true_optimal_spend_rates(const EpisodicModel& model, double budget,
                                    const QuadratureConfig& quad = {}, double tol = 1e-8);

}  // namespace pacekit
