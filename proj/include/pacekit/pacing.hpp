#pragma once

#include <cstddef>
#include <memory>
#include <string_view>
#include <vector>

#include "pacekit/spendplan.hpp"

namespace pacekit {

// Online bidder driven one auction at a time: bid(v_t) posts a bid, then
// observe(z_t) reports the expenditure, which is the price on a win and zero
// otherwise. Calls must alternate.
class Strategy {
 public:
  virtual ~Strategy() = default;

  virtual double bid(double value) = 0;
  virtual void observe(double expenditure) = 0;

  virtual std::string_view name() const noexcept = 0;
  virtual double shading() const noexcept { return 0.0; }
  virtual double remaining_budget() const noexcept = 0;
  // 1-based episode of the next round.
  virtual std::size_t episode() const noexcept { return 1; }
};

struct PacerConfig {
  double budget = 0.0;
  std::size_t horizon = 0;
  std::size_t episodes = 1;
  std::vector<double> plan;
  double eta = 0.0;
  double mu_bar = 100.0;
  double mu_init = 0.0;

  std::size_t tau() const noexcept { return episodes == 0 ? 0 : horizon / episodes; }
  // Throws invalid_config.
  void validate() const;
};

// eta = tau^(-1/2).
double default_step_size(std::size_t tau);
// min(h / min_e rho'_e, 100), or 100 when some rate is zero.
double default_max_shading(double value_bound, const std::vector<double>& plan);

// Config for a normalized plan with default step size and max shading unless
// overridden by a positive value. mu_init is clamped to the max shading.
PacerConfig make_pacer_config(const SpendPlan& plan, double value_bound, double eta = 0.0,
                              double mu_bar = 0.0, double mu_init = 0.0);

enum class Phase { awaiting_value, awaiting_expenditure };

struct PacerState {
  double mu = 0.0;
  std::size_t round = 1;    // next round, 1-based
  std::size_t episode = 1;  // 1-based
  double episode_budget = 0.0;
  double global_budget = 0.0;
  Phase phase = Phase::awaiting_value;
  double last_bid = 0.0;
};

// Dual-gradient pacing against a per-episode spend plan; unspent episode
// budget rolls into the next episode.
class EpisodicPacer final : public Strategy {
 public:
  explicit EpisodicPacer(PacerConfig config, std::string_view name = "changing_spend");

  double bid(double value) override;
  void observe(double expenditure) override;

  std::string_view name() const noexcept override { return name_; }
  double shading() const noexcept override { return state_.mu; }
  double remaining_budget() const noexcept override { return state_.global_budget; }
  std::size_t episode() const noexcept override { return state_.episode; }

  const PacerState& state() const noexcept { return state_; }
  const PacerConfig& config() const noexcept { return config_; }

 private:
  PacerConfig config_;
  PacerState state_;
  std::string_view name_;
};

// Single episode with the flat plan B / T.
std::unique_ptr<EpisodicPacer> fixed_rate_pacer(double budget, std::size_t horizon, double eta,
                                                double mu_bar);

// Bids min(beta * v, remaining budget).
class BudgetCappedBidder final : public Strategy {
 public:
  BudgetCappedBidder(double beta, double budget, std::string_view name);

  double bid(double value) override;
  void observe(double expenditure) override;

  std::string_view name() const noexcept override { return name_; }
  double remaining_budget() const noexcept override { return remaining_; }
  double beta() const noexcept { return beta_; }

 private:
  double beta_;
  double remaining_;
  std::string_view name_;
  Phase phase_ = Phase::awaiting_value;
  double last_bid_ = 0.0;
};

std::unique_ptr<BudgetCappedBidder> truthful_strategy(double budget);
std::unique_ptr<BudgetCappedBidder> fixed_multiplier_strategy(double beta, double budget);

}  // namespace pacekit
