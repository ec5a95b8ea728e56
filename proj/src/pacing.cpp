#include "pacekit/pacing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pacekit/errors.hpp"

namespace pacekit {
namespace {

constexpr double kOverchargeSlack = 1e-12;

void check_value(double value) {
  require(value >= 0.0 && std::isfinite(value), ErrorCode::invalid_argument,
          "value must be finite and nonnegative");
}

void check_expenditure(double z, double last_bid) {
  require(z >= 0.0 && std::isfinite(z), ErrorCode::invalid_argument,
          "expenditure must be finite and nonnegative");
  require(z <= last_bid + kOverchargeSlack, ErrorCode::overcharge,
          "expenditure exceeds the posted bid");
}

}  // namespace

void PacerConfig::validate() const {
  auto check = [](bool ok, const char* msg) { require(ok, ErrorCode::invalid_config, msg); };
  check(budget > 0.0 && std::isfinite(budget), "budget must be positive");
  check(horizon >= 1, "horizon must be positive");
  check(episodes >= 1 && horizon % episodes == 0, "episode count must divide the horizon");
  check(plan.size() == episodes, "plan needs one rate per episode");
  for (double r : plan) check(r >= 0.0 && std::isfinite(r), "plan rates must be nonnegative");
  const double planned = static_cast<double>(tau()) * std::accumulate(plan.begin(), plan.end(), 0.0);
  check(planned <= budget * (1.0 + 1e-9), "plan spends more than the budget");
  check(eta >= 0.0 && std::isfinite(eta), "step size must be nonnegative");
  check(mu_bar > 0.0 && std::isfinite(mu_bar), "max shading must be positive");
  check(mu_init >= 0.0 && mu_init <= mu_bar, "initial shading must lie in [0, mu_bar]");
}

double default_step_size(std::size_t tau) {
  require(tau >= 1, ErrorCode::invalid_argument, "tau must be positive");
  return 1.0 / std::sqrt(static_cast<double>(tau));
}

double default_max_shading(double value_bound, const std::vector<double>& plan) {
  constexpr double cap = 100.0;
  if (plan.empty()) return cap;
  const double lowest = *std::min_element(plan.begin(), plan.end());
  if (!(lowest > 0.0)) return cap;
  const double bar = std::min(value_bound / lowest, cap);
  return bar > 0.0 ? bar : cap;
}

PacerConfig make_pacer_config(const SpendPlan& plan, double value_bound, double eta,
                              double mu_bar, double mu_init) {
  PacerConfig config;
  config.budget = plan.budget;
  config.horizon = plan.horizon;
  config.episodes = plan.episodes();
  config.plan = plan.rho;
  config.eta = eta > 0.0 ? eta : default_step_size(std::max<std::size_t>(plan.tau(), 1));
  config.mu_bar = mu_bar > 0.0 ? mu_bar : default_max_shading(value_bound, plan.rho);
  config.mu_init = std::clamp(mu_init, 0.0, config.mu_bar);
  return config;
}

EpisodicPacer::EpisodicPacer(PacerConfig config, std::string_view name)
    : config_(std::move(config)), name_(name) {
  config_.validate();
  state_.mu = config_.mu_init;
  state_.global_budget = config_.budget;
  state_.episode_budget = config_.plan.front() * static_cast<double>(config_.tau());
}

double EpisodicPacer::bid(double value) {
  require(state_.phase == Phase::awaiting_value, ErrorCode::protocol_violation,
          "bid called while awaiting an expenditure");
  require(state_.round <= config_.horizon, ErrorCode::protocol_violation,
          "bid called after the final round");
  check_value(value);
  const double b = std::min({value / (1.0 + state_.mu), state_.episode_budget,
                             state_.global_budget});
  state_.last_bid = std::max(b, 0.0);
  state_.phase = Phase::awaiting_expenditure;
  return state_.last_bid;
}

void EpisodicPacer::observe(double expenditure) {
  require(state_.phase == Phase::awaiting_expenditure, ErrorCode::protocol_violation,
          "observe called before bid");
  check_expenditure(expenditure, state_.last_bid);
  const double z = std::min(expenditure, state_.last_bid);
  const double rho = config_.plan[state_.episode - 1];

  state_.mu = std::clamp(state_.mu - config_.eta * (rho - z), 0.0, config_.mu_bar);
  state_.global_budget = std::max(state_.global_budget - z, 0.0);
  state_.episode_budget = std::max(state_.episode_budget - z, 0.0);

  const std::size_t tau = config_.tau();
  if (state_.round % tau == 0 && state_.episode < config_.episodes) {
    ++state_.episode;
    state_.episode_budget += config_.plan[state_.episode - 1] * static_cast<double>(tau);
  }
  ++state_.round;
  state_.phase = Phase::awaiting_value;
}

std::unique_ptr<EpisodicPacer> fixed_rate_pacer(double budget, std::size_t horizon, double eta,
                                                double mu_bar) {
  require(horizon >= 1, ErrorCode::invalid_config, "horizon must be positive");
  PacerConfig config;
  config.budget = budget;
  config.horizon = horizon;
  config.episodes = 1;
  config.plan = {budget / static_cast<double>(horizon)};
  config.eta = eta;
  config.mu_bar = mu_bar;
  return std::make_unique<EpisodicPacer>(std::move(config), "fixed_spend_bg19");
}

BudgetCappedBidder::BudgetCappedBidder(double beta, double budget, std::string_view name)
    : beta_(beta), remaining_(budget), name_(name) {
  require(beta > 0.0 && beta <= 1.0, ErrorCode::invalid_config, "beta must lie in (0, 1]");
  require(budget >= 0.0 && std::isfinite(budget), ErrorCode::invalid_config,
          "budget must be nonnegative");
}

double BudgetCappedBidder::bid(double value) {
  require(phase_ == Phase::awaiting_value, ErrorCode::protocol_violation,
          "bid called while awaiting an expenditure");
  check_value(value);
  last_bid_ = std::min(beta_ * value, remaining_);
  phase_ = Phase::awaiting_expenditure;
  return last_bid_;
}

void BudgetCappedBidder::observe(double expenditure) {
  require(phase_ == Phase::awaiting_expenditure, ErrorCode::protocol_violation,
          "observe called before bid");
  check_expenditure(expenditure, last_bid_);
  remaining_ = std::max(remaining_ - std::min(expenditure, last_bid_), 0.0);
  phase_ = Phase::awaiting_value;
}

std::unique_ptr<BudgetCappedBidder> truthful_strategy(double budget) {
  return std::make_unique<BudgetCappedBidder>(1.0, budget, "truthful");
}

std::unique_ptr<BudgetCappedBidder> fixed_multiplier_strategy(double beta, double budget) {
  return std::make_unique<BudgetCappedBidder>(beta, budget, "fixed_multiplier");
}

}  // namespace pacekit
