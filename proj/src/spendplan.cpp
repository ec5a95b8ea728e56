#include "pacekit/spendplan.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pacekit/errors.hpp"

namespace pacekit {
namespace {

bool degenerate(const std::vector<double>& xs) {
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  return *hi - *lo <= 1e-12 * std::max(std::abs(*hi), 1.0);
}

SpendFunctionEstimate estimate_episode(const SampleSet& s, const SpendRateOptions& options) {
  require(!s.values.empty() && !s.prices.empty(), ErrorCode::empty_sample,
          "every episode needs value and price samples");
  const bool flat = degenerate(s.prices);
  switch (options.price_mode) {
    case PriceMode::fixed:
      require(flat, ErrorCode::invalid_argument,
              "fixed-price estimation needs identical price samples");
      return approx_spend_fp(s.values, s.prices.front());
    case PriceMode::automatic:
      if (flat) return approx_spend_fp(s.values, s.prices.front());
      break;
    case PriceMode::stochastic:
      break;
  }
  const double s_bw = options.bandwidth ? *options.bandwidth
                                        : default_bandwidth(s.prices, options.bandwidth_rule);
  return approx_spend_sp(s.values, s.prices, options.kernel, s_bw, options.grid);
}

}  // namespace

double solve_mu_hat(const std::function<double(double)>& g_bar, double target, double mu_max,
                    double tol) {
  require(target >= 0.0 && std::isfinite(target), ErrorCode::invalid_argument,
          "target spend must be nonnegative");
  require(tol > 0.0, ErrorCode::invalid_argument, "tolerance must be positive");
  if (g_bar(0.0) <= target) return 0.0;
  require(mu_max > 0.0 && g_bar(mu_max) <= target, ErrorCode::bisection_bracket_failure,
          "average spend exceeds the target at the largest multiplier");
  double lo = 0.0;
  double hi = mu_max;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (g_bar(mid) <= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

SpendRateResult approx_spend_rate(double budget, std::size_t horizon,
                                  std::span<const SampleSet> episode_samples,
                                  const SpendRateOptions& options) {
  require(budget > 0.0 && std::isfinite(budget), ErrorCode::invalid_argument,
          "budget must be positive");
  const std::size_t episodes = episode_samples.size();
  require(episodes >= 1, ErrorCode::invalid_argument, "need at least one episode");
  require(horizon >= episodes && horizon % episodes == 0, ErrorCode::indivisible_horizon,
          "episode count must divide the horizon");

  SpendRateResult result;
  result.estimates.reserve(episodes);
  for (const auto& s : episode_samples) result.estimates.push_back(estimate_episode(s, options));

  const auto& est = result.estimates;
  const auto g_bar = [&est](double mu) {
    double total = 0.0;
    for (const auto& g : est) total += g(mu);
    return total / static_cast<double>(est.size());
  };
  double mu_max = 0.0;
  for (const auto& g : est) mu_max = std::max(mu_max, g.mu_max());
  // Past the last jump of a fixed-price estimate the spend is exactly zero.
  mu_max = mu_max * (1.0 + 1e-9) + 1e-9;

  SpendPlan& plan = result.plan;
  plan.budget = budget;
  plan.horizon = horizon;
  const auto fp_count = std::count_if(est.begin(), est.end(), [](const auto& g) {
    return g.provenance() == SpendFunctionEstimate::Provenance::fixed_price;
  });
  plan.provenance = fp_count == static_cast<long>(episodes) ? "fp"
                    : fp_count == 0                         ? "sp"
                                                            : "mixed";
  const double target = budget / static_cast<double>(horizon);
  try {
    plan.mu_hat = solve_mu_hat(g_bar, target, mu_max, options.mu_tol);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::bisection_bracket_failure) throw;
    plan.mu_hat = mu_max;
    plan.bracket_failure = true;
  }
  plan.rho.reserve(episodes);
  for (const auto& g : est) plan.rho.push_back(g(plan.mu_hat));
  return result;
}

SpendPlan normalize_plan(const SpendPlan& plan, double delta) {
  require(!plan.normalized, ErrorCode::invalid_argument, "plan is already normalized");
  require(delta >= 0.0 && std::isfinite(delta), ErrorCode::invalid_argument,
          "delta must be nonnegative");
  require(!plan.rho.empty() && plan.horizon % plan.rho.size() == 0,
          ErrorCode::indivisible_horizon, "episode count must divide the horizon");
  require(plan.budget > 0.0, ErrorCode::invalid_argument, "budget must be positive");

  double total = 0.0;
  for (double r : plan.rho) {
    require(r >= 0.0 && std::isfinite(r), ErrorCode::invalid_argument,
            "spend rates must be nonnegative");
    total += r + delta;
  }
  require(total > 0.0, ErrorCode::all_zero_plan, "plan and delta are all zero");

  const double tau = static_cast<double>(plan.tau());
  const double per_round = plan.budget / tau;
  SpendPlan out = plan;
  out.normalized = true;
  out.delta_used = delta;
  double head = 0.0;
  for (std::size_t e = 0; e + 1 < out.rho.size(); ++e) {
    out.rho[e] = (plan.rho[e] + delta) * per_round / total;
    head += out.rho[e];
  }
  out.rho.back() = std::max(per_round - head, 0.0);
  return out;
}

std::vector<SampleSet> bucket_slow_moving(const SlowMovingModel& model, std::size_t episodes,
                                          std::size_t samples_per_episode,
                                          const RandomStream& rng) {
  const std::size_t horizon = model.horizon();
  require(episodes >= 1 && horizon % episodes == 0, ErrorCode::indivisible_horizon,
          "bucket count must divide the horizon");
  require(samples_per_episode >= 1, ErrorCode::invalid_argument, "need at least one sample");
  const std::size_t tau = horizon / episodes;
  std::vector<SampleSet> out(episodes);
  for (std::size_t e = 0; e < episodes; ++e) {
    RandomStream stream = rng.split(e + 1);
    out[e].values.reserve(samples_per_episode);
    out[e].prices.reserve(samples_per_episode);
    for (std::size_t i = 0; i < samples_per_episode; ++i) {
      const auto& round = model.round(e * tau + stream.index(tau));
      out[e].values.push_back(round.value.sample(stream));
      out[e].prices.push_back(round.price.sample(stream));
    }
  }
  return out;
}

std::vector<SampleSet> sample_episodes(const EpisodicModel& model, std::size_t samples_per_episode,
                                       const RandomStream& rng) {
  require(samples_per_episode >= 1, ErrorCode::invalid_argument, "need at least one sample");
  std::vector<SampleSet> out(model.episodes());
  for (std::size_t e = 0; e < model.episodes(); ++e) {
    const auto& d = model.episode(e);
    RandomStream stream = rng.split(e + 1);
    out[e].values.reserve(samples_per_episode);
    out[e].prices.reserve(samples_per_episode);
    for (std::size_t i = 0; i < samples_per_episode; ++i) {
      out[e].values.push_back(d.value.sample(stream));
      out[e].prices.push_back(d.price.sample(stream));
    }
  }
  return out;
}

double default_delta_fixed_price(std::size_t episodes, double price, std::size_t n, double delta) {
  require(episodes >= 1 && n >= 1, ErrorCode::invalid_argument, "E and n must be positive");
  require(delta > 0.0 && delta < 1.0, ErrorCode::invalid_argument, "delta must lie in (0, 1)");
  const double e = static_cast<double>(episodes);
  return (e + 1.0) * price * std::sqrt(std::log(2.0 * e / delta) / (2.0 * static_cast<double>(n)));
}

double default_delta_stochastic_price(std::size_t episodes, std::size_t n, double c) {
  require(episodes >= 1 && n >= 1, ErrorCode::invalid_argument, "E and n must be positive");
  require(c >= 0.0, ErrorCode::invalid_argument, "c must be nonnegative");
  return c * (static_cast<double>(episodes) + 1.0) * std::cbrt(1.0 / static_cast<double>(n));
}

}  // namespace pacekit
