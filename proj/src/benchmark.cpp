#include "pacekit/benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <ostream>

#include "pacekit/errors.hpp"
#include "pacekit/spendplan.hpp"

namespace pacekit {

void Realization::validate() const {
  require(values.size() == prices.size(), ErrorCode::invalid_argument,
          "values and prices differ in length");
  for (std::size_t t = 0; t < values.size(); ++t) {
    require(values[t] >= 0.0 && std::isfinite(values[t]), ErrorCode::invalid_argument,
            "values must be finite and nonnegative");
    require(prices[t] >= 0.0 && std::isfinite(prices[t]), ErrorCode::invalid_argument,
            "prices must be finite and nonnegative");
  }
}

std::uint64_t Realization::hash() const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const std::vector<double>& xs) {
    for (double x : xs) {
      unsigned char bytes[sizeof(double)];
      std::memcpy(bytes, &x, sizeof(double));
      for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
      }
    }
  };
  feed(values);
  feed(prices);
  return h;
}

Realization draw_realization(const EpisodicModel& model, RandomStream& rng) {
  Realization r;
  const std::size_t horizon = model.horizon();
  r.values.reserve(horizon);
  r.prices.reserve(horizon);
  for (std::size_t t = 0; t < horizon; ++t) {
    const auto& d = model.episode(t / model.tau());
    r.values.push_back(d.value.sample(rng));
    r.prices.push_back(d.price.sample(rng));
  }
  return r;
}

Realization draw_realization(const SlowMovingModel& model, RandomStream& rng) {
  Realization r;
  r.values.reserve(model.horizon());
  r.prices.reserve(model.horizon());
  for (const auto& d : model.all_rounds()) {
    r.values.push_back(d.value.sample(rng));
    r.prices.push_back(d.price.sample(rng));
  }
  return r;
}

HindsightResult hindsight_value(const Realization& realization, double budget) {
  realization.validate();
  require(budget >= 0.0, ErrorCode::invalid_argument, "budget must be nonnegative");
  const auto& v = realization.values;
  const auto& p = realization.prices;

  std::vector<std::size_t> order;
  for (std::size_t t = 0; t < v.size(); ++t) {
    if (v[t] > p[t]) order.push_back(t);
  }
  // Free items first, then by utility per unit of spend.
  auto ratio = [&](std::size_t t) {
    return p[t] > 0.0 ? (v[t] - p[t]) / p[t] : std::numeric_limits<double>::infinity();
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return ratio(a) > ratio(b); });

  HindsightResult out;
  out.allocation.assign(v.size(), 0.0);
  double left = budget;
  for (std::size_t t : order) {
    const double take = p[t] <= left ? 1.0 : left / p[t];
    if (take <= 0.0) break;
    out.allocation[t] = take;
    out.value += take * (v[t] - p[t]);
    left = std::max(left - take * p[t], 0.0);
  }
  return out;
}

Outcome run_strategy(Strategy& strategy, const Realization& realization, double budget,
                     bool record_trace) {
  realization.validate();
  Outcome out;
  if (record_trace) out.trace.reserve(realization.horizon());
  for (std::size_t t = 0; t < realization.horizon(); ++t) {
    const double v = realization.values[t];
    const double p = realization.prices[t];
    const std::size_t e = strategy.episode();
    const double mu = strategy.shading();
    const double b = strategy.bid(v);
    const bool win = b >= p;
    const double z = win ? p : 0.0;
    strategy.observe(z);
    if (win) {
      out.utility += v - p;
      out.spend += z;
      ++out.wins;
    }
    if (record_trace) {
      out.trace.push_back({t + 1, e, v, p, b, z, mu, strategy.remaining_budget()});
    }
  }
  out.overdraft = out.spend > budget + 1e-9 * std::max(budget, 1.0);
  return out;
}

void write_trace_csv(std::ostream& out, std::span<const RoundRecord> trace) {
  out << "t,e,v,p,b,z,mu,budget\n";
  const auto old_precision = out.precision(17);
  for (const auto& r : trace) {
    out << r.t << ',' << r.e << ',' << r.v << ',' << r.p << ',' << r.b << ',' << r.z << ','
        << r.mu << ',' << r.budget << '\n';
  }
  out.precision(old_precision);
}

double alpha_regret(std::span<const double> strategy_utilities,
                    std::span<const double> hindsight_values, double alpha) {
  require(!strategy_utilities.empty() && !hindsight_values.empty(), ErrorCode::empty_lists,
          "regret needs at least one paired run");
  require(strategy_utilities.size() == hindsight_values.size(), ErrorCode::invalid_argument,
          "utility and hindsight lists differ in length");
  require(alpha > 0.0 && alpha <= 1.0, ErrorCode::invalid_argument, "alpha must lie in (0, 1]");
  const double n = static_cast<double>(strategy_utilities.size());
  const double mean_h = std::accumulate(hindsight_values.begin(), hindsight_values.end(), 0.0) / n;
  const double mean_s =
      std::accumulate(strategy_utilities.begin(), strategy_utilities.end(), 0.0) / n;
  return alpha * mean_h - mean_s;
}

DualResult expost_dual_mu(const Realization& realization, double budget) {
  realization.validate();
  require(budget >= 0.0, ErrorCode::invalid_argument, "budget must be nonnegative");
  const auto& v = realization.values;
  const auto& p = realization.prices;

  // Only rounds with a nonnegative breakpoint v/p - 1 contribute for mu >= 0.
  struct Item {
    double breakpoint;
    double v;
    double p;
  };
  std::vector<Item> items;
  for (std::size_t t = 0; t < v.size(); ++t) {
    require(p[t] > 0.0, ErrorCode::invalid_argument, "dual needs positive prices");
    const double bp = v[t] / p[t] - 1.0;
    if (bp > 0.0) items.push_back({bp, v[t], p[t]});
  }
  std::sort(items.begin(), items.end(),
            [](const Item& a, const Item& b) { return a.breakpoint < b.breakpoint; });

  // suffix sums over items whose breakpoint exceeds the evaluation point
  const std::size_t m = items.size();
  std::vector<double> sv(m + 1, 0.0);
  std::vector<double> sp(m + 1, 0.0);
  for (std::size_t i = m; i-- > 0;) {
    sv[i] = sv[i + 1] + items[i].v;
    sp[i] = sp[i + 1] + items[i].p;
  }
  std::vector<double> candidates{0.0};
  for (const auto& it : items) candidates.push_back(it.breakpoint);
  std::vector<double> psi(candidates.size());
  std::size_t j = 0;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const double mu = candidates[c];
    while (j < m && items[j].breakpoint <= mu) ++j;
    psi[c] = sv[j] - (1.0 + mu) * sp[j] + mu * budget;
  }

  const double best = *std::min_element(psi.begin(), psi.end());
  const double slack = 1e-12 * std::max(1.0, std::abs(best));
  std::size_t first = candidates.size();
  std::size_t last = 0;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    if (psi[c] <= best + slack) {
      first = std::min(first, c);
      last = c;
    }
  }
  DualResult out;
  out.dual_value = best;
  out.interval_lo = candidates[first];
  // Past the last breakpoint psi grows like mu B; with B = 0 it stays flat.
  out.interval_hi = (last + 1 == candidates.size() && budget == 0.0)
                        ? std::numeric_limits<double>::infinity()
                        : candidates[last];
  out.mu_star = std::isinf(out.interval_hi) ? out.interval_lo
                                            : 0.5 * (out.interval_lo + out.interval_hi);
  return out;
}

SpendRates true_optimal_spend_rates(const EpisodicModel& model, double budget,
                                    const QuadratureConfig& quad, double tol) {
  require(budget > 0.0, ErrorCode::invalid_argument, "budget must be positive");
  const auto& eps = model.all_episodes();
  const auto g_bar = [&](double mu) {
    double total = 0.0;
    for (const auto& d : eps) total += true_spend_function(d.value, d.price, mu, quad);
    return total / static_cast<double>(eps.size());
  };
  const double target = budget / static_cast<double>(model.horizon());
  double hi = 1.0;
  if (g_bar(0.0) > target) {
    while (g_bar(hi) > target) {
      hi *= 2.0;
      require(hi < 1e9, ErrorCode::bisection_bracket_failure,
              "true spend stays above the target for every multiplier");
    }
  }
  SpendRates out;
  out.mu_star = solve_mu_hat(g_bar, target, hi, tol);
  out.rho.reserve(eps.size());
  for (const auto& d : eps) out.rho.push_back(true_spend_function(d.value, d.price, out.mu_star, quad));
  return out;
}

}  // namespace pacekit
