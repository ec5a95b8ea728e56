#pragma once
// Independent reference computations used by the unit and acceptance tests.
// None of these call into the library's numerical code.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "pacekit/benchmark.hpp"
#include "pacekit/rng.hpp"

namespace pacekit::oracle {

struct Instance {
  Realization realization;
  double budget;
};

inline Instance random_instance(RandomStream& rng, std::size_t T) {
  Instance inst;
  double total = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    const double p = rng.uniform(0.1, 2.0);
    inst.realization.values.push_back(rng.uniform(0.0, 3.0));
    inst.realization.prices.push_back(p);
    total += p;
  }
  inst.budget = rng.uniform(0.0, 1.1 * total);
  return inst;
}

// LP optimum of max sum (v - p) x s.t. sum p x <= B, 0 <= x <= 1. Some
// optimal vertex has at most one fractional coordinate, so enumerating every
// integral set plus one optional partially filled item covers all vertices.
inline double brute_force_lp(const Realization& r, double budget) {
  const std::size_t T = r.horizon();
  double best = 0.0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << T); ++mask) {
    double cost = 0.0;
    double value = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      if (mask >> t & 1U) {
        cost += r.prices[t];
        value += r.values[t] - r.prices[t];
      }
    }
    if (cost > budget) continue;
    best = std::max(best, value);
    for (std::size_t j = 0; j < T; ++j) {
      if (mask >> j & 1U) continue;
      const double x = std::min(1.0, (budget - cost) / r.prices[j]);
      best = std::max(best, value + x * (r.values[j] - r.prices[j]));
    }
  }
  return best;
}

// psi(mu) = sum_t [v_t - (1 + mu) p_t]^+ + mu B.
inline double dual_objective(const Realization& r, double budget, double mu) {
  double s = mu * budget;
  for (std::size_t t = 0; t < r.horizon(); ++t) {
    s += std::max(0.0, r.values[t] - (1.0 + mu) * r.prices[t]);
  }
  return s;
}

inline double lognormal_pdf(double x, double mu, double sigma) {
  if (x <= 0.0) return 0.0;
  const double z = (std::log(x) - mu) / sigma;
  return std::exp(-0.5 * z * z) / (x * sigma * std::sqrt(2.0 * std::numbers::pi));
}

inline double lognormal_cdf(double x, double mu, double sigma) {
  if (x <= 0.0) return 0.0;
  return 0.5 * std::erfc(-(std::log(x) - mu) / (sigma * std::numbers::sqrt2));
}

// Uniform[lo, hi] values against a fixed price p.
struct UniformAtomEpisode {
  double lo;
  double hi;
  double price;
};

// p * P(v >= (1 + mu) p) in closed form.
inline double uniform_atom_spend(const UniformAtomEpisode& e, double mu) {
  const double threshold = (1.0 + mu) * e.price;
  const double tail = std::clamp((e.hi - threshold) / (e.hi - e.lo), 0.0, 1.0);
  return e.price * tail;
}

// Smallest mu with mean spend <= target, by plain bisection.
inline double solve_uniform_atom_mu(const std::vector<UniformAtomEpisode>& eps, double target) {
  auto mean = [&](double mu) {
    double s = 0.0;
    for (const auto& e : eps) s += uniform_atom_spend(e, mu);
    return s / static_cast<double>(eps.size());
  };
  if (mean(0.0) <= target) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (mean(hi) > target) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mean(mid) > target ? lo : hi) = mid;
  }
  return hi;
}

}  // namespace pacekit::oracle
