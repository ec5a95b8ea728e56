#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "pacekit/benchmark.hpp"
#include "pacekit/errors.hpp"
#include "pacekit/pacing.hpp"

using namespace pacekit;
using doctest::Approx;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::invalid_argument;
}

PacerConfig two_episode_config() {
  PacerConfig c;
  c.budget = 10.0;
  c.horizon = 10;
  c.episodes = 2;
  c.plan = {0.4, 0.6};
  c.eta = 0.1;
  c.mu_bar = 10.0;
  return c;
}

Realization random_trace(RandomStream& rng, std::size_t T) {
  Realization r;
  for (std::size_t t = 0; t < T; ++t) {
    r.values.push_back(rng.uniform(0, 3));
    r.prices.push_back(rng.uniform(0.1, 2));
  }
  return r;
}

}  // namespace

TEST_SUITE("pacing") {
  TEST_CASE("initial state") {
    EpisodicPacer p(two_episode_config());
    CHECK(p.state().episode_budget == Approx(2.0));
    CHECK(p.state().global_budget == 10.0);
    CHECK(p.state().mu == 0.0);
    CHECK(p.state().round == 1);
    CHECK(p.episode() == 1);
    // Truthful up to the episode cap.
    CHECK(p.bid(1.5) == 1.5);

    auto over = two_episode_config();
    over.plan = {1.5, 1.0};
    CHECK(code_of([&] { EpisodicPacer{over}; }) == ErrorCode::invalid_config);
    auto indivisible = two_episode_config();
    indivisible.episodes = 3;
    indivisible.plan = {0.1, 0.1, 0.1};
    CHECK(code_of([&] { EpisodicPacer{indivisible}; }) == ErrorCode::invalid_config);
  }

  TEST_CASE("bids take the three-way minimum") {
    auto c = two_episode_config();
    c.mu_init = 1.0;
    EpisodicPacer shaded(c);
    CHECK(shaded.bid(4.0) == 2.0);

    EpisodicPacer capped(two_episode_config());
    // Spend 1.5 of the first episode's 2.0.
    capped.bid(4.0);
    capped.observe(1.5);
    CHECK(capped.state().mu == Approx(0.11));
    CHECK(capped.bid(4.0) == Approx(0.5));

    c.mu_init = 0.5;
    EpisodicPacer zero(c);
    CHECK(zero.bid(0.0) == 0.0);
  }

  TEST_CASE("multiplier update") {
    PacerConfig c;
    c.budget = 10;
    c.horizon = 10;
    c.plan = {0.3};
    c.eta = 0.1;
    c.mu_bar = 5;
    c.mu_init = 0.5;
    EpisodicPacer p(c);
    p.bid(3.0);
    p.observe(0.5);
    CHECK(p.state().mu == Approx(0.52).epsilon(1e-12));

    c.mu_init = 0.0;
    EpisodicPacer floor(c);
    floor.bid(3.0);
    floor.observe(0.0);
    CHECK(floor.state().mu == 0.0);
  }

  TEST_CASE("unspent episode budget rolls over") {
    EpisodicPacer p(two_episode_config());
    for (int t = 0; t < 5; ++t) {
      p.bid(0.0);
      p.observe(0.0);
    }
    CHECK(p.episode() == 2);
    CHECK(p.state().episode_budget == Approx(5.0));
    CHECK(p.state().global_budget == 10.0);
  }

  TEST_CASE("protocol is enforced") {
    EpisodicPacer p(two_episode_config());
    CHECK(code_of([&] { p.observe(0.0); }) == ErrorCode::protocol_violation);
    p.bid(1.0);
    CHECK(code_of([&] { p.bid(1.0); }) == ErrorCode::protocol_violation);
    CHECK(code_of([&] { p.observe(1.5); }) == ErrorCode::overcharge);

    auto t = truthful_strategy(1.0);
    CHECK(code_of([&] { t->observe(0.0); }) == ErrorCode::protocol_violation);
    t->bid(0.5);
    CHECK(code_of([&] { t->observe(0.7); }) == ErrorCode::overcharge);
  }

  TEST_CASE("pacer invariants on random traces") {
    RandomStream rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t E = 1 + rng.index(5);
      const std::size_t tau = 1 + rng.index(40);
      PacerConfig c;
      c.horizon = E * tau;
      c.episodes = E;
      c.budget = rng.uniform(0.5, 0.8 * c.horizon);
      double w = 0.0;
      for (std::size_t e = 0; e < E; ++e) {
        c.plan.push_back(rng.uniform(0, 1));
        w += c.plan.back();
      }
      if (w == 0.0) continue;
      for (double& r : c.plan) r *= c.budget / (tau * w);
      c.eta = rng.uniform(0, 1);
      c.mu_bar = rng.uniform(0.5, 5);
      c.mu_init = rng.uniform(0, c.mu_bar);
      EpisodicPacer p(c);
      const auto r = random_trace(rng, c.horizon);
      double spent = 0.0;
      for (std::size_t t = 0; t < c.horizon; ++t) {
        const double b = p.bid(r.values[t]);
        CHECK(b >= 0.0);
        const double z = b >= r.prices[t] ? r.prices[t] : 0.0;
        p.observe(z);
        spent += z;
        const auto& s = p.state();
        CHECK(s.mu >= 0.0);
        CHECK(s.mu <= c.mu_bar);
        CHECK(s.global_budget >= 0.0);
        CHECK(s.episode_budget >= 0.0);
        CHECK(s.global_budget == Approx(c.budget - spent).epsilon(1e-9));
        if ((t + 1) % tau == 0) CHECK(s.episode_budget <= s.global_budget + 1e-9);
      }
      CHECK(spent <= c.budget + 1e-9);
    }
  }

  TEST_CASE("identical inputs give identical bids") {
    RandomStream rng(5);
    const auto r = random_trace(rng, 200);
    auto c = two_episode_config();
    c.horizon = 200;
    c.budget = 40;
    c.plan = {0.1, 0.3};
    EpisodicPacer a(c);
    EpisodicPacer b(c);
    const auto oa = run_strategy(a, r, c.budget, true);
    const auto ob = run_strategy(b, r, c.budget, true);
    REQUIRE(oa.trace.size() == ob.trace.size());
    for (std::size_t t = 0; t < oa.trace.size(); ++t) CHECK(oa.trace[t].b == ob.trace[t].b);
  }

  TEST_CASE("fixed-rate pacer is the single-episode pacer") {
    RandomStream rng(6);
    const auto r = random_trace(rng, 300);
    const double B = 60.0;
    auto fixed = fixed_rate_pacer(B, 300, 0.05, 4.0);
    PacerConfig c;
    c.budget = B;
    c.horizon = 300;
    c.plan = {B / 300};
    c.eta = 0.05;
    c.mu_bar = 4.0;
    EpisodicPacer single(c);
    for (std::size_t t = 0; t < 300; ++t) {
      const double b1 = fixed->bid(r.values[t]);
      const double b2 = single.bid(r.values[t]);
      CHECK(b1 == b2);
      const double z = b1 >= r.prices[t] ? r.prices[t] : 0.0;
      fixed->observe(z);
      single.observe(z);
      CHECK(fixed->state().mu == single.state().mu);
    }
    CHECK(fixed->name() == "fixed_spend_bg19");

    auto frozen = fixed_rate_pacer(B, 300, 0.0, 4.0);
    const auto out = run_strategy(*frozen, r, B);
    CHECK(out.spend > 0.0);
    CHECK(frozen->shading() == 0.0);
  }

  TEST_CASE("stationary multiplier converges") {
    // Values U[0, 2] against price 1 spend (1 - mu) / 2 per round; target
    // 0.25 gives mu* = 0.5.
    const std::size_t T = 20000;
    const oracle::UniformAtomEpisode ep{0.0, 2.0, 1.0};
    const double mu_star = oracle::solve_uniform_atom_mu({ep}, 0.25);
    CHECK(mu_star == Approx(0.5).epsilon(1e-9));
    RandomStream rng(7);
    Realization r;
    for (std::size_t t = 0; t < T; ++t) {
      r.values.push_back(rng.uniform(0, 2));
      r.prices.push_back(1.0);
    }
    auto p = fixed_rate_pacer(0.25 * T, T, 1.0 / std::sqrt(double(T)), 10.0);
    const auto out = run_strategy(*p, r, 0.25 * T, true);
    double avg = 0.0;
    for (std::size_t t = T / 2; t < T; ++t) avg += out.trace[t].mu / (T / 2.0);
    CHECK(std::abs(avg - mu_star) <= 0.15);
  }

  TEST_CASE("defaults") {
    CHECK(default_step_size(100) == Approx(0.1));
    CHECK(default_max_shading(3.0, {0.5, 0.1}) == Approx(30.0));
    CHECK(default_max_shading(3.0, {0.5, 0.0}) == 100.0);
    CHECK(default_max_shading(1000.0, {0.5}) == 100.0);

    SpendPlan plan;
    plan.rho = {0.2, 0.3};
    plan.budget = 25;
    plan.horizon = 100;
    const auto c = make_pacer_config(plan, 2.0, 0.0, 0.0, 50.0);
    CHECK(c.eta == Approx(1.0 / std::sqrt(50.0)));
    CHECK(c.mu_bar == Approx(10.0));
    CHECK(c.mu_init == Approx(10.0));
    CHECK(c.tau() == 50);
  }

  TEST_CASE("truthful and fixed multiplier baselines") {
    auto t = truthful_strategy(1.2);
    CHECK(t->bid(3.0) == Approx(1.2));
    t->observe(1.2);
    CHECK(t->remaining_budget() == Approx(0.0));
    for (int i = 0; i < 5; ++i) {
      CHECK(t->bid(5.0) == 0.0);
      t->observe(0.0);
    }

    RandomStream rng(9);
    const auto r = random_trace(rng, 100);
    auto a = truthful_strategy(20.0);
    auto b = fixed_multiplier_strategy(1.0, 20.0);
    const auto oa = run_strategy(*a, r, 20.0, true);
    const auto ob = run_strategy(*b, r, 20.0, true);
    for (std::size_t i = 0; i < 100; ++i) CHECK(oa.trace[i].b == ob.trace[i].b);

    Realization cheap{{1.0, 1.5, 2.0}, {3.0, 3.0, 3.0}};
    auto low = fixed_multiplier_strategy(0.5, 10.0);
    CHECK(run_strategy(*low, cheap, 10.0).spend == 0.0);

    Realization rich{{2.0, 0.5, 3.0}, {1.0, 1.0, 2.5}};
    auto all = truthful_strategy(100.0);
    const auto o = run_strategy(*all, rich, 100.0);
    CHECK(o.wins == 2);
    CHECK(o.utility == Approx(1.5));

    CHECK(code_of([] { fixed_multiplier_strategy(1.5, 1.0); }) == ErrorCode::invalid_config);
    CHECK(code_of([] { fixed_multiplier_strategy(0.0, 1.0); }) == ErrorCode::invalid_config);
  }
}
