// Acceptance suite: one PASS/FAIL line per criterion. Run all criteria or a
// single one with --criterion N.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pacekit/benchmark.hpp"
#include "pacekit/distributions.hpp"
#include "pacekit/estimation.hpp"
#include "pacekit/harness.hpp"
#include "pacekit/pacing.hpp"
#include "pacekit/spendplan.hpp"

using namespace pacekit;
using namespace pacekit::oracle;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double median_of(std::vector<double> xs) { return median(xs); }

// 1. Greedy hindsight against brute-force LP vertex enumeration.
Verdict hindsight_oracle() {
  RandomStream rng(101, 1);
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    const Instance inst = random_instance(rng, 1 + rng.index(12));
    const double greedy = hindsight_value(inst.realization, inst.budget).value;
    worst = std::max(worst, std::abs(greedy - brute_force_lp(inst.realization, inst.budget)));
  }
  return {worst <= 1e-9, fmt("500 instances, max |greedy - LP| = %.3g", worst)};
}

// 2. No overdraft anywhere in the full comparison suite.
Verdict budget_feasibility() {
  ExperimentConfig c;
  c.dataset = "all";
  const auto runs = compare_algorithms(c);
  std::size_t overdrafts = 0;
  std::size_t results = 0;
  std::size_t errors = 0;
  for (const auto& r : runs) {
    if (!r.error.empty()) ++errors;
    for (const auto& a : r.results) {
      ++results;
      if (a.overdraft || a.spend > r.budget) ++overdrafts;
    }
  }
  return {overdrafts == 0 && results > 0,
          fmt("%zu runs, %zu strategy results, %zu overdrafts, %zu failed runs", runs.size(),
              results, overdrafts, errors)};
}

// 3. DKW coverage at delta = 0.1.
Verdict dkw_coverage() {
  constexpr std::size_t n = 2000;
  constexpr int trials = 200;
  const double bound = dkw_bound(n, 0.1);
  int violations = 0;
  for (int k = 0; k < trials; ++k) {
    RandomStream rng = RandomStream(303, 1).split(k);
    std::vector<double> xs(n);
    for (auto& x : xs) x = rng.uniform();
    const EmpiricalCdf ecdf = fit_ecdf(xs);
    if (ecdf.sup_distance([](double x) { return std::clamp(x, 0.0, 1.0); }) > bound) {
      ++violations;
    }
  }
  const double rate = static_cast<double>(violations) / trials;
  return {rate <= 0.15, fmt("violation rate %.3f over %d trials (bound %.4f)", rate, trials, bound)};
}

// 4. KDE sup-norm error rate on LogNormal{0, 0.5}.
Verdict kde_rate() {
  const std::size_t ns[] = {250, 2000, 16000};
  constexpr int trials = 10;
  std::vector<double> err;
  for (std::size_t n : ns) {
    double total = 0.0;
    for (int k = 0; k < trials; ++k) {
      RandomStream rng = RandomStream(404, n).split(k);
      std::vector<double> xs(n);
      for (auto& x : xs) x = std::exp(0.5 * rng.normal());
      const double s = default_bandwidth(xs, BandwidthRule::scaled);
      const KdeEstimate kde = fit_kde(xs, Kernel::gaussian, s);
      double sup = 0.0;
      for (int i = 1; i <= 2000; ++i) {
        const double x = 5.0 * i / 2000.0;
        sup = std::max(sup, std::abs(kde(x) - lognormal_pdf(x, 0.0, 0.5)));
      }
      total += sup;
    }
    err.push_back(total / trials);
  }
  const double r1 = err[1] / err[0];
  const double r2 = err[2] / err[1];
  const bool ok = err[1] < err[0] && err[2] < err[1] && r1 >= 0.25 && r1 <= 0.85 && r2 >= 0.25 &&
                  r2 <= 0.85;
  return {ok, fmt("mean sup error %.4f, %.4f, %.4f; ratios %.3f, %.3f", err[0], err[1], err[2],
                  r1, r2)};
}

// Budget at half the expected buy-all spend of a fixed-price uniform model.
struct UniformFixedCase {
  EpisodicModel model;
  double budget;
  std::vector<double> rho;
};

UniformFixedCase uniform_fixed_case() {
  EpisodicModel model = make_table1_dataset("uniform_v_fix_p", 1);
  std::vector<UniformAtomEpisode> eps;
  for (const auto& e : model.all_episodes()) {
    const auto& u = std::get<dist::Uniform>(e.value.params());
    eps.push_back({u.lo, u.hi, std::get<dist::Atom>(e.price.params()).value});
  }
  const double T = static_cast<double>(model.horizon());
  double g0 = 0.0;
  for (const auto& e : eps) g0 += uniform_atom_spend(e, 0.0);
  const double budget = 0.5 * T * g0 / static_cast<double>(eps.size());
  const double mu = solve_uniform_atom_mu(eps, budget / T);
  std::vector<double> rho;
  for (const auto& e : eps) rho.push_back(uniform_atom_spend(e, mu));
  return {std::move(model), budget, std::move(rho)};
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// 5. Fixed-price spend-rate accuracy against its explicit constant.
Verdict spend_rate_fixed_price() {
  const UniformFixedCase c = uniform_fixed_case();
  const std::size_t E = c.model.episodes();
  const std::size_t ns[] = {100, 1000, 10000};
  std::vector<double> medians;
  int within = 0;
  double bound = 0.0;
  for (std::size_t n : ns) {
    std::vector<double> errs;
    for (int k = 0; k < 50; ++k) {
      const auto samples =
          sample_episodes(c.model, n, RandomStream(505, streams::training).split(k));
      const auto est = approx_spend_rate(c.budget, c.model.horizon(), samples);
      errs.push_back(max_abs_diff(est.plan.rho, c.rho));
    }
    if (n == 10000) {
      bound = (E + 1) * 1.0 * std::sqrt(std::log(2.0 * E / 0.1) / (2.0 * n));
      within = static_cast<int>(std::count_if(errs.begin(), errs.end(),
                                              [&](double e) { return e <= bound; }));
    }
    medians.push_back(median_of(errs));
  }
  const bool ok = within >= 45 && medians[1] < medians[0] && medians[2] < medians[1];
  return {ok, fmt("%d/50 within %.4f at n=1e4; median errors %.4f, %.4f, %.4f", within, bound,
                  medians[0], medians[1], medians[2])};
}

// 6. Stochastic-price spend-rate error decreases with n.
Verdict spend_rate_stochastic_price() {
  const EpisodicModel model = make_table1_dataset("uniform_v_normal_p", 1);
  const double T = static_cast<double>(model.horizon());
  double g0 = 0.0;
  for (const auto& e : model.all_episodes()) g0 += true_spend_function(e.value, e.price, 0.0);
  const double budget = 0.5 * T * g0 / static_cast<double>(model.episodes());
  const SpendRates truth = true_optimal_spend_rates(model, budget);
  const std::size_t ns[] = {1000, 10000, 100000};
  std::vector<double> medians;
  for (std::size_t n : ns) {
    std::vector<double> errs;
    for (int k = 0; k < 20; ++k) {
      const auto samples =
          sample_episodes(model, n, RandomStream(606, streams::training).split(k));
      const auto est = approx_spend_rate(budget, model.horizon(), samples);
      errs.push_back(max_abs_diff(est.plan.rho, truth.rho));
    }
    medians.push_back(median_of(errs));
  }
  const bool ok = medians[1] < medians[0] && medians[2] < medians[1];
  return {ok, fmt("median errors %.4f, %.4f, %.4f", medians[0], medians[1], medians[2])};
}

// 7. Closed-form dual on the two-uniform instance.
Verdict closed_form_dual() {
  const EpisodicModel model(
      1, {{Distribution::uniform(0, 2), Distribution::atom(1)},
          {Distribution::uniform(0, 4), Distribution::atom(1)}});
  const SpendRates r = true_optimal_spend_rates(model, 0.5 * model.horizon());
  const double e_mu = std::abs(r.mu_star - 1.0 / 3.0);
  const double e_rho = std::max(std::abs(r.rho[0] - 1.0 / 3.0), std::abs(r.rho[1] - 2.0 / 3.0));
  return {e_mu <= 1e-6 && e_rho <= 1e-6,
          fmt("mu* = %.9f, rho = (%.9f, %.9f)", r.mu_star, r.rho[0], r.rho[1])};
}

// 8. Ratio against training size, per budget fraction.
Verdict sample_sweep() {
  ExperimentConfig c;
  c.repetitions = 20;
  c.delta_mode = DeltaMode::theory;
  const SweepResult result = sweep_samples(c, c.n_grid);
  std::map<double, std::vector<SweepRow>> by_frac;
  for (const auto& row : result.rows) by_frac[row.budget_frac].push_back(row);
  bool monotone = true;
  for (auto& [frac, rows] : by_frac) {
    std::sort(rows.begin(), rows.end(), [](auto& a, auto& b) { return a.n < b.n; });
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i].mean < rows[i - 1].mean - rows[i].std_error) monotone = false;
    }
  }
  bool ordered = true;
  std::string last;
  double prev = -1.0;
  for (auto& [frac, rows] : by_frac) {
    const double m = rows.back().mean;
    if (m < prev) ordered = false;
    prev = m;
    last += fmt(" %.2f:%.4f", frac, m);
  }
  return {monotone && ordered, fmt("nondecreasing in n: %s; ordered at n=%zu:%s",
                                   monotone ? "yes" : "no", c.n_grid.back(), last.c_str())};
}

// 9. Paired comparison on every dataset.
Verdict algorithm_comparison() {
  ExperimentConfig c;
  c.dataset = "all";
  c.budget_frac_lo = 0.2;
  c.budget_frac_hi = 0.8;
  const auto runs = compare_algorithms(c);
  std::map<std::string, std::map<Algorithm, std::vector<double>>> ratios;
  for (const auto& r : runs) {
    for (const auto& a : r.results) ratios[r.dataset][a.algorithm].push_back(a.ratio);
  }
  bool ok = ratios.size() == table1_dataset_names().size();
  std::string detail;
  for (auto& [ds, by_algo] : ratios) {
    const double ours = median_of(by_algo[Algorithm::changing_spend]);
    const double bg = median_of(by_algo[Algorithm::fixed_spend_bg19]);
    const double tr = median_of(by_algo[Algorithm::truthful]);
    if (!(ours >= bg && ours >= tr)) ok = false;
    detail += fmt(" %s %.3f/%.3f/%.3f;", ds.c_str(), ours, bg, tr);
  }

  ExperimentConfig slack = c;
  slack.budget_frac_lo = 1.2;
  slack.budget_frac_hi = 1.5;
  slack.repetitions = 30;
  slack.algorithms = {Algorithm::truthful};
  double worst_truthful = 1.0;
  for (const auto& r : compare_algorithms(slack)) {
    if (!r.error.empty()) worst_truthful = 0.0;
    for (const auto& a : r.results) worst_truthful = std::min(worst_truthful, a.ratio);
  }
  ok = ok && worst_truthful >= 0.99;
  return {ok, fmt("medians changing/bg19/truthful:%s truthful min at frac >= 1.2: %.4f",
                  detail.c_str(), worst_truthful)};
}

// 10. Per-round regret of the pacer with exact plan shrinks with T.
Verdict regret_scaling() {
  const std::size_t horizons[] = {250, 1000, 4000};
  std::vector<double> medians;
  for (std::size_t T : horizons) {
    const EpisodicModel model(
        T / 2, {{Distribution::uniform(0, 2), Distribution::atom(1)},
                {Distribution::uniform(0, 4), Distribution::atom(1)}});
    const double budget = 0.5 * static_cast<double>(T);
    const SpendRates rates = true_optimal_spend_rates(model, budget);
    SpendPlan plan;
    plan.rho = rates.rho;
    plan.mu_hat = rates.mu_star;
    plan.budget = budget;
    plan.horizon = T;
    const SpendPlan normalized = normalize_plan(plan, 0.0);
    const double eps = 2.0 * normalized.delta_used * static_cast<double>(T) / budget;
    std::vector<double> regret;
    for (int k = 0; k < 20; ++k) {
      RandomStream rng = RandomStream(1010, streams::evaluation).split(k);
      const Realization r = draw_realization(model, rng);
      EpisodicPacer pacer(make_pacer_config(normalized, model.value_bound()));
      const Outcome out = run_strategy(pacer, r, budget);
      const double h = hindsight_value(r, budget).value;
      regret.push_back(((1.0 - eps) * h - out.utility) / static_cast<double>(T));
    }
    medians.push_back(median_of(regret));
  }
  const bool ok = medians[1] < medians[0] && medians[2] < medians[1];
  return {ok, fmt("median per-round regret %.4f, %.4f, %.4f at T = 250, 1000, 4000", medians[0],
                  medians[1], medians[2])};
}

// 11. Fixed multiplier on the two-episode counterexample.
Verdict lemma2_demo() {
  ExperimentConfig c;
  c.horizon = 10;
  c.episodes = 2;
  c.repetitions = 2000;
  constexpr double v_low = 1.0;
  constexpr double v_high = 2.0;
  const auto runs = run_lemma2(c, 1.0, v_low, v_high);
  const double bound = 0.5 * static_cast<double>(c.horizon) * v_high - 2.0 * v_low;
  std::size_t hits = 0;
  std::vector<double> fixed;
  std::vector<double> pipeline;
  for (const auto& r : runs) {
    const auto* fm = r.find(Algorithm::fixed_multiplier);
    const auto* cs = r.find(Algorithm::changing_spend);
    if (fm == nullptr || cs == nullptr) continue;
    if (r.hindsight - fm->utility >= bound - 1e-9) ++hits;
    fixed.push_back(fm->ratio);
    pipeline.push_back(cs->ratio);
  }
  const double frac = static_cast<double>(hits) / static_cast<double>(runs.size());
  const double gap = median_of(pipeline) - median_of(fixed);
  const bool part_a = frac >= 1.0 / 9.0 - 0.05;
  const bool part_b = gap >= 0.2;
  return {part_a && part_b,
          fmt("regret >= %.1f in %.4f of %zu runs (%s); median ratio pipeline %.4f vs fixed "
              "multiplier %.4f, gap %.4f (%s)",
              bound, frac, runs.size(), part_a ? "ok" : "short", median_of(pipeline),
              median_of(fixed), gap, part_b ? "ok" : "short")};
}

// 12. Two-instance example: pipeline near optimal, BG19 not.
Verdict example1_demo() {
  ExperimentConfig c;
  c.samples = 10000;
  c.repetitions = 20;
  const auto runs = run_example1(c);
  std::map<std::string, std::vector<double>> ours;
  std::map<std::string, std::vector<double>> bg;
  bool complete = true;
  for (const auto& r : runs) {
    const auto* a = r.find(Algorithm::changing_spend);
    const auto* b = r.find(Algorithm::fixed_spend_bg19);
    if (a == nullptr || b == nullptr) {
      complete = false;
      continue;
    }
    ours[r.dataset].push_back(a->ratio);
    bg[r.dataset].push_back(b->ratio);
  }
  bool all_high = complete && ours.size() == 2;
  bool bg_low = false;
  std::string detail;
  for (auto& [ds, xs] : ours) {
    const double lo = *std::min_element(xs.begin(), xs.end());
    const double bg_med = median_of(bg[ds]);
    if (lo < 0.9) all_high = false;
    if (bg_med <= 0.75) bg_low = true;
    detail += fmt(" %s: min pipeline %.4f, median bg19 %.4f;", ds.c_str(), lo, bg_med);
  }
  return {all_high && bg_low, detail};
}

// 13. Bucketed plans on a drifting model.
Verdict slow_moving() {
  ExperimentConfig c;
  c.repetitions = 50;
  const SlowMovingModel model = make_drift_model(c);
  const auto cmp = compare_slow_moving(c, model);
  int wins = 0;
  for (std::size_t i = 0; i < cmp.coarse.size(); ++i) {
    const auto* a = cmp.coarse[i].find(Algorithm::changing_spend);
    const auto* b = cmp.fine[i].find(Algorithm::changing_spend);
    if (a != nullptr && b != nullptr && b->ratio > a->ratio) ++wins;
  }
  return {wins >= 35, fmt("10 buckets beat 1 bucket in %d of 50 paired seeds", wins)};
}

struct Criterion {
  int id;
  const char* title;
  std::function<Verdict()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {1, "hindsight oracle equivalence", hindsight_oracle},
      {2, "budget feasibility", budget_feasibility},
      {3, "DKW coverage", dkw_coverage},
      {4, "KDE rate", kde_rate},
      {5, "spend-rate accuracy, fixed price", spend_rate_fixed_price},
      {6, "spend-rate rate, stochastic price", spend_rate_stochastic_price},
      {7, "closed-form dual", closed_form_dual},
      {8, "ratio against training size", sample_sweep},
      {9, "algorithm comparison", algorithm_comparison},
      {10, "regret scaling in T", regret_scaling},
      {11, "fixed-multiplier counterexample", lemma2_demo},
      {12, "two-instance example", example1_demo},
      {13, "slow-moving buckets", slow_moving},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
      return 2;
    }
  }
  int failures = 0;
  int ran = 0;
  for (const auto& c : criteria()) {
    if (only != 0 && c.id != only) continue;
    ++ran;
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failures;
    std::printf("criterion %2d %s: %s |%s\n", c.id, v.pass ? "PASS" : "FAIL", c.title,
                v.detail.c_str());
    std::fflush(stdout);
  }
  if (ran == 0) {
    std::fprintf(stderr, "no criterion %d\n", only);
    return 2;
  }
  return failures == 0 ? 0 : 1;
}
