#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "pacekit/distributions.hpp"
#include "pacekit/errors.hpp"
#include "pacekit/estimation.hpp"

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

std::vector<double> draw(const Distribution& d, std::size_t n, RandomStream rng) {
  std::vector<double> xs(n);
  for (auto& x : xs) x = d.sample(rng);
  return xs;
}

}  // namespace

TEST_SUITE("estimation") {
  TEST_CASE("empirical cdf counts strictly smaller samples") {
    const auto f = fit_ecdf({1, 2, 3});
    CHECK(f(2.5) == Approx(2.0 / 3.0));
    CHECK(f(2.0) == Approx(1.0 / 3.0));
    CHECK(f(0.0) == 0.0);
    CHECK(f(10.0) == 1.0);
    CHECK(code_of([] { fit_ecdf({}); }) == ErrorCode::empty_sample);
  }

  TEST_CASE("dkw bound") {
    CHECK(dkw_bound(200, 0.05) == Approx(std::sqrt(std::log(40.0) / 400.0)).epsilon(1e-12));
    CHECK(dkw_bound(200, 0.05) == Approx(0.09603).epsilon(1e-4));
    CHECK(dkw_bound(800, 0.05) == Approx(dkw_bound(200, 0.05) / 2).epsilon(1e-12));
    CHECK(dkw_bound(1, 2.0 / std::exp(2.0)) == Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("dkw coverage on uniform samples") {
    const auto u = Distribution::uniform(0, 1);
    int covered = 0;
    for (std::uint64_t trial = 0; trial < 100; ++trial) {
      const auto ecdf = fit_ecdf(draw(u, 2000, RandomStream(trial, 77)));
      if (ecdf.sup_distance([](double x) { return std::clamp(x, 0.0, 1.0); }) <=
          dkw_bound(2000, 0.05)) {
        ++covered;
      }
    }
    CHECK(covered >= 95);
  }

  TEST_CASE("kde values") {
    const auto k = fit_kde({0.0}, Kernel::gaussian, 1.0);
    CHECK(k(0.0) == Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-12));
    CHECK(k(0.0) == Approx(0.39894).epsilon(1e-5));

    const std::vector<double> xs{0.2, 0.5, 1.1, 1.7, 2.0};
    double mean = 0.0;
    for (double x : xs) mean += x / xs.size();
    // Sample set symmetric about its mean.
    std::vector<double> sym;
    for (double x : xs) {
      sym.push_back(x);
      sym.push_back(2 * mean - x);
    }
    for (auto kernel : {Kernel::gaussian, Kernel::exponential, Kernel::uniform}) {
      const auto d = fit_kde(sym, kernel, 0.3);
      for (double x : {0.0, 0.4, 0.9, 1.3}) CHECK(d(x) == Approx(d(2 * mean - x)).epsilon(1e-12));
    }

    CHECK(code_of([] { fit_kde({}, Kernel::gaussian, 1.0); }) == ErrorCode::empty_sample);
    CHECK(code_of([] { fit_kde({1.0}, Kernel::gaussian, 0.0); }) ==
          ErrorCode::nonpositive_bandwidth);
  }

  TEST_CASE("kernels integrate to one") {
    for (auto kernel : {Kernel::gaussian, Kernel::exponential, Kernel::uniform}) {
      const auto d = fit_kde({1.0, 2.0, 2.5}, kernel, 0.4);
      const double w = kernel_support(kernel) * 0.4 + 0.1;
      double mass = 0.0;
      constexpr int cells = 200000;
      const double lo = 1.0 - w;
      const double hi = 2.5 + w;
      const double h = (hi - lo) / cells;
      for (int i = 0; i < cells; ++i) mass += d(lo + (i + 0.5) * h) * h;
      CHECK(mass == Approx(1.0).epsilon(1e-4));
      CHECK(parse_kernel(kernel_name(kernel)) == kernel);
    }
  }

  TEST_CASE("kde error shrinks with n") {
    const auto ln = Distribution::lognormal(0, 0.5);
    double prev = 1e9;
    for (std::size_t n : {250, 2000, 16000}) {
      const auto xs = draw(ln, n, RandomStream(5, n));
      const auto d = fit_kde(xs, Kernel::gaussian, default_bandwidth(xs));
      double err = 0.0;
      for (int i = 1; i <= 500; ++i) {
        const double x = 5.0 * i / 500.0;
        err = std::max(err, std::abs(d(x) - oracle::lognormal_pdf(x, 0, 0.5)));
      }
      CHECK(err < prev);
      prev = err;
    }
  }

  TEST_CASE("default bandwidth") {
    std::vector<double> xs;
    RandomStream rng(3);
    for (int i = 0; i < 1000; ++i) xs.push_back(rng.normal());
    double mean = 0.0;
    for (double x : xs) mean += x / 1000.0;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / 999.0);
    // Rescale to unit sample deviation so the rule gives 1000^(-1/3).
    for (double& x : xs) x /= sd;
    CHECK(default_bandwidth(xs) == Approx(0.1).epsilon(1e-9));
    CHECK(default_bandwidth(xs, BandwidthRule::unit) == Approx(0.1).epsilon(1e-9));

    auto scaled = xs;
    for (double& x : scaled) x *= 3.5;
    CHECK(default_bandwidth(scaled) == Approx(3.5 * default_bandwidth(xs)).epsilon(1e-9));

    const std::vector<double> flat(10, 2.0);
    CHECK(code_of([&] { default_bandwidth(flat); }) == ErrorCode::degenerate_sample);
  }

  TEST_CASE("fixed-price spend estimate") {
    const std::vector<double> v{1, 2, 3, 4};
    const auto g = approx_spend_fp(v, 2.0);
    CHECK(g(0.0) == Approx(1.5));
    CHECK(g(1.0) == Approx(0.5));
    CHECK(g(1.0001) == 0.0);
    CHECK(g(50.0) == 0.0);
    CHECK(g.provenance() == SpendFunctionEstimate::Provenance::fixed_price);
    CHECK(g.fixed_price() == 2.0);
    CHECK(code_of([] { approx_spend_fp(std::vector<double>{}, 1.0); }) ==
          ErrorCode::empty_sample);
  }

  TEST_CASE("fixed-price path is exact") {
    RandomStream rng(12);
    const auto xs = draw(Distribution::lognormal(0, 0.8), 300, RandomStream(4));
    const double p = 0.9;
    const auto g = approx_spend_fp(xs, p);
    const auto f = fit_ecdf(xs);
    for (int i = 0; i < 500; ++i) {
      const double mu = rng.uniform(0, 6);
      CHECK(g(mu) == p * (1.0 - f((1.0 + mu) * p)));
    }
    for (double x : xs) {
      const double mu = x / p - 1.0;
      if (mu < 0) continue;
      CHECK(g(mu) == p * (1.0 - f((1.0 + mu) * p)));
    }
  }

  TEST_CASE("stochastic-price spend estimate") {
    RandomStream rng(21);
    std::vector<double> values(400, 10.0);
    const auto prices = draw(Distribution::normal(1.0, 0.001), 400, RandomStream(22));
    const auto g = approx_spend_sp(values, prices, Kernel::gaussian, default_bandwidth(prices));
    CHECK(g(0.0) == Approx(1.0).epsilon(0.05));
    CHECK(g(20.0) <= 1e-3);
    CHECK(g.provenance() == SpendFunctionEstimate::Provenance::stochastic_price);

    const auto uv = Distribution::uniform(0, 2);
    const auto np = Distribution::normal(1, 0.05);
    const auto vs = draw(uv, 5000, RandomStream(23));
    const auto ps = draw(np, 5000, RandomStream(24));
    const auto h = approx_spend_sp(vs, ps, Kernel::gaussian, default_bandwidth(ps));
    CHECK(std::abs(h(0.5) - true_spend_function(uv, np, 0.5)) <= 0.03);

    CHECK(code_of([] {
            approx_spend_sp(std::vector<double>{1.0}, std::vector<double>{1.0}, Kernel::gaussian,
                            -1.0);
          }) == ErrorCode::nonpositive_bandwidth);
  }

  TEST_CASE("stochastic-price estimate tracks the true spend function") {
    const auto uv = Distribution::uniform(0, 2);
    const auto np = Distribution::normal(0.8, 0.2);
    const auto vs = draw(uv, 50000, RandomStream(31));
    const auto ps = draw(np, 50000, RandomStream(32));
    const auto g = approx_spend_sp(vs, ps, Kernel::gaussian, default_bandwidth(ps));
    double err = 0.0;
    const auto& grid = g.mu_grid();
    for (std::size_t i = 0; i < grid.size(); i += 4) {
      err = std::max(err, std::abs(g(grid[i]) - true_spend_function(uv, np, grid[i])));
    }
    CHECK(err <= 0.05 * 0.8);
  }

  TEST_CASE("estimates are nonnegative and nonincreasing") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto vs = draw(Distribution::lognormal(0, 0.7), 300, RandomStream(seed, 1));
      const auto ps = draw(Distribution::max_of_lognormals({{-1, 0.5}, {-0.7, 0.4}}), 300,
                           RandomStream(seed, 2));
      for (const auto& g : {approx_spend_sp(vs, ps, Kernel::exponential, default_bandwidth(ps)),
                            approx_spend_fp(vs, 0.7)}) {
        const auto& vals = g.values();
        for (std::size_t i = 0; i < vals.size(); ++i) {
          CHECK(vals[i] >= 0.0);
          if (i > 0) CHECK(vals[i] <= vals[i - 1]);
        }
        double prev = g(0.0);
        for (int i = 1; i <= 400; ++i) {
          const double cur = g(g.mu_max() * i / 400.0);
          CHECK(cur <= prev + 1e-15);
          prev = cur;
        }
      }
    }
  }

  TEST_CASE("estimates csv") {
    const std::vector<double> v{1, 2, 3, 4};
    const std::vector<SpendFunctionEstimate> es{approx_spend_fp(v, 2.0)};
    std::ostringstream out;
    write_estimates_csv(out, es);
    CHECK(out.str().rfind("episode,mu,value\n", 0) == 0);
    CHECK(out.str().find("\n1,") != std::string::npos);
  }
}
