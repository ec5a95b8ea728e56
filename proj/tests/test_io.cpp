#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "pacekit/errors.hpp"
#include "pacekit/io.hpp"

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

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("episodic model round trip") {
    const EpisodicModel m(
        4,
        {{Distribution::uniform(0, 2), Distribution::atom(1)},
         {Distribution::lognormal(0.1, 0.4), Distribution::max_of_lognormals({{-1, 0.5}, {0, 0.2}})},
         {Distribution::discrete({0, 3}, {0.25, 0.75}), Distribution::normal(1, 0.1)}},
        "mixed");
    const auto back = model_from_json(model_to_json(m));
    CHECK(back.tau() == 4);
    CHECK(back.name() == "mixed");
    REQUIRE(back.episodes() == 3);
    for (std::size_t e = 0; e < 3; ++e) {
      CHECK(back.episode(e).value == m.episode(e).value);
      CHECK(back.episode(e).price == m.episode(e).price);
    }
  }

  TEST_CASE("slow-moving model round trip") {
    const auto s = make_slow_moving_interpolation(
        {Distribution::uniform(1, 3), Distribution::atom(1)},
        {Distribution::uniform(0, 1.5), Distribution::atom(1)}, 10);
    const auto back = slow_model_from_json(slow_model_to_json(s));
    CHECK(back.horizon() == 10);
    CHECK(back.declared_zeta() == s.declared_zeta());
    CHECK(back.round(7).value == s.round(7).value);
  }

  TEST_CASE("plan round trip") {
    SpendPlan p;
    p.rho = {0.25, 0.5};
    p.mu_hat = 0.3;
    p.budget = 75;
    p.horizon = 100;
    p.normalized = true;
    p.delta_used = 0.05;
    p.provenance = "fp";
    const auto back = plan_from_json(plan_to_json(p));
    CHECK(back.rho == p.rho);
    CHECK(back.mu_hat == p.mu_hat);
    CHECK(back.budget == p.budget);
    CHECK(back.horizon == 100);
    CHECK(back.normalized);
    CHECK(back.delta_used == 0.05);
    CHECK(back.provenance == "fp");
  }

  TEST_CASE("malformed documents") {
    CHECK(code_of([] { plan_from_json("{"); }) == ErrorCode::parse_error);
    CHECK(code_of([] { plan_from_json(R"({"format":"pacekit.spend_plan","version":2})"); }) ==
          ErrorCode::parse_error);
    CHECK(code_of([] { model_from_json(R"({"format":"pacekit.spend_plan","version":1})"); }) ==
          ErrorCode::parse_error);
    CHECK(code_of([] {
            model_from_json(
                R"({"format":"pacekit.episodic_model","version":1,"tau":2,"episodes":[)"
                R"({"value":{"family":"cauchy"},"price":{"family":"atom","value":1}}]})");
          }) == ErrorCode::parse_error);
    CHECK(code_of([] { read_text_file("/nonexistent/pacekit/plan.json"); }) ==
          ErrorCode::io_error);
  }

  TEST_CASE("ranges ini") {
    Table1Ranges r;
    r.fixed_price = 1.25;
    r.maxlog_k = 3;
    r.uniform_hi = {1.5, 2.5};
    const auto back = ranges_from_ini(ranges_to_ini(r));
    CHECK(back.fixed_price == 1.25);
    CHECK(back.maxlog_k == 3);
    CHECK(back.uniform_hi.lo == 1.5);
    CHECK(back.uniform_hi.hi == 2.5);
    CHECK(back.normal_price_sd.hi == r.normal_price_sd.hi);

    CHECK(code_of([] { ranges_from_ini("colour = red\n"); }) == ErrorCode::invalid_config);
    CHECK(code_of([] { ranges_from_ini("[uniform_lo]\nlo = 2\nhi = 1\n"); }) ==
          ErrorCode::invalid_config);
    CHECK(code_of([] { ranges_from_ini("[uniform_lo]\nmid = 1\n"); }) ==
          ErrorCode::invalid_config);
  }

  TEST_CASE("experiment ini") {
    const auto c = experiment_from_ini(
        "; comment\n"
        "dataset = normal_v_fix_p\n"
        "seed = 9\n"
        "T = 500\n"
        "E = 5\n"
        "n = 250\n"
        "budget_frac = 0.5\n"
        "algorithms = truthful, changing_spend\n"
        "kernel = exponential\n"
        "delta_mode = theory\n"
        "warm_start = false\n"
        "n_grid = 10, 100\n"
        "budget_fracs = 0.5, 1.0\n");
    CHECK(c.dataset == "normal_v_fix_p");
    CHECK(c.seed == 9);
    CHECK(c.horizon == 500);
    CHECK(c.episodes == 5);
    CHECK(c.samples == 250);
    CHECK(c.budget_frac_lo == 0.5);
    CHECK(c.budget_frac_hi == 0.5);
    CHECK(c.algorithms == std::vector<Algorithm>{Algorithm::truthful, Algorithm::changing_spend});
    CHECK(c.kernel == Kernel::exponential);
    CHECK(c.delta_mode == DeltaMode::theory);
    CHECK_FALSE(c.warm_start);
    CHECK(c.n_grid == std::vector<std::size_t>{10, 100});

    const auto again = experiment_from_ini(experiment_to_ini(c));
    CHECK(experiment_to_ini(again) == experiment_to_ini(c));

    CHECK(code_of([] { experiment_from_ini("colour = red\n"); }) == ErrorCode::invalid_config);
    CHECK(code_of([] { experiment_from_ini("seed = -3\n"); }) == ErrorCode::invalid_config);
    CHECK(code_of([] { experiment_from_ini("schema_version = 2\n"); }) ==
          ErrorCode::invalid_config);
    CHECK(code_of([] { experiment_from_ini("algorithms = greedy\n"); }) ==
          ErrorCode::invalid_config);
    ExperimentConfig d;
    CHECK(code_of([&] { apply_setting(d, "warm_start", "maybe"); }) == ErrorCode::invalid_config);
  }

  TEST_CASE("text files") {
    const auto path = std::filesystem::temp_directory_path() / "pacekit_io_test.txt";
    write_text_file(path.string(), "hello\n");
    CHECK(read_text_file(path.string()) == "hello\n");
    std::filesystem::remove(path);
  }
}
