/* C interface to the pacekit library.
 *
 * Every function returns PK_OK (0) or a positive pk_status code. After a
 * failure, pk_last_error() returns a message for the calling thread that
 * stays valid until the next call on that thread. Objects are opaque handles
 * released with their matching *_free function; passing NULL to *_free is a
 * no-op. Output pointers are only written on success.
 */
#ifndef PACEKIT_PACEKIT_H
#define PACEKIT_PACEKIT_H

#include <stddef.h>
#include <stdint.h>

#if defined(PACEKIT_BUILDING_LIBRARY)
#define PK_API __attribute__((visibility("default")))
#else
#define PK_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pk_status {
  PK_OK = 0,
  PK_ERR_INVALID_ARGUMENT = 1,
  PK_ERR_ATOM_HAS_NO_DENSITY = 2,
  PK_ERR_QUADRATURE_NON_CONVERGENCE = 3,
  PK_ERR_UNKNOWN_DATASET = 4,
  PK_ERR_MIXED_FAMILIES = 5,
  PK_ERR_EMPTY_SAMPLE = 6,
  PK_ERR_NONPOSITIVE_BANDWIDTH = 7,
  PK_ERR_DEGENERATE_SAMPLE = 8,
  PK_ERR_BISECTION_BRACKET_FAILURE = 9,
  PK_ERR_ALL_ZERO_PLAN = 10,
  PK_ERR_INDIVISIBLE_HORIZON = 11,
  PK_ERR_INVALID_CONFIG = 12,
  PK_ERR_PROTOCOL_VIOLATION = 13,
  PK_ERR_OVERCHARGE = 14,
  PK_ERR_EMPTY_LISTS = 15,
  PK_ERR_EMPTY_TABLE = 16,
  PK_ERR_IO = 17,
  PK_ERR_PARSE = 18,
  PK_ERR_NULL_ARGUMENT = 100,
  PK_ERR_INTERNAL = 101
} pk_status;

typedef struct pk_model pk_model;
typedef struct pk_plan pk_plan;
typedef struct pk_strategy pk_strategy;
typedef struct pk_experiment pk_experiment;

PK_API const char* pk_version(void);
PK_API const char* pk_last_error(void);
PK_API const char* pk_status_name(int status);

/* Episodic models. */
PK_API int pk_model_dataset(const char* name, uint64_t seed, size_t episodes, size_t horizon,
                            pk_model** out);
/* Uses the ranges of `settings`; NULL selects the defaults. */
PK_API int pk_model_dataset_with(const pk_experiment* settings, const char* name,
                                 pk_model** out);
/* high = 0 selects the instance whose second episode has value 1, otherwise 3. */
PK_API int pk_model_example1(size_t horizon, int high, pk_model** out);
PK_API int pk_model_lemma2(size_t tau, double p_high, double v_low, double v_high,
                           pk_model** out);
PK_API int pk_model_load(const char* path, pk_model** out);
PK_API int pk_model_save(const pk_model* model, const char* path);
PK_API int pk_model_info(const pk_model* model, size_t* episodes, size_t* tau,
                         double* value_bound);
/* Mean buy-all expenditure over `seeds` evaluation draws. */
PK_API int pk_model_buy_all(const pk_model* model, uint64_t seed, size_t seeds, double* out);
/* The model named by the settings' dataset or model_file. */
PK_API int pk_model_from_experiment(const pk_experiment* settings, pk_model** out);
PK_API void pk_model_free(pk_model* model);

/* Spend plans. pk_plan_estimate draws settings->samples training samples per
 * episode from settings->seed and applies the settings' kernel, bandwidth and
 * delta rules. The returned plan is normalized. */
PK_API int pk_plan_estimate(const pk_model* model, const pk_experiment* settings, double budget,
                            pk_plan** out);
/* Exact optimal spend rates from the model's distributions, normalized with
 * zero delta. */
PK_API int pk_plan_exact(const pk_model* model, double budget, pk_plan** out);
PK_API int pk_plan_load(const char* path, pk_plan** out);
PK_API int pk_plan_save(const pk_plan* plan, const char* path);
/* Long-format CSV of the per-episode spend estimates (estimated plans only). */
PK_API int pk_plan_write_estimates(const pk_plan* plan, const char* path);
/* Copies up to `capacity` rates into rho; *episodes receives the full count. */
PK_API int pk_plan_get(const pk_plan* plan, double* rho, size_t capacity, size_t* episodes,
                       double* mu_hat, double* delta_used, double* budget, size_t* horizon);
PK_API void pk_plan_free(pk_plan* plan);

/* Bidding strategies. eta or mu_bar <= 0 selects the defaults. */
PK_API int pk_strategy_pacer(const pk_plan* plan, double value_bound, double eta, double mu_bar,
                             pk_strategy** out);
PK_API int pk_strategy_fixed_rate(double budget, size_t horizon, double eta, double mu_bar,
                                  pk_strategy** out);
PK_API int pk_strategy_truthful(double budget, pk_strategy** out);
PK_API int pk_strategy_fixed_multiplier(double beta, double budget, pk_strategy** out);
PK_API int pk_strategy_bid(pk_strategy* strategy, double value, double* bid);
PK_API int pk_strategy_observe(pk_strategy* strategy, double expenditure);
PK_API int pk_strategy_state(const pk_strategy* strategy, double* mu, double* remaining,
                             size_t* episode);
PK_API void pk_strategy_free(pk_strategy* strategy);

/* Runs the episodic pacer for `plan` on one realization of `model` drawn from
 * `seed`. settings supplies eta, mu_bar and warm_start and may be NULL. trace_csv may be
 * NULL. Any result pointer may be NULL. */
PK_API int pk_run_pacing(const pk_model* model, const pk_plan* plan,
                         const pk_experiment* settings, uint64_t seed,
                         const char* trace_csv, double* utility, double* spend,
                         double* hindsight);

/* Experiment settings, edited key by key with the same names as the config
 * file. */
PK_API int pk_experiment_new(pk_experiment** out);
PK_API int pk_experiment_load(pk_experiment* experiment, const char* path);
PK_API int pk_experiment_set(pk_experiment* experiment, const char* key, const char* value);
PK_API int pk_experiment_validate(const pk_experiment* experiment);
/* The explicit budget if set, otherwise the first repetition's budget
 * fraction times the model's buy-all spend. */
PK_API int pk_experiment_budget(const pk_experiment* experiment, const pk_model* model,
                                double* out);
/* Text of the effective settings; valid until the next call on the handle. */
PK_API const char* pk_experiment_describe(pk_experiment* experiment);

/* Output paths may be NULL. plot_path receives an SVG and plot_path.csv. */
PK_API int pk_experiment_run_compare(pk_experiment* experiment, const char* csv_path,
                                     const char* runs_csv_path, const char* plot_path);
PK_API int pk_experiment_run_sweep(pk_experiment* experiment, const char* csv_path,
                                   const char* plot_path);
PK_API int pk_experiment_run_slow_moving(pk_experiment* experiment, const char* csv_path);
/* scenario is "example1" or "lemma2". */
PK_API int pk_experiment_run_scenario(pk_experiment* experiment, const char* scenario,
                                      const char* csv_path);
/* Human-readable summary of the last run; valid until the next run. */
PK_API const char* pk_experiment_summary(const pk_experiment* experiment);
PK_API void pk_experiment_free(pk_experiment* experiment);

#ifdef __cplusplus
}
#endif

#endif /* PACEKIT_PACEKIT_H */
