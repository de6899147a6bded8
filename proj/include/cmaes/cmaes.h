/* C interface to the CMA-ES library. All functions return a cmaes_status;
 * on failure cmaes_last_error() describes the most recent error on the
 * calling thread. Handles are opaque and owned by the caller. */
#ifndef CMAES_CMAES_H
#define CMAES_CMAES_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define CMAES_API __declspec(dllexport)
#else
#define CMAES_API __attribute__((visibility("default")))
#endif

typedef enum cmaes_status {
  CMAES_OK = 0,
  CMAES_ERR_NON_FINITE = 1,
  CMAES_ERR_NOT_POSITIVE_DEFINITE = 2,
  CMAES_ERR_DIMENSION_MISMATCH = 3,
  CMAES_ERR_DIMENSION_TOO_SMALL = 4,
  CMAES_ERR_INVALID_WEIGHTS = 5,
  CMAES_ERR_INVALID_LAMBDA = 6,
  CMAES_ERR_INVALID_ARGUMENT = 7,
  CMAES_ERR_MISSING_FITNESS = 8,
  CMAES_ERR_STALE_BATCH = 9,
  CMAES_ERR_CONDITION = 10,
  CMAES_ERR_STEP_SIZE_OVERFLOW = 11,
  CMAES_ERR_NO_FEASIBLE_POINTS = 12,
  CMAES_ERR_CONFIG = 13,
  CMAES_ERR_IO = 14,
  CMAES_ERR_INTERNAL = 99
} cmaes_status;

typedef struct cmaes_engine cmaes_engine;
typedef struct cmaes_config cmaes_config;
typedef struct cmaes_result cmaes_result;

CMAES_API const char* cmaes_last_error(void);
CMAES_API const char* cmaes_status_name(cmaes_status status);

/* ---- engine ------------------------------------------------------------ */

/* lambda = 0 selects the default population size. */
CMAES_API cmaes_status cmaes_engine_create(size_t n, size_t lambda, const double* mean, double sigma,
                                           uint64_t seed, cmaes_engine** out);
CMAES_API void cmaes_engine_destroy(cmaes_engine* engine);

CMAES_API size_t cmaes_engine_dim(const cmaes_engine* engine);
CMAES_API size_t cmaes_engine_lambda(const cmaes_engine* engine);
CMAES_API uint64_t cmaes_engine_generation(const cmaes_engine* engine);
CMAES_API double cmaes_engine_sigma(const cmaes_engine* engine);
/* Copies the n mean coordinates into `out`. */
CMAES_API cmaes_status cmaes_engine_mean(const cmaes_engine* engine, double* out);

/* Samples a batch and writes lambda points row-major into `points` (lambda * n). */
CMAES_API cmaes_status cmaes_engine_ask(cmaes_engine* engine, double* points);
/* Consumes lambda fitnesses for the batch of the last ask, in the same order. */
CMAES_API cmaes_status cmaes_engine_tell(cmaes_engine* engine, const double* fitnesses);

/* Writes the comma-joined names of the termination criteria that currently
 * fire (empty if none) into `buffer`. `required` receives the length needed
 * including the terminating NUL. */
CMAES_API cmaes_status cmaes_engine_check_termination(const cmaes_engine* engine, char* buffer,
                                                      size_t size, size_t* required);

CMAES_API cmaes_status cmaes_engine_save(const cmaes_engine* engine, const char* path);
CMAES_API cmaes_status cmaes_engine_load(const char* path, cmaes_engine** out);

/* ---- objectives -------------------------------------------------------- */

CMAES_API cmaes_status cmaes_objective_eval(const char* name, size_t n, const double* x, double* out);

/* ---- runner ------------------------------------------------------------ */

CMAES_API cmaes_status cmaes_config_create(cmaes_config** out);
CMAES_API void cmaes_config_destroy(cmaes_config* config);
/* Keys are the long CLI flag names; '-' and '_' are interchangeable. */
CMAES_API cmaes_status cmaes_config_set(cmaes_config* config, const char* key, const char* value);
CMAES_API cmaes_status cmaes_config_load_file(cmaes_config* config, const char* path);
CMAES_API cmaes_status cmaes_config_validate(const cmaes_config* config);

CMAES_API cmaes_status cmaes_run(const cmaes_config* config, cmaes_result** out);
CMAES_API void cmaes_result_destroy(cmaes_result* result);

CMAES_API double cmaes_result_best_fitness(const cmaes_result* result);
CMAES_API uint64_t cmaes_result_evals(const cmaes_result* result);
CMAES_API size_t cmaes_result_dim(const cmaes_result* result);
CMAES_API cmaes_status cmaes_result_best_x(const cmaes_result* result, double* out);
/* 0 stop-fitness reached, 1 budget exhausted, 3 numerical failure. */
CMAES_API int cmaes_result_exit_code(const cmaes_result* result);
CMAES_API size_t cmaes_result_leg_count(const cmaes_result* result);
/* JSON summary: best_x, best_fitness, evals, exit_code and per-leg stop reasons. */
CMAES_API cmaes_status cmaes_result_json(const cmaes_result* result, char* buffer, size_t size,
                                         size_t* required);

#ifdef __cplusplus
}
#endif

#endif
