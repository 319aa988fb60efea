/* C interface of the ghomog library. Every function returns a ghomog_status;
 * on failure ghomog_last_error() describes the problem (thread-local). Strings
 * returned through char** must be released with ghomog_string_free. */
#ifndef GHOMOG_H
#define GHOMOG_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define GHOMOG_API __declspec(dllexport)
#else
#define GHOMOG_API __attribute__((visibility("default")))
#endif

typedef enum ghomog_status {
  GHOMOG_OK = 0,
  GHOMOG_INVALID_ARGUMENT = 1,
  GHOMOG_CONFIG = 2,
  GHOMOG_WINDOW = 3,
  GHOMOG_DOMAIN = 4,
  GHOMOG_BUDGET = 5,
  GHOMOG_CERTIFICATE = 6,
  GHOMOG_IO = 7,
  GHOMOG_INTERNAL = 8
} ghomog_status;

typedef struct ghomog_field ghomog_field;
typedef struct ghomog_passage ghomog_passage;
typedef struct ghomog_config ghomog_config;
typedef struct ghomog_run ghomog_run;

GHOMOG_API const char* ghomog_version(void);
GHOMOG_API const char* ghomog_last_error(void);
GHOMOG_API const char* ghomog_status_name(ghomog_status status);
GHOMOG_API void ghomog_string_free(char* s);

/* ---- fields ---- */
GHOMOG_API ghomog_status ghomog_field_create(int dim, double amplitude, double bump_radius, double lattice_pitch,
                                             uint64_t seed, ghomog_field** out);
GHOMOG_API void ghomog_field_destroy(ghomog_field* field);
/* x, v: 3 doubles (trailing components ignored / zero for d = 2). */
GHOMOG_API ghomog_status ghomog_field_eval(const ghomog_field* field, const double* x, double* v);
/* sup|V| and the C^{1,1} constant L. */
GHOMOG_API ghomog_status ghomog_field_bounds(const ghomog_field* field, double* speed, double* L);

/* ---- first passage ---- */
/* theta(x0, .) on the square/cube of half-width `half_width` around x0 (x0 at a
 * cell center), up to time t_max (<= 0: no limit). */
GHOMOG_API ghomog_status ghomog_passage_create(const ghomog_field* field, const double* x0, double half_width,
                                               double spacing, double time_step, double t_max,
                                               ghomog_passage** out);
GHOMOG_API void ghomog_passage_destroy(ghomog_passage* passage);
/* Arrival time at the cell containing y; +inf when unreached. */
GHOMOG_API ghomog_status ghomog_passage_at(const ghomog_passage* passage, const double* y, double* theta);

/* ---- rearrangement ---- */
/* v: n*3 doubles (|v_i| <= 1), x: 3 doubles with sum v_i = n x. order: n indices. */
GHOMOG_API ghomog_status ghomog_rearrange(const double* v, size_t n, const double* x, int dim, size_t* order,
                                          double* max_deviation);

/* ---- experiment harness ---- */
GHOMOG_API ghomog_status ghomog_config_parse(const char* text, ghomog_config** out);
GHOMOG_API ghomog_status ghomog_config_load(const char* path, ghomog_config** out);
GHOMOG_API void ghomog_config_destroy(ghomog_config* config);
/* Normalized text with all defaults; fails with GHOMOG_CONFIG naming the field. */
GHOMOG_API ghomog_status ghomog_config_normalized(const ghomog_config* config, char** text);
GHOMOG_API ghomog_status ghomog_config_hash(const ghomog_config* config, uint64_t* hash);
/* JSON array of experiment kinds with parameter schemas. */
GHOMOG_API ghomog_status ghomog_catalog(char** json);

/* out_dir NULL/empty: $GHOMOG_OUT or "."; workers <= 0: from the config. */
GHOMOG_API ghomog_status ghomog_run_experiment(const ghomog_config* config, const char* out_dir, int workers,
                                               ghomog_run** out);
GHOMOG_API void ghomog_run_destroy(ghomog_run* run);
GHOMOG_API const char* ghomog_run_csv_path(const ghomog_run* run);
GHOMOG_API const char* ghomog_run_json_path(const ghomog_run* run);
/* Summary JSON (owned by the run). */
GHOMOG_API const char* ghomog_run_summary(const ghomog_run* run);
GHOMOG_API int ghomog_run_budget_exceeded(const ghomog_run* run);
GHOMOG_API int ghomog_run_failed_trials(const ghomog_run* run);
GHOMOG_API int ghomog_run_completed_trials(const ghomog_run* run);

#ifdef __cplusplus
}
#endif

#endif
