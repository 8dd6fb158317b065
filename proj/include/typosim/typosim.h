/*
 * Copyright 2026 The typosim Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the typosim library.
 *
 * Every function returns a ts_status. On failure, ts_last_error() returns a
 * message for the calling thread that stays valid until that thread's next
 * call. Strings returned through char** are owned by the caller and released
 * with ts_string_free. Matrices are passed row-major.
 */
#ifndef TYPOSIM_TYPOSIM_H
#define TYPOSIM_TYPOSIM_H

#include <stddef.h>
#include <stdint.h>

#if defined(TYPOSIM_BUILDING_LIBRARY)
#define TS_API __attribute__((visibility("default")))
#else
#define TS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ts_status {
  TS_OK = 0,
  TS_INVALID_ARGUMENT = 1,
  TS_IO = 2,
  TS_MISSING_FEATURE = 3,
  TS_MALFORMED_VALUE = 4,
  TS_SPACE_MISMATCH = 5,
  TS_UNKNOWN_DIMENSION = 6,
  TS_INSUFFICIENT_LANGUAGES = 7,
  TS_CORRUPT_CONTAINER = 8,
  TS_LAYOUT_MISMATCH = 9,
  TS_NON_FINITE_WEIGHTS = 10,
  TS_BAD_TENSOR_RANK = 11,
  TS_ARCHITECTURE_MISMATCH = 12,
  TS_SHAPE_MISMATCH = 13,
  TS_DEGENERATE_INPUT = 14,
  TS_NON_FINITE_VALUE = 15,
  TS_DEGENERATE_SERIES = 16,
  TS_INSUFFICIENT_DATA = 17,
  TS_PAIR_SET_MISMATCH = 18,
  TS_BAD_CLUSTER_COUNT = 19,
  TS_EMPTY_SET = 20,
  TS_CLUSTERS_OVERLAP = 21,
  TS_INTEGRITY = 22,
  TS_FETCH = 23,
  TS_CONFIG = 24,
  TS_INTERNAL = 99
} ts_status;

typedef enum ts_centering { TS_CENTERED = 0, TS_UNCENTERED = 1 } ts_centering;
typedef enum ts_route { TS_ROUTE_FAST = 0, TS_ROUTE_DIRECT = 1 } ts_route;
typedef enum ts_tail { TS_TWO_SIDED = 0, TS_GREATER = 1 } ts_tail;

typedef struct ts_typology ts_typology;
typedef struct ts_container ts_container;
typedef struct ts_experiment ts_experiment;
typedef struct ts_bundle ts_bundle;

typedef void (*ts_log_fn)(const char* line, void* user);

TS_API const char* ts_version(void);
TS_API const char* ts_status_name(ts_status status);
TS_API const char* ts_last_error(void);
TS_API void ts_string_free(char* s);

/* Typology tables. area is "syntactic" or "morphological"; a NULL path
 * selects the bundled table for that area. */
TS_API ts_status ts_typology_load(const char* path, const char* area, ts_typology** out);
TS_API void ts_typology_free(ts_typology* t);
TS_API ts_status ts_typology_languages_json(const ts_typology* t, char** out);
TS_API ts_status ts_typology_similarity(const ts_typology* t, const char* a, const char* b, double* out);
TS_API ts_status ts_typology_ranking_json(const ts_typology* t, char** out);
/* k = 0 selects the default count for the area. */
TS_API ts_status ts_typology_clusters_json(const ts_typology* t, size_t k, size_t restarts, uint64_t seed,
                                           char** out);
/* Clusters as comma-separated language codes. */
TS_API ts_status ts_typology_features_json(const ts_typology* t, const char* c1, const char* c2, char** out);

/* Kernels. */
TS_API ts_status ts_cka(const double* x, size_t x_cols, const double* y, size_t y_cols, size_t rows,
                        ts_centering centering, double* out);
TS_API ts_status ts_bicka(const double* w1, const double* w2, size_t rows, size_t cols, ts_centering centering,
                          ts_route route, double* out);
TS_API ts_status ts_spearman(const double* a, const double* b, size_t n, double* out);
TS_API ts_status ts_p_value(double rho, size_t n, ts_tail tail, double* out);

/* Checkpoint containers. layout_path may be NULL for the default layout. */
TS_API ts_status ts_container_open(const char* path, ts_container** out);
TS_API void ts_container_free(ts_container* c);
TS_API ts_status ts_container_tensors_json(const ts_container* c, char** out);
TS_API ts_status ts_container_validate_json(const ts_container* c, const char* layout_path, int expected_layers,
                                            char** out);

/* Experiments. */
TS_API ts_status ts_experiment_load(const char* config_path, ts_experiment** out);
TS_API ts_status ts_experiment_from_json(const char* json, const char* base_dir, ts_experiment** out);
TS_API void ts_experiment_free(ts_experiment* e);
/* Keys: mode, centering, significance, report_threshold, parallelism, seed,
 * restarts, cache_dir, output_dir, tail, focus ("S1,S2"; repeat to add). */
TS_API ts_status ts_experiment_set(ts_experiment* e, const char* key, const char* value);
TS_API ts_status ts_experiment_config_json(const ts_experiment* e, char** out);
TS_API ts_status ts_experiment_fetch(const ts_experiment* e, ts_log_fn log, void* user, char** out);
TS_API ts_status ts_experiment_run(const ts_experiment* e, ts_log_fn log, void* user, ts_bundle** out);

/* Report bundles. */
TS_API void ts_bundle_free(ts_bundle* b);
TS_API ts_status ts_bundle_emit(ts_bundle* b, const char* dir, char** manifest_json);
TS_API ts_status ts_bundle_summary_json(const ts_bundle* b, char** out);
TS_API ts_status ts_bundle_grid_csv(const ts_bundle* b, const char* grid_id, char** out);
TS_API ts_status ts_bundle_stats_json(const ts_bundle* b, char** out);

/* Rebuilds the SVG heatmap of every grid CSV in dir. */
TS_API ts_status ts_report_render(const char* dir, double significance, char** manifest_json);

#ifdef __cplusplus
}
#endif

#endif /* TYPOSIM_TYPOSIM_H */
