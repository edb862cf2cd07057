// Copyright 2026 The Clusterlets Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to the clusterlets library.
 *
 * Objects are opaque handles created by the load, synthesize and run calls and released
 * with the matching free function. Every fallible call returns a clusterlets_status;
 * on failure clusterlets_last_error() describes the problem (the message is
 * per thread and valid until the next call on that thread). Strings returned
 * through char** must be released with clusterlets_string_free. */

#ifndef CLUSTERLETS_CLUSTERLETS_H_
#define CLUSTERLETS_CLUSTERLETS_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(CLUSTERLETS_BUILDING_LIBRARY)
#    define CLUSTERLETS_API __declspec(dllexport)
#  else
#    define CLUSTERLETS_API __declspec(dllimport)
#  endif
#else
#  define CLUSTERLETS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum clusterlets_status {
  CLUSTERLETS_OK = 0,
  CLUSTERLETS_ERROR_CONFIG = 1,     /* unknown name, missing column, bad range */
  CLUSTERLETS_ERROR_PARSE = 2,      /* malformed CSV / JSON / TOML */
  CLUSTERLETS_ERROR_VALIDATION = 3, /* input violates an invariant */
  CLUSTERLETS_ERROR_DOMAIN = 4,     /* metric or algorithm outside its domain */
  CLUSTERLETS_ERROR_IO = 5,
  CLUSTERLETS_ERROR_INVALID_ARGUMENT = 6, /* null handle or pointer */
  CLUSTERLETS_ERROR_INTERNAL = 7
} clusterlets_status;

typedef struct clusterlets_dataset clusterlets_dataset;
typedef struct clusterlets_result clusterlets_result;

CLUSTERLETS_API const char* clusterlets_version(void);
CLUSTERLETS_API const char* clusterlets_last_error(void);
CLUSTERLETS_API const char* clusterlets_status_string(clusterlets_status status);
CLUSTERLETS_API void clusterlets_string_free(char* s);

/* Comma-separated list of accepted matcher names. */
CLUSTERLETS_API const char* clusterlets_matcher_names(void);
/* Non-zero if `name` is a known matcher. */
CLUSTERLETS_API int clusterlets_matcher_valid(const char* name);
/* Centroid sample size for "test" or "paper"; 0 for anything else. */
CLUSTERLETS_API uint64_t clusterlets_profile_sample_size(const char* profile);

/* ---- datasets ---- */

/* feature_columns and color_order are comma lists; NULL or "" for defaults. */
CLUSTERLETS_API clusterlets_status clusterlets_dataset_load_csv(
    const char* path, const char* color_column, const char* feature_columns,
    const char* color_order, clusterlets_dataset** out);

typedef struct clusterlets_synth_options {
  size_t n_blobs;
  size_t n_per_blob;
  const double* proportions; /* one weight per color */
  size_t n_colors;
  double separation;
  size_t dims;
  uint64_t seed;
} clusterlets_synth_options;

CLUSTERLETS_API void clusterlets_synth_options_init(clusterlets_synth_options* opts);
CLUSTERLETS_API clusterlets_status clusterlets_dataset_synthesize(
    const clusterlets_synth_options* opts, clusterlets_dataset** out);
/* Writes the dataset in the format read by clusterlets_dataset_load_csv,
 * with the color column named "color". */
CLUSTERLETS_API clusterlets_status clusterlets_dataset_write_csv(
    const clusterlets_dataset* ds, const char* path);

CLUSTERLETS_API size_t clusterlets_dataset_rows(const clusterlets_dataset* ds);
CLUSTERLETS_API size_t clusterlets_dataset_dims(const clusterlets_dataset* ds);
CLUSTERLETS_API size_t clusterlets_dataset_color_count(const clusterlets_dataset* ds);
/* Number of rows with the given color id (ids follow the color order). */
CLUSTERLETS_API size_t clusterlets_dataset_color_size(const clusterlets_dataset* ds, size_t color);
CLUSTERLETS_API const char* clusterlets_dataset_color_name(const clusterlets_dataset* ds, size_t color);
CLUSTERLETS_API void clusterlets_dataset_free(clusterlets_dataset* ds);

/* ---- single runs ---- */

typedef struct clusterlets_run_options {
  const char* matcher;         /* d-pb, g-d-pb, b-pb, g-b-pb, centroid */
  int k;                       /* clusterlets per color */
  int hops;                    /* pinball matchers */
  double omega;                /* centroid matcher, in [0, 1] */
  uint64_t sample_size;        /* centroid matcher */
  uint64_t seed;
  int standardize;             /* z-score features first */
  const char* silhouette_mode; /* "centroid-level" or "instance-level" */
  const char* objective;       /* "affine" or "literal" */
  const char* greedy_pool;     /* "exclusive" or "shared"; g-d-pb and g-b-pb only */
  int max_iterations;
  double tolerance;
} clusterlets_run_options;

CLUSTERLETS_API void clusterlets_run_options_init(clusterlets_run_options* opts);

/* Extraction, matching and evaluation on one dataset. */
CLUSTERLETS_API clusterlets_status clusterlets_run(const clusterlets_dataset* ds,
                                                   const clusterlets_run_options* opts,
                                                   clusterlets_result** out);
CLUSTERLETS_API size_t clusterlets_result_cluster_count(const clusterlets_result* r);
CLUSTERLETS_API clusterlets_status clusterlets_result_clustering_json(const clusterlets_result* r,
                                                                     char** out);
CLUSTERLETS_API clusterlets_status clusterlets_result_metrics_json(const clusterlets_result* r,
                                                                  char** out);
CLUSTERLETS_API void clusterlets_result_free(clusterlets_result* r);

/* Recomputes metrics for a stored clustering document. The dataset is
 * reloaded from `data_path`, or from the path recorded in the document when
 * NULL, and must match the recorded fingerprint. */
CLUSTERLETS_API clusterlets_status clusterlets_evaluate(const char* clustering_json,
                                                        const char* data_path,
                                                        char** metrics_json);

/* ---- grid search ---- */

/* Number of runs a grid config (JSON or TOML text; NULL = published grid)
 * expands to. */
CLUSTERLETS_API clusterlets_status clusterlets_grid_size(const char* config_text,
                                                         const char* profile, size_t* out);

/* Runs the grid and writes out_dir/results.jsonl and out_dir/results.csv,
 * one record per run in grid order. workers = 0 reads CLUSTERLETS_WORKERS. */
CLUSTERLETS_API clusterlets_status clusterlets_grid_run(const clusterlets_dataset* ds,
                                                        const char* dataset_name,
                                                        const char* config_text,
                                                        const char* profile, const char* out_dir,
                                                        unsigned workers, size_t* n_records);

/* Best record per dataset as JSON. criterion: "mean_deviation" or "cohesion".
 * Records with n_clusters <= max_excluded_clusters or overlap >= max_overlap
 * are filtered out. */
CLUSTERLETS_API clusterlets_status clusterlets_select_best(const char* results_path,
                                                           const char* criterion,
                                                           size_t max_excluded_clusters,
                                                           double max_overlap, char** out_json);

/* ---- cross-run statistics ---- */

typedef struct clusterlets_stats_options {
  const char* matchers;    /* comma list filter, NULL = all */
  const char* datasets;    /* comma list filter, NULL = all */
  const char* variables;   /* comma list of correlated fields, NULL = default */
  const char* rank_metric; /* NULL = deviation_mean */
  int higher_is_better;
  int write_svg;
} clusterlets_stats_options;

CLUSTERLETS_API void clusterlets_stats_options_init(clusterlets_stats_options* opts);

/* Reads results.jsonl or results.csv; writes correlations.json, ranks.json
 * and optionally ranks.svg into out_dir. */
CLUSTERLETS_API clusterlets_status clusterlets_stats(const char* results_path,
                                                     const clusterlets_stats_options* opts,
                                                     const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif /* CLUSTERLETS_CLUSTERLETS_H_ */
