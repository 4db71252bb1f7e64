/*
 * Copyright 2026 The mlal Authors
 * SPDX-License-Identifier: Apache-2.0
 */

/*
 * C interface to the mlal multi-label active learning engine.
 *
 * All objects are opaque handles owned by the caller and released with the
 * matching *_free function. Every fallible call returns an mlal_status; on
 * anything other than MLAL_OK (and MLAL_EXHAUSTED, which is not an error)
 * mlal_last_error() describes the failure for the calling thread. Strings
 * returned through char** out-parameters are heap-allocated and released
 * with mlal_string_free.
 */
#ifndef MLAL_MLAL_H_
#define MLAL_MLAL_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(MLAL_BUILDING_LIBRARY)
#    define MLAL_API __declspec(dllexport)
#  else
#    define MLAL_API __declspec(dllimport)
#  endif
#else
#  define MLAL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mlal_status {
  MLAL_OK = 0,
  MLAL_ERR_INVALID_ARGUMENT = 1,
  MLAL_ERR_CONFIG = 2,
  MLAL_ERR_DATA = 3,
  MLAL_ERR_STATE = 4,
  MLAL_ERR_IO = 5,
  MLAL_ERR_RUNTIME = 6,
  /* Terminal signal: the experiment has nothing left to do. */
  MLAL_EXHAUSTED = 7
} mlal_status;

typedef struct mlal_config mlal_config;
typedef struct mlal_dataset mlal_dataset;
typedef struct mlal_engine mlal_engine;
typedef struct mlal_server mlal_server;

MLAL_API const char* mlal_version(void);
MLAL_API const char* mlal_last_error(void);
MLAL_API const char* mlal_status_name(mlal_status status);
MLAL_API void mlal_string_free(char* str);

/* ---- configuration ---------------------------------------------------- */

MLAL_API mlal_status mlal_config_parse(const char* text, mlal_config** out);
MLAL_API mlal_status mlal_config_load(const char* path, mlal_config** out);
/* Applies "section.key=value"; later overrides win. */
MLAL_API mlal_status mlal_config_override(mlal_config* config, const char* assignment);
/* Validates the document; call after all overrides. */
MLAL_API mlal_status mlal_config_validate(const mlal_config* config);
/* Writes up to `capacity` seeds into `seeds` and the total count into `count`. */
MLAL_API mlal_status mlal_config_seeds(const mlal_config* config, uint64_t* seeds, size_t capacity,
                                       size_t* count);
MLAL_API void mlal_config_free(mlal_config* config);

/* ---- datasets ---------------------------------------------------------- */

/* Generates or loads the dataset described by the config's [data] section. */
MLAL_API mlal_status mlal_dataset_from_config(const mlal_config* config, mlal_dataset** out);
/* `splits_path` may be NULL for a seeded 50/25/25 split. */
MLAL_API mlal_status mlal_dataset_load_csv(const char* features_path, const char* labels_path,
                                           const char* splits_path, uint64_t seed,
                                           mlal_dataset** out);
/* Writes features.csv, labels.csv and splits.csv into `dir`. */
MLAL_API mlal_status mlal_dataset_save_csv(const mlal_dataset* dataset, const char* dir);
MLAL_API size_t mlal_dataset_size(const mlal_dataset* dataset);
MLAL_API size_t mlal_dataset_num_classes(const mlal_dataset* dataset);
MLAL_API size_t mlal_dataset_feature_dim(const mlal_dataset* dataset);
MLAL_API void mlal_dataset_free(mlal_dataset* dataset);

/* ---- engine ------------------------------------------------------------ */

/* Draws the initial labeled set with `seed`; the dataset is copied. */
MLAL_API mlal_status mlal_engine_create(const mlal_config* config, const mlal_dataset* dataset,
                                        uint64_t seed, mlal_engine** out);
/* Runs one iteration. Returns MLAL_EXHAUSTED when the experiment is finished. */
MLAL_API mlal_status mlal_engine_step(mlal_engine* engine);
/* Runs iterations until finished (oracle mode only). */
MLAL_API mlal_status mlal_engine_run(mlal_engine* engine);
MLAL_API int mlal_engine_finished(const mlal_engine* engine);
MLAL_API uint64_t mlal_engine_iteration(const mlal_engine* engine);
MLAL_API size_t mlal_engine_labeled_count(const mlal_engine* engine);
MLAL_API size_t mlal_engine_unlabeled_count(const mlal_engine* engine);
/* Pending batch as {"status":..., "iteration":..., "ids":[...], "received":[...]}. */
MLAL_API mlal_status mlal_engine_pending_json(const mlal_engine* engine, char** out_json);
/* Body: {"<id>": [0,1,...], ...}. Response states accepted/remaining counts. */
MLAL_API mlal_status mlal_engine_submit_labels_json(mlal_engine* engine, const char* labels_json,
                                                    char** out_json);
MLAL_API mlal_status mlal_engine_history_csv(const mlal_engine* engine, char** out_csv);
MLAL_API mlal_status mlal_engine_selection_csv(const mlal_engine* engine, char** out_csv);
MLAL_API mlal_status mlal_engine_save_checkpoint(const mlal_engine* engine, const char* path);
MLAL_API mlal_status mlal_engine_load_checkpoint(const char* path, mlal_engine** out);
MLAL_API void mlal_engine_free(mlal_engine* engine);

/* ---- batch runs and reports ------------------------------------------- */

/* Runs every configured seed and writes per-seed CSVs, summary.csv and run.json. */
MLAL_API mlal_status mlal_run(const mlal_config* config, const mlal_dataset* dataset,
                              const char* out_dir);
/* Merges runs under `dir` into report CSV/SVG files; returns the micro-F1 table. */
MLAL_API mlal_status mlal_report(const char* dir, char** out_table_csv);

/* ---- annotation service ----------------------------------------------- */

/* Takes ownership of `engine` (which must not be freed by the caller). */
MLAL_API mlal_status mlal_server_create(mlal_engine* engine, int thumbnails, mlal_server** out);
/* Optional directory of static UI assets served at "/". */
MLAL_API mlal_status mlal_server_set_ui_dir(mlal_server* server, const char* dir);
/* Blocks serving HTTP until mlal_server_stop is called from another thread. */
MLAL_API mlal_status mlal_server_listen(mlal_server* server, const char* bind, int port);
MLAL_API void mlal_server_stop(mlal_server* server);
MLAL_API void mlal_server_free(mlal_server* server);

#ifdef __cplusplus
}
#endif

#endif /* MLAL_MLAL_H_ */
