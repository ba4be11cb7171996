// Copyright 2026 The FloodSight Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * @brief C interface to FloodSight: flood-map ingestion and queries, desk-scale
 * image translation, and the HTTP service.
 *
 * Objects are opaque handles released with their matching *_free function.
 * Every fallible call returns an fs_status; on failure fs_last_error() holds a
 * message for the calling thread until its next failing call. Output
 * parameters are written only on FS_OK.
 */

#ifndef FLOODSIGHT_FLOODSIGHT_H
#define FLOODSIGHT_FLOODSIGHT_H

#include <stddef.h>
#include <stdint.h>

#if defined(FLOODSIGHT_BUILDING_LIBRARY)
#define FS_API __attribute__((visibility("default")))
#else
#define FS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fs_status {
  FS_OK = 0,
  FS_E_ARGUMENT = 1,
  FS_E_IO = 2,
  FS_E_PARSE = 3,
  FS_E_EXTENT = 4,
  FS_E_DECODE = 5,
  FS_E_SHAPE = 6,
  FS_E_TRAINING = 7,
  FS_E_NOT_FOUND = 8,
  FS_E_UPSTREAM = 9,
  FS_E_IMAGERY = 10,
  FS_E_INTERNAL = 11
} fs_status;

typedef enum fs_flood_status {
  FS_FLOOD_NONE = 0,
  FS_FLOOD_INLAND = 1,
  FS_FLOOD_COASTAL = 2,
  FS_FLOOD_BOTH = 3
} fs_flood_status;

FS_API const char* fs_version(void);
FS_API const char* fs_status_name(fs_status status);
/** Message of the calling thread's last failure; "" if none. */
FS_API const char* fs_last_error(void);
/** "None", "Inland", "Coastal" or "Both". */
FS_API const char* fs_flood_status_name(fs_flood_status status);

/* ---------------------------------------------------------------- flood maps */

typedef struct fs_flood_map fs_flood_map;

typedef struct fs_flood_map_info {
  double origin_lon;
  double origin_lat;
  double cell_size_deg;
  uint32_t width;
  uint32_t height;
  int is_coastal;
  int return_period_years; /* 0 for coastal maps */
  float threshold_m;
  uint64_t flooded_cells;
} fs_flood_map_info;

/** Reads an ESRI ASCII depth grid and keeps cells with depth > threshold_m. */
FS_API fs_status fs_ingest_inland(const char* asc_path, double threshold_m,
                                  int return_period_years, fs_flood_map** out);
/** Same for a coastal exceedance grid (RCP4.5, 50th percentile, 2050). */
FS_API fs_status fs_ingest_coastal(const char* asc_path, double threshold_m,
                                   fs_flood_map** out);
FS_API fs_status fs_flood_map_load(const char* bfm_path, fs_flood_map** out);
FS_API fs_status fs_flood_map_save(const fs_flood_map* map, const char* bfm_path);
FS_API fs_status fs_flood_map_get_info(const fs_flood_map* map, fs_flood_map_info* out);
FS_API void fs_flood_map_free(fs_flood_map* map);

/** Either map may be NULL, not both. FS_E_EXTENT outside every extent. */
FS_API fs_status fs_query(const fs_flood_map* inland, const fs_flood_map* coastal,
                          double lat, double lon, fs_flood_status* out);

typedef struct fs_region fs_region;

FS_API fs_status fs_region_compute(const fs_flood_map* inland, const fs_flood_map* coastal,
                                   double lat_min, double lat_max, double lon_min,
                                   double lon_max, uint32_t max_cells_per_axis,
                                   fs_region** out);
FS_API uint32_t fs_region_rows(const fs_region* region);
FS_API uint32_t fs_region_cols(const fs_region* region);
/** Row 0 is the northernmost row. Out-of-range indices return FS_FLOOD_NONE. */
FS_API fs_flood_status fs_region_cell(const fs_region* region, uint32_t row, uint32_t col);
FS_API double fs_region_lat(const fs_region* region, uint32_t row);
FS_API double fs_region_lon(const fs_region* region, uint32_t col);
FS_API void fs_region_free(fs_region* region);

/* ------------------------------------------------------------------ datasets */

/** Writes trainX, trainY, testX, testY PNG directories under out_dir. */
FS_API fs_status fs_make_synthetic(const char* out_dir, uint32_t n_train, uint32_t n_test,
                                   uint32_t size, uint64_t seed);

/* -------------------------------------------------------------------- models */

typedef struct fs_model fs_model;

typedef struct fs_epoch_metrics {
  uint32_t epoch;
  double lr;
  double adv_g;
  double adv_f;
  double loss_d_x;
  double loss_d_y;
  double cycle_x;
  double cycle_y;
  double seconds;
} fs_epoch_metrics;

typedef void (*fs_epoch_callback)(const fs_epoch_metrics* metrics, void* user);

typedef struct fs_train_options {
  const char* data_dir;        /* holds trainX/ and trainY/ */
  const char* config_path;     /* key = value text; may be NULL when resuming */
  const char* resume_path;     /* checkpoint to continue from, or NULL */
  const char* checkpoint_path; /* written after the last epoch */
  const char* metrics_path;    /* CSV, one row per epoch run; NULL to skip */
  fs_epoch_callback on_epoch;  /* may be NULL */
  void* user;
} fs_train_options;

FS_API fs_status fs_train(const fs_train_options* options);

typedef struct fs_model_info {
  uint32_t image_size;
  uint32_t epoch;
  uint32_t epochs_total;
  uint64_t seed;
} fs_model_info;

FS_API fs_status fs_model_load(const char* checkpoint_path, fs_model** out);
FS_API fs_status fs_model_get_info(const fs_model* model, fs_model_info* out);
FS_API void fs_model_free(fs_model* model);

typedef enum fs_direction { FS_X_TO_Y = 0, FS_Y_TO_X = 1 } fs_direction;

/** Resizes the input PNG to the model size, translates, writes a PNG. */
FS_API fs_status fs_translate_file(const fs_model* model, const char* in_png,
                                   const char* out_png, fs_direction direction);

typedef struct fs_eval_result {
  double success_rate;    /* G(x) judged flooded, over testX */
  double cycle_loss;      /* held-out, both directions, [-1,1] scale */
  uint32_t n_test_x;
  uint32_t n_test_y;
} fs_eval_result;

/** Reads data_dir/testX and data_dir/testY. */
FS_API fs_status fs_evaluate(const fs_model* model, const char* data_dir, fs_eval_result* out);

/* ------------------------------------------------------------------- service */

typedef struct fs_server fs_server;

/** FLOODSIGHT_CONFIG, when set, replaces config_path (which may then be NULL). */
FS_API fs_status fs_server_create(const char* config_path, fs_server** out);
/** host NULL and port < 0 take the configured bind address; port 0 picks one. */
FS_API fs_status fs_server_bind(fs_server* server, const char* host, int port, int* bound_port);
/** Blocks until fs_server_stop is called from another thread. */
FS_API fs_status fs_server_run(fs_server* server);
FS_API void fs_server_stop(fs_server* server);
FS_API void fs_server_free(fs_server* server);

#ifdef __cplusplus
}
#endif

#endif /* FLOODSIGHT_FLOODSIGHT_H */
