#ifndef VRT_VRT_H
#define VRT_VRT_H

/* Virtual risk terrains for low-altitude UAS operations. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define VRT_API __declspec(dllexport)
#elif defined(__GNUC__)
#  define VRT_API __attribute__((visibility("default")))
#else
#  define VRT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vrt_status {
  VRT_OK = 0,
  VRT_E_ARGUMENT = 1,   /* bad call: null handle, index out of range */
  VRT_E_DOMAIN = 2,     /* input outside a model's domain */
  VRT_E_PARSE = 3,      /* malformed scenario, zone file or artifact */
  VRT_E_GEOMETRY = 4,   /* invalid or ambiguous urban geometry */
  VRT_E_EXTENT = 5,     /* grids or rasters that do not line up */
  VRT_E_CONFIG = 6,     /* values that parse but do not fit together */
  VRT_E_IO = 7,
  VRT_E_EVALUATION = 8, /* a model produced a non-finite value */
  VRT_E_VALIDATION = 9, /* an output failed a consistency check */
  VRT_E_INTERNAL = 10
} vrt_status;

/* Message of the last failed call on this thread; "" after a success. */
VRT_API const char* vrt_last_error(void);
VRT_API const char* vrt_status_name(vrt_status status);
/* Process exit code for a status: 0 ok, 1 validation, 2 configuration, 3 I/O. */
VRT_API int vrt_exit_code(vrt_status status);
VRT_API const char* vrt_version(void);
/* VRT_THREADS if set, else the hardware concurrency. */
VRT_API unsigned vrt_default_threads(void);

typedef struct vrt_grid {
  double origin_m[3];
  double spacing_m[3];
  size_t dims[3];
} vrt_grid;

typedef enum vrt_ground_class { VRT_GROUND_NONE = 0, VRT_GROUND_PEDESTRIAN = 1, VRT_GROUND_VEHICLE = 2 } vrt_ground_class;

typedef enum vrt_terrain_kind { VRT_TERRAIN_RISK = 0, VRT_TERRAIN_ACOUSTIC = 1, VRT_TERRAIN_FUSED = 2 } vrt_terrain_kind;

typedef enum vrt_clearance_status {
  VRT_CLEARANCE_OPEN = 0,
  VRT_CLEARANCE_RESTRICTED = 1,
  VRT_CLEARANCE_ABOVE_LIMIT = 2,
  VRT_CLEARANCE_CLOSED = 3
} vrt_clearance_status;

typedef struct vrt_scenario vrt_scenario;
typedef struct vrt_kernel vrt_kernel;
typedef struct vrt_volume vrt_volume;
typedef struct vrt_terrain vrt_terrain;
typedef struct vrt_clearance vrt_clearance;
typedef struct vrt_report vrt_report;

/* Every *_free accepts NULL. Output handles are set only on VRT_OK. */

/* Scenario */
VRT_API vrt_status vrt_scenario_load(const char* path, vrt_scenario** out);
VRT_API vrt_status vrt_scenario_parse(const char* json_text, const char* base_dir, vrt_scenario** out);
VRT_API void vrt_scenario_free(vrt_scenario* scenario);
VRT_API const char* vrt_scenario_name(const vrt_scenario* scenario);
VRT_API const char* vrt_scenario_hash(const vrt_scenario* scenario);
VRT_API const char* vrt_scenario_output_dir(const vrt_scenario* scenario);
VRT_API int vrt_scenario_mesh_enabled(const vrt_scenario* scenario);
VRT_API vrt_status vrt_scenario_grid(const vrt_scenario* scenario, vrt_grid* out);

/* Impact kernel of the scenario's base impact model */
VRT_API vrt_status vrt_kernel_build(const vrt_scenario* scenario, unsigned threads, vrt_kernel** out);
VRT_API vrt_status vrt_kernel_read(const char* path, vrt_kernel** out);
/* sha256_hex receives 65 bytes (payload hash) when non-null. */
VRT_API vrt_status vrt_kernel_write(const vrt_kernel* kernel, const char* path, const char* scenario_hash,
                                    char* sha256_hex);
VRT_API void vrt_kernel_free(vrt_kernel* kernel);
VRT_API vrt_status vrt_kernel_shape(const vrt_kernel* kernel, size_t* levels, size_t* width);
VRT_API vrt_status vrt_kernel_altitude(const vrt_kernel* kernel, size_t level, double* altitude_m);
VRT_API vrt_status vrt_kernel_prob(const vrt_kernel* kernel, size_t level, size_t iy, size_t ix, double* prob);
/* Values are stored in single precision; outside [0, 1] is VRT_E_DOMAIN. */
VRT_API vrt_status vrt_kernel_set_prob(vrt_kernel* kernel, size_t level, size_t iy, size_t ix, double prob);

/* Cumulative risk volume */
VRT_API vrt_status vrt_volume_compute(const vrt_scenario* scenario, const vrt_kernel* kernel, unsigned threads,
                                      vrt_volume** out);
VRT_API vrt_status vrt_volume_read(const char* path, vrt_volume** out);
VRT_API vrt_status vrt_volume_write(const vrt_volume* volume, const char* path, char* sha256_hex);
VRT_API void vrt_volume_free(vrt_volume* volume);
VRT_API vrt_status vrt_volume_grid(const vrt_volume* volume, vrt_grid* out);
/* Blocked (building) voxels read as -1. */
VRT_API vrt_status vrt_volume_value(const vrt_volume* volume, size_t i, size_t j, size_t k, double* value);

/* No-fly terrain */
VRT_API vrt_status vrt_terrain_threshold(const vrt_volume* volume, double threshold, vrt_terrain** out);
/* excluded and blocked hold one byte per voxel (x fastest, then y, then z);
   blocked may be NULL. */
VRT_API vrt_status vrt_terrain_from_mask(const vrt_grid* grid, const uint8_t* excluded, const uint8_t* blocked,
                                         size_t count, vrt_terrain_kind kind, vrt_terrain** out);
VRT_API vrt_status vrt_terrain_fuse(const vrt_terrain* const* terrains, size_t count, vrt_terrain** out);
VRT_API vrt_status vrt_terrain_read(const char* path, vrt_terrain** out);
VRT_API vrt_status vrt_terrain_write(const vrt_terrain* terrain, const char* path, char* sha256_hex);
VRT_API vrt_status vrt_terrain_write_mesh(const vrt_terrain* terrain, const char* path);
VRT_API void vrt_terrain_free(vrt_terrain* terrain);
VRT_API vrt_status vrt_terrain_grid(const vrt_terrain* terrain, vrt_grid* out);
VRT_API vrt_status vrt_terrain_excluded(const vrt_terrain* terrain, size_t i, size_t j, size_t k, int* excluded);
VRT_API vrt_status vrt_terrain_excluded_count(const vrt_terrain* terrain, size_t* count);

/* Minimum clearance */
typedef struct vrt_clearance_stats {
  size_t columns;
  size_t open;
  size_t closed;
  double min_m; /* NaN when no column has a numeric clearance */
  double median_m;
  double max_m;
} vrt_clearance_stats;

VRT_API vrt_status vrt_clearance_compute(const vrt_terrain* terrain, double ceiling_m, vrt_clearance** out);
VRT_API void vrt_clearance_free(vrt_clearance* clearance);
VRT_API vrt_status vrt_clearance_at(const vrt_clearance* clearance, size_t i, size_t j, double* clearance_m,
                                    vrt_clearance_status* status);
VRT_API vrt_status vrt_clearance_summary(const vrt_clearance* clearance, vrt_ground_class cls,
                                         vrt_clearance_stats* out);
VRT_API vrt_status vrt_clearance_write_csv(const vrt_clearance* clearance, const vrt_terrain* terrain,
                                           const char* path);

/* Pipeline runs. Each returns a JSON report; pass is 1 when every check held. */
VRT_API const char* vrt_report_json(const vrt_report* report);
VRT_API int vrt_report_pass(const vrt_report* report);
VRT_API void vrt_report_free(vrt_report* report);

VRT_API vrt_status vrt_run_kernel(const vrt_scenario* scenario, const char* out_file, unsigned threads,
                                  vrt_report** out);
/* out_dir NULL uses the scenario's output directory; mesh < 0 uses its setting. */
VRT_API vrt_status vrt_run_terrain(const vrt_scenario* scenario, const char* out_dir, unsigned threads, int mesh,
                                   vrt_report** out);
VRT_API vrt_status vrt_run_clearance(const char* volume_file, const double* thresholds, size_t threshold_count,
                                     double ceiling_m, const char* out_dir, vrt_report** out);
/* Inputs are terrain files or acoustic zone files (.json). */
VRT_API vrt_status vrt_run_fuse(const char* const* inputs, size_t count, const char* out_file, vrt_report** out);
/* Target extension selects the format: .obj mesh or .csv clearance table. */
VRT_API vrt_status vrt_run_export(const char* terrain_file, const char* out_file, double ceiling_m);

typedef struct vrt_oracle_options {
  size_t samples;          /* 0 keeps the scenario value */
  int has_seed;
  uint64_t seed;
  const char* kernel_file; /* NULL runs the scenario's checks */
  const double* altitudes_m;
  size_t altitude_count;   /* 0 with kernel_file tests every slice */
  int z_correction;
  unsigned threads;
} vrt_oracle_options;

/* scenario may be NULL when options->kernel_file is set. */
VRT_API vrt_status vrt_run_oracle(const vrt_scenario* scenario, const vrt_oracle_options* options,
                                  vrt_report** out);

#ifdef __cplusplus
}
#endif

#endif
