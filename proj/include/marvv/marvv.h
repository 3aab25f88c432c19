/* marvv: maritime autonomy V&V simulator, C interface. */
#ifndef MARVV_MARVV_H
#define MARVV_MARVV_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(MARVV_BUILDING_LIBRARY)
#    define MARVV_API __declspec(dllexport)
#  else
#    define MARVV_API __declspec(dllimport)
#  endif
#else
#  define MARVV_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum marvv_status {
    MARVV_OK = 0,
    MARVV_ERR_INVALID_ARGUMENT = 1,
    MARVV_ERR_IO = 2,
    MARVV_ERR_PARSE = 3,
    MARVV_ERR_VALIDATION = 4,
    MARVV_ERR_DIMENSION_MISMATCH = 5,
    MARVV_ERR_OUT_OF_BOUNDS = 6,
    MARVV_ERR_NUMERICAL = 7,
    MARVV_ERR_GROUNDING = 8,
    MARVV_ERR_INTERNAL = 9
} marvv_status;

typedef struct marvv_scenario marvv_scenario;
typedef struct marvv_log marvv_log;
typedef struct marvv_report marvv_report;
typedef struct marvv_grid marvv_grid;

typedef enum marvv_raster_format { MARVV_RASTER_ASCII_GRID = 0, MARVV_RASTER_RAW16 = 1 } marvv_raster_format;

/* Library version string, e.g. "0.1.0". */
MARVV_API const char* marvv_version(void);

/* Message of the last failed call on this thread; "" if none. Valid until the next call. */
MARVV_API const char* marvv_last_error(void);

/* Scenarios */
MARVV_API marvv_status marvv_scenario_load(const char* path, marvv_scenario** out);
MARVV_API marvv_status marvv_scenario_parse(const char* json_text, const char* base_dir, marvv_scenario** out);
MARVV_API marvv_status marvv_scenario_reference(marvv_scenario** out);
MARVV_API marvv_status marvv_scenario_set_seed(marvv_scenario* s, uint64_t seed);
/* "ideal", "moderate" or "severe" */
MARVV_API marvv_status marvv_scenario_set_weather_preset(marvv_scenario* s, const char* name);
MARVV_API marvv_status marvv_scenario_set_weather(marvv_scenario* s, double rain, double fog, double sea);
/* "high", "nominal" or "low" */
MARVV_API marvv_status marvv_scenario_set_radar_preset(marvv_scenario* s, const char* name);
MARVV_API marvv_status marvv_scenario_write(const marvv_scenario* s, const char* path);
/* Canonical JSON into buf; *needed receives the size including the terminator. */
MARVV_API marvv_status marvv_scenario_to_json(const marvv_scenario* s, char* buf, size_t cap, size_t* needed);
MARVV_API marvv_status marvv_scenario_hash(const marvv_scenario* s, uint64_t* out);
MARVV_API void marvv_scenario_free(marvv_scenario* s);

/* Simulation and logs */
MARVV_API marvv_status marvv_run(const marvv_scenario* s, marvv_log** out);
MARVV_API marvv_status marvv_log_load(const char* csv_path, marvv_log** out);
/* Writes <csv_path> and its .header.json sidecar. */
MARVV_API marvv_status marvv_log_write(const marvv_log* log, const char* csv_path);
MARVV_API marvv_status marvv_log_tick_count(const marvv_log* log, size_t* out);
MARVV_API marvv_status marvv_log_target_count(const marvv_log* log, size_t* out);
MARVV_API marvv_status marvv_log_target_id(const marvv_log* log, size_t index, const char** out);
MARVV_API void marvv_log_free(marvv_log* log);

/* Performance indicators */
MARVV_API marvv_status marvv_report_compute(const marvv_log* log, marvv_report** out);
MARVV_API marvv_status marvv_report_mpd(const marvv_report* r, const char* target_id, double* out);
MARVV_API marvv_status marvv_report_rmse_speed(const marvv_report* r, double* out);
MARVV_API marvv_status marvv_report_rmse_heading(const marvv_report* r, double* out);
MARVV_API marvv_status marvv_report_trigger_transitions(const marvv_report* r, size_t* out);
MARVV_API marvv_status marvv_report_transitions_before_sustained(const marvv_report* r, size_t* out);
MARVV_API marvv_status marvv_report_grounded(const marvv_report* r, int* out);
MARVV_API marvv_status marvv_report_to_json(const marvv_report* r, char* buf, size_t cap, size_t* needed);
/* Log, report and plot-ready CSVs into out_dir (created if missing). */
MARVV_API marvv_status marvv_export(const marvv_log* log, const marvv_report* r, const char* out_dir);
MARVV_API void marvv_report_free(marvv_report* r);

/* Bathymetry */
MARVV_API marvv_status marvv_grid_load(const char* path, marvv_raster_format format, marvv_grid** out);
/* Tiles are placed by their georeferenced origins; where they overlap, the south-west-most tile wins. */
MARVV_API marvv_status marvv_grid_stitch(const marvv_grid* const* tiles, size_t count, marvv_grid** out);
MARVV_API marvv_status marvv_grid_dims(const marvv_grid* g, size_t* rows, size_t* cols, double* cell_size);
MARVV_API marvv_status marvv_grid_depth_at(const marvv_grid* g, double x, double y, double* out);
MARVV_API marvv_status marvv_grid_write_ascii(const marvv_grid* g, const char* path);
MARVV_API marvv_status marvv_grid_export_heightmap(const marvv_grid* g, const char* path, double* min_depth,
                                                   double* max_depth);
/* Navigability raster for a vessel draft and fixed under-keel clearance. */
MARVV_API marvv_status marvv_grid_write_occupancy(const marvv_grid* g, double draft, double ukc, const char* path,
                                                  size_t* blocked_cells);
MARVV_API void marvv_grid_free(marvv_grid* g);

#ifdef __cplusplus
}
#endif

#endif
