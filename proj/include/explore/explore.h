#ifndef EXPLORE_EXPLORE_H_
#define EXPLORE_EXPLORE_H_

/* C interface to the exploration library. Every call returns a status;
 * on failure explore_last_error() describes it (per thread). Handles are
 * opaque and owned by the caller once returned. */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(EXPLORE_BUILDING_LIBRARY)
#define EXPLORE_API __attribute__((visibility("default")))
#else
#define EXPLORE_API
#endif

typedef enum {
  EXPLORE_OK = 0,
  EXPLORE_ERR_INVALID_ARGUMENT = 1,
  EXPLORE_ERR_POSITIONING = 2,
  EXPLORE_ERR_ALIGNMENT = 3,
  EXPLORE_ERR_DEGENERATE_GEOMETRY = 4,
  EXPLORE_ERR_IO = 5,
  EXPLORE_ERR_CONFIG = 6,
  EXPLORE_ERR_BUFFER_TOO_SMALL = 7,
  EXPLORE_ERR_INTERNAL = 8
} explore_status;

typedef enum {
  EXPLORE_RUN_COMPLETE = 0,
  EXPLORE_RUN_SAFETY_VIOLATION = 1,
  EXPLORE_RUN_TIMEOUT = 2
} explore_run_status;

typedef enum {
  EXPLORE_VOXEL_UNKNOWN = 0,
  EXPLORE_VOXEL_FREE = 1,
  EXPLORE_VOXEL_OCCUPIED = 2
} explore_voxel_state;

typedef struct explore_config explore_config;
typedef struct explore_report explore_report;
typedef struct explore_grid explore_grid;

typedef struct {
  uint64_t seed;
  int agents;
  explore_run_status status;
  double exploration_time;  /* s of simulated time */
  int has_safety_ratio;     /* 0 for single-agent runs */
  double safety_ratio;
  double min_obstacle_clearance;
  int64_t total_voxels;
  int64_t unknown_voxels;
  int64_t unknown_reachable;
  int64_t unknown_flagged;
  int64_t map_mismatches;
  double wall_time;
} explore_run_summary;

typedef struct {
  int id;
  double flight_distance;
  double mean_velocity;
  int plans;
  int fallbacks;
  int node_limit_hits;
  int goal_failures;
  int overruns;
  double solve_ms_mean;
  double solve_ms_max;
  double plan_ms_mean;
  double plan_ms_max;
} explore_agent_summary;

EXPLORE_API const char *explore_last_error(void);
EXPLORE_API const char *explore_status_name(explore_status status);

/* Text outputs follow one convention: *needed (when not NULL) receives the
 * length including the terminating NUL; a NULL buf with size 0 only
 * queries; a smaller buffer gives EXPLORE_ERR_BUFFER_TOO_SMALL. */

EXPLORE_API explore_status explore_config_create(explore_config **out);
EXPLORE_API explore_status explore_config_load(const char *path,
                                               explore_config **out);
EXPLORE_API explore_status explore_config_parse(const char *text,
                                                explore_config **out);
EXPLORE_API void explore_config_destroy(explore_config *config);
EXPLORE_API explore_status explore_config_set(explore_config *config,
                                              const char *key,
                                              const char *value);
EXPLORE_API explore_status explore_config_get(const explore_config *config,
                                              const char *key, char *buf,
                                              size_t size, size_t *needed);
EXPLORE_API explore_status explore_config_serialize(
    const explore_config *config, char *buf, size_t size, size_t *needed);
EXPLORE_API explore_status explore_config_validate(
    const explore_config *config);

/* One run. out_dir may be NULL or empty to skip writing artifacts. */
EXPLORE_API explore_status explore_run(const explore_config *config,
                                       uint64_t seed, int agents,
                                       const char *out_dir,
                                       explore_report **out);
/* Every (seed, agent count) pair of the config plus the aggregate table.
 * Progress lines go to stderr when progress is nonzero. */
EXPLORE_API explore_status explore_run_experiment(const explore_config *config,
                                                  const char *out_dir,
                                                  int progress,
                                                  explore_report **out);
EXPLORE_API void explore_report_destroy(explore_report *report);
EXPLORE_API size_t explore_report_run_count(const explore_report *report);
EXPLORE_API explore_status explore_report_run(const explore_report *report,
                                              size_t run,
                                              explore_run_summary *out);
EXPLORE_API explore_status explore_report_run_message(
    const explore_report *report, size_t run, char *buf, size_t size,
    size_t *needed);
EXPLORE_API explore_status explore_report_agent(const explore_report *report,
                                                size_t run, size_t agent,
                                                explore_agent_summary *out);
EXPLORE_API explore_status explore_report_metrics_csv(
    const explore_report *report, size_t run, char *buf, size_t size,
    size_t *needed);
/* aggregate table; empty for reports of a single run */
EXPLORE_API explore_status explore_report_table_text(
    const explore_report *report, char *buf, size_t size, size_t *needed);
EXPLORE_API size_t explore_report_warning_count(const explore_report *report);

/* per-agent x,y,speed CSVs and an SVG overview under run_dir/plots */
EXPLORE_API explore_status explore_emit_plots(const char *run_dir,
                                              size_t *files_written);

/* suite is "oracles" or "invariants"; fn (may be NULL) sees every check */
typedef void (*explore_check_fn)(const char *name, int pass,
                                 const char *detail, void *user);
EXPLORE_API explore_status explore_verify(const char *suite,
                                          explore_check_fn fn, void *user,
                                          int *failures);

EXPLORE_API explore_status explore_grid_create(const int origin_index[3],
                                               const int dims[3],
                                               double voxel_size,
                                               explore_grid **out);
EXPLORE_API explore_status explore_grid_load(const char *path,
                                             explore_grid **out);
EXPLORE_API explore_status explore_grid_save(const explore_grid *grid,
                                             const char *path);
EXPLORE_API void explore_grid_destroy(explore_grid *grid);
EXPLORE_API void explore_grid_dims(const explore_grid *grid, int dims[3]);
EXPLORE_API void explore_grid_origin(const explore_grid *grid,
                                     double origin[3]);
EXPLORE_API double explore_grid_voxel_size(const explore_grid *grid);
EXPLORE_API explore_status explore_grid_get(const explore_grid *grid, int x,
                                            int y, int z,
                                            explore_voxel_state *out);
EXPLORE_API explore_status explore_grid_set(explore_grid *grid, int x, int y,
                                            int z, explore_voxel_state state);
EXPLORE_API int64_t explore_grid_count(const explore_grid *grid,
                                       explore_voxel_state state);

#ifdef __cplusplus
}
#endif

#endif  // EXPLORE_EXPLORE_H_
