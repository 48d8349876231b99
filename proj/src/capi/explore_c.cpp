#include "explore/explore.h"

#include <cstdio>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "harness/config.hpp"
#include "harness/experiment.hpp"
#include "harness/plots.hpp"
#include "sim/simulator.hpp"
#include "verify/suites.hpp"

struct explore_config {
  explore::Config config;
};

struct explore_report {
  explore::ExperimentReport report;
  std::string table_text;  // empty for a single run
};

struct explore_grid {
  explore::VoxelGrid grid;
};

namespace {

thread_local std::string last_error;

explore_status FromCode(explore::ErrorCode code) {
  switch (code) {
    case explore::ErrorCode::kInvalidArgument:
      return EXPLORE_ERR_INVALID_ARGUMENT;
    case explore::ErrorCode::kPositioning:
      return EXPLORE_ERR_POSITIONING;
    case explore::ErrorCode::kAlignment:
      return EXPLORE_ERR_ALIGNMENT;
    case explore::ErrorCode::kDegenerateGeometry:
      return EXPLORE_ERR_DEGENERATE_GEOMETRY;
    case explore::ErrorCode::kIo:
      return EXPLORE_ERR_IO;
    case explore::ErrorCode::kConfig:
      return EXPLORE_ERR_CONFIG;
  }
  return EXPLORE_ERR_INTERNAL;
}

explore_status Fail(explore_status status, const std::string &message) {
  last_error = message;
  return status;
}

// runs fn, turning exceptions into status codes
template <typename Fn>
explore_status Guard(Fn &&fn) {
  try {
    last_error.clear();
    return fn();
  } catch (const explore::Error &e) {
    return Fail(FromCode(e.code()), e.what());
  } catch (const std::bad_alloc &) {
    return Fail(EXPLORE_ERR_INTERNAL, "out of memory");
  } catch (const std::exception &e) {
    return Fail(EXPLORE_ERR_INTERNAL, e.what());
  }
}

explore_status CopyOut(const std::string &text, char *buf, size_t size,
                       size_t *needed) {
  const size_t n = text.size() + 1;
  if (needed != nullptr) *needed = n;
  if (buf == nullptr && size == 0) return EXPLORE_OK;
  if (buf == nullptr || size < n) {
    return Fail(EXPLORE_ERR_BUFFER_TOO_SMALL,
                "buffer holds " + std::to_string(size) + " bytes, " +
                    std::to_string(n) + " needed");
  }
  std::memcpy(buf, text.c_str(), n);
  return EXPLORE_OK;
}

#define REQUIRE(cond, what)                                       \
  do {                                                            \
    if (!(cond)) return Fail(EXPLORE_ERR_INVALID_ARGUMENT, what); \
  } while (0)

const explore::RunResult *RunAt(const explore_report *report, size_t run) {
  if (report == nullptr || run >= report->report.runs.size()) return nullptr;
  return &report->report.runs[run];
}

}  // namespace

extern "C" {

const char *explore_last_error(void) { return last_error.c_str(); }

const char *explore_status_name(explore_status status) {
  switch (status) {
    case EXPLORE_OK:
      return "ok";
    case EXPLORE_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case EXPLORE_ERR_POSITIONING:
      return "positioning error";
    case EXPLORE_ERR_ALIGNMENT:
      return "alignment error";
    case EXPLORE_ERR_DEGENERATE_GEOMETRY:
      return "degenerate geometry";
    case EXPLORE_ERR_IO:
      return "i/o error";
    case EXPLORE_ERR_CONFIG:
      return "config error";
    case EXPLORE_ERR_BUFFER_TOO_SMALL:
      return "buffer too small";
    case EXPLORE_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

explore_status explore_config_create(explore_config **out) {
  REQUIRE(out != nullptr, "out is null");
  return Guard([&] {
    *out = new explore_config();
    return EXPLORE_OK;
  });
}

explore_status explore_config_load(const char *path, explore_config **out) {
  REQUIRE(path != nullptr && out != nullptr, "path or out is null");
  return Guard([&] {
    auto *c = new explore_config();
    try {
      c->config = explore::LoadConfigFile(path);
    } catch (...) {
      delete c;
      throw;
    }
    *out = c;
    return EXPLORE_OK;
  });
}

explore_status explore_config_parse(const char *text, explore_config **out) {
  REQUIRE(text != nullptr && out != nullptr, "text or out is null");
  return Guard([&] {
    auto *c = new explore_config();
    try {
      c->config = explore::ParseConfig(text);
    } catch (...) {
      delete c;
      throw;
    }
    *out = c;
    return EXPLORE_OK;
  });
}

void explore_config_destroy(explore_config *config) { delete config; }

explore_status explore_config_set(explore_config *config, const char *key,
                                  const char *value) {
  REQUIRE(config != nullptr && key != nullptr && value != nullptr,
          "config, key or value is null");
  return Guard([&] {
    explore::SetConfigValue(config->config, key, value);
    return EXPLORE_OK;
  });
}

explore_status explore_config_get(const explore_config *config,
                                  const char *key, char *buf, size_t size,
                                  size_t *needed) {
  REQUIRE(config != nullptr && key != nullptr, "config or key is null");
  return Guard([&] {
    return CopyOut(explore::GetConfigValue(config->config, key), buf, size,
                   needed);
  });
}

explore_status explore_config_serialize(const explore_config *config,
                                        char *buf, size_t size,
                                        size_t *needed) {
  REQUIRE(config != nullptr, "config is null");
  return Guard([&] {
    return CopyOut(explore::SerializeConfig(config->config), buf, size,
                   needed);
  });
}

explore_status explore_config_validate(const explore_config *config) {
  REQUIRE(config != nullptr, "config is null");
  return Guard([&] {
    explore::ValidateConfig(config->config);
    return EXPLORE_OK;
  });
}

explore_status explore_run(const explore_config *config, uint64_t seed,
                           int agents, const char *out_dir,
                           explore_report **out) {
  REQUIRE(config != nullptr && out != nullptr, "config or out is null");
  return Guard([&] {
    explore::ValidateConfig(config->config);
    auto *r = new explore_report();
    try {
      r->report.runs.push_back(explore::RunSimulation(
          config->config, seed, agents, out_dir ? out_dir : ""));
      r->report.rows = explore::RowsFromResult(r->report.runs.back());
    } catch (...) {
      delete r;
      throw;
    }
    *out = r;
    return EXPLORE_OK;
  });
}

explore_status explore_run_experiment(const explore_config *config,
                                      const char *out_dir, int progress,
                                      explore_report **out) {
  REQUIRE(config != nullptr && out_dir != nullptr && out != nullptr,
          "config, out_dir or out is null");
  return Guard([&] {
    auto *r = new explore_report();
    try {
      r->report = explore::RunExperiment(config->config, out_dir,
                                         progress ? stderr : nullptr);
      r->table_text =
          explore::FormatTableText(r->report.table, r->report.warnings);
    } catch (...) {
      delete r;
      throw;
    }
    *out = r;
    return EXPLORE_OK;
  });
}

void explore_report_destroy(explore_report *report) { delete report; }

size_t explore_report_run_count(const explore_report *report) {
  return report == nullptr ? 0 : report->report.runs.size();
}

explore_status explore_report_run(const explore_report *report, size_t run,
                                  explore_run_summary *out) {
  const explore::RunResult *r = RunAt(report, run);
  REQUIRE(r != nullptr && out != nullptr, "no such run or out is null");
  explore_run_summary s{};
  s.seed = r->seed;
  s.agents = r->agents;
  switch (r->status) {
    case explore::RunStatus::kComplete:
      s.status = EXPLORE_RUN_COMPLETE;
      break;
    case explore::RunStatus::kSafetyViolation:
      s.status = EXPLORE_RUN_SAFETY_VIOLATION;
      break;
    case explore::RunStatus::kTimeout:
      s.status = EXPLORE_RUN_TIMEOUT;
      break;
  }
  s.exploration_time = r->exploration_time;
  s.has_safety_ratio = r->safety_ratio.has_value() ? 1 : 0;
  s.safety_ratio = r->safety_ratio.value_or(0.0);
  s.min_obstacle_clearance = r->min_obstacle_clearance;
  s.total_voxels = r->total_voxels;
  s.unknown_voxels = r->unknown_voxels;
  s.unknown_reachable = r->unknown_reachable;
  s.unknown_flagged = r->unknown_flagged;
  s.map_mismatches = r->map_mismatches;
  s.wall_time = r->wall_time;
  *out = s;
  return EXPLORE_OK;
}

explore_status explore_report_run_message(const explore_report *report,
                                          size_t run, char *buf, size_t size,
                                          size_t *needed) {
  const explore::RunResult *r = RunAt(report, run);
  REQUIRE(r != nullptr, "no such run");
  return CopyOut(r->message, buf, size, needed);
}

explore_status explore_report_agent(const explore_report *report, size_t run,
                                    size_t agent,
                                    explore_agent_summary *out) {
  const explore::RunResult *r = RunAt(report, run);
  REQUIRE(r != nullptr && out != nullptr, "no such run or out is null");
  REQUIRE(agent < r->agent_metrics.size(), "no such agent");
  const explore::AgentMetrics &m = r->agent_metrics[agent];
  const explore::Stats solve = explore::ComputeStats(m.solve_ms);
  const explore::Stats plan = explore::ComputeStats(m.plan_ms);
  explore_agent_summary s{};
  s.id = m.id;
  s.flight_distance = m.flight_distance;
  s.mean_velocity = m.mean_velocity;
  s.plans = m.plans;
  s.fallbacks = m.fallbacks;
  s.node_limit_hits = m.node_limit_hits;
  s.goal_failures = m.goal_failures;
  s.overruns = m.overruns;
  s.solve_ms_mean = solve.mean;
  s.solve_ms_max = solve.max;
  s.plan_ms_mean = plan.mean;
  s.plan_ms_max = plan.max;
  *out = s;
  return EXPLORE_OK;
}

explore_status explore_report_metrics_csv(const explore_report *report,
                                          size_t run, char *buf, size_t size,
                                          size_t *needed) {
  const explore::RunResult *r = RunAt(report, run);
  REQUIRE(r != nullptr, "no such run");
  return Guard(
      [&] { return CopyOut(explore::FormatMetricsCsv(*r), buf, size, needed); });
}

explore_status explore_report_table_text(const explore_report *report,
                                         char *buf, size_t size,
                                         size_t *needed) {
  REQUIRE(report != nullptr, "report is null");
  return CopyOut(report->table_text, buf, size, needed);
}

size_t explore_report_warning_count(const explore_report *report) {
  return report == nullptr ? 0 : report->report.warnings.size();
}

explore_status explore_emit_plots(const char *run_dir, size_t *files_written) {
  REQUIRE(run_dir != nullptr, "run_dir is null");
  return Guard([&] {
    const explore::PlotFiles files = explore::EmitPlots(run_dir);
    if (files_written != nullptr) *files_written = files.polylines.size() + 1;
    return EXPLORE_OK;
  });
}

explore_status explore_verify(const char *suite, explore_check_fn fn,
                              void *user, int *failures) {
  REQUIRE(suite != nullptr, "suite is null");
  const std::string name(suite);
  REQUIRE(name == "oracles" || name == "invariants",
          "unknown suite '" + name + "' (expected oracles or invariants)");
  return Guard([&] {
    const std::vector<explore::CheckResult> checks =
        name == "oracles" ? explore::RunOracleSuite()
                          : explore::RunInvariantSuite();
    int failed = 0;
    for (const explore::CheckResult &c : checks) {
      if (!c.pass) ++failed;
      if (fn != nullptr) fn(c.name.c_str(), c.pass ? 1 : 0, c.detail.c_str(), user);
    }
    if (failures != nullptr) *failures = failed;
    return EXPLORE_OK;
  });
}

explore_status explore_grid_create(const int origin_index[3],
                                   const int dims[3], double voxel_size,
                                   explore_grid **out) {
  REQUIRE(origin_index != nullptr && dims != nullptr && out != nullptr,
          "origin_index, dims or out is null");
  return Guard([&] {
    auto *g = new explore_grid();
    try {
      g->grid = explore::VoxelGrid(
          explore::Index3(origin_index[0], origin_index[1], origin_index[2]),
          explore::Index3(dims[0], dims[1], dims[2]), voxel_size);
    } catch (...) {
      delete g;
      throw;
    }
    *out = g;
    return EXPLORE_OK;
  });
}

explore_status explore_grid_load(const char *path, explore_grid **out) {
  REQUIRE(path != nullptr && out != nullptr, "path or out is null");
  return Guard([&] {
    auto *g = new explore_grid();
    try {
      g->grid = explore::LoadGridSnapshot(path);
    } catch (...) {
      delete g;
      throw;
    }
    *out = g;
    return EXPLORE_OK;
  });
}

explore_status explore_grid_save(const explore_grid *grid, const char *path) {
  REQUIRE(grid != nullptr && path != nullptr, "grid or path is null");
  return Guard([&] {
    explore::SaveGridSnapshot(grid->grid, path);
    return EXPLORE_OK;
  });
}

void explore_grid_destroy(explore_grid *grid) { delete grid; }

void explore_grid_dims(const explore_grid *grid, int dims[3]) {
  if (grid == nullptr || dims == nullptr) return;
  for (int i = 0; i < 3; ++i) dims[i] = grid->grid.dims()[i];
}

void explore_grid_origin(const explore_grid *grid, double origin[3]) {
  if (grid == nullptr || origin == nullptr) return;
  const explore::Vec3 o = grid->grid.origin();
  for (int i = 0; i < 3; ++i) origin[i] = o[i];
}

double explore_grid_voxel_size(const explore_grid *grid) {
  return grid == nullptr ? 0.0 : grid->grid.voxel_size();
}

explore_status explore_grid_get(const explore_grid *grid, int x, int y, int z,
                                explore_voxel_state *out) {
  REQUIRE(grid != nullptr && out != nullptr, "grid or out is null");
  const explore::Index3 idx(x, y, z);
  REQUIRE(grid->grid.Contains(idx), "voxel outside the grid");
  *out = static_cast<explore_voxel_state>(grid->grid.Get(idx));
  return EXPLORE_OK;
}

explore_status explore_grid_set(explore_grid *grid, int x, int y, int z,
                                explore_voxel_state state) {
  REQUIRE(grid != nullptr, "grid is null");
  const explore::Index3 idx(x, y, z);
  REQUIRE(grid->grid.Contains(idx), "voxel outside the grid");
  REQUIRE(state >= EXPLORE_VOXEL_UNKNOWN && state <= EXPLORE_VOXEL_OCCUPIED,
          "bad voxel state");
  grid->grid.Set(idx, static_cast<explore::VoxelState>(state));
  return EXPLORE_OK;
}

int64_t explore_grid_count(const explore_grid *grid,
                           explore_voxel_state state) {
  if (grid == nullptr) return 0;
  return grid->grid.Count(static_cast<explore::VoxelState>(state));
}

}  // extern "C"
