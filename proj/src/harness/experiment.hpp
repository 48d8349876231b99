#pragma once

#include <optional>
#include <string>
#include <vector>

#include "harness/config.hpp"
#include "sim/simulator.hpp"

namespace explore {

// one per-agent row of runs.csv; aggregates are computed from these only
struct RunRow {
  uint64_t seed = 0;
  int agents = 0;
  int agent_id = 0;
  std::string status;
  double exploration_time = 0.0;
  double flight_distance = 0.0;
  double mean_velocity = 0.0;
  int plans = 0;
  double plan_ms_mean = 0.0;
  double plan_ms_max = 0.0;
  double plan_ms_std = 0.0;
  int overruns = 0;
  std::optional<double> safety_ratio;
};

struct TableRow {
  int agents = 0;
  int runs = 0;       // runs that entered the aggregates
  int timed_out = 0;  // runs left out
  Stats exploration_time;
  Stats flight_distance;
  Stats mean_velocity;
  Stats compute_ms;  // pooled over every planning iteration
  std::optional<Stats> safety_ratio;
};

struct ExperimentReport {
  std::vector<RunResult> runs;
  std::vector<RunRow> rows;
  std::vector<TableRow> table;
  std::vector<std::string> warnings;
};

// directory of one run inside an experiment directory
std::string RunDirName(uint64_t seed, int agents);

std::vector<RunRow> RowsFromResult(const RunResult &result);

// per agent count, in order of first appearance; timed-out runs are
// skipped and counted
std::vector<TableRow> AggregateRows(const std::vector<RunRow> &rows);

std::string FormatRunsCsv(const std::vector<RunRow> &rows);
std::vector<RunRow> ParseRunsCsv(const std::string &text);
std::string FormatTableCsv(const std::vector<TableRow> &table,
                           const std::vector<std::string> &warnings);
std::string FormatTableText(const std::vector<TableRow> &table,
                            const std::vector<std::string> &warnings);

// Runs every (seed, agent count) pair of the config into
// out_dir/seed_<s>_agents_<k>/ and writes runs.csv, table.csv and table.txt
// to out_dir. Progress lines go to `progress` when it is not null.
ExperimentReport RunExperiment(const Config &config, const std::string &out_dir,
                               std::FILE *progress = nullptr);

}  // namespace explore
