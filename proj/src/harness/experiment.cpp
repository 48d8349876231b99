#include "harness/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace explore {

namespace {

std::string Fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void WriteText(const std::filesystem::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
}

std::vector<std::string> SplitCsv(const std::string &line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double ParseReal(const std::string &s) {
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception &) {
    used = 0;
  }
  if (used != s.size() || s.empty()) {
    throw Error(ErrorCode::kIo, "bad number in runs.csv: '" + s + "'");
  }
  return v;
}

// mean, max and population std of the union of groups given by their own
// count, mean, max and std
Stats PoolStats(const std::vector<const RunRow *> &rows) {
  Stats s;
  double n = 0.0, sum = 0.0;
  bool first = true;
  for (const RunRow *r : rows) {
    if (r->plans == 0) continue;
    n += r->plans;
    sum += r->plans * r->plan_ms_mean;
    s.max = first ? r->plan_ms_max : std::max(s.max, r->plan_ms_max);
    first = false;
  }
  if (n == 0.0) return s;
  s.mean = sum / n;
  double var = 0.0;
  for (const RunRow *r : rows) {
    const double d = r->plan_ms_mean - s.mean;
    var += r->plans * (r->plan_ms_std * r->plan_ms_std + d * d);
  }
  s.std = std::sqrt(var / n);
  return s;
}

void AppendStats(std::string &out, const Stats &s) {
  out += "," + Fmt(s.mean) + "," + Fmt(s.max) + "," + Fmt(s.std);
}

}  // namespace

std::string RunDirName(uint64_t seed, int agents) {
  return "seed_" + std::to_string(seed) + "_agents_" + std::to_string(agents);
}

std::vector<RunRow> RowsFromResult(const RunResult &result) {
  std::vector<RunRow> rows;
  for (const AgentMetrics &m : result.agent_metrics) {
    RunRow row;
    row.seed = result.seed;
    row.agents = result.agents;
    row.agent_id = m.id;
    row.status = RunStatusName(result.status);
    row.exploration_time = result.exploration_time;
    row.flight_distance = m.flight_distance;
    row.mean_velocity = m.mean_velocity;
    row.plans = m.plans;
    const Stats p = ComputeStats(m.plan_ms);
    row.plan_ms_mean = p.mean;
    row.plan_ms_max = p.max;
    row.plan_ms_std = p.std;
    row.overruns = m.overruns;
    row.safety_ratio = result.safety_ratio;
    rows.push_back(row);
  }
  return rows;
}

std::vector<TableRow> AggregateRows(const std::vector<RunRow> &rows) {
  std::vector<int> order;
  for (const RunRow &r : rows) {
    if (std::find(order.begin(), order.end(), r.agents) == order.end()) {
      order.push_back(r.agents);
    }
  }
  std::vector<TableRow> table;
  for (int agents : order) {
    TableRow t;
    t.agents = agents;
    std::vector<const RunRow *> used;
    std::vector<double> times, dist, vel, safety;
    std::vector<uint64_t> seen;
    for (const RunRow &r : rows) {
      if (r.agents != agents) continue;
      const bool new_run =
          std::find(seen.begin(), seen.end(), r.seed) == seen.end();
      if (new_run) seen.push_back(r.seed);
      if (r.status == RunStatusName(RunStatus::kTimeout)) {
        if (new_run) ++t.timed_out;
        continue;
      }
      used.push_back(&r);
      dist.push_back(r.flight_distance);
      vel.push_back(r.mean_velocity);
      if (new_run) {
        ++t.runs;
        times.push_back(r.exploration_time);
        if (r.safety_ratio) safety.push_back(*r.safety_ratio);
      }
    }
    t.exploration_time = ComputeStats(times);
    t.flight_distance = ComputeStats(dist);
    t.mean_velocity = ComputeStats(vel);
    t.compute_ms = PoolStats(used);
    if (!safety.empty()) t.safety_ratio = ComputeStats(safety);
    table.push_back(t);
  }
  return table;
}

std::string FormatRunsCsv(const std::vector<RunRow> &rows) {
  std::string out =
      "seed,agents,agent_id,status,exploration_time_s,flight_distance_m,"
      "mean_velocity_mps,plans,plan_ms_mean,plan_ms_max,plan_ms_std,overruns,"
      "safety_ratio\n";
  for (const RunRow &r : rows) {
    out += std::to_string(r.seed) + "," + std::to_string(r.agents) + "," +
           std::to_string(r.agent_id) + "," + r.status + "," +
           Fmt(r.exploration_time) + "," + Fmt(r.flight_distance) + "," +
           Fmt(r.mean_velocity) + "," + std::to_string(r.plans) + "," +
           Fmt(r.plan_ms_mean) + "," + Fmt(r.plan_ms_max) + "," +
           Fmt(r.plan_ms_std) + "," + std::to_string(r.overruns) + "," +
           (r.safety_ratio ? Fmt(*r.safety_ratio) : "-") + "\n";
  }
  return out;
}

std::vector<RunRow> ParseRunsCsv(const std::string &text) {
  std::vector<RunRow> rows;
  std::stringstream ss(text);
  std::string line;
  bool header = true;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    const std::vector<std::string> f = SplitCsv(line);
    if (f.size() != 13) {
      throw Error(ErrorCode::kIo, "runs.csv row has " +
                                      std::to_string(f.size()) +
                                      " fields, expected 13");
    }
    RunRow r;
    r.seed = static_cast<uint64_t>(ParseReal(f[0]));
    r.agents = static_cast<int>(ParseReal(f[1]));
    r.agent_id = static_cast<int>(ParseReal(f[2]));
    r.status = f[3];
    r.exploration_time = ParseReal(f[4]);
    r.flight_distance = ParseReal(f[5]);
    r.mean_velocity = ParseReal(f[6]);
    r.plans = static_cast<int>(ParseReal(f[7]));
    r.plan_ms_mean = ParseReal(f[8]);
    r.plan_ms_max = ParseReal(f[9]);
    r.plan_ms_std = ParseReal(f[10]);
    r.overruns = static_cast<int>(ParseReal(f[11]));
    if (f[12] != "-") r.safety_ratio = ParseReal(f[12]);
    rows.push_back(r);
  }
  return rows;
}

std::string FormatTableCsv(const std::vector<TableRow> &table,
                           const std::vector<std::string> &warnings) {
  std::string out =
      "agents,runs,timed_out,exploration_time_s_mean,exploration_time_s_max,"
      "exploration_time_s_std,flight_distance_m_mean,flight_distance_m_max,"
      "flight_distance_m_std,mean_velocity_mps_mean,mean_velocity_mps_max,"
      "mean_velocity_mps_std,compute_ms_mean,compute_ms_max,compute_ms_std,"
      "safety_ratio_mean,safety_ratio_max,safety_ratio_std\n";
  for (const TableRow &t : table) {
    out += std::to_string(t.agents) + "," + std::to_string(t.runs) + "," +
           std::to_string(t.timed_out);
    AppendStats(out, t.exploration_time);
    AppendStats(out, t.flight_distance);
    AppendStats(out, t.mean_velocity);
    AppendStats(out, t.compute_ms);
    if (t.safety_ratio) {
      AppendStats(out, *t.safety_ratio);
    } else {
      out += ",-,-,-";
    }
    out += "\n";
  }
  for (const std::string &w : warnings) out += "warning," + w + "\n";
  return out;
}

std::string FormatTableText(const std::vector<TableRow> &table,
                            const std::vector<std::string> &warnings) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-7s %-5s %-26s %-26s %-20s %-20s %s\n",
                "agents", "runs", "exploration time [s]",
                "flight distance [m]", "velocity [m/s]", "compute [ms]",
                "safety ratio");
  out += buf;
  std::snprintf(buf, sizeof(buf), "%-7s %-5s %-26s %-26s %-20s %-20s %s\n",
                "", "", "mean / max / std", "mean / max / std",
                "mean / max / std", "mean / max / std", "mean / max / std");
  out += buf;
  for (const TableRow &t : table) {
    char safety[64] = "-";
    if (t.safety_ratio) {
      std::snprintf(safety, sizeof(safety), "%.2f / %.2f / %.2f",
                    t.safety_ratio->mean, t.safety_ratio->max,
                    t.safety_ratio->std);
    }
    char a[40], b[40], c[40], d[40];
    std::snprintf(a, sizeof(a), "%.1f / %.1f / %.1f", t.exploration_time.mean,
                  t.exploration_time.max, t.exploration_time.std);
    std::snprintf(b, sizeof(b), "%.1f / %.1f / %.1f", t.flight_distance.mean,
                  t.flight_distance.max, t.flight_distance.std);
    std::snprintf(c, sizeof(c), "%.2f / %.2f / %.2f", t.mean_velocity.mean,
                  t.mean_velocity.max, t.mean_velocity.std);
    std::snprintf(d, sizeof(d), "%.1f / %.1f / %.1f", t.compute_ms.mean,
                  t.compute_ms.max, t.compute_ms.std);
    std::snprintf(buf, sizeof(buf), "%-7d %-5d %-26s %-26s %-20s %-20s %s\n",
                  t.agents, t.runs, a, b, c, d, safety);
    out += buf;
  }
  for (const std::string &w : warnings) out += "warning: " + w + "\n";
  return out;
}

ExperimentReport RunExperiment(const Config &config, const std::string &out_dir,
                               std::FILE *progress) {
  ValidateConfig(config);
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + out_dir);

  ExperimentReport report;
  for (int agents : config.agent_counts) {
    for (uint64_t seed : config.seeds) {
      const std::string dir =
          (fs::path(out_dir) / RunDirName(seed, agents)).string();
      RunResult r = RunSimulation(config, seed, agents, dir);
      if (progress != nullptr) {
        std::fprintf(progress,
                     "seed %llu agents %d: %s after %.1f s (wall %.1f s)\n",
                     static_cast<unsigned long long>(seed), agents,
                     RunStatusName(r.status), r.exploration_time, r.wall_time);
        std::fflush(progress);
      }
      if (r.status == RunStatus::kTimeout) {
        report.warnings.push_back(
            "seed " + std::to_string(seed) + " agents " +
            std::to_string(agents) + " timed out (" + r.message +
            ") and is left out of the aggregates");
      } else if (r.status == RunStatus::kSafetyViolation) {
        report.warnings.push_back("seed " + std::to_string(seed) +
                                  " agents " + std::to_string(agents) +
                                  " stopped on a safety violation: " +
                                  r.message);
      }
      for (RunRow &row : RowsFromResult(r)) report.rows.push_back(row);
      report.runs.push_back(std::move(r));
    }
  }
  report.table = AggregateRows(report.rows);
  const fs::path dir(out_dir);
  WriteText(dir / "runs.csv", FormatRunsCsv(report.rows));
  WriteText(dir / "table.csv", FormatTableCsv(report.table, report.warnings));
  WriteText(dir / "table.txt", FormatTableText(report.table, report.warnings));
  return report;
}

}  // namespace explore
