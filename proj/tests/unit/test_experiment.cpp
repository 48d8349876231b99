#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "harness/experiment.hpp"

namespace explore {
namespace {

namespace fs = std::filesystem;

fs::path Scratch(const std::string &name) {
  const fs::path p = fs::temp_directory_path() / name;
  fs::remove_all(p);
  return p;
}

std::string ReadAll(const fs::path &p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunRow Row(uint64_t seed, int agents, int id, double time, double dist,
           const char *status = "complete") {
  RunRow r;
  r.seed = seed;
  r.agents = agents;
  r.agent_id = id;
  r.status = status;
  r.exploration_time = time;
  r.flight_distance = dist;
  r.mean_velocity = dist / time;
  r.plans = 10 + id;
  r.plan_ms_mean = 3.0 + id;
  r.plan_ms_max = 9.0 + seed;
  r.plan_ms_std = 0.5;
  if (agents > 1) r.safety_ratio = 1.0 + 0.1 * seed;
  return r;
}

TEST(Aggregate, RecomputedFromRawRows) {
  std::vector<RunRow> rows = {Row(1, 1, 0, 10, 20), Row(2, 1, 0, 14, 30),
                              Row(1, 2, 0, 6, 8),   Row(1, 2, 1, 6, 12),
                              Row(2, 2, 0, 8, 10),  Row(2, 2, 1, 8, 14)};
  const auto table = AggregateRows(rows);
  const auto again = AggregateRows(ParseRunsCsv(FormatRunsCsv(rows)));
  ASSERT_EQ(table.size(), 2u);
  ASSERT_EQ(again.size(), 2u);
  for (size_t i = 0; i < 2; ++i) {
    EXPECT_NEAR(table[i].exploration_time.mean, again[i].exploration_time.mean, 1e-9);
    EXPECT_NEAR(table[i].flight_distance.std, again[i].flight_distance.std, 1e-9);
    EXPECT_NEAR(table[i].compute_ms.std, again[i].compute_ms.std, 1e-9);
  }
  EXPECT_EQ(table[0].agents, 1);
  EXPECT_EQ(table[0].runs, 2);
  EXPECT_DOUBLE_EQ(table[0].exploration_time.mean, 12.0);
  EXPECT_DOUBLE_EQ(table[0].exploration_time.std, 2.0);
  EXPECT_FALSE(table[0].safety_ratio.has_value());
  // per-agent distances of the two-agent runs: 8, 12, 10, 14
  EXPECT_DOUBLE_EQ(table[1].flight_distance.mean, 11.0);
  EXPECT_DOUBLE_EQ(table[1].flight_distance.max, 14.0);
  EXPECT_DOUBLE_EQ(table[1].flight_distance.std, std::sqrt(5.0));
  ASSERT_TRUE(table[1].safety_ratio.has_value());
  EXPECT_NEAR(table[1].safety_ratio->mean, 1.15, 1e-12);
}

TEST(Aggregate, PooledComputeTime) {
  // two agents with 10 and 11 plans of mean 3 and 4 ms (std 0.5 each)
  const auto table = AggregateRows({Row(1, 2, 0, 6, 8), Row(1, 2, 1, 6, 12)});
  std::vector<double> all;
  for (int i = 0; i < 10; ++i) all.push_back(3.0 + (i % 2 ? 0.5 : -0.5));
  for (int i = 0; i < 11; ++i) all.push_back(4.0);
  const double mean = (10 * 3.0 + 11 * 4.0) / 21.0;
  EXPECT_NEAR(table[0].compute_ms.mean, mean, 1e-12);
  const double var =
      (10 * (0.25 + (3.0 - mean) * (3.0 - mean)) +
       11 * (0.25 + (4.0 - mean) * (4.0 - mean))) / 21.0;
  EXPECT_NEAR(table[0].compute_ms.std, std::sqrt(var), 1e-12);
}

TEST(Aggregate, TimeoutsAreLeftOut) {
  const auto table = AggregateRows(
      {Row(1, 1, 0, 10, 20), Row(2, 1, 0, 900, 500, "timeout")});
  ASSERT_EQ(table.size(), 1u);
  EXPECT_EQ(table[0].runs, 1);
  EXPECT_EQ(table[0].timed_out, 1);
  EXPECT_DOUBLE_EQ(table[0].exploration_time.mean, 10.0);
}

TEST(Format, WarningsBecomeRows) {
  const auto table = AggregateRows({Row(1, 1, 0, 10, 20)});
  const std::string csv = FormatTableCsv(table, {"seed 2 agents 1 timed out"});
  EXPECT_NE(csv.find("\nwarning,seed 2 agents 1 timed out\n"), std::string::npos);
  const std::string text = FormatTableText(table, {"x"});
  EXPECT_NE(text.find("warning: x"), std::string::npos);
}

TEST(Format, RunsCsvRejectsShortRows) {
  EXPECT_THROW(ParseRunsCsv("header\n1,2,3\n"), Error);
}

TEST(RunExperiment, TinyEmptyWorld) {
  Config c;
  c.seeds = {1};
  c.agent_counts = {1};
  c.world.size = Vec3(6, 6, 3);
  c.world.density = 0.0;
  const fs::path dir = Scratch("explore_experiment_tiny");
  const ExperimentReport r = RunExperiment(c, dir.string());
  ASSERT_EQ(r.runs.size(), 1u);
  EXPECT_EQ(r.runs[0].status, RunStatus::kComplete);
  EXPECT_GT(r.runs[0].exploration_time, 0.0);
  EXPECT_TRUE(r.warnings.empty());
  const fs::path run = dir / RunDirName(1, 1);
  for (const char *f : {"world.txt", "metrics.csv", "timing.csv", "trajectory.csv",
                        "clusters.txt", "global_map.vxgd"}) {
    EXPECT_TRUE(fs::exists(run / f)) << f;
  }
  const std::string runs = ReadAll(dir / "runs.csv");
  EXPECT_NE(runs.find(",-\n"), std::string::npos);  // no safety ratio
  const auto again = AggregateRows(ParseRunsCsv(runs));
  EXPECT_NEAR(again[0].exploration_time.mean, r.table[0].exploration_time.mean,
              1e-9);
  EXPECT_TRUE(fs::exists(dir / "table.txt"));
  fs::remove_all(dir);
}

TEST(RunExperiment, InvalidConfigRunsNothing) {
  Config c;
  c.world.density = -1.0;
  const fs::path dir = Scratch("explore_experiment_invalid");
  EXPECT_THROW(RunExperiment(c, dir.string()), Error);
  EXPECT_FALSE(fs::exists(dir));
}

}  // namespace
}  // namespace explore
