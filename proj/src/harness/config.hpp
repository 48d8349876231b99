#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/planner.hpp"
#include "core/world.hpp"

namespace explore {

// Every tunable of an experiment. Defaults: 30 x 30 x 3 m world, 90
// cylinders, N = 12, h = 0.1 s.
struct Config {
  // experiment
  std::vector<uint64_t> seeds = {1, 2, 3, 4, 5};
  std::vector<int> agent_counts = {1, 2, 3, 4};
  std::string output_dir = "runs";
  double wall_cap_s = 600.0;
  double max_sim_time_s = 900.0;

  // world (voxel_size lives in world.voxel_size)
  WorldParams world = [] {
    WorldParams w;
    w.size = Vec3(30.0, 30.0, 3.0);
    return w;
  }();

  // maps
  Vec3 local_size = Vec3(20.0, 20.0, 3.0);
  double removal_radius = 0.6;
  bool static_env = true;
  double lidar_range = 10.0;

  // rates
  int dt_ms = 10;
  int local_map_hz = 10;
  int global_map_hz = 5;
  int planning_hz = 10;

  int bus_delay_ms = 0;

  PlannerParams planner;
  int stall_plans = 50;
  double stall_progress = 0.1;

  bool log_trajectory = true;
};

// Flat "key = value" text, '#' starts a comment. Vector values are comma
// separated. Unknown keys and malformed values throw kConfig.
void ApplyConfigText(Config &config, const std::string &text);
Config ParseConfig(const std::string &text);
Config LoadConfigFile(const std::string &path);

// every key in a fixed order, doubles printed with %.17g
std::string SerializeConfig(const Config &config);

void SetConfigValue(Config &config, const std::string &key,
                    const std::string &value);
std::string GetConfigValue(const Config &config, const std::string &key);
std::vector<std::string> ConfigKeys();

// range and consistency checks; throws kConfig with the offending key
void ValidateConfig(const Config &config);

}  // namespace explore
