#pragma once

#include <string>
#include <vector>

namespace explore {

struct PlotFiles {
  std::vector<std::string> polylines;  // one x,y,speed CSV per agent
  std::string svg;
};

// Reads run_dir/trajectory.csv and run_dir/world.txt and writes
// run_dir/plots/agent_<id>.csv plus run_dir/plots/overview.svg. Everything
// is parsed before the first file is written, so a bad run directory leaves
// nothing behind.
PlotFiles EmitPlots(const std::string &run_dir);

}  // namespace explore
