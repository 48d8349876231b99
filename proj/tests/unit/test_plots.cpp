#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "harness/plots.hpp"
#include "core/world.hpp"

namespace explore {
namespace {

namespace fs = std::filesystem;

fs::path FakeRun(const std::string &name, int agents) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  SaveWorldFile({{3.0, 3.0, 0.35, 3.0}}, (dir / "world.txt").string());
  std::ofstream out(dir / "trajectory.csv");
  out << "t,agent_id,px,py,pz,vx,vy,vz,ax,ay,az\n";
  for (int k = 0; k < 25; ++k) {
    for (int a = 0; a < agents; ++a) {
      out << k * 0.01 << "," << a << "," << 1.0 + 3 * a + 0.01 * k << ",1,1,"
          << 0.1 * a << ",0,0,0,0,0\n";
    }
  }
  return dir;
}

TEST(EmitPlots, OneAgent) {
  const fs::path dir = FakeRun("explore_plot_one", 1);
  const PlotFiles f = EmitPlots(dir.string());
  ASSERT_EQ(f.polylines.size(), 1u);
  EXPECT_TRUE(fs::exists(f.svg));
  std::ifstream in(f.polylines[0]);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "x,y,speed");
  fs::remove_all(dir);
}

TEST(EmitPlots, FourAgentsFourFiles) {
  const fs::path dir = FakeRun("explore_plot_four", 4);
  const PlotFiles f = EmitPlots(dir.string());
  ASSERT_EQ(f.polylines.size(), 4u);
  for (int a = 0; a < 4; ++a) {
    EXPECT_EQ(fs::path(f.polylines[a]).filename().string(),
              "agent_" + std::to_string(a) + ".csv");
  }
  std::ifstream in(f.svg);
  const std::string svg((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
  EXPECT_NE(svg.find("<circle"), std::string::npos);
  EXPECT_NE(svg.find("id=\"agent_3\""), std::string::npos);
  fs::remove_all(dir);
}

TEST(EmitPlots, EmptyDirectoryFailsCleanly) {
  const fs::path dir = fs::temp_directory_path() / "explore_plot_empty";
  fs::remove_all(dir);
  fs::create_directories(dir);
  try {
    EmitPlots(dir.string());
    FAIL() << "no throw";
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
    EXPECT_NE(std::string(e.what()).find("trajectory"), std::string::npos);
  }
  EXPECT_TRUE(fs::is_empty(dir));
  fs::remove_all(dir);
}

TEST(EmitPlots, MissingWorldLeavesNothing) {
  const fs::path dir = FakeRun("explore_plot_noworld", 2);
  fs::remove(dir / "world.txt");
  EXPECT_THROW(EmitPlots(dir.string()), Error);
  EXPECT_FALSE(fs::exists(dir / "plots"));
  fs::remove_all(dir);
}

}  // namespace
}  // namespace explore
