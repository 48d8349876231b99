#include <gtest/gtest.h>

#include "harness/config.hpp"

namespace explore {
namespace {

ErrorCode CodeOf(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.code();
  }
  ADD_FAILURE() << "no throw";
  return ErrorCode::kInvalidArgument;
}

TEST(Config, DefaultsAreValid) {
  const Config c;
  EXPECT_NO_THROW(ValidateConfig(c));
  EXPECT_EQ(c.planner.mpc.N, 12);
  EXPECT_DOUBLE_EQ(c.planner.mpc.h, 0.1);
  EXPECT_DOUBLE_EQ(c.world.density, 0.1);
  EXPECT_DOUBLE_EQ(c.wall_cap_s, 600.0);
}

TEST(Config, ParseSetsValues) {
  const Config c = ParseConfig(
      "# comment\n"
      "mpc.N = 8\n"
      "experiment.seeds = 3, 4\n"
      "world.size_x = 15   # trailing comment\n"
      "mpc.j_max = 5, 6, 7\n"
      "log.trajectory = false\n");
  EXPECT_EQ(c.planner.mpc.N, 8);
  EXPECT_EQ(c.seeds, (std::vector<uint64_t>{3, 4}));
  EXPECT_DOUBLE_EQ(c.world.size.x(), 15.0);
  EXPECT_EQ(c.planner.mpc.j_max, Vec3(5, 6, 7));
  EXPECT_FALSE(c.log_trajectory);
}

TEST(Config, RoundTripIsIdentity) {
  Config c;
  SetConfigValue(c, "mpc.d_rad", "0.123456789012345");
  SetConfigValue(c, "experiment.agent_counts", "1,3");
  const std::string text = SerializeConfig(c);
  EXPECT_EQ(SerializeConfig(ParseConfig(text)), text);
  EXPECT_EQ(GetConfigValue(ParseConfig(text), "mpc.d_rad"),
            GetConfigValue(c, "mpc.d_rad"));
}

TEST(Config, UnknownKeysAndBadValuesAreRejected) {
  EXPECT_EQ(CodeOf([] { ParseConfig("mpc.nope = 1\n"); }), ErrorCode::kConfig);
  EXPECT_EQ(CodeOf([] { ParseConfig("mpc.N = twelve\n"); }), ErrorCode::kConfig);
  EXPECT_EQ(CodeOf([] { ParseConfig("mpc.N 12\n"); }), ErrorCode::kConfig);
  EXPECT_EQ(CodeOf([] { ParseConfig("mpc.j_max = 1, 2\n"); }),
            ErrorCode::kConfig);
}

TEST(Config, RangeChecks) {
  Config c;
  c.world.density = -0.1;
  EXPECT_EQ(CodeOf([&] { ValidateConfig(c); }), ErrorCode::kConfig);
  c = Config();
  c.planner.mpc.h = 0.0;
  EXPECT_EQ(CodeOf([&] { ValidateConfig(c); }), ErrorCode::kConfig);
  c = Config();
  c.bus_delay_ms = 37;
  EXPECT_EQ(CodeOf([&] { ValidateConfig(c); }), ErrorCode::kConfig);
}

TEST(Config, MissingFileIsAnIoError) {
  EXPECT_EQ(CodeOf([] { LoadConfigFile("/nonexistent/explore.conf"); }),
            ErrorCode::kIo);
}

TEST(Config, EveryKeyCanBeReadBack) {
  const Config c;
  for (const std::string &key : ConfigKeys()) {
    Config d;
    SetConfigValue(d, key, GetConfigValue(c, key));
    EXPECT_EQ(GetConfigValue(d, key), GetConfigValue(c, key)) << key;
  }
}

}  // namespace
}  // namespace explore

namespace explore {
namespace {

TEST(Config, ShippedFilesLoad) {
  const std::string dir = EXPLORE_CONFIG_DIR;
  EXPECT_EQ(SerializeConfig(LoadConfigFile(dir + "/default.cfg")),
            SerializeConfig(Config{}));
  const Config small = LoadConfigFile(dir + "/small.cfg");
  EXPECT_EQ(small.seeds, std::vector<uint64_t>{1});
  EXPECT_EQ(small.agent_counts, std::vector<int>{2});
  EXPECT_DOUBLE_EQ(small.world.size.x(), 15.0);
}

}  // namespace
}  // namespace explore
