#include "harness/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

namespace explore {

namespace {

std::string Trim(const std::string &s) {
  const size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string FormatDouble(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

[[noreturn]] void Bad(const std::string &key, const std::string &why) {
  throw Error(ErrorCode::kConfig, key + ": " + why);
}

double ParseDouble(const std::string &key, const std::string &text) {
  const std::string t = Trim(text);
  if (t.empty()) Bad(key, "empty value");
  char *end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (*end != '\0' || errno == ERANGE || !std::isfinite(v)) {
    Bad(key, "not a number: '" + t + "'");
  }
  return v;
}

int64_t ParseInt(const std::string &key, const std::string &text) {
  const std::string t = Trim(text);
  if (t.empty()) Bad(key, "empty value");
  char *end = nullptr;
  errno = 0;
  const long long v = std::strtoll(t.c_str(), &end, 10);
  if (*end != '\0' || errno == ERANGE) {
    Bad(key, "not an integer: '" + t + "'");
  }
  return v;
}

bool ParseBool(const std::string &key, const std::string &text) {
  const std::string t = Trim(text);
  if (t == "true" || t == "1") return true;
  if (t == "false" || t == "0") return false;
  Bad(key, "expected true or false, got '" + t + "'");
}

std::vector<std::string> SplitList(const std::string &text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(Trim(item));
  return out;
}

std::vector<double> ParseDoubles(const std::string &key,
                                 const std::string &text, size_t count) {
  std::vector<double> out;
  for (const std::string &s : SplitList(text)) out.push_back(ParseDouble(key, s));
  if (out.size() != count) {
    Bad(key, "expected " + std::to_string(count) + " values");
  }
  return out;
}

template <typename T>
std::string JoinInts(const std::vector<T> &v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out;
}

template <typename V>
std::string JoinDoubles(const V &v) {
  std::string out;
  for (int i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += FormatDouble(v[i]);
  }
  return out;
}

struct Entry {
  std::string key;
  std::function<std::string(const Config &)> get;
  std::function<void(Config &, const std::string &)> set;
};

// accessors take a mutable Config; getters only read through them
template <typename Access>
Entry Real(const std::string &key, Access access) {
  return {key,
          [access](const Config &c) {
            return FormatDouble(access(const_cast<Config &>(c)));
          },
          [access, key](Config &c, const std::string &v) {
            access(c) = ParseDouble(key, v);
          }};
}

template <typename Access>
Entry Integer(const std::string &key, Access access) {
  return {key,
          [access](const Config &c) {
            return std::to_string(access(const_cast<Config &>(c)));
          },
          [access, key](Config &c, const std::string &v) {
            const int64_t x = ParseInt(key, v);
            if (x < INT32_MIN || x > INT32_MAX) Bad(key, "out of range");
            access(c) = static_cast<int>(x);
          }};
}

template <typename Access>
Entry Boolean(const std::string &key, Access access) {
  return {key,
          [access](const Config &c) {
            return std::string(access(const_cast<Config &>(c)) ? "true"
                                                                : "false");
          },
          [access, key](Config &c, const std::string &v) {
            access(c) = ParseBool(key, v);
          }};
}

template <typename Access>
Entry Vector(const std::string &key, Access access) {
  return {key,
          [access](const Config &c) {
            return JoinDoubles(access(const_cast<Config &>(c)));
          },
          [access, key](Config &c, const std::string &v) {
            auto &target = access(c);
            const std::vector<double> vals =
                ParseDoubles(key, v, static_cast<size_t>(target.size()));
            for (size_t i = 0; i < vals.size(); ++i) target[i] = vals[i];
          }};
}

#define FIELD(expr) [](Config & c) -> auto & { return c.expr; }

const std::vector<Entry> &Table() {
  static const std::vector<Entry> table = [] {
    std::vector<Entry> t;
    t.push_back({"experiment.seeds",
                 [](const Config &c) { return JoinInts(c.seeds); },
                 [](Config &c, const std::string &v) {
                   c.seeds.clear();
                   for (const std::string &s : SplitList(v)) {
                     const int64_t x = ParseInt("experiment.seeds", s);
                     if (x < 0) Bad("experiment.seeds", "negative seed");
                     c.seeds.push_back(static_cast<uint64_t>(x));
                   }
                 }});
    t.push_back({"experiment.agent_counts",
                 [](const Config &c) { return JoinInts(c.agent_counts); },
                 [](Config &c, const std::string &v) {
                   c.agent_counts.clear();
                   for (const std::string &s : SplitList(v)) {
                     c.agent_counts.push_back(static_cast<int>(
                         ParseInt("experiment.agent_counts", s)));
                   }
                 }});
    t.push_back({"experiment.output_dir",
                 [](const Config &c) { return c.output_dir; },
                 [](Config &c, const std::string &v) {
                   c.output_dir = Trim(v);
                 }});
    t.push_back(Real("experiment.wall_cap_s", FIELD(wall_cap_s)));
    t.push_back(Real("experiment.max_sim_time_s", FIELD(max_sim_time_s)));

    t.push_back(Real("world.size_x", FIELD(world.size.x())));
    t.push_back(Real("world.size_y", FIELD(world.size.y())));
    t.push_back(Real("world.size_z", FIELD(world.size.z())));
    t.push_back(Real("world.density", FIELD(world.density)));
    t.push_back(Real("world.radius", FIELD(world.radius)));
    t.push_back(Real("world.height", FIELD(world.height)));
    t.push_back(Real("world.start_clearance", FIELD(world.start_clearance)));

    t.push_back(Real("map.voxel_size", FIELD(world.voxel_size)));
    t.push_back(Real("map.local_size_x", FIELD(local_size.x())));
    t.push_back(Real("map.local_size_y", FIELD(local_size.y())));
    t.push_back(Real("map.local_size_z", FIELD(local_size.z())));
    t.push_back(Real("map.removal_radius", FIELD(removal_radius)));
    t.push_back(Boolean("map.static_env", FIELD(static_env)));
    t.push_back(Real("map.lidar_range", FIELD(lidar_range)));

    t.push_back(Integer("rates.dt_ms", FIELD(dt_ms)));
    t.push_back(Integer("rates.local_map_hz", FIELD(local_map_hz)));
    t.push_back(Integer("rates.global_map_hz", FIELD(global_map_hz)));
    t.push_back(Integer("rates.planning_hz", FIELD(planning_hz)));

    t.push_back(Integer("bus.delay_ms", FIELD(bus_delay_ms)));

    t.push_back(Integer("mpc.N", FIELD(planner.mpc.N)));
    t.push_back(Real("mpc.h", FIELD(planner.mpc.h)));
    t.push_back(Vector("mpc.a_max", FIELD(planner.mpc.a_max)));
    t.push_back(Real("mpc.a_z_min", FIELD(planner.mpc.a_z_min)));
    t.push_back(Vector("mpc.j_max", FIELD(planner.mpc.j_max)));
    t.push_back(Vector("mpc.drag", FIELD(planner.mpc.drag)));
    t.push_back(Integer("mpc.p_hor", FIELD(planner.mpc.p_hor)));
    t.push_back(Vector("mpc.r_x", FIELD(planner.mpc.r_x)));
    t.push_back(Vector("mpc.r_n", FIELD(planner.mpc.r_n)));
    t.push_back(Vector("mpc.r_u", FIELD(planner.mpc.r_u)));
    t.push_back(Real("mpc.big_m", FIELD(planner.mpc.big_m)));
    t.push_back(Real("mpc.v_samp", FIELD(planner.mpc.v_samp)));
    t.push_back(Real("mpc.a_samp", FIELD(planner.mpc.a_samp)));
    t.push_back(Real("mpc.thresh_dist", FIELD(planner.mpc.thresh_dist)));
    t.push_back(Real("mpc.d_rad", FIELD(planner.mpc.d_rad)));
    t.push_back(Real("mpc.mip_gap", FIELD(planner.mpc.mip_gap)));
    t.push_back(Integer("mpc.max_nodes", FIELD(planner.mpc.max_nodes)));

    t.push_back(Real("planner.dmp_push", FIELD(planner.dmp_push)));
    t.push_back(Real("planner.dmp_weight", FIELD(planner.dmp_weight)));
    t.push_back(Integer("planner.stall_plans", FIELD(stall_plans)));
    t.push_back(Real("planner.stall_progress", FIELD(stall_progress)));

    t.push_back(Boolean("log.trajectory", FIELD(log_trajectory)));
    return t;
  }();
  return table;
}

#undef FIELD

const Entry &Find(const std::string &key) {
  for (const Entry &e : Table()) {
    if (e.key == key) return e;
  }
  throw Error(ErrorCode::kConfig, "unknown key '" + key + "'");
}

}  // namespace

void SetConfigValue(Config &config, const std::string &key,
                    const std::string &value) {
  Find(key).set(config, value);
}

std::string GetConfigValue(const Config &config, const std::string &key) {
  return Find(key).get(config);
}

std::vector<std::string> ConfigKeys() {
  std::vector<std::string> keys;
  for (const Entry &e : Table()) keys.push_back(e.key);
  return keys;
}

void ApplyConfigText(Config &config, const std::string &text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kConfig,
                  "line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = Trim(line.substr(0, eq));
    try {
      SetConfigValue(config, key, line.substr(eq + 1));
    } catch (const Error &e) {
      throw Error(ErrorCode::kConfig,
                  "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

Config ParseConfig(const std::string &text) {
  Config config;
  ApplyConfigText(config, text);
  return config;
}

Config LoadConfigFile(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseConfig(ss.str());
}

std::string SerializeConfig(const Config &config) {
  std::string out;
  for (const Entry &e : Table()) {
    out += e.key + " = " + e.get(config) + "\n";
  }
  return out;
}

void ValidateConfig(const Config &c) {
  auto require = [](bool ok, const char *key, const char *why) {
    if (!ok) Bad(key, why);
  };
  require(!c.seeds.empty(), "experiment.seeds", "no seeds");
  require(!c.agent_counts.empty(), "experiment.agent_counts", "no agent counts");
  for (int k : c.agent_counts) {
    require(k >= 1 && k <= 64, "experiment.agent_counts", "must be in [1, 64]");
    require(5.5 * c.world.voxel_size + 3.0 * (k - 1) <
                c.world.size.x() - c.world.voxel_size,
            "experiment.agent_counts", "start positions do not fit the world");
  }
  require(c.wall_cap_s > 0.0, "experiment.wall_cap_s", "must be positive");
  require(c.max_sim_time_s > 0.0, "experiment.max_sim_time_s",
          "must be positive");

  const double vs = c.world.voxel_size;
  require(vs > 0.0, "map.voxel_size", "must be positive");
  for (int i = 0; i < 3; ++i) {
    require(c.world.size[i] >= 4.0 * vs, "world.size", "too small");
    require(c.local_size[i] >= 3.0 * vs, "map.local_size", "too small");
  }
  require(c.world.density >= 0.0, "world.density", "must be non-negative");
  require(c.world.radius > 0.0, "world.radius", "must be positive");
  require(c.world.height > 0.0, "world.height", "must be positive");
  require(c.world.start_clearance >= 0.0, "world.start_clearance",
          "must be non-negative");
  require(c.removal_radius >= 0.0, "map.removal_radius",
          "must be non-negative");
  require(c.lidar_range > 0.0, "map.lidar_range", "must be positive");

  require(c.dt_ms > 0, "rates.dt_ms", "must be positive");
  for (auto [hz, key] : {std::pair{c.local_map_hz, "rates.local_map_hz"},
                         std::pair{c.global_map_hz, "rates.global_map_hz"},
                         std::pair{c.planning_hz, "rates.planning_hz"}}) {
    require(hz > 0 && 1000 % hz == 0 && (1000 / hz) % c.dt_ms == 0, key,
            "period must be a whole number of ticks");
  }
  const MpcParams &m = c.planner.mpc;
  require(m.h > 0.0, "mpc.h", "must be positive");
  require(std::abs(m.h * c.planning_hz - 1.0) < 1e-9, "rates.planning_hz",
          "must equal 1 / mpc.h");
  require(c.bus_delay_ms >= 0 && c.bus_delay_ms <= 36, "bus.delay_ms",
          "must be in [0, 36]");

  require(m.N >= 1 && m.N <= 50, "mpc.N", "must be in [1, 50]");
  require(m.p_hor >= 1 && m.p_hor <= 8, "mpc.p_hor", "must be in [1, 8]");
  for (int i = 0; i < 3; ++i) {
    require(m.a_max[i] > 0.0, "mpc.a_max", "must be positive");
    require(m.j_max[i] > 0.0, "mpc.j_max", "must be positive");
    require(m.drag[i] > 0.0, "mpc.drag", "must be positive");
    require(m.r_u[i] > 0.0, "mpc.r_u", "must be positive");
  }
  require(m.a_z_min < m.a_max.z(), "mpc.a_z_min", "must be below a_max z");
  for (int i = 0; i < 9; ++i) {
    require(m.r_x[i] >= 0.0, "mpc.r_x", "must be non-negative");
    require(m.r_n[i] >= 0.0, "mpc.r_n", "must be non-negative");
  }
  require(m.big_m > 0.0, "mpc.big_m", "must be positive");
  require(m.v_samp > 0.0, "mpc.v_samp", "must be positive");
  require(m.a_samp > 0.0, "mpc.a_samp", "must be positive");
  require(m.thresh_dist >= 0.0, "mpc.thresh_dist", "must be non-negative");
  require(m.d_rad > 0.0, "mpc.d_rad", "must be positive");
  require(m.mip_gap >= 0.0, "mpc.mip_gap", "must be non-negative");
  require(m.max_nodes >= 1, "mpc.max_nodes", "must be positive");
  require(c.planner.dmp_push >= 0.0, "planner.dmp_push",
          "must be non-negative");
  require(c.planner.dmp_weight >= 0.0, "planner.dmp_weight",
          "must be non-negative");
  require(c.stall_plans >= 1, "planner.stall_plans", "must be positive");
  require(c.stall_progress >= 0.0, "planner.stall_progress",
          "must be non-negative");
}

}  // namespace explore
