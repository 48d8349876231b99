#include "core/world.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace explore {

namespace {

// uniform double in [0, 1) built from the raw 64-bit output so the sequence
// does not depend on the standard library's distribution implementation
double Uniform01(std::mt19937_64 &rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

std::vector<Vec3> StartPositions(int agents, double voxel_size) {
  std::vector<Vec3> out;
  const double c = 5.5 * voxel_size;
  for (int i = 0; i < agents; ++i) {
    out.emplace_back(c + 3.0 * i, c, c);
  }
  return out;
}

VoxelGrid RasterizeCylinders(const Vec3 &bounds,
                             const std::vector<Cylinder> &cylinders,
                             double voxel_size) {
  Index3 dims;
  for (int i = 0; i < 3; ++i) {
    dims[i] = std::max(1, static_cast<int>(std::ceil(bounds[i] / voxel_size -
                                                      1e-9)));
  }
  VoxelGrid grid(Index3::Zero(), dims, voxel_size);
  auto states = grid.mutable_states();
  std::fill(states.begin(), states.end(), VoxelState::kFree);
  for (const Cylinder &c : cylinders) {
    const int x0 = std::max(0, static_cast<int>(std::floor((c.cx - c.radius) /
                                                            voxel_size)));
    const int x1 = std::min(dims.x() - 1,
                            static_cast<int>((c.cx + c.radius) / voxel_size));
    const int y0 = std::max(0, static_cast<int>(std::floor((c.cy - c.radius) /
                                                            voxel_size)));
    const int y1 = std::min(dims.y() - 1,
                            static_cast<int>((c.cy + c.radius) / voxel_size));
    for (int z = 0; z < dims.z(); ++z) {
      if ((z + 0.5) * voxel_size >= c.height) break;
      for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
          const double dx = (x + 0.5) * voxel_size - c.cx;
          const double dy = (y + 0.5) * voxel_size - c.cy;
          if (dx * dx + dy * dy <= c.radius * c.radius) {
            grid.Set(Index3(x, y, z), VoxelState::kOccupied);
          }
        }
      }
    }
  }
  return grid;
}

WorldModel GenerateWorld(uint64_t seed, const WorldParams &params,
                         const std::vector<Vec3> &starts) {
  if (params.density < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "negative obstacle density");
  }
  WorldModel world;
  world.bounds = params.size;
  const int count = static_cast<int>(
      std::llround(params.density * params.size.x() * params.size.y()));
  std::mt19937_64 rng(seed);
  const double r = params.radius;
  const double keep_out = params.start_clearance + r;
  int attempts = 0;
  while (static_cast<int>(world.cylinders.size()) < count) {
    if (++attempts > 1000 * (count + 1)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "cannot place cylinders outside the start clearance");
    }
    Cylinder c;
    c.cx = r + Uniform01(rng) * (params.size.x() - 2.0 * r);
    c.cy = r + Uniform01(rng) * (params.size.y() - 2.0 * r);
    c.radius = r;
    c.height = params.height;
    bool clear = true;
    for (const Vec3 &s : starts) {
      if (std::hypot(c.cx - s.x(), c.cy - s.y()) < keep_out) {
        clear = false;
        break;
      }
    }
    if (clear) world.cylinders.push_back(c);
  }
  world.truth =
      RasterizeCylinders(params.size, world.cylinders, params.voxel_size);
  return world;
}

namespace {

// parameter along from->to where the segment enters the voxel `w`
double EntryParameter(const Vec3 &from, const Vec3 &to, const Index3 &w,
                      double vs) {
  const Vec3 dir = to - from;
  double t = 0.0;
  for (int i = 0; i < 3; ++i) {
    if (dir[i] > 0.0) t = std::max(t, (w[i] * vs - from[i]) / dir[i]);
    if (dir[i] < 0.0) t = std::max(t, ((w[i] + 1) * vs - from[i]) / dir[i]);
  }
  return t;
}

// first occupied truth voxel on the segment, if any
bool FirstOccupied(const VoxelGrid &truth, const Vec3 &from, const Vec3 &to,
                   Index3 *hit) {
  bool found = false;
  TraverseSegment(from, to, truth.voxel_size(), [&](const Index3 &w) {
    if (!truth.Contains(w)) return false;
    if (truth.Get(w) == VoxelState::kOccupied) {
      *hit = w;
      found = true;
      return false;
    }
    return true;
  });
  return found;
}

}  // namespace

PointCloud SenseLidar(const WorldModel &world, const Vec3 &sensor,
                      const std::vector<Vec3> &other_agents, double range,
                      double body) {
  const VoxelGrid &truth = world.truth;
  const double vs = truth.voxel_size();
  PointCloud cloud;
  cloud.sensor_origin = sensor;

  const Index3 lo =
      truth.PointToIndex(sensor - Vec3::Constant(range)).cwiseMax(Index3::Zero());
  const Index3 hi = truth.PointToIndex(sensor + Vec3::Constant(range))
                        .cwiseMin(truth.dims() - Index3::Ones());
  const double range2 = range * range;
  std::vector<uint8_t> hit_seen(truth.size(), 0);

  for (int z = lo.z(); z <= hi.z(); ++z) {
    for (int y = lo.y(); y <= hi.y(); ++y) {
      for (int x = lo.x(); x <= hi.x(); ++x) {
        const Index3 target(x, y, z);
        const Vec3 c = truth.Center(target);
        if ((c - sensor).squaredNorm() > range2) continue;
        Index3 hit;
        if (!FirstOccupied(truth, sensor, c, &hit)) {
          cloud.max_range_points.push_back(c);
          continue;
        }
        const int64_t lin = truth.Linear(hit);
        if (hit_seen[lin]) continue;
        hit_seen[lin] = 1;
        const Vec3 dir = c - sensor;
        const double t = EntryParameter(sensor, c, hit, vs);
        if (t <= 0.0) continue;  // sensor inside an obstacle
        const Vec3 p = sensor + t * dir + 1e-4 * dir.normalized();
        // keep the point only if its own ray stops exactly at this voxel
        Index3 check;
        if (WorldVoxelIndex(p, vs) != hit ||
            !FirstOccupied(truth, sensor, p, &check) || check != hit) {
          continue;
        }
        cloud.points.push_back(p);
      }
    }
  }

  // surface samples of the other agents' bodies
  static const std::array<Vec3, 14> dirs = [] {
    std::array<Vec3, 14> d;
    int n = 0;
    for (int i = 0; i < 3; ++i) {
      d[n++] = Vec3::Unit(i);
      d[n++] = -Vec3::Unit(i);
    }
    for (int sx : {-1, 1}) {
      for (int sy : {-1, 1}) {
        for (int sz : {-1, 1}) d[n++] = Vec3(sx, sy, sz).normalized();
      }
    }
    return d;
  }();
  for (const Vec3 &other : other_agents) {
    for (const Vec3 &d : dirs) {
      const Vec3 p = other + body * d;
      if ((p - sensor).squaredNorm() > range2) continue;
      if (!truth.ContainsPoint(p)) continue;
      Index3 hit;
      if (FirstOccupied(truth, sensor, p, &hit)) continue;
      cloud.points.push_back(p);
    }
  }
  return cloud;
}

void SaveWorldFile(const std::vector<Cylinder> &cylinders,
                   const std::string &path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  char line[128];
  for (const Cylinder &c : cylinders) {
    std::snprintf(line, sizeof(line), "%.17g %.17g %.17g %.17g\n", c.cx, c.cy,
                  c.radius, c.height);
    out << line;
  }
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
}

std::vector<Cylinder> LoadWorldFile(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path);
  std::vector<Cylinder> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ss(line);
    Cylinder c;
    if (!(ss >> c.cx >> c.cy >> c.radius >> c.height)) {
      throw Error(ErrorCode::kIo,
                  path + ":" + std::to_string(line_no) + ": malformed cylinder");
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace explore
