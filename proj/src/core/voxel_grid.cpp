#include "core/voxel_grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

namespace explore {

namespace {

constexpr uint32_t kSnapshotVersion = 1;
constexpr char kSnapshotMagic[4] = {'V', 'X', 'G', 'D'};

template <typename T>
void WriteLe(std::ostream &os, T value) {
  static_assert(std::endian::native == std::endian::little,
                "snapshot IO assumes a little-endian host");
  os.write(reinterpret_cast<const char *>(&value), sizeof(T));
}

template <typename T>
T ReadLe(std::istream &is) {
  T value{};
  is.read(reinterpret_cast<char *>(&value), sizeof(T));
  if (!is) throw Error(ErrorCode::kIo, "truncated grid snapshot");
  return value;
}

}  // namespace

VoxelGrid::VoxelGrid(const Index3 &origin_index, const Index3 &dims,
                     double voxel_size)
    : origin_index_(origin_index), dims_(dims), voxel_size_(voxel_size) {
  if (dims.minCoeff() < 1) {
    throw Error(ErrorCode::kInvalidArgument, "grid dims must be >= 1");
  }
  if (!(voxel_size > 0.0) || !std::isfinite(voxel_size)) {
    throw Error(ErrorCode::kInvalidArgument, "voxel size must be positive");
  }
  states_.assign(static_cast<size_t>(dims.x()) * dims.y() * dims.z(),
                 VoxelState::kUnknown);
}

VoxelGrid VoxelGrid::FromWorldOrigin(const Vec3 &origin, const Index3 &dims,
                                     double voxel_size) {
  Index3 idx;
  for (int i = 0; i < 3; ++i) {
    const double q = origin[i] / voxel_size;
    const double r = std::round(q);
    if (std::abs(r * voxel_size - origin[i]) > 1e-9) {
      throw Error(ErrorCode::kAlignment,
                  "grid origin is not a multiple of the voxel size");
    }
    idx[i] = static_cast<int>(r);
  }
  return VoxelGrid(idx, dims, voxel_size);
}

Index3 VoxelGrid::PointToIndex(const Vec3 &p) const {
  return WorldVoxelIndex(p, voxel_size_) - origin_index_;
}

int64_t VoxelGrid::Count(VoxelState s) const {
  return std::count(states_.begin(), states_.end(), s);
}

Index3 WorldVoxelIndex(const Vec3 &p, double voxel_size) {
  return Index3(static_cast<int>(std::floor(p.x() / voxel_size)),
                static_cast<int>(std::floor(p.y() / voxel_size)),
                static_cast<int>(std::floor(p.z() / voxel_size)));
}

void SaveGridSnapshot(const VoxelGrid &grid, const std::string &path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::kIo, "cannot open " + path);
  os.write(kSnapshotMagic, 4);
  WriteLe<uint32_t>(os, kSnapshotVersion);
  const Vec3 origin = grid.origin();
  for (int i = 0; i < 3; ++i) WriteLe<double>(os, origin[i]);
  for (int i = 0; i < 3; ++i) WriteLe<uint32_t>(os, grid.dims()[i]);
  WriteLe<double>(os, grid.voxel_size());
  const auto states = grid.states();
  os.write(reinterpret_cast<const char *>(states.data()),
           static_cast<std::streamsize>(states.size()));
  if (!os) throw Error(ErrorCode::kIo, "write failed: " + path);
}

VoxelGrid LoadGridSnapshot(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::kIo, "cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kSnapshotMagic, 4) != 0) {
    throw Error(ErrorCode::kIo, "not a grid snapshot: " + path);
  }
  const auto version = ReadLe<uint32_t>(is);
  if (version != kSnapshotVersion) {
    throw Error(ErrorCode::kIo, "unsupported snapshot version");
  }
  Vec3 origin;
  for (int i = 0; i < 3; ++i) origin[i] = ReadLe<double>(is);
  Index3 dims;
  for (int i = 0; i < 3; ++i) {
    const auto d = ReadLe<uint32_t>(is);
    if (d == 0 || d > (1u << 20)) {
      throw Error(ErrorCode::kIo, "snapshot dims out of range");
    }
    dims[i] = static_cast<int>(d);
  }
  const double vs = ReadLe<double>(is);
  VoxelGrid grid = VoxelGrid::FromWorldOrigin(origin, dims, vs);
  auto states = grid.mutable_states();
  is.read(reinterpret_cast<char *>(states.data()),
          static_cast<std::streamsize>(states.size()));
  if (!is) throw Error(ErrorCode::kIo, "truncated grid snapshot");
  for (VoxelState s : states) {
    if (static_cast<uint8_t>(s) > 2) {
      throw Error(ErrorCode::kIo, "invalid voxel state byte");
    }
  }
  return grid;
}

}  // namespace explore
