#pragma once

#include <cstdint>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "core/common.hpp"

namespace explore {

enum class VoxelState : uint8_t { kUnknown = 0, kFree = 1, kOccupied = 2 };

// Dense 3-state occupancy lattice. The origin is stored as an integer number
// of voxels so that it is always an exact multiple of the voxel size; voxel
// (i, j, k) covers [origin + i*vs, origin + (i+1)*vs) along each axis.
class VoxelGrid {
 public:
  VoxelGrid() = default;
  VoxelGrid(const Index3 &origin_index, const Index3 &dims, double voxel_size);

  // builds a grid from a metric origin; throws kAlignment if the origin is not
  // a multiple of the voxel size (within 1e-9 m)
  static VoxelGrid FromWorldOrigin(const Vec3 &origin, const Index3 &dims,
                                   double voxel_size);

  const Index3 &origin_index() const { return origin_index_; }
  Vec3 origin() const { return origin_index_.cast<double>() * voxel_size_; }
  const Index3 &dims() const { return dims_; }
  double voxel_size() const { return voxel_size_; }
  int64_t size() const { return static_cast<int64_t>(states_.size()); }
  Vec3 extent_min() const { return origin(); }
  Vec3 extent_max() const {
    return (origin_index_ + dims_).cast<double>() * voxel_size_;
  }

  bool Contains(const Index3 &idx) const {
    return idx.x() >= 0 && idx.y() >= 0 && idx.z() >= 0 &&
           idx.x() < dims_.x() && idx.y() < dims_.y() && idx.z() < dims_.z();
  }
  bool ContainsPoint(const Vec3 &p) const { return Contains(PointToIndex(p)); }

  int64_t Linear(const Index3 &idx) const {
    return idx.x() +
           static_cast<int64_t>(dims_.x()) *
               (idx.y() + static_cast<int64_t>(dims_.y()) * idx.z());
  }
  Index3 Unlinear(int64_t lin) const {
    const int64_t nxy = static_cast<int64_t>(dims_.x()) * dims_.y();
    const int z = static_cast<int>(lin / nxy);
    const int64_t rem = lin - z * nxy;
    return Index3(static_cast<int>(rem % dims_.x()),
                  static_cast<int>(rem / dims_.x()), z);
  }

  VoxelState Get(const Index3 &idx) const { return states_[Linear(idx)]; }
  VoxelState Get(int64_t lin) const { return states_[lin]; }
  void Set(const Index3 &idx, VoxelState s) { states_[Linear(idx)] = s; }
  void Set(int64_t lin, VoxelState s) { states_[lin] = s; }
  // out-of-grid voxels read as unknown
  VoxelState GetOr(const Index3 &idx) const {
    return Contains(idx) ? Get(idx) : VoxelState::kUnknown;
  }

  std::span<const VoxelState> states() const { return states_; }
  std::span<VoxelState> mutable_states() { return states_; }

  // local index of the voxel containing p (may be outside the grid)
  Index3 PointToIndex(const Vec3 &p) const;
  Vec3 Center(const Index3 &idx) const {
    return (origin_index_.cast<double>() + idx.cast<double>() +
            Vec3::Constant(0.5)) *
           voxel_size_;
  }
  Vec3 Center(int64_t lin) const { return Center(Unlinear(lin)); }

  int64_t Count(VoxelState s) const;

  bool operator==(const VoxelGrid &o) const {
    return origin_index_ == o.origin_index_ && dims_ == o.dims_ &&
           voxel_size_ == o.voxel_size_ && states_ == o.states_;
  }

 private:
  Index3 origin_index_ = Index3::Zero();
  Index3 dims_ = Index3::Zero();
  double voxel_size_ = 0.0;
  std::vector<VoxelState> states_;
};

// world voxel index of a point for a world-anchored lattice of size vs
Index3 WorldVoxelIndex(const Vec3 &p, double voxel_size);

// 3D DDA (Amanatides-Woo) over the world lattice: visits every voxel pierced
// by the segment from `from` to `to`, starting with the voxel of `from` and
// ending with the voxel of `to`. The visitor returns false to stop early.
// Exactly |delta|_1 steps are taken so the end voxel is always reached.
template <typename Visitor>
void TraverseSegment(const Vec3 &from, const Vec3 &to, double voxel_size,
                     Visitor &&visit) {
  Index3 cur = WorldVoxelIndex(from, voxel_size);
  const Index3 end = WorldVoxelIndex(to, voxel_size);
  const Vec3 dir = to - from;

  Index3 step;
  Vec3 t_max, t_delta;
  Index3 remaining;
  for (int i = 0; i < 3; ++i) {
    remaining[i] = std::abs(end[i] - cur[i]);
    if (dir[i] > 0.0) {
      step[i] = 1;
      t_max[i] = ((cur[i] + 1) * voxel_size - from[i]) / dir[i];
      t_delta[i] = voxel_size / dir[i];
    } else if (dir[i] < 0.0) {
      step[i] = -1;
      t_max[i] = (cur[i] * voxel_size - from[i]) / dir[i];
      t_delta[i] = -voxel_size / dir[i];
    } else {
      step[i] = 0;
      t_max[i] = std::numeric_limits<double>::infinity();
      t_delta[i] = std::numeric_limits<double>::infinity();
    }
  }

  if (!visit(static_cast<const Index3 &>(cur))) return;
  int total = remaining.sum();
  while (total > 0) {
    // earliest boundary crossing among axes that still owe steps
    int axis = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i) {
      if (remaining[i] > 0 && (axis < 0 || t_max[i] < best)) {
        best = t_max[i];
        axis = i;
      }
    }
    cur[axis] += step[axis];
    t_max[axis] += t_delta[axis];
    --remaining[axis];
    --total;
    if (!visit(static_cast<const Index3 &>(cur))) return;
  }
}

// Snapshot file: "VXGD", u32 version, f64 origin[3], u32 dims[3],
// f64 voxel_size, then one byte per voxel, x fastest. Little-endian.
void SaveGridSnapshot(const VoxelGrid &grid, const std::string &path);
VoxelGrid LoadGridSnapshot(const std::string &path);

}  // namespace explore
