#include "core/distance_field.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace explore {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 1D squared distance transform of sampled function f (Felzenszwalb &
// Huttenlocher); writes into d. v and z are scratch buffers.
void Transform1d(const double *f, int n, double *d, std::vector<int> &v,
                 std::vector<double> &z) {
  v.resize(n);
  z.resize(n + 1);
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == kInf) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      continue;
    }
    double s;
    while (true) {
      const int p = v[k];
      s = ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p));
      if (s <= z[k]) {
        --k;
        if (k < 0) break;
      } else {
        break;
      }
    }
    ++k;
    v[k] = q;
    z[k] = (k == 0) ? -kInf : s;
    z[k + 1] = kInf;
  }
  if (k < 0) {
    for (int q = 0; q < n; ++q) d[q] = kInf;
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[j + 1] < q) ++j;
    const double dq = q - v[j];
    d[q] = dq * dq + f[v[j]];
  }
}

}  // namespace

DistanceField ComputeDistanceField(const VoxelGrid &grid) {
  const Index3 &d = grid.dims();
  const int64_t n = grid.size();
  std::vector<double> sq(n);
  for (int64_t i = 0; i < n; ++i) {
    sq[i] = grid.Get(i) == VoxelState::kFree ? kInf : 0.0;
  }

  std::vector<int> v;
  std::vector<double> z;
  const int max_dim = d.maxCoeff();
  std::vector<double> line_in(max_dim), line_out(max_dim);

  const int64_t sx = 1;
  const int64_t sy = d.x();
  const int64_t sz = static_cast<int64_t>(d.x()) * d.y();
  const std::array<int64_t, 3> strides = {sx, sy, sz};

  for (int axis = 0; axis < 3; ++axis) {
    const int len = d[axis];
    const int64_t stride = strides[axis];
    // iterate over every line along `axis`
    const int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
    for (int i2 = 0; i2 < d[a2]; ++i2) {
      for (int i1 = 0; i1 < d[a1]; ++i1) {
        const int64_t base = i1 * strides[a1] + i2 * strides[a2];
        for (int q = 0; q < len; ++q) line_in[q] = sq[base + q * stride];
        Transform1d(line_in.data(), len, line_out.data(), v, z);
        for (int q = 0; q < len; ++q) sq[base + q * stride] = line_out[q];
      }
    }
  }

  DistanceField field;
  field.dims = d;
  field.distance.resize(n);
  const double vs = grid.voxel_size();
  for (int64_t i = 0; i < n; ++i) {
    field.distance[i] = sq[i] == kInf ? kInf : std::sqrt(sq[i]) * vs;
  }
  return field;
}

int InflationVoxels(double radius, double voxel_size) {
  if (radius <= 0.0) return 0;
  // a blocked voxel at Chebyshev offset k is at least (k - 0.5) * vs away
  const int k = static_cast<int>(std::ceil(radius / voxel_size + 0.5 - 1e-9));
  return std::max(0, k - 1);
}

namespace {

// marks positions that have a set entry within `radius` along one axis;
// when `outside_set` is true, positions within `radius` of either end of the
// line count as set as well
void DilateAxis(const Index3 &d, std::vector<uint8_t> &mask, int axis,
                int radius, bool outside_set) {
  if (radius <= 0) return;
  const std::array<int64_t, 3> strides = {
      1, d.x(), static_cast<int64_t>(d.x()) * d.y()};
  const int len = d[axis];
  const int64_t stride = strides[axis];
  const int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
  std::vector<uint8_t> line(len);
  std::vector<int> prefix(len + 1);
  for (int i2 = 0; i2 < d[a2]; ++i2) {
    for (int i1 = 0; i1 < d[a1]; ++i1) {
      const int64_t base = i1 * strides[a1] + i2 * strides[a2];
      prefix[0] = 0;
      for (int q = 0; q < len; ++q) {
        line[q] = mask[base + q * stride];
        prefix[q + 1] = prefix[q] + (line[q] ? 1 : 0);
      }
      for (int q = 0; q < len; ++q) {
        const int lo = q - radius, hi = q + radius;
        bool set = false;
        if (outside_set && (lo < 0 || hi >= len)) {
          set = true;
        } else {
          const int l = std::max(lo, 0), h = std::min(hi, len - 1);
          set = prefix[h + 1] - prefix[l] > 0;
        }
        mask[base + q * stride] = set ? 1 : 0;
      }
    }
  }
}

}  // namespace

std::vector<uint8_t> DilateMask(const Index3 &dims,
                                const std::vector<uint8_t> &mask, int radius) {
  std::vector<uint8_t> out = mask;
  for (int axis = 0; axis < 3; ++axis) DilateAxis(dims, out, axis, radius, false);
  return out;
}

std::vector<uint8_t> ComputeTraversable(const VoxelGrid &grid, int inflation) {
  const int64_t n = grid.size();
  std::vector<uint8_t> blocked(n);
  for (int64_t i = 0; i < n; ++i) {
    blocked[i] = grid.Get(i) == VoxelState::kFree ? 0 : 1;
  }
  for (int axis = 0; axis < 3; ++axis) {
    DilateAxis(grid.dims(), blocked, axis, inflation, true);
  }
  std::vector<uint8_t> traversable(n);
  for (int64_t i = 0; i < n; ++i) traversable[i] = blocked[i] ? 0 : 1;
  return traversable;
}

}  // namespace explore
