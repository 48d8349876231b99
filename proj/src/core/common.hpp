#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace explore {

using Vec3 = Eigen::Vector3d;
using Index3 = Eigen::Vector3i;

constexpr double kGravity = 9.81;

enum class ErrorCode {
  kInvalidArgument,
  kPositioning,
  kAlignment,
  kDegenerateGeometry,
  kIo,
  kConfig,
};

// single exception type for the core; the C layer maps `code()` to status
// values
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// the 26 neighbor offsets in a fixed order (z slowest, x fastest)
inline const std::array<Index3, 26> &NeighborOffsets26() {
  static const std::array<Index3, 26> offsets = [] {
    std::array<Index3, 26> out;
    int n = 0;
    for (int dz = -1; dz <= 1; ++dz) {
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0 && dz == 0) continue;
          out[n++] = Index3(dx, dy, dz);
        }
      }
    }
    return out;
  }();
  return offsets;
}

}  // namespace explore
