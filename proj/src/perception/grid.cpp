#include "cslammot/perception/grid.hpp"

#include <algorithm>
#include <cmath>

namespace cslammot::perception {

Eigen::Vector2d GridSpec::cellCenter(int row, int col) const {
  return origin.transformFrom({(col + 0.5) * resolution, (row + 0.5) * resolution});
}

std::optional<int> GridSpec::cellIndexOf(const Eigen::Vector2d& vehicle_point) const {
  const Eigen::Vector2d g = origin.transformTo(vehicle_point);
  const double cf = std::floor(g.x() / resolution);
  const double rf = std::floor(g.y() / resolution);
  if (cf < 0.0 || rf < 0.0 || cf >= width || rf >= height) return std::nullopt;
  return static_cast<int>(rf) * width + static_cast<int>(cf);
}

GridSpec GridSpec::centered(int height, int width, double resolution, double kernel_sigma) {
  GridSpec g;
  g.height = height;
  g.width = width;
  g.resolution = resolution;
  g.kernel_sigma = kernel_sigma;
  g.origin = Pose2(-0.5 * width * resolution, -0.5 * height * resolution, 0.0);
  return g;
}

bool GridSpec::operator==(const GridSpec& other) const {
  return height == other.height && width == other.width && resolution == other.resolution &&
         origin.x() == other.origin.x() && origin.y() == other.origin.y() &&
         origin.yaw() == other.origin.yaw() && kernel_sigma == other.kernel_sigma;
}

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

ConfidenceMap warpMap(const ConfidenceMap& source, const Pose2& source_in_target, const GridSpec& target) {
  ConfidenceMap out(target, source.vehicle, source.stamp);
  for (int r = 0; r < target.height; ++r) {
    for (int c = 0; c < target.width; ++c) {
      const Eigen::Vector2d in_source = source_in_target.transformTo(target.cellCenter(r, c));
      if (auto idx = source.grid.cellIndexOf(in_source)) {
        out.at(r, c) = source.values[static_cast<std::size_t>(*idx)];
      }
    }
  }
  return out;
}

}  // namespace cslammot::perception
