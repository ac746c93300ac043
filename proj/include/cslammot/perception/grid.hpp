#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cslammot/geometry.hpp"

namespace cslammot::perception {

/// BEV grid layout. Cell (row, col) covers [col*res, (col+1)*res) x [row*res, (row+1)*res)
/// in the grid frame; `origin` places the grid frame inside the owning vehicle's frame.
struct GridSpec {
  int height = 100;
  int width = 252;
  double resolution = 0.4;
  Pose2 origin{-50.4, -20.0, 0.0};
  /// Gaussian kernel width used when rasterizing detections.
  double kernel_sigma = 1.0;

  int cellCount() const { return height * width; }
  bool valid() const { return height >= 1 && width >= 1 && resolution > 0.0 && kernel_sigma > 0.0; }

  Eigen::Vector2d cellCenter(int row, int col) const;
  /// Row-major cell index of a vehicle-frame point, if it falls inside the grid.
  std::optional<int> cellIndexOf(const Eigen::Vector2d& vehicle_point) const;

  /// Grid centered on the vehicle.
  static GridSpec centered(int height, int width, double resolution, double kernel_sigma = 1.0);

  bool operator==(const GridSpec& other) const;
};

struct ConfidenceMap {
  GridSpec grid;
  std::vector<double> values;
  int vehicle = -1;
  int stamp = -1;

  ConfidenceMap() = default;
  ConfidenceMap(const GridSpec& g, int vehicle_id, int step, double fill = 0.0)
      : grid(g), values(static_cast<std::size_t>(g.cellCount()), fill), vehicle(vehicle_id), stamp(step) {}

  double at(int row, int col) const { return values[static_cast<std::size_t>(row * grid.width + col)]; }
  double& at(int row, int col) { return values[static_cast<std::size_t>(row * grid.width + col)]; }
};

struct BinaryMask {
  GridSpec grid;
  std::vector<std::uint8_t> bits;

  BinaryMask() = default;
  BinaryMask(const GridSpec& g, std::uint8_t fill = 0)
      : grid(g), bits(static_cast<std::size_t>(g.cellCount()), fill) {}

  std::uint8_t at(int row, int col) const { return bits[static_cast<std::size_t>(row * grid.width + col)]; }
  std::uint8_t& at(int row, int col) { return bits[static_cast<std::size_t>(row * grid.width + col)]; }
  std::size_t count() const;
  bool empty() const { return count() == 0; }
};

/// Resamples a map owned by another vehicle into `target` (nearest cell),
/// given the pose of the source vehicle in the target vehicle's frame.
ConfidenceMap warpMap(const ConfidenceMap& source, const Pose2& source_in_target, const GridSpec& target);

}  // namespace cslammot::perception
