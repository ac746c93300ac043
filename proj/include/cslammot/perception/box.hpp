#pragma once

#include <array>
#include <vector>

#include "cslammot/geometry.hpp"

namespace cslammot::perception {

struct OrientedBox {
  Pose2 pose;
  double length = 4.5;
  double width = 1.8;

  /// Corners in counter-clockwise order.
  std::array<Eigen::Vector2d, 4> corners() const;
  double area() const { return length * width; }
};

using Polygon = std::vector<Eigen::Vector2d>;

/// Shoelace area (positive for counter-clockwise vertex order).
double polygonArea(const Polygon& poly);

/// Sutherland-Hodgman clip of `subject` against a convex counter-clockwise `clip` polygon.
Polygon clipConvex(const Polygon& subject, const Polygon& clip);

double orientedIou(const OrientedBox& a, const OrientedBox& b);

}  // namespace cslammot::perception
