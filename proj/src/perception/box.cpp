#include "cslammot/perception/box.hpp"

#include <algorithm>
#include <cmath>

namespace cslammot::perception {

std::array<Eigen::Vector2d, 4> OrientedBox::corners() const {
  const double hl = 0.5 * length;
  const double hw = 0.5 * width;
  return {pose.transformFrom({hl, hw}), pose.transformFrom({-hl, hw}), pose.transformFrom({-hl, -hw}),
          pose.transformFrom({hl, -hw})};
}

double polygonArea(const Polygon& poly) {
  if (poly.size() < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& p = poly[i];
    const auto& q = poly[(i + 1) % poly.size()];
    twice += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * twice;
}

namespace {

double side(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& p) {
  return (b.x() - a.x()) * (p.y() - a.y()) - (b.y() - a.y()) * (p.x() - a.x());
}

Eigen::Vector2d intersect(const Eigen::Vector2d& p, const Eigen::Vector2d& q, const Eigen::Vector2d& a,
                          const Eigen::Vector2d& b) {
  const double sp = side(a, b, p);
  const double sq = side(a, b, q);
  const double t = sp / (sp - sq);
  return p + t * (q - p);
}

}  // namespace

Polygon clipConvex(const Polygon& subject, const Polygon& clip) {
  Polygon output = subject;
  for (std::size_t e = 0; e < clip.size() && !output.empty(); ++e) {
    const Eigen::Vector2d& a = clip[e];
    const Eigen::Vector2d& b = clip[(e + 1) % clip.size()];
    Polygon input = std::move(output);
    output.clear();
    for (std::size_t i = 0; i < input.size(); ++i) {
      const Eigen::Vector2d& cur = input[i];
      const Eigen::Vector2d& prev = input[(i + input.size() - 1) % input.size()];
      const bool cur_in = side(a, b, cur) >= 0.0;
      const bool prev_in = side(a, b, prev) >= 0.0;
      if (cur_in) {
        if (!prev_in) output.push_back(intersect(prev, cur, a, b));
        output.push_back(cur);
      } else if (prev_in) {
        output.push_back(intersect(prev, cur, a, b));
      }
    }
  }
  return output;
}

double orientedIou(const OrientedBox& a, const OrientedBox& b) {
  const double area_a = a.area();
  const double area_b = b.area();
  if (area_a <= 0.0 || area_b <= 0.0) return 0.0;
  // Cheap rejection on circumscribed circles.
  const double ra = 0.5 * std::hypot(a.length, a.width);
  const double rb = 0.5 * std::hypot(b.length, b.width);
  if ((a.pose.translation() - b.pose.translation()).norm() > ra + rb) return 0.0;

  const auto ca = a.corners();
  const auto cb = b.corners();
  const Polygon pa(ca.begin(), ca.end());
  const Polygon pb(cb.begin(), cb.end());
  const double inter = std::max(0.0, polygonArea(clipConvex(pa, pb)));
  const double uni = area_a + area_b - inter;
  return uni > 0.0 ? std::clamp(inter / uni, 0.0, 1.0) : 0.0;
}

}  // namespace cslammot::perception
