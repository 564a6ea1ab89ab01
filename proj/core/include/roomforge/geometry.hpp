#pragma once

#include <array>

#include "roomforge/types.hpp"

namespace roomforge {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

// yaw-only oriented box; half extents are clamped to 1 mm at construction so
// degenerate inputs never produce zero-thickness geometry
struct OrientedBox {
  std::array<double, 3> center{0.0, 0.0, 0.0};
  std::array<double, 3> half{0.001, 0.001, 0.001};
  double yaw = 0.0;

  static OrientedBox from_layout(const Layout& l);
  static OrientedBox make(double cx, double cy, double cz, double hx, double hy, double hz,
                          double yaw);

  // ground-plane corners, counter-clockwise
  [[nodiscard]] std::array<Vec2, 4> footprint() const;
  [[nodiscard]] double footprint_area() const { return 4.0 * half[0] * half[1]; }
  [[nodiscard]] double zmin() const { return center[2] - half[2]; }
  [[nodiscard]] double zmax() const { return center[2] + half[2]; }
};

// exact area of the ground-plane intersection of two oriented boxes;
// symmetric in its arguments and zero when the footprints do not overlap
double footprint_overlap_area(const OrientedBox& a, const OrientedBox& b);

// true when the boxes share interior volume (touching faces do not count)
bool boxes_intersect_3d(const OrientedBox& a, const OrientedBox& b);

}  // namespace roomforge
