#include "roomforge/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>
#include <vector>

namespace roomforge {

namespace {

constexpr double kMinHalfExtent = 0.001;

double shoelace(const std::vector<Vec2>& poly) {
  const std::size_t n = poly.size();
  if (n < 3) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % n];
    acc += p.x * q.y - q.x * p.y;
  }
  return 0.5 * std::abs(acc);
}

// clips a convex polygon against the half plane left of edge (a -> b)
std::vector<Vec2> clip_edge(const std::vector<Vec2>& poly, const Vec2& a, const Vec2& b) {
  std::vector<Vec2> out;
  out.reserve(poly.size() + 1);
  const double ex = b.x - a.x;
  const double ey = b.y - a.y;
  auto side = [&](const Vec2& p) { return ex * (p.y - a.y) - ey * (p.x - a.x); };
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& cur = poly[i];
    const Vec2& nxt = poly[(i + 1) % n];
    const double sc = side(cur);
    const double sn = side(nxt);
    if (sc >= 0.0) out.push_back(cur);
    if ((sc > 0.0 && sn < 0.0) || (sc < 0.0 && sn > 0.0)) {
      const double u = sc / (sc - sn);
      out.push_back({cur.x + u * (nxt.x - cur.x), cur.y + u * (nxt.y - cur.y)});
    }
  }
  return out;
}

double overlap_area_ordered(const OrientedBox& a, const OrientedBox& b) {
  const auto fa = a.footprint();
  const auto fb = b.footprint();
  std::vector<Vec2> poly(fa.begin(), fa.end());
  for (int i = 0; i < 4 && !poly.empty(); ++i)
    poly = clip_edge(poly, fb[static_cast<std::size_t>(i)],
                     fb[static_cast<std::size_t>((i + 1) % 4)]);
  return shoelace(poly);
}

std::tuple<double, double, double, double, double, double, double> box_key(
    const OrientedBox& b) {
  return {b.center[0], b.center[1], b.center[2], b.half[0], b.half[1], b.half[2], b.yaw};
}

// strict separating-axis test on ground-plane footprints
bool footprints_overlap(const OrientedBox& a, const OrientedBox& b) {
  const auto fa = a.footprint();
  const auto fb = b.footprint();
  const std::array<Vec2, 4> axes = {
      Vec2{std::cos(a.yaw), std::sin(a.yaw)},
      Vec2{-std::sin(a.yaw), std::cos(a.yaw)},
      Vec2{std::cos(b.yaw), std::sin(b.yaw)},
      Vec2{-std::sin(b.yaw), std::cos(b.yaw)},
  };
  for (const Vec2& axis : axes) {
    double amin = 1e300, amax = -1e300, bmin = 1e300, bmax = -1e300;
    for (const Vec2& p : fa) {
      const double d = p.x * axis.x + p.y * axis.y;
      amin = std::min(amin, d);
      amax = std::max(amax, d);
    }
    for (const Vec2& p : fb) {
      const double d = p.x * axis.x + p.y * axis.y;
      bmin = std::min(bmin, d);
      bmax = std::max(bmax, d);
    }
    if (amax <= bmin || bmax <= amin) return false;
  }
  return true;
}

}  // namespace

OrientedBox OrientedBox::from_layout(const Layout& l) {
  OrientedBox b;
  b.center = l.t;
  for (int i = 0; i < 3; ++i)
    b.half[static_cast<std::size_t>(i)] =
        std::max(l.s[static_cast<std::size_t>(i)], kMinHalfExtent);
  b.yaw = l.yaw();
  return b;
}

OrientedBox OrientedBox::make(double cx, double cy, double cz, double hx, double hy,
                              double hz, double yaw) {
  OrientedBox b;
  b.center = {cx, cy, cz};
  b.half = {std::max(hx, kMinHalfExtent), std::max(hy, kMinHalfExtent),
            std::max(hz, kMinHalfExtent)};
  b.yaw = yaw;
  return b;
}

std::array<Vec2, 4> OrientedBox::footprint() const {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  const double hx = half[0];
  const double hy = half[1];
  auto corner = [&](double sx, double sy) {
    return Vec2{center[0] + c * sx * hx - s * sy * hy,
                center[1] + s * sx * hx + c * sy * hy};
  };
  return {corner(1, 1), corner(-1, 1), corner(-1, -1), corner(1, -1)};
}

double footprint_overlap_area(const OrientedBox& a, const OrientedBox& b) {
  // canonical argument order makes the result exactly symmetric
  if (box_key(b) < box_key(a)) return overlap_area_ordered(b, a);
  return overlap_area_ordered(a, b);
}

bool boxes_intersect_3d(const OrientedBox& a, const OrientedBox& b) {
  if (a.zmax() <= b.zmin() || b.zmax() <= a.zmin()) return false;
  return footprints_overlap(a, b);
}

}  // namespace roomforge
