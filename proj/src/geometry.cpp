#include "swarm/geometry.hpp"

#include <cmath>

namespace swarm {

Vec2 torus_delta(Vec2 a, Vec2 b, double side) {
  return {std::remainder(b.x - a.x, side), std::remainder(b.y - a.y, side)};
}

double torus_distance(Vec2 a, Vec2 b, double side) {
  Vec2 d = torus_delta(a, b, side);
  return std::hypot(d.x, d.y);
}

double wrap_coord(double x, double side) {
  double w = std::fmod(x, side);
  if (w < 0.0) w += side;
  // fmod can return exactly side after the adjustment when x is a tiny
  // negative number; fold that back to 0.
  if (w >= side) w = 0.0;
  return w;
}

static double cross(Vec2 o, Vec2 a, Vec2 b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool segments_cross(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
  double d1 = cross(q1, q2, p1);
  double d2 = cross(q1, q2, p2);
  double d3 = cross(p1, p2, q1);
  double d4 = cross(p1, p2, q2);
  return ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) &&
         ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0));
}

}  // namespace swarm
