#pragma once

namespace swarm {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }

// Shortest displacement from a to b on a square torus of the given side,
// component-wise in [-side/2, side/2].
Vec2 torus_delta(Vec2 a, Vec2 b, double side);

double torus_distance(Vec2 a, Vec2 b, double side);

// Wraps a coordinate into [0, side).
double wrap_coord(double x, double side);

// Proper crossing of open segments (p1,p2) and (q1,q2); collinear or
// endpoint contact does not count.
bool segments_cross(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2);

}  // namespace swarm
