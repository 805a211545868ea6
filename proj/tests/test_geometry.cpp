#include <cmath>
#include <random>

#include "doctest.h"
#include "swarm/geometry.hpp"

using namespace swarm;

TEST_CASE("torus delta picks the short way around") {
  Vec2 a{0.5, 0.5};
  Vec2 b{9.5, 0.5};
  Vec2 d = torus_delta(a, b, 10.0);
  CHECK(d.x == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(d.y == doctest::Approx(0.0));
  CHECK(torus_distance(a, b, 10.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("torus delta components stay within half the side") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int i = 0; i < 2000; ++i) {
    Vec2 a{u(rng), u(rng)};
    Vec2 b{u(rng), u(rng)};
    Vec2 d = torus_delta(a, b, 10.0);
    CHECK(std::abs(d.x) <= 5.0 + 1e-12);
    CHECK(std::abs(d.y) <= 5.0 + 1e-12);
    // a + delta lands on b modulo the torus
    CHECK(wrap_coord(a.x + d.x, 10.0) == doctest::Approx(b.x).epsilon(1e-9));
    CHECK(wrap_coord(a.y + d.y, 10.0) == doctest::Approx(b.y).epsilon(1e-9));
  }
}

TEST_CASE("torus distance is symmetric and satisfies the triangle inequality") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  for (int i = 0; i < 500; ++i) {
    Vec2 a{u(rng), u(rng)};
    Vec2 b{u(rng), u(rng)};
    Vec2 c{u(rng), u(rng)};
    double ab = torus_distance(a, b, 4.0);
    double ba = torus_distance(b, a, 4.0);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-14));
    CHECK(ab <= torus_distance(a, c, 4.0) + torus_distance(c, b, 4.0) + 1e-12);
  }
  CHECK(torus_distance({1, 1}, {1, 1}, 4.0) == 0.0);
}

TEST_CASE("wrap_coord maps into [0, side)") {
  CHECK(wrap_coord(-0.25, 10.0) == doctest::Approx(9.75));
  CHECK(wrap_coord(10.25, 10.0) == doctest::Approx(0.25));
  CHECK(wrap_coord(0.0, 10.0) == 0.0);
  CHECK(wrap_coord(10.0, 10.0) == 0.0);
  CHECK(wrap_coord(-30.5, 10.0) == doctest::Approx(9.5));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  for (int i = 0; i < 1000; ++i) {
    double w = wrap_coord(u(rng), 7.0);
    CHECK(w >= 0.0);
    CHECK(w < 7.0);
  }
}

TEST_CASE("segments_cross detects a proper crossing") {
  CHECK(segments_cross({0, 0}, {1, 1}, {0, 1}, {1, 0}));
  CHECK(segments_cross({-1, 0}, {1, 0}, {0, -1}, {0, 1}));
}

TEST_CASE("segments_cross rejects disjoint and parallel segments") {
  CHECK_FALSE(segments_cross({0, 0}, {1, 0}, {0, 1}, {1, 1}));
  CHECK_FALSE(segments_cross({0, 0}, {1, 1}, {2, 2}, {3, 3}));
  CHECK_FALSE(segments_cross({0, 0}, {1, 0}, {2, 0}, {3, 0}));
}

TEST_CASE("segments_cross rejects endpoint contact and collinear overlap") {
  // shared endpoint
  CHECK_FALSE(segments_cross({0, 0}, {1, 1}, {1, 1}, {2, 0}));
  // T-junction: q touches the interior of p at one endpoint
  CHECK_FALSE(segments_cross({0, 0}, {2, 0}, {1, 0}, {1, 1}));
  // collinear overlap
  CHECK_FALSE(segments_cross({0, 0}, {2, 0}, {1, 0}, {3, 0}));
}

TEST_CASE("segments_cross agrees with a parameter-form oracle on random pairs") {
  // Solve p1 + t(p2-p1) = q1 + s(q2-q1); proper crossing iff t and s are
  // strictly inside (0,1) and the segments are not parallel.
  auto oracle = [](Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
    double rx = p2.x - p1.x, ry = p2.y - p1.y;
    double sx = q2.x - q1.x, sy = q2.y - q1.y;
    double den = rx * sy - ry * sx;
    if (den == 0.0) return false;
    double qpx = q1.x - p1.x, qpy = q1.y - p1.y;
    double t = (qpx * sy - qpy * sx) / den;
    double s = (qpx * ry - qpy * rx) / den;
    return t > 0.0 && t < 1.0 && s > 0.0 && s < 1.0;
  };
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int crossings = 0;
  for (int i = 0; i < 5000; ++i) {
    Vec2 p1{u(rng), u(rng)}, p2{u(rng), u(rng)};
    Vec2 q1{u(rng), u(rng)}, q2{u(rng), u(rng)};
    bool got = segments_cross(p1, p2, q1, q2);
    CHECK(got == oracle(p1, p2, q1, q2));
    crossings += got;
  }
  // sanity: random unit-square segments cross a fair fraction of the time
  CHECK(crossings > 500);
}
