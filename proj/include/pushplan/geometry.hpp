#pragma once

#include <cmath>
#include <numbers>
#include <variant>

namespace pushplan {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2& operator-=(const Vec2& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr Vec2& operator*=(double s) {
    x *= s;
    y *= s;
    return *this;
  }
  friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
constexpr Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }

constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
/// z-component of the 3D cross product.
constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
/// w × r for a scalar angular rate w.
constexpr Vec2 cross(double w, const Vec2& r) { return {-w * r.y, w * r.x}; }
constexpr Vec2 perp(const Vec2& a) { return {-a.y, a.x}; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }
constexpr double norm_sq(const Vec2& a) { return dot(a, a); }

inline Vec2 rotate(const Vec2& v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

/// Wraps an angle into [-pi, pi).
inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (a >= -std::numbers::pi && a < std::numbers::pi) return a;
  a = std::fmod(a + std::numbers::pi, two_pi);
  if (a < 0.0) a += two_pi;
  double wrapped = a - std::numbers::pi;
  if (wrapped >= std::numbers::pi) wrapped -= two_pi;
  return wrapped;
}

struct Pose {
  Vec2 position;
  double orientation = 0.0;
};

struct Circle {
  double radius = 0.0;
  friend bool operator==(const Circle&, const Circle&) = default;
};

struct Box {
  Vec2 half_extents;
  friend bool operator==(const Box&, const Box&) = default;
};

using Shape = std::variant<Circle, Box>;

/// Throws std::invalid_argument unless radius / half extents are positive.
void validate_shape(const Shape& shape);

struct OrientedBox {
  Vec2 center;
  double angle = 0.0;
  Vec2 half_extents;
};

struct Aabb {
  Vec2 min;
  Vec2 max;

  bool contains(const Vec2& p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
  }
  friend bool operator==(const Aabb&, const Aabb&) = default;
};

/// Result of a narrow-phase overlap query. `normal` points from the first
/// shape towards the second.
struct Overlap {
  Vec2 normal;
  Vec2 point;
  double penetration = 0.0;
};

/// Narrow phase for any pair of circles / oriented boxes. Returns false when
/// the shapes are disjoint or merely touching.
bool collide(const Shape& a, const Pose& pa, const Shape& b, const Pose& pb, Overlap& out);

bool shapes_intersect(const Shape& a, const Pose& pa, const Shape& b, const Pose& pb);
bool box_intersects_shape(const OrientedBox& box, const Shape& s, const Pose& ps);
bool disc_intersects_shape(const Vec2& center, double radius, const Shape& s, const Pose& ps);

bool point_in_box(const OrientedBox& box, const Vec2& p);
bool point_in_shape(const Shape& s, const Pose& ps, const Vec2& p);
bool box_inside(const OrientedBox& box, const Aabb& bounds);

OrientedBox as_oriented_box(const Box& b, const Pose& p);
Aabb bounding_box(const Shape& s, const Pose& p);

}  // namespace pushplan
