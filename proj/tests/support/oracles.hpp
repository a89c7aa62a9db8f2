#pragma once

// Brute-force reference checks. Everything here is written against raw
// coordinates (explicit rotation matrices, point grids) and never calls the
// library's narrow phase, so agreement with it means something.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "pushplan/geometry.hpp"
#include "pushplan/physics2d.hpp"

namespace oracle {

using pushplan::Aabb;
using pushplan::Box;
using pushplan::Circle;
using pushplan::OrientedBox;
using pushplan::Pose;
using pushplan::Shape;
using pushplan::Vec2;

struct Frame {
  double c, s;
  Vec2 origin;

  explicit Frame(const Vec2& o, double angle) : c(std::cos(angle)), s(std::sin(angle)), origin(o) {}
  Vec2 to_world(const Vec2& local) const {
    return {origin.x + c * local.x - s * local.y, origin.y + s * local.x + c * local.y};
  }
  Vec2 to_local(const Vec2& world) const {
    const double dx = world.x - origin.x;
    const double dy = world.y - origin.y;
    return {c * dx + s * dy, -s * dx + c * dy};
  }
};

inline bool in_box(const Vec2& center, double angle, const Vec2& half, const Vec2& p) {
  const Vec2 l = Frame(center, angle).to_local(p);
  return std::abs(l.x) < half.x && std::abs(l.y) < half.y;
}

inline bool in_shape(const Shape& s, const Pose& pose, const Vec2& p) {
  if (const auto* c = std::get_if<Circle>(&s)) {
    const double dx = p.x - pose.position.x;
    const double dy = p.y - pose.position.y;
    return dx * dx + dy * dy < c->radius * c->radius;
  }
  return in_box(pose.position, pose.orientation, std::get<Box>(s).half_extents, p);
}

/// n x n cell-centre grid over the interior of a box.
inline std::vector<Vec2> box_samples(const Vec2& center, double angle, const Vec2& half, int n) {
  std::vector<Vec2> pts;
  pts.reserve(static_cast<std::size_t>(n) * n);
  const Frame f(center, angle);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double u = -1.0 + (2.0 * i + 1.0) / n;
      const double v = -1.0 + (2.0 * j + 1.0) / n;
      pts.push_back(f.to_world({u * half.x, v * half.y}));
    }
  return pts;
}

/// Polar grid over the interior of a disc, roughly n*n points.
inline std::vector<Vec2> disc_samples(const Vec2& center, double radius, int n) {
  std::vector<Vec2> pts;
  pts.push_back(center);
  for (int i = 1; i <= n; ++i) {
    const double r = radius * (static_cast<double>(i) - 0.5) / n;
    const int m = std::max(8, 4 * i);
    for (int k = 0; k < m; ++k) {
      const double a = 2.0 * M_PI * k / m;
      pts.push_back({center.x + r * std::cos(a), center.y + r * std::sin(a)});
    }
  }
  return pts;
}

inline std::vector<Vec2> shape_samples(const Shape& s, const Pose& pose, int n) {
  if (const auto* c = std::get_if<Circle>(&s)) return disc_samples(pose.position, c->radius, n);
  return box_samples(pose.position, pose.orientation, std::get<Box>(s).half_extents, n);
}

/// Sampled overlap of a box and a shape: any sample of either lying inside
/// the other.
inline bool box_overlaps(const Vec2& center, double angle, const Vec2& half, const Shape& s, const Pose& pose,
                         int n) {
  for (const Vec2& p : box_samples(center, angle, half, n))
    if (in_shape(s, pose, p)) return true;
  for (const Vec2& p : shape_samples(s, pose, n))
    if (in_box(center, angle, half, p)) return true;
  return false;
}

inline bool disc_overlaps(const Vec2& center, double radius, const Shape& s, const Pose& pose, int n) {
  for (const Vec2& p : disc_samples(center, radius, n))
    if (in_shape(s, pose, p)) return true;
  for (const Vec2& p : shape_samples(s, pose, n)) {
    const double dx = p.x - center.x;
    const double dy = p.y - center.y;
    if (dx * dx + dy * dy < radius * radius) return true;
  }
  return false;
}

inline bool box_in_room(const Vec2& center, double angle, const Vec2& half, const Aabb& room) {
  const Frame f(center, angle);
  for (double sx : {-1.0, 1.0})
    for (double sy : {-1.0, 1.0}) {
      const Vec2 p = f.to_world({sx * half.x, sy * half.y});
      if (p.x < room.min.x || p.x > room.max.x || p.y < room.min.y || p.y > room.max.y) return false;
    }
  return true;
}

struct Obstacle {
  Shape shape;
  Pose pose;
};

/// Region box of a part of a body at `pose`, built from the raw offset.
inline OrientedBox region_box(const Pose& pose, const pushplan::Part& part) {
  const Vec2 c = Frame(pose.position, pose.orientation).to_world(part.region_offset);
  return {c, pose.orientation, part.region_half_extents};
}

inline bool region_valid_sampled(const OrientedBox& r, double scale, const std::vector<Obstacle>& others,
                                 const Aabb& room, int n) {
  const Vec2 half{r.half_extents.x * scale, r.half_extents.y * scale};
  if (!box_in_room(r.center, r.angle, half, room)) return false;
  for (const Obstacle& o : others)
    if (box_overlaps(r.center, r.angle, half, o.shape, o.pose, n)) return false;
  return true;
}

/// Region validity by sampling (n*n points per region). nullopt when the
/// verdict flips between a slightly shrunk and a slightly grown region, i.e.
/// the scene sits within sampling resolution of the boundary.
inline std::optional<bool> region_valid(const OrientedBox& r, const std::vector<Obstacle>& others, const Aabb& room,
                                        int n = 100, double margin = 0.02) {
  const bool shrunk = region_valid_sampled(r, 1.0 - margin, others, room, n);
  const bool grown = region_valid_sampled(r, 1.0 + margin, others, room, n);
  if (shrunk != grown) return std::nullopt;
  return shrunk;
}

struct Candidate {
  std::string id;
  Obstacle body;
};

/// Goal occupant by disc sampling with the distance-then-id tie break.
/// Outer nullopt marks a scene too close to the sampling boundary.
inline std::optional<std::optional<std::size_t>> goal_occupant(const Vec2& center, double radius,
                                                               const std::vector<Candidate>& bodies, int n = 60,
                                                               double margin = 0.02) {
  std::optional<std::size_t> best;
  double best_d = 0.0;
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    const bool a = disc_overlaps(center, radius * (1.0 - margin), bodies[i].body.shape, bodies[i].body.pose, n);
    const bool b = disc_overlaps(center, radius * (1.0 + margin), bodies[i].body.shape, bodies[i].body.pose, n);
    if (a != b) return std::nullopt;
    if (!a) continue;
    const double dx = bodies[i].body.pose.position.x - center.x;
    const double dy = bodies[i].body.pose.position.y - center.y;
    const double d = dx * dx + dy * dy;
    if (!best || d < best_d || (d == best_d && bodies[i].id < bodies[*best].id)) {
      best = i;
      best_d = d;
    }
  }
  return best;
}

/// x(t) = x0 + v0 t + a t^2 / 2
inline double constant_accel_position(double x0, double v0, double a, double t) { return x0 + v0 * t + 0.5 * a * t * t; }

}  // namespace oracle
