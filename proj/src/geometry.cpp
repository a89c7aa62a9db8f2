#include "pushplan/geometry.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <stdexcept>

namespace pushplan {
namespace {

bool circle_circle(const Vec2& ca, double ra, const Vec2& cb, double rb, Overlap& out) {
  const Vec2 d = cb - ca;
  const double dist_sq = norm_sq(d);
  const double r = ra + rb;
  if (dist_sq >= r * r) return false;
  const double dist = std::sqrt(dist_sq);
  out.normal = dist > 1e-12 ? d * (1.0 / dist) : Vec2{1.0, 0.0};
  out.penetration = r - dist;
  out.point = ca + out.normal * (ra - 0.5 * out.penetration);
  return true;
}

// Normal points from the box towards the circle.
bool box_circle(const OrientedBox& box, const Vec2& c, double r, Overlap& out) {
  const Vec2 local = rotate(c - box.center, -box.angle);
  const Vec2& h = box.half_extents;
  const Vec2 closest{std::clamp(local.x, -h.x, h.x), std::clamp(local.y, -h.y, h.y)};
  const Vec2 diff = local - closest;
  const double dist_sq = norm_sq(diff);

  if (dist_sq > 0.0) {
    if (dist_sq >= r * r) return false;
    const double dist = std::sqrt(dist_sq);
    out.normal = rotate(diff * (1.0 / dist), box.angle);
    out.penetration = r - dist;
    out.point = box.center + rotate(closest, box.angle);
    return true;
  }

  // Centre inside the box: push out through the nearest face.
  const double dx = h.x - std::abs(local.x);
  const double dy = h.y - std::abs(local.y);
  Vec2 face_normal;
  Vec2 face_point = local;
  if (dx <= dy) {
    face_normal = {local.x >= 0.0 ? 1.0 : -1.0, 0.0};
    face_point.x = face_normal.x * h.x;
    out.penetration = r + dx;
  } else {
    face_normal = {0.0, local.y >= 0.0 ? 1.0 : -1.0};
    face_point.y = face_normal.y * h.y;
    out.penetration = r + dy;
  }
  out.normal = rotate(face_normal, box.angle);
  out.point = box.center + rotate(face_point, box.angle);
  return true;
}

struct BoxFrame {
  Vec2 center;
  std::array<Vec2, 2> axes;
  Vec2 half;

  explicit BoxFrame(const OrientedBox& b)
      : center(b.center),
        axes{rotate({1.0, 0.0}, b.angle), rotate({0.0, 1.0}, b.angle)},
        half(b.half_extents) {}

  double radius_along(const Vec2& n) const {
    return half.x * std::abs(dot(axes[0], n)) + half.y * std::abs(dot(axes[1], n));
  }
};

// Separating-axis test with reference-face clipping for the contact point.
bool box_box(const OrientedBox& a, const OrientedBox& b, Overlap& out) {
  const BoxFrame fa(a);
  const BoxFrame fb(b);
  const Vec2 d = fb.center - fa.center;

  double best = std::numeric_limits<double>::infinity();
  Vec2 best_axis;
  int best_owner = 0;  // 0: a is the reference box, 1: b
  int best_index = 0;
  for (int owner = 0; owner < 2; ++owner) {
    const BoxFrame& f = owner == 0 ? fa : fb;
    for (int k = 0; k < 2; ++k) {
      const Vec2 axis = f.axes[k];
      const double overlap = fa.radius_along(axis) + fb.radius_along(axis) - std::abs(dot(d, axis));
      if (overlap <= 0.0) return false;
      // Prefer a's axes on near ties so face contacts stay stable.
      if (overlap < best - 1e-12) {
        best = overlap;
        best_axis = axis;
        best_owner = owner;
        best_index = k;
      }
    }
  }

  const Vec2 n_ab = dot(d, best_axis) >= 0.0 ? best_axis : -best_axis;
  const BoxFrame& ref = best_owner == 0 ? fa : fb;
  const BoxFrame& inc = best_owner == 0 ? fb : fa;
  // Reference face normal points from the reference box into the incident one.
  const Vec2 ref_n = best_owner == 0 ? n_ab : -n_ab;

  // Incident face: the one most anti-parallel to the reference normal.
  int inc_axis = 0;
  double inc_sign = 1.0;
  double most_negative = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 2; ++k) {
    for (double s : {1.0, -1.0}) {
      const double v = dot(inc.axes[k] * s, ref_n);
      if (v < most_negative) {
        most_negative = v;
        inc_axis = k;
        inc_sign = s;
      }
    }
  }
  const Vec2 inc_n = inc.axes[inc_axis] * inc_sign;
  const Vec2 inc_t = inc.axes[1 - inc_axis];
  const double inc_h_n = inc_axis == 0 ? inc.half.x : inc.half.y;
  const double inc_h_t = inc_axis == 0 ? inc.half.y : inc.half.x;
  const Vec2 face_c = inc.center + inc_n * inc_h_n;
  std::array<Vec2, 2> edge{face_c + inc_t * inc_h_t, face_c - inc_t * inc_h_t};

  // Clip the incident edge against the reference face's side planes.
  const Vec2 ref_t = ref.axes[1 - best_index];
  const double ref_h_t = best_index == 0 ? ref.half.y : ref.half.x;
  const double ref_h_n = best_index == 0 ? ref.half.x : ref.half.y;
  const double t_center = dot(ref.center, ref_t);
  const double lo = t_center - ref_h_t;
  const double hi = t_center + ref_h_t;
  auto clip = [&](double bound, double sign) {
    const double d0 = sign * (dot(edge[0], ref_t) - bound);
    const double d1 = sign * (dot(edge[1], ref_t) - bound);
    if (d0 > 0.0 && d1 > 0.0) return;  // both outside: keep the edge, fallback below
    if (d0 > 0.0) edge[0] = edge[0] + (edge[1] - edge[0]) * (d0 / (d0 - d1));
    if (d1 > 0.0) edge[1] = edge[1] + (edge[0] - edge[1]) * (d1 / (d1 - d0));
  };
  clip(hi, 1.0);
  clip(lo, -1.0);

  const double face_offset = dot(ref.center, ref_n) + ref_h_n;
  Vec2 sum;
  int kept = 0;
  double deepest = -std::numeric_limits<double>::infinity();
  Vec2 deepest_point = edge[0];
  for (const Vec2& p : edge) {
    const double depth = face_offset - dot(p, ref_n);
    if (depth >= 0.0) {
      sum += p;
      ++kept;
    }
    if (depth > deepest) {
      deepest = depth;
      deepest_point = p;
    }
  }
  out.normal = n_ab;
  out.penetration = best;
  out.point = kept > 0 ? sum * (1.0 / kept) : deepest_point;
  return true;
}

Vec2 center_of(const Pose& p) { return p.position; }

}  // namespace

void validate_shape(const Shape& shape) {
  if (const auto* c = std::get_if<Circle>(&shape)) {
    if (!(c->radius > 0.0)) throw std::invalid_argument("circle radius must be positive");
  } else {
    const auto& b = std::get<Box>(shape);
    if (!(b.half_extents.x > 0.0 && b.half_extents.y > 0.0))
      throw std::invalid_argument("box half extents must be positive");
  }
}

OrientedBox as_oriented_box(const Box& b, const Pose& p) {
  return {p.position, p.orientation, b.half_extents};
}

bool collide(const Shape& a, const Pose& pa, const Shape& b, const Pose& pb, Overlap& out) {
  const auto* ca = std::get_if<Circle>(&a);
  const auto* cb = std::get_if<Circle>(&b);
  if (ca && cb) return circle_circle(center_of(pa), ca->radius, center_of(pb), cb->radius, out);
  if (!ca && cb) return box_circle(as_oriented_box(std::get<Box>(a), pa), pb.position, cb->radius, out);
  if (ca && !cb) {
    if (!box_circle(as_oriented_box(std::get<Box>(b), pb), pa.position, ca->radius, out)) return false;
    out.normal = -out.normal;
    return true;
  }
  return box_box(as_oriented_box(std::get<Box>(a), pa), as_oriented_box(std::get<Box>(b), pb), out);
}

bool shapes_intersect(const Shape& a, const Pose& pa, const Shape& b, const Pose& pb) {
  Overlap unused;
  return collide(a, pa, b, pb, unused);
}

bool box_intersects_shape(const OrientedBox& box, const Shape& s, const Pose& ps) {
  Overlap unused;
  if (const auto* c = std::get_if<Circle>(&s)) return box_circle(box, ps.position, c->radius, unused);
  return box_box(box, as_oriented_box(std::get<Box>(s), ps), unused);
}

bool disc_intersects_shape(const Vec2& center, double radius, const Shape& s, const Pose& ps) {
  return shapes_intersect(Circle{radius}, Pose{center, 0.0}, s, ps);
}

bool point_in_box(const OrientedBox& box, const Vec2& p) {
  const Vec2 local = rotate(p - box.center, -box.angle);
  return std::abs(local.x) <= box.half_extents.x && std::abs(local.y) <= box.half_extents.y;
}

bool point_in_shape(const Shape& s, const Pose& ps, const Vec2& p) {
  if (const auto* c = std::get_if<Circle>(&s)) return norm_sq(p - ps.position) <= c->radius * c->radius;
  return point_in_box(as_oriented_box(std::get<Box>(s), ps), p);
}

bool box_inside(const OrientedBox& box, const Aabb& bounds) {
  for (double sx : {-1.0, 1.0}) {
    for (double sy : {-1.0, 1.0}) {
      const Vec2 corner =
          box.center + rotate({sx * box.half_extents.x, sy * box.half_extents.y}, box.angle);
      if (!bounds.contains(corner)) return false;
    }
  }
  return true;
}

Aabb bounding_box(const Shape& s, const Pose& p) {
  if (const auto* c = std::get_if<Circle>(&s)) {
    const Vec2 r{c->radius, c->radius};
    return {p.position - r, p.position + r};
  }
  const BoxFrame f(as_oriented_box(std::get<Box>(s), p));
  const Vec2 r{f.radius_along({1.0, 0.0}), f.radius_along({0.0, 1.0})};
  return {p.position - r, p.position + r};
}

}  // namespace pushplan
