#include "searchlight/geometry.hpp"

#include <algorithm>
#include <cassert>

namespace searchlight {

Point operator+(const Point& u, const Point& v) { return {u.x + v.x, u.y + v.y}; }
Point operator-(const Point& u, const Point& v) { return {u.x - v.x, u.y - v.y}; }
Point scaled(const Rational& s, const Point& v) { return {s * v.x, s * v.y}; }

Rational cross(const Point& u, const Point& v) { return u.x * v.y - u.y * v.x; }
Rational dot(const Point& u, const Point& v) { return u.x * v.x + u.y * v.y; }

int orient(const Point& a, const Point& b, const Point& c) {
  const Rational d = cross(b - a, c - a);
  if (d > 0) return 1;
  if (d < 0) return -1;
  return 0;
}

bool lex_less(const Point& a, const Point& b) {
  if (a.x != b.x) return a.x < b.x;
  return a.y < b.y;
}

Sense opposite(Sense s) { return s == Sense::CW ? Sense::CCW : Sense::CW; }

namespace {

Direction canonical(BigInt dx, BigInt dy) {
  assert(dx != 0 || dy != 0);
  const BigInt g = boost::multiprecision::gcd(boost::multiprecision::abs(dx),
                                              boost::multiprecision::abs(dy));
  return {dx / g, dy / g};
}

}  // namespace

Direction make_direction(const Rational& dx, const Rational& dy) {
  // Positive denominators keep the quadrant intact after clearing them.
  return canonical(numerator(dx) * denominator(dy),
                   numerator(dy) * denominator(dx));
}

Direction direction_from_to(const Point& from, const Point& to) {
  assert(!(from == to));
  return make_direction(to.x - from.x, to.y - from.y);
}

Direction negated(const Direction& d) { return {-d.dx, -d.dy}; }
Direction rotated90ccw(const Direction& d) { return {-d.dy, d.dx}; }
Point as_vector(const Direction& d) { return {Rational(d.dx), Rational(d.dy)}; }

BigInt cross(const Direction& a, const Direction& b) {
  return a.dx * b.dy - a.dy * b.dx;
}
BigInt dot(const Direction& a, const Direction& b) {
  return a.dx * b.dx + a.dy * b.dy;
}

namespace {

// 0:(+x) 1:Q1 2:(+y) 3:Q2 4:(-x) 5:Q3 6:(-y) 7:Q4, counterclockwise.
int octant(const Direction& d) {
  if (d.dy == 0) return d.dx > 0 ? 0 : 4;
  if (d.dx == 0) return d.dy > 0 ? 2 : 6;
  if (d.dy > 0) return d.dx > 0 ? 1 : 3;
  return d.dx < 0 ? 5 : 7;
}

}  // namespace

int compare_ccw(const Direction& a, const Direction& b) {
  const int oa = octant(a), ob = octant(b);
  if (oa != ob) return oa < ob ? -1 : 1;
  const BigInt c = cross(a, b);
  if (c > 0) return -1;
  if (c < 0) return 1;
  return 0;
}

bool in_open_arc(const Direction& d, const Direction& a, const Direction& b,
                 Sense sense) {
  if (sense == Sense::CW) return in_open_arc(d, b, a, Sense::CCW);
  if (a == b) return !(d == a);
  const BigInt cab = cross(a, b);
  if (cab > 0) return cross(a, d) > 0 && cross(d, b) > 0;
  if (cab < 0) {
    // Complement of the closed short arc from b around to a.
    if (d == a || d == b) return false;
    return !(cross(b, d) > 0 && cross(d, a) > 0);
  }
  return cross(a, d) > 0;  // b == -a: the open half turn left of a
}

bool in_closed_arc(const Direction& d, const Direction& a, const Direction& b,
                   Sense sense) {
  return d == a || d == b || in_open_arc(d, a, b, sense);
}

namespace {

int rotation_rank(const Direction& start, Sense sense, const Direction& d) {
  if (d == start) return 0;
  if (d == negated(start)) return 2;
  const BigInt c = cross(start, d);
  const bool first_half = sense == Sense::CCW ? c > 0 : c < 0;
  return first_half ? 1 : 3;
}

}  // namespace

bool rotation_less(const Direction& start, Sense sense, const Direction& d1,
                   const Direction& d2) {
  const int r1 = rotation_rank(start, sense, d1);
  const int r2 = rotation_rank(start, sense, d2);
  if (r1 != r2) return r1 < r2;
  if (r1 == 0 || r1 == 2) return false;
  const BigInt c = cross(d1, d2);
  return sense == Sense::CCW ? c > 0 : c < 0;
}

Direction arc_interior(const Direction& a, const Direction& b, Sense sense) {
  if (sense == Sense::CW) return arc_interior(b, a, Sense::CCW);
  if (a == b) return negated(a);
  const BigInt cab = cross(a, b);
  if (cab > 0) return canonical(a.dx + b.dx, a.dy + b.dy);
  if (cab < 0) return canonical(-(a.dx + b.dx), -(a.dy + b.dy));
  return rotated90ccw(a);  // b == -a
}

bool degenerate(const Segment& s) { return s.a == s.b; }

Rational length2(const Segment& s) {
  const Point v = s.b - s.a;
  return dot(v, v);
}

bool on_segment(const Point& p, const Segment& s) {
  if (degenerate(s)) return p == s.a;
  if (orient(s.a, s.b, p) != 0) return false;
  const Rational t = dot(p - s.a, s.b - s.a);
  return t >= 0 && t <= length2(s);
}

SegmentMeet intersect_segments(const Segment& s1, const Segment& s2) {
  SegmentMeet out;
  if (degenerate(s1) || degenerate(s2)) {
    if (degenerate(s1) && on_segment(s1.a, s2)) {
      out.kind = SegmentMeet::Kind::At;
      out.at = s1.a;
    } else if (degenerate(s2) && on_segment(s2.a, s1)) {
      out.kind = SegmentMeet::Kind::At;
      out.at = s2.a;
    }
    return out;
  }
  const Point d1 = s1.b - s1.a;
  const Point d2 = s2.b - s2.a;
  const Point w = s2.a - s1.a;
  const Rational denom = cross(d1, d2);
  if (denom != 0) {
    const Rational t = cross(w, d2) / denom;
    const Rational u = cross(w, d1) / denom;
    if (t >= 0 && t <= 1 && u >= 0 && u <= 1) {
      out.kind = SegmentMeet::Kind::At;
      out.at = s1.a + scaled(t, d1);
    }
    return out;
  }
  if (cross(w, d1) != 0) return out;  // parallel, different lines
  // Collinear: the overlap endpoints come from the input endpoints.
  std::vector<Point> common;
  for (const Point& p : {s1.a, s1.b, s2.a, s2.b}) {
    if (on_segment(p, s1) && on_segment(p, s2) &&
        std::find(common.begin(), common.end(), p) == common.end()) {
      common.push_back(p);
    }
  }
  if (common.empty()) return out;
  const auto [lo, hi] =
      std::minmax_element(common.begin(), common.end(), lex_less);
  if (*lo == *hi) {
    out.kind = SegmentMeet::Kind::At;
    out.at = *lo;
  } else {
    out.kind = SegmentMeet::Kind::Along;
    out.along = {*lo, *hi};
  }
  return out;
}

std::optional<RaySlice> intersect_ray_segment(const Point& origin,
                                              const Direction& dir,
                                              const Segment& seg) {
  const Point dv = as_vector(dir);
  const Point sv = seg.b - seg.a;
  const Point w = seg.a - origin;
  const Rational denom = cross(dv, sv);
  if (denom != 0) {
    const Rational t = cross(w, sv) / denom;
    const Rational u = cross(w, dv) / denom;
    if (t < 0 || u < 0 || u > 1) return std::nullopt;
    return RaySlice{t, t};
  }
  if (cross(w, dv) != 0) return std::nullopt;
  const Rational norm = dot(dv, dv);
  Rational ta = dot(seg.a - origin, dv) / norm;
  Rational tb = dot(seg.b - origin, dv) / norm;
  if (ta > tb) std::swap(ta, tb);
  if (tb < 0) return std::nullopt;
  return RaySlice{std::max(ta, Rational(0)), tb};
}

Point ray_point(const Point& origin, const Direction& dir, const Rational& t) {
  return origin + scaled(t, as_vector(dir));
}

}  // namespace searchlight
