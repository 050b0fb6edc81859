#pragma once

#include "searchlight/rational.hpp"

namespace searchlight {

struct Point {
  Rational x, y;
  bool operator==(const Point&) const = default;
};

// Points double as vectors where the distinction does not matter.
Point operator+(const Point& u, const Point& v);
Point operator-(const Point& u, const Point& v);
Point scaled(const Rational& s, const Point& v);

Rational cross(const Point& u, const Point& v);
Rational dot(const Point& u, const Point& v);

// Sign of (b - a) x (c - a): +1 left turn, -1 right turn, 0 collinear.
int orient(const Point& a, const Point& b, const Point& c);

// Deterministic total order for ordered containers keyed by points.
bool lex_less(const Point& a, const Point& b);

struct PointLess {
  bool operator()(const Point& a, const Point& b) const {
    return lex_less(a, b);
  }
};

enum class Sense { CW, CCW };
Sense opposite(Sense s);

// A nonzero integer direction in lowest terms. (dx, dy) and (-dx, -dy) are
// distinct directions half a turn apart.
struct Direction {
  BigInt dx, dy;
  bool operator==(const Direction&) const = default;
};

Direction make_direction(const Rational& dx, const Rational& dy);
Direction direction_from_to(const Point& from, const Point& to);
Direction negated(const Direction& d);
Direction rotated90ccw(const Direction& d);
Point as_vector(const Direction& d);

BigInt cross(const Direction& a, const Direction& b);
BigInt dot(const Direction& a, const Direction& b);

// Total order by counterclockwise angle from (1, 0) in [0, 2pi).
int compare_ccw(const Direction& a, const Direction& b);

struct DirectionLess {
  bool operator()(const Direction& a, const Direction& b) const {
    return compare_ccw(a, b) < 0;
  }
};

// Arc membership for the arc swept from a to b in the given sense. When
// a == b the open arc is the full turn minus {a} and the closed arc is
// everything.
bool in_open_arc(const Direction& d, const Direction& a, const Direction& b,
                 Sense sense);
bool in_closed_arc(const Direction& d, const Direction& a, const Direction& b,
                   Sense sense);

// Strict "d1 is reached before d2" when rotating from start in the given
// sense; start itself comes first, the far end (start + full turn) last.
bool rotation_less(const Direction& start, Sense sense, const Direction& d1,
                   const Direction& d2);

// Some direction strictly inside the open arc from a to b in the given sense.
Direction arc_interior(const Direction& a, const Direction& b, Sense sense);

struct Segment {
  Point a, b;
  bool operator==(const Segment&) const = default;
};

bool degenerate(const Segment& s);
Rational length2(const Segment& s);
bool on_segment(const Point& p, const Segment& s);  // endpoints included

struct SegmentMeet {
  enum class Kind { None, At, Along };
  Kind kind = Kind::None;
  Point at;       // Kind::At
  Segment along;  // Kind::Along, endpoints in lex order
};

SegmentMeet intersect_segments(const Segment& s1, const Segment& s2);

// Intersection of the ray {origin + t * dir : t >= 0} with a segment, as a
// parameter interval [lo, hi] (lo == hi for a single point), or nothing.
struct RaySlice {
  Rational lo, hi;
};
std::optional<RaySlice> intersect_ray_segment(const Point& origin,
                                              const Direction& dir,
                                              const Segment& seg);

Point ray_point(const Point& origin, const Direction& dir, const Rational& t);

}  // namespace searchlight
