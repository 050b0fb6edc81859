#pragma once

#include "searchlight/geometry.hpp"

#include <optional>
#include <vector>

namespace searchlight {

// Vertex cycle; the closing edge back to the first vertex is implicit.
struct Ring {
  std::vector<Point> pts;
  bool operator==(const Ring&) const = default;
};

Rational ring_area2(const Ring& ring);  // signed shoelace, doubled
bool ring_ccw(const Ring& ring);
Ring reversed(const Ring& ring);

// Closed polygonal region with holes. Precondition everywhere: outer ring
// counterclockwise, holes clockwise, so the interior lies left of every
// directed boundary edge.
struct Region {
  Ring outer;
  std::vector<Ring> holes;
  bool operator==(const Region&) const = default;
};

Rational region_area2(const Region& region);
std::vector<Segment> boundary_edges(const Region& region);

enum class Location { Inside, Boundary, Outside };

// Precomputed boundary data plus float bounding boxes that let the exact
// predicates skip most edges.
class RegionView {
 public:
  explicit RegionView(const Region& region);

  const Region& region() const { return region_; }
  const std::vector<Segment>& edges() const { return edges_; }

  Location locate(const Point& p) const;

  // True when the whole closed segment [a, b] stays inside the closed region.
  bool sees(const Point& a, const Point& b) const;

  // The beam cast from guard along dir: the longest segment [guard, p]
  // contained in the closed region. Beams slide flush along walls; nullopt
  // means the beam cannot leave the guard at all.
  std::optional<Segment> beam(const Point& guard, const Direction& dir) const;

 private:
  struct Box {
    double xlo, xhi, ylo, yhi;
  };

  bool box_excludes_point(const Box& b, double x, double y) const;
  bool box_may_hit_ray(const Box& b, double ox, double oy, double dx,
                       double dy) const;
  bool box_may_hit_box(const Box& b, const Box& c) const;

  Region region_;
  std::vector<Segment> edges_;
  std::vector<Box> boxes_;
};

// One-shot conveniences for tests and small callers.
Location locate(const Point& p, const Region& region);
bool sees(const Point& a, const Point& b, const Region& region);
std::optional<Segment> beam(const Point& guard, const Direction& dir,
                            const Region& region);

}  // namespace searchlight
