#include "searchlight/region.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace searchlight {

Rational ring_area2(const Ring& ring) {
  Rational sum = 0;
  const std::size_t n = ring.pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    sum += cross(ring.pts[i], ring.pts[(i + 1) % n]);
  }
  return sum;
}

bool ring_ccw(const Ring& ring) { return ring_area2(ring) > 0; }

Ring reversed(const Ring& ring) {
  Ring out = ring;
  std::reverse(out.pts.begin(), out.pts.end());
  return out;
}

Rational region_area2(const Region& region) {
  Rational sum = ring_area2(region.outer);
  for (const Ring& hole : region.holes) sum += ring_area2(hole);
  return sum;
}

std::vector<Segment> boundary_edges(const Region& region) {
  std::vector<Segment> out;
  auto add_ring = [&out](const Ring& ring) {
    const std::size_t n = ring.pts.size();
    for (std::size_t i = 0; i < n; ++i) {
      out.push_back({ring.pts[i], ring.pts[(i + 1) % n]});
    }
  };
  add_ring(region.outer);
  for (const Ring& hole : region.holes) add_ring(hole);
  return out;
}

namespace {

double margin_for(const std::vector<Segment>& edges) {
  double mag = 1.0;
  for (const Segment& e : edges) {
    for (const Point* p : {&e.a, &e.b}) {
      mag = std::max(mag, std::abs(approx(p->x)));
      mag = std::max(mag, std::abs(approx(p->y)));
    }
  }
  return 1e-8 * mag;
}

}  // namespace

RegionView::RegionView(const Region& region)
    : region_(region), edges_(boundary_edges(region)) {
  const double m = margin_for(edges_);
  boxes_.reserve(edges_.size());
  for (const Segment& e : edges_) {
    const double ax = approx(e.a.x), ay = approx(e.a.y);
    const double bx = approx(e.b.x), by = approx(e.b.y);
    boxes_.push_back({std::min(ax, bx) - m, std::max(ax, bx) + m,
                      std::min(ay, by) - m, std::max(ay, by) + m});
  }
}

bool RegionView::box_excludes_point(const Box& b, double x, double y) const {
  return x < b.xlo || x > b.xhi || y < b.ylo || y > b.yhi;
}

bool RegionView::box_may_hit_ray(const Box& b, double ox, double oy, double dx,
                                 double dy) const {
  const double cx[4] = {b.xlo, b.xlo, b.xhi, b.xhi};
  const double cy[4] = {b.ylo, b.yhi, b.ylo, b.yhi};
  bool all_left = true, all_right = true, all_behind = true;
  const double dmag = std::abs(dx) + std::abs(dy);
  for (int i = 0; i < 4; ++i) {
    const double wx = cx[i] - ox, wy = cy[i] - oy;
    const double eps = 1e-9 * dmag * (std::abs(wx) + std::abs(wy) + 1.0);
    const double cr = dx * wy - dy * wx;
    if (cr > -eps) all_right = false;
    if (cr < eps) all_left = false;
    if (dx * wx + dy * wy > -eps) all_behind = false;
  }
  return !(all_left || all_right || all_behind);
}

bool RegionView::box_may_hit_box(const Box& b, const Box& c) const {
  return b.xlo <= c.xhi && c.xlo <= b.xhi && b.ylo <= c.yhi && c.ylo <= b.yhi;
}

Location RegionView::locate(const Point& p) const {
  const double px = approx(p.x), py = approx(p.y);
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    if (box_excludes_point(boxes_[i], px, py)) continue;
    if (on_segment(p, edges_[i])) return Location::Boundary;
  }
  // Horizontal ray to +x, half-open in y so vertices count once.
  bool inside = false;
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Box& box = boxes_[i];
    if (py < box.ylo || py > box.yhi || px > box.xhi) continue;
    const Point& a = edges_[i].a;
    const Point& b = edges_[i].b;
    if ((a.y > p.y) == (b.y > p.y)) continue;
    if (px < box.xlo) {
      inside = !inside;
      continue;
    }
    // Sign of (x_cross - p.x) * (b.y - a.y) without dividing.
    const Rational val =
        (a.x - p.x) * (b.y - a.y) + (b.x - a.x) * (p.y - a.y);
    const bool crosses_right = (b.y > a.y) ? val > 0 : val < 0;
    if (crosses_right) inside = !inside;
  }
  return inside ? Location::Inside : Location::Outside;
}

bool RegionView::sees(const Point& a, const Point& b) const {
  if (locate(a) == Location::Outside || locate(b) == Location::Outside) {
    return false;
  }
  if (a == b) return true;
  const Segment s{a, b};
  const double ax = approx(a.x), ay = approx(a.y);
  const double bx = approx(b.x), by = approx(b.y);
  const Box sbox{std::min(ax, bx), std::max(ax, bx), std::min(ay, by),
                 std::max(ay, by)};
  const Point v = b - a;
  const Rational len2 = dot(v, v);
  std::vector<Rational> cuts = {Rational(0), Rational(1)};
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    if (!box_may_hit_box(boxes_[i], sbox)) continue;
    const SegmentMeet meet = intersect_segments(s, edges_[i]);
    if (meet.kind == SegmentMeet::Kind::At) {
      cuts.push_back(dot(meet.at - a, v) / len2);
    } else if (meet.kind == SegmentMeet::Kind::Along) {
      cuts.push_back(dot(meet.along.a - a, v) / len2);
      cuts.push_back(dot(meet.along.b - a, v) / len2);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const Point mid = a + scaled(midpoint(cuts[i], cuts[i + 1]), v);
    if (locate(mid) == Location::Outside) return false;
  }
  return true;
}

std::optional<Segment> RegionView::beam(const Point& guard,
                                        const Direction& dir) const {
  const double ox = approx(guard.x), oy = approx(guard.y);
  const double dx = approx(Rational(dir.dx)), dy = approx(Rational(dir.dy));
  std::vector<Rational> events = {Rational(0)};
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    if (!box_may_hit_ray(boxes_[i], ox, oy, dx, dy)) continue;
    if (const auto slice = intersect_ray_segment(guard, dir, edges_[i])) {
      events.push_back(slice->lo);
      if (slice->hi != slice->lo) events.push_back(slice->hi);
    }
  }
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end()), events.end());
  // Between consecutive boundary events the ray is uniformly in or out.
  Rational stop = events.back();
  for (std::size_t i = 0; i + 1 < events.size(); ++i) {
    const Point mid = ray_point(guard, dir, midpoint(events[i], events[i + 1]));
    if (locate(mid) == Location::Outside) {
      stop = events[i];
      break;
    }
  }
  if (stop == 0) return std::nullopt;
  return Segment{guard, ray_point(guard, dir, stop)};
}

Location locate(const Point& p, const Region& region) {
  return RegionView(region).locate(p);
}

bool sees(const Point& a, const Point& b, const Region& region) {
  return RegionView(region).sees(a, b);
}

std::optional<Segment> beam(const Point& guard, const Direction& dir,
                            const Region& region) {
  return RegionView(region).beam(guard, dir);
}

}  // namespace searchlight
