#include "searchlight/instance.hpp"

#include <set>
#include <sstream>

namespace searchlight {

namespace {

std::string describe(const Point& p) {
  return "(" + format_rational(p.x) + ", " + format_rational(p.y) + ")";
}

void check_ring_simple(const Ring& ring, const std::string& label,
                       std::vector<Violation>& out) {
  const std::size_t n = ring.pts.size();
  if (n < 3) {
    out.push_back({"ring-too-small", label + " has fewer than 3 vertices",
                   n ? std::optional<Point>(ring.pts[0]) : std::nullopt});
    return;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (ring.pts[i] == ring.pts[j]) {
        out.push_back({"ring-repeated-vertex",
                       label + " repeats vertex " + describe(ring.pts[i]),
                       ring.pts[i]});
        return;
      }
    }
  }
  auto edge = [&](std::size_t i) {
    return Segment{ring.pts[i], ring.pts[(i + 1) % n]};
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      const SegmentMeet meet = intersect_segments(edge(i), edge(j));
      if (adjacent) {
        // Neighbors may only share their common endpoint.
        if (meet.kind == SegmentMeet::Kind::Along) {
          out.push_back({"ring-not-simple",
                         label + " folds back on itself near " +
                             describe(meet.along.a),
                         meet.along.a});
          return;
        }
      } else if (meet.kind != SegmentMeet::Kind::None) {
        const Point w =
            meet.kind == SegmentMeet::Kind::At ? meet.at : meet.along.a;
        out.push_back({"ring-not-simple",
                       label + " self-intersects at " + describe(w), w});
        return;
      }
    }
  }
  if (ring_area2(ring) == 0) {
    out.push_back(
        {"ring-zero-area", label + " encloses no area", ring.pts[0]});
  }
}

bool rings_touch(const Ring& a, const Ring& b, Point& witness) {
  const std::size_t na = a.pts.size(), nb = b.pts.size();
  for (std::size_t i = 0; i < na; ++i) {
    const Segment ea{a.pts[i], a.pts[(i + 1) % na]};
    for (std::size_t j = 0; j < nb; ++j) {
      const Segment eb{b.pts[j], b.pts[(j + 1) % nb]};
      const SegmentMeet meet = intersect_segments(ea, eb);
      if (meet.kind != SegmentMeet::Kind::None) {
        witness = meet.kind == SegmentMeet::Kind::At ? meet.at : meet.along.a;
        return true;
      }
    }
  }
  return false;
}

}  // namespace

std::vector<Violation> validate_instance(Instance& instance) {
  std::vector<Violation> out;

  if (!ring_ccw(instance.env.outer) && ring_area2(instance.env.outer) != 0) {
    instance.env.outer = reversed(instance.env.outer);
  }
  for (Ring& hole : instance.env.holes) {
    if (ring_ccw(hole)) hole = reversed(hole);
  }
  if (instance.target.mode == TargetMode::Region &&
      !ring_ccw(instance.target.ring) &&
      ring_area2(instance.target.ring) != 0) {
    instance.target.ring = reversed(instance.target.ring);
  }

  check_ring_simple(instance.env.outer, "outer ring", out);
  for (std::size_t h = 0; h < instance.env.holes.size(); ++h) {
    check_ring_simple(instance.env.holes[h],
                      "hole " + std::to_string(h), out);
  }
  if (!out.empty()) return out;  // containment checks need simple rings

  const Region outer_only{instance.env.outer, {}};
  const RegionView outer_view(outer_only);
  for (std::size_t h = 0; h < instance.env.holes.size(); ++h) {
    const Ring& hole = instance.env.holes[h];
    Point witness;
    if (rings_touch(instance.env.outer, hole, witness)) {
      out.push_back({"hole-touches-outer",
                     "hole " + std::to_string(h) + " touches the outer ring",
                     witness});
      continue;
    }
    for (const Point& v : hole.pts) {
      if (outer_view.locate(v) != Location::Inside) {
        out.push_back({"hole-outside",
                       "hole " + std::to_string(h) + " vertex " + describe(v) +
                           " is not strictly inside the outer ring",
                       v});
        break;
      }
    }
    for (std::size_t k = h + 1; k < instance.env.holes.size(); ++k) {
      const Ring& other = instance.env.holes[k];
      if (rings_touch(hole, other, witness)) {
        out.push_back({"holes-touch",
                       "holes " + std::to_string(h) + " and " +
                           std::to_string(k) + " touch",
                       witness});
        continue;
      }
      const RegionView hv(Region{hole, {}});
      const RegionView kv(Region{other, {}});
      if (hv.locate(other.pts[0]) == Location::Inside ||
          kv.locate(hole.pts[0]) == Location::Inside) {
        out.push_back({"holes-nested",
                       "holes " + std::to_string(h) + " and " +
                           std::to_string(k) + " are nested",
                       hole.pts[0]});
      }
    }
  }
  if (!out.empty()) return out;

  const RegionView env_view(instance.env);

  if (instance.guards.empty()) {
    out.push_back({"no-guards", "instance has no guards", std::nullopt});
  }
  std::set<std::string> seen_ids;
  for (const Guard& g : instance.guards) {
    if (g.id.empty()) {
      out.push_back({"guard-id-empty", "guard has an empty id", g.position});
    } else if (!seen_ids.insert(g.id).second) {
      out.push_back(
          {"guard-id-duplicate", "guard id '" + g.id + "' repeats",
           g.position});
    }
    if (env_view.locate(g.position) == Location::Outside) {
      out.push_back({"guard-outside",
                     "guard '" + g.id + "' at " + describe(g.position) +
                         " lies outside the environment",
                     g.position});
    }
  }

  if (instance.target.mode == TargetMode::Region) {
    check_ring_simple(instance.target.ring, "target ring", out);
    const std::size_t n = instance.target.ring.pts.size();
    for (std::size_t i = 0; i < n && n >= 3; ++i) {
      const Point& a = instance.target.ring.pts[i];
      const Point& b = instance.target.ring.pts[(i + 1) % n];
      if (!env_view.sees(a, b)) {
        out.push_back({"target-escapes",
                       "target edge " + describe(a) + " to " + describe(b) +
                           " leaves the environment",
                       a});
      }
    }
  } else if (instance.target.mode == TargetMode::PointNeighborhood) {
    if (env_view.locate(instance.target.point) == Location::Outside) {
      out.push_back({"target-escapes",
                     "target point " + describe(instance.target.point) +
                         " lies outside the environment",
                     instance.target.point});
    }
  }

  return out;
}

Rational shortest_edge_length2(const Instance& instance) {
  Rational best = 0;
  bool first = true;
  auto take = [&](const Segment& s) {
    const Rational l = length2(s);
    if (l == 0) return;
    if (first || l < best) {
      best = l;
      first = false;
    }
  };
  for (const Segment& s : boundary_edges(instance.env)) take(s);
  if (instance.target.mode == TargetMode::Region) {
    const std::size_t n = instance.target.ring.pts.size();
    for (std::size_t i = 0; i < n; ++i) {
      take({instance.target.ring.pts[i],
            instance.target.ring.pts[(i + 1) % n]});
    }
  }
  return best;
}

}  // namespace searchlight
