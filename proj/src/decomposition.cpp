#include "searchlight/decomposition.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <set>

namespace searchlight {

std::vector<Direction> critical_directions(const Instance& instance,
                                           const RegionView& view,
                                           std::size_t guard_index) {
  const Guard& g = instance.guards[guard_index];
  std::set<Direction, DirectionLess> dirs;
  auto consider = [&](const Point& p) {
    if (p == g.position) return;
    const Direction d = direction_from_to(g.position, p);
    if (view.beam(g.position, d)) dirs.insert(d);
  };
  for (const Point& v : instance.env.outer.pts) consider(v);
  for (const Ring& hole : instance.env.holes) {
    for (const Point& v : hole.pts) consider(v);
  }
  for (std::size_t j = 0; j < instance.guards.size(); ++j) {
    if (j != guard_index) consider(instance.guards[j].position);
  }
  if (instance.target.mode == TargetMode::Region) {
    for (const Point& v : instance.target.ring.pts) consider(v);
  } else if (instance.target.mode == TargetMode::PointNeighborhood) {
    consider(instance.target.point);
  }
  // The pinned start must have an index even when its beam is degenerate.
  if (g.pinned_start) dirs.insert(*g.pinned_start);
  return {dirs.begin(), dirs.end()};
}

namespace {

struct PointPairLess {
  bool operator()(const std::pair<Point, Point>& a,
                  const std::pair<Point, Point>& b) const {
    if (!(a.first == b.first)) return lex_less(a.first, b.first);
    return lex_less(a.second, b.second);
  }
};

Rational param_on(const Point& p, const Point& a, const Point& v,
                  const Rational& len2) {
  return dot(p - a, v) / len2;
}

}  // namespace

Decomposition::Decomposition(Instance validated)
    : instance_(std::move(validated)), view_(instance_.env) {
  build();
}

void Decomposition::build() {
  const std::size_t guard_count = instance_.guards.size();
  critical_.resize(guard_count);
  for (std::size_t gi = 0; gi < guard_count; ++gi) {
    critical_[gi] = critical_directions(instance_, view_, gi);
  }

  // Carriers: walls, target edges, and one beam per critical direction.
  std::vector<std::pair<Segment, CarrierOwner>> carriers;
  for (const Segment& wall : view_.edges()) {
    carriers.push_back({wall, CarrierOwner::Wall});
  }
  if (instance_.target.mode == TargetMode::Region) {
    const auto& pts = instance_.target.ring.pts;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      carriers.push_back(
          {{pts[i], pts[(i + 1) % pts.size()]}, CarrierOwner::TargetEdge});
    }
  }
  for (std::size_t gi = 0; gi < guard_count; ++gi) {
    for (const Direction& d : critical_[gi]) {
      if (const auto b = view_.beam(instance_.guards[gi].position, d)) {
        carriers.push_back({*b, CarrierOwner::CriticalRay});
      }
    }
  }

  // Split every carrier at every meeting point with every other carrier.
  const std::size_t carrier_count = carriers.size();
  std::vector<std::vector<Rational>> cuts(carrier_count);
  std::vector<Point> base(carrier_count);
  std::vector<Point> axis(carrier_count);
  std::vector<Rational> len2(carrier_count);
  for (std::size_t i = 0; i < carrier_count; ++i) {
    base[i] = carriers[i].first.a;
    axis[i] = carriers[i].first.b - carriers[i].first.a;
    len2[i] = dot(axis[i], axis[i]);
    cuts[i] = {Rational(0), Rational(1)};
  }
  for (std::size_t i = 0; i < carrier_count; ++i) {
    for (std::size_t j = i + 1; j < carrier_count; ++j) {
      const SegmentMeet meet =
          intersect_segments(carriers[i].first, carriers[j].first);
      if (meet.kind == SegmentMeet::Kind::At) {
        cuts[i].push_back(param_on(meet.at, base[i], axis[i], len2[i]));
        cuts[j].push_back(param_on(meet.at, base[j], axis[j], len2[j]));
      } else if (meet.kind == SegmentMeet::Kind::Along) {
        for (const Point& p : {meet.along.a, meet.along.b}) {
          cuts[i].push_back(param_on(p, base[i], axis[i], len2[i]));
          cuts[j].push_back(param_on(p, base[j], axis[j], len2[j]));
        }
      }
    }
  }

  std::map<std::pair<Point, Point>, CarrierOwner, PointPairLess> elementary;
  for (std::size_t i = 0; i < carrier_count; ++i) {
    std::sort(cuts[i].begin(), cuts[i].end());
    cuts[i].erase(std::unique(cuts[i].begin(), cuts[i].end()), cuts[i].end());
    for (std::size_t k = 0; k + 1 < cuts[i].size(); ++k) {
      const Point p1 = base[i] + scaled(cuts[i][k], axis[i]);
      const Point p2 = base[i] + scaled(cuts[i][k + 1], axis[i]);
      auto key = lex_less(p1, p2) ? std::make_pair(p1, p2)
                                  : std::make_pair(p2, p1);
      auto [it, inserted] = elementary.insert({key, carriers[i].second});
      if (!inserted && carriers[i].second > it->second) {
        it->second = carriers[i].second;
      }
    }
  }

  std::map<Point, int, PointLess> vertex_id;
  auto vid = [&](const Point& p) {
    auto [it, inserted] =
        vertex_id.insert({p, static_cast<int>(vertex_points_.size())});
    if (inserted) vertex_points_.push_back(p);
    return it->second;
  };
  for (const auto& [key, owner] : elementary) {
    ArrangementEdge e;
    e.a = key.first;
    e.b = key.second;
    e.owner = owner;
    e.va = vid(e.a);
    e.vb = vid(e.b);
    edges_.push_back(std::move(e));
  }

  // Half-edge h: index 2e for a->b, 2e+1 for b->a.
  const std::size_t ne = edges_.size();
  auto tail = [&](int h) {
    return h % 2 == 0 ? edges_[h / 2].va : edges_[h / 2].vb;
  };
  auto head = [&](int h) {
    return h % 2 == 0 ? edges_[h / 2].vb : edges_[h / 2].va;
  };
  auto half_dir = [&](int h) {
    const ArrangementEdge& e = edges_[h / 2];
    return h % 2 == 0 ? direction_from_to(e.a, e.b)
                      : direction_from_to(e.b, e.a);
  };

  std::vector<std::vector<int>> out_around(vertex_points_.size());
  for (std::size_t e = 0; e < ne; ++e) {
    out_around[edges_[e].va].push_back(static_cast<int>(2 * e));
    out_around[edges_[e].vb].push_back(static_cast<int>(2 * e + 1));
  }
  std::vector<int> pos_in_out(2 * ne, -1);
  for (auto& around : out_around) {
    std::sort(around.begin(), around.end(), [&](int h1, int h2) {
      return compare_ccw(half_dir(h1), half_dir(h2)) < 0;
    });
    for (std::size_t k = 0; k < around.size(); ++k) {
      pos_in_out[around[k]] = static_cast<int>(k);
    }
  }
  // Next half-edge of the face on the left: at the head vertex, the clockwise
  // predecessor of the reversed half-edge.
  auto next_half = [&](int h) {
    const int v = head(h);
    const auto& around = out_around[v];
    const int k = static_cast<int>(around.size());
    const int r = pos_in_out[h ^ 1];
    return around[(r + k - 1) % k];
  };

  struct CycleInfo {
    std::vector<int> halves;
    std::vector<Point> loop;
    Rational area2;
  };
  std::vector<CycleInfo> cycles;
  std::vector<int> cycle_of(2 * ne, -1);
  for (std::size_t h0 = 0; h0 < 2 * ne; ++h0) {
    if (cycle_of[h0] != -1) continue;
    const int c = static_cast<int>(cycles.size());
    CycleInfo info;
    int h = static_cast<int>(h0);
    do {
      cycle_of[h] = c;
      info.halves.push_back(h);
      info.loop.push_back(vertex_points_[tail(h)]);
      h = next_half(h);
    } while (h != static_cast<int>(h0));
    info.area2 = 0;
    for (std::size_t k = 0; k < info.loop.size(); ++k) {
      info.area2 +=
          cross(info.loop[k], info.loop[(k + 1) % info.loop.size()]);
    }
    cycles.push_back(std::move(info));
  }

  // Islands (bounded negative cycles) get attached to the face found by
  // shooting a ray westward from their leftmost vertex.
  const Direction west = {BigInt(-1), BigInt(0)};
  const Direction east = {BigInt(1), BigInt(0)};
  std::vector<int> parent_cycle(cycles.size(), -2);  // -2 positive, -1 outside
  for (std::size_t c = 0; c < cycles.size(); ++c) {
    if (cycles[c].area2 > 0) continue;
    parent_cycle[c] = -1;
    const Point* v = &cycles[c].loop[0];
    for (const Point& p : cycles[c].loop) {
      if (lex_less(p, *v)) v = &p;
    }
    std::optional<Rational> best;
    std::vector<std::size_t> hit_edges;
    for (std::size_t e = 0; e < ne; ++e) {
      if (edges_[e].a == *v || edges_[e].b == *v) continue;
      const auto slice =
          intersect_ray_segment(*v, west, {edges_[e].a, edges_[e].b});
      if (!slice) continue;
      assert(slice->lo > 0);
      if (!best || slice->lo < *best) {
        best = slice->lo;
        hit_edges.assign(1, e);
      } else if (slice->lo == *best) {
        hit_edges.push_back(e);
      }
    }
    if (!best) continue;  // nothing west: the unbounded side
    const Point q = ray_point(*v, west, *best);
    const auto qit = vertex_id.find(q);
    if (qit != vertex_id.end()) {
      // Hit a vertex: the face occupying the angular sector that contains the
      // eastward view back to v is left of the counterclockwise predecessor.
      const auto& around = out_around[qit->second];
      const int k = static_cast<int>(around.size());
      int first_geq = -1;
      for (int idx = 0; idx < k; ++idx) {
        const int cmp = compare_ccw(half_dir(around[idx]), east);
        assert(cmp != 0);
        if (cmp > 0) {
          first_geq = idx;
          break;
        }
      }
      const int pred = ((first_geq == -1 ? 0 : first_geq) + k - 1) % k;
      parent_cycle[c] = cycle_of[around[pred]];
    } else {
      const std::size_t e = hit_edges.front();
      const int side = orient(edges_[e].a, edges_[e].b, *v);
      assert(side != 0);
      parent_cycle[c] =
          cycle_of[side > 0 ? static_cast<int>(2 * e)
                            : static_cast<int>(2 * e + 1)];
    }
  }
  auto resolve_face_cycle = [&](int c) {
    while (c >= 0 && cycles[c].area2 <= 0) c = parent_cycle[c];
    return c;
  };

  // Interior sample for every positive cycle: midpoint of a two-sided edge,
  // pushed halfway to the first boundary met along the inward normal.
  std::vector<int> cell_of_cycle(cycles.size(), -1);
  for (std::size_t c = 0; c < cycles.size(); ++c) {
    if (cycles[c].area2 <= 0) continue;
    int chosen = -1;
    for (int h : cycles[c].halves) {
      if (cycle_of[h ^ 1] != static_cast<int>(c)) {
        chosen = h;
        break;
      }
    }
    assert(chosen != -1);
    const ArrangementEdge& ce = edges_[chosen / 2];
    const Point m = ce.a + scaled(Rational(1, 2), ce.b - ce.a);
    const Direction n = rotated90ccw(half_dir(chosen));
    std::optional<Rational> tstar;
    for (std::size_t e = 0; e < ne; ++e) {
      if (e == static_cast<std::size_t>(chosen / 2)) continue;
      const auto slice =
          intersect_ray_segment(m, n, {edges_[e].a, edges_[e].b});
      if (!slice) continue;
      assert(slice->lo > 0);
      if (!tstar || slice->lo < *tstar) tstar = slice->lo;
    }
    assert(tstar);
    const Point sample = ray_point(m, n, *tstar / 2);
    if (view_.locate(sample) != Location::Inside) continue;  // hole void
    Cell cell;
    cell.id = static_cast<int>(cells_.size());
    cell.cycles.push_back(cycles[c].loop);
    cell.area2 = cycles[c].area2;
    cell.sample = sample;
    cell_of_cycle[c] = cell.id;
    cells_.push_back(std::move(cell));
  }
  for (std::size_t c = 0; c < cycles.size(); ++c) {
    if (cycles[c].area2 > 0 || parent_cycle[c] == -1) continue;
    const int face_cycle = resolve_face_cycle(parent_cycle[c]);
    if (face_cycle < 0) continue;
    const int cell = cell_of_cycle[face_cycle];
    if (cell < 0) continue;
    cells_[cell].cycles.push_back(cycles[c].loop);
    cells_[cell].area2 += cycles[c].area2;
  }

  for (std::size_t e = 0; e < ne; ++e) {
    auto cell_left = [&](int h) {
      const int c = resolve_face_cycle(cycle_of[h]);
      return c < 0 ? -1 : cell_of_cycle[c];
    };
    edges_[e].cell_left_ab = cell_left(static_cast<int>(2 * e));
    edges_[e].cell_left_ba = cell_left(static_cast<int>(2 * e + 1));
    if (edges_[e].owner != CarrierOwner::Wall && edges_[e].cell_left_ab >= 0 &&
        edges_[e].cell_left_ba >= 0 &&
        edges_[e].cell_left_ab != edges_[e].cell_left_ba) {
      portals_.push_back({static_cast<int>(e), edges_[e].cell_left_ab,
                          edges_[e].cell_left_ba, edges_[e].owner});
    }
  }
}

bool Decomposition::cell_closure_contains(const Cell& cell,
                                          const Point& p) const {
  for (const auto& loop : cell.cycles) {
    for (std::size_t i = 0; i < loop.size(); ++i) {
      if (on_segment(p, {loop[i], loop[(i + 1) % loop.size()]})) return true;
    }
  }
  bool inside = false;
  for (const auto& loop : cell.cycles) {
    for (std::size_t i = 0; i < loop.size(); ++i) {
      const Point& a = loop[i];
      const Point& b = loop[(i + 1) % loop.size()];
      if ((a.y > p.y) == (b.y > p.y)) continue;
      const Rational val =
          (a.x - p.x) * (b.y - a.y) + (b.x - a.x) * (p.y - a.y);
      if ((b.y > a.y) ? val > 0 : val < 0) inside = !inside;
    }
  }
  return inside;
}

bool Decomposition::strictly_inside_cell(const Cell& cell,
                                         const Point& p) const {
  for (const auto& loop : cell.cycles) {
    for (std::size_t i = 0; i < loop.size(); ++i) {
      if (on_segment(p, {loop[i], loop[(i + 1) % loop.size()]})) return false;
    }
  }
  return cell_closure_contains(cell, p);
}

bool Decomposition::segment_meets_cell_interior(const Cell& cell,
                                                const Segment& s) const {
  if (degenerate(s)) return strictly_inside_cell(cell, s.a);
  const Point v = s.b - s.a;
  const Rational len2 = dot(v, v);
  std::vector<Rational> cuts = {Rational(0), Rational(1)};
  for (const auto& loop : cell.cycles) {
    for (std::size_t i = 0; i < loop.size(); ++i) {
      const Segment edge{loop[i], loop[(i + 1) % loop.size()]};
      const SegmentMeet meet = intersect_segments(s, edge);
      if (meet.kind == SegmentMeet::Kind::At) {
        cuts.push_back(dot(meet.at - s.a, v) / len2);
      } else if (meet.kind == SegmentMeet::Kind::Along) {
        cuts.push_back(dot(meet.along.a - s.a, v) / len2);
        cuts.push_back(dot(meet.along.b - s.a, v) / len2);
      }
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const Point mid = s.a + scaled(midpoint(cuts[i], cuts[i + 1]), v);
    if (strictly_inside_cell(cell, mid)) return true;
  }
  return false;
}

std::vector<int> Decomposition::goal_cells(const TargetSpec& target) const {
  std::vector<int> out;
  switch (target.mode) {
    case TargetMode::Whole:
      for (const Cell& cell : cells_) out.push_back(cell.id);
      break;
    case TargetMode::Region: {
      const RegionView tview(Region{target.ring, {}});
      for (const Cell& cell : cells_) {
        bool goal = tview.locate(cell.sample) == Location::Inside;
        for (const auto& loop : cell.cycles) {
          if (goal) break;
          for (const Point& v : loop) {
            if (tview.locate(v) != Location::Outside) {
              goal = true;
              break;
            }
          }
        }
        if (goal) out.push_back(cell.id);
      }
      break;
    }
    case TargetMode::PointNeighborhood:
      for (const Cell& cell : cells_) {
        if (cell_closure_contains(cell, target.point)) out.push_back(cell.id);
      }
      break;
  }
  return out;
}

std::vector<bool> Decomposition::blocked_portals(
    const std::vector<std::optional<Direction>>& lasers) const {
  assert(lasers.size() == instance_.guards.size());
  std::vector<Segment> beams;
  for (std::size_t gi = 0; gi < lasers.size(); ++gi) {
    if (!lasers[gi]) continue;
    if (const auto b = view_.beam(instance_.guards[gi].position, *lasers[gi])) {
      beams.push_back(*b);
    }
  }
  std::vector<bool> blocked(portals_.size(), false);
  for (std::size_t pi = 0; pi < portals_.size(); ++pi) {
    const ArrangementEdge& e = edges_[portals_[pi].edge];
    const Segment carrier{e.a, e.b};
    const Point v = e.b - e.a;
    const Rational len2 = dot(v, v);
    std::vector<std::pair<Rational, Rational>> spans;
    for (const Segment& b : beams) {
      const SegmentMeet meet = intersect_segments(carrier, b);
      if (meet.kind != SegmentMeet::Kind::Along) continue;  // points cover nothing
      Rational t1 = param_on(meet.along.a, e.a, v, len2);
      Rational t2 = param_on(meet.along.b, e.a, v, len2);
      if (t1 > t2) std::swap(t1, t2);
      spans.push_back({t1, t2});
    }
    std::sort(spans.begin(), spans.end());
    Rational reach = 0;
    for (const auto& [lo, hi] : spans) {
      if (lo > reach) break;
      if (hi > reach) reach = hi;
    }
    blocked[pi] = reach >= 1;
  }
  return blocked;
}

std::vector<Direction> Decomposition::micro_events(std::size_t guard,
                                                   const Direction& from,
                                                   const Direction& to,
                                                   Sense sense) const {
  const Point& gpos = instance_.guards[guard].position;
  std::vector<Direction> events;
  for (const Point& v : vertex_points_) {
    if (v == gpos) continue;
    const Direction d = direction_from_to(gpos, v);
    if (!in_open_arc(d, from, to, sense)) continue;
    const auto b = view_.beam(gpos, d);
    if (!b || !on_segment(v, *b)) continue;
    events.push_back(d);
  }
  std::sort(events.begin(), events.end(),
            [&](const Direction& d1, const Direction& d2) {
              return rotation_less(from, sense, d1, d2);
            });
  events.erase(std::unique(events.begin(), events.end()), events.end());
  return events;
}

}  // namespace searchlight
