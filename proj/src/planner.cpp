#include "searchlight/planner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace searchlight {

namespace {

int sgn(const Rational& r) {
  if (r > 0) return 1;
  if (r < 0) return -1;
  return 0;
}

std::size_t mix(std::size_t seed, std::size_t value) {
  seed ^= value + 0x9e3779b97f4a7c15ull + (seed << 6) + (seed >> 2);
  return seed;
}

// Angular width of the counterclockwise arc a -> b as a unit-circle point;
// comparing widths is comparing these by angle from the positive x axis.
Direction arc_width(const Direction& a, const Direction& b) {
  const Point va = as_vector(a);
  const Point vb = as_vector(b);
  return make_direction(dot(va, vb), cross(va, vb));
}

std::array<double, 4> loose_box(const Segment& s) {
  const double ax = approx(s.a.x), ay = approx(s.a.y);
  const double bx = approx(s.b.x), by = approx(s.b.y);
  const double pad =
      1e-7 * (1.0 + std::max({std::abs(ax), std::abs(ay), std::abs(bx),
                              std::abs(by)}));
  return {std::min(ax, bx) - pad, std::min(ay, by) - pad,
          std::max(ax, bx) + pad, std::max(ay, by) + pad};
}

bool boxes_disjoint(const std::array<double, 4>& p,
                    const std::array<double, 4>& q) {
  return p[2] < q[0] || q[2] < p[0] || p[3] < q[1] || q[3] < p[1];
}

}  // namespace

CellSet CellSet::all(std::size_t size) {
  CellSet s(size);
  for (std::size_t i = 0; i < size; ++i) s.set(i, true);
  return s;
}

std::size_t CellSet::count() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < size_; ++i) n += test(i);
  return n;
}

bool CellSet::none() const {
  for (const std::uint64_t w : words_) {
    if (w != 0) return false;
  }
  return true;
}

std::size_t CellSet::hash() const {
  std::size_t h = size_;
  for (const std::uint64_t w : words_) h = mix(h, static_cast<std::size_t>(w));
  return h;
}

std::size_t SearchStateHash::operator()(const SearchState& s) const {
  std::size_t h = s.contaminated.hash();
  for (const int a : s.angle) h = mix(h, static_cast<std::size_t>(a));
  return h;
}

Planner::Planner(const Decomposition& dec) : dec_(dec) {
  goals_ = dec_.goal_cells(dec_.instance().target);
  adjacency_.resize(dec_.cells().size());
  for (std::size_t pi = 0; pi < dec_.portals().size(); ++pi) {
    const Portal& p = dec_.portals()[pi];
    adjacency_[p.cell_a].push_back({static_cast<int>(pi), p.cell_b});
    adjacency_[p.cell_b].push_back({static_cast<int>(pi), p.cell_a});
  }
  build_views();
  build_cover();
}

void Planner::build_views() {
  const auto& guards = dec_.instance().guards;
  view_.resize(guards.size());
  for (std::size_t gi = 0; gi < guards.size(); ++gi) {
    const Point& gpos = guards[gi].position;
    view_[gi].resize(dec_.cells().size());
    for (const Cell& cell : dec_.cells()) {
      GuardCell& gc = view_[gi][cell.id];
      std::set<Direction, DirectionLess> dirs;
      for (const auto& loop : cell.cycles) {
        for (const Point& v : loop) {
          if (v == gpos) continue;
          dirs.insert(direction_from_to(gpos, v));
        }
      }
      if (dirs.size() < 2) continue;
      const std::vector<Direction> sorted(dirs.begin(), dirs.end());
      // The cell's angular extent is the complement of the widest empty gap
      // between consecutive vertex directions.
      std::size_t widest = 0;
      Direction best = arc_width(sorted[0], sorted[1 % sorted.size()]);
      for (std::size_t i = 1; i < sorted.size(); ++i) {
        const Direction w =
            arc_width(sorted[i], sorted[(i + 1) % sorted.size()]);
        if (compare_ccw(best, w) < 0) {
          widest = i;
          best = w;
        }
      }
      gc.has_span = true;
      gc.lo = sorted[(widest + 1) % sorted.size()];
      gc.hi = sorted[widest];
      const Direction mid = arc_interior(gc.lo, gc.hi, Sense::CCW);
      const auto beam = dec_.view().beam(gpos, mid);
      gc.lit = beam && dec_.segment_meets_cell_interior(cell, *beam);
    }
  }
}

void Planner::build_cover() {
  const auto& guards = dec_.instance().guards;
  const auto& crit = dec_.critical();
  const auto& edges = dec_.edges();

  portal_box_.resize(dec_.portals().size());
  for (std::size_t pi = 0; pi < dec_.portals().size(); ++pi) {
    const ArrangementEdge& e = edges[dec_.portals()[pi].edge];
    portal_box_[pi] = loose_box({e.a, e.b});
  }

  cover_.resize(guards.size());
  for (std::size_t gi = 0; gi < guards.size(); ++gi) {
    cover_[gi].resize(crit[gi].size());
    for (std::size_t idx = 0; idx < crit[gi].size(); ++idx) {
      const auto beam = dec_.view().beam(guards[gi].position, crit[gi][idx]);
      if (!beam) continue;
      const auto beam_box = loose_box(*beam);
      for (std::size_t pi = 0; pi < dec_.portals().size(); ++pi) {
        if (boxes_disjoint(portal_box_[pi], beam_box)) continue;
        const ArrangementEdge& e = edges[dec_.portals()[pi].edge];
        const Segment carrier{e.a, e.b};
        const SegmentMeet meet = intersect_segments(carrier, *beam);
        if (meet.kind != SegmentMeet::Kind::Along) continue;
        const Point v = carrier.b - carrier.a;
        const Rational len2 = dot(v, v);
        Rational t1 = dot(meet.along.a - carrier.a, v) / len2;
        Rational t2 = dot(meet.along.b - carrier.a, v) / len2;
        if (t2 < t1) std::swap(t1, t2);
        if (t2 > t1) {
          cover_[gi][idx].push_back({static_cast<int>(pi), t1, t2});
        }
      }
    }
  }
}

SearchState Planner::initial_state(std::vector<int> angles) const {
  const auto& crit = dec_.critical();
  if (angles.size() != crit.size()) {
    throw std::invalid_argument("initial_state: one angle per guard required");
  }
  for (std::size_t gi = 0; gi < angles.size(); ++gi) {
    const int k = static_cast<int>(crit[gi].size());
    if (k == 0 ? angles[gi] != 0 : (angles[gi] < 0 || angles[gi] >= k)) {
      throw std::invalid_argument("initial_state: angle index out of range");
    }
  }
  SearchState s;
  s.angle = std::move(angles);
  s.contaminated = CellSet::all(dec_.cells().size());
  return s;
}

bool Planner::goal_reached(const SearchState& state) const {
  for (const int c : goals_) {
    if (state.contaminated.test(c)) return false;
  }
  return true;
}

CellSet Planner::closure(CellSet contaminated,
                         const std::vector<bool>& blocked) const {
  std::deque<int> queue;
  for (std::size_t c = 0; c < contaminated.size(); ++c) {
    if (contaminated.test(c)) queue.push_back(static_cast<int>(c));
  }
  while (!queue.empty()) {
    const int c = queue.front();
    queue.pop_front();
    for (const auto& [portal, nb] : adjacency_[c]) {
      if (blocked[portal] || contaminated.test(nb)) continue;
      contaminated.set(nb, true);
      queue.push_back(nb);
    }
  }
  return contaminated;
}

std::vector<std::optional<Direction>> Planner::lasers_at(
    const std::vector<int>& angle) const {
  const auto& crit = dec_.critical();
  std::vector<std::optional<Direction>> out(crit.size());
  for (std::size_t gi = 0; gi < crit.size(); ++gi) {
    if (!crit[gi].empty()) out[gi] = crit[gi][angle[gi]];
  }
  return out;
}

std::vector<bool> Planner::blocked_at(const std::vector<int>& angle,
                                      int skip_guard) const {
  std::vector<bool> blocked(dec_.portals().size(), false);
  std::map<int, std::vector<std::pair<Rational, Rational>>> touched;
  for (std::size_t gi = 0; gi < cover_.size(); ++gi) {
    if (static_cast<int>(gi) == skip_guard || cover_[gi].empty()) continue;
    for (const auto& [portal, lo, hi] : cover_[gi][angle[gi]]) {
      touched[portal].push_back({lo, hi});
    }
  }
  for (auto& [portal, spans] : touched) {
    std::sort(spans.begin(), spans.end());
    Rational end = 0;
    bool covered = true;
    for (const auto& [lo, hi] : spans) {
      if (lo > end) {
        covered = false;
        break;
      }
      if (hi > end) end = hi;
    }
    blocked[portal] = covered && end >= 1;
  }
  return blocked;
}

bool Planner::move_applies(const SearchState& state, const Move& move) const {
  const auto& crit = dec_.critical();
  if (move.guard >= crit.size()) return false;
  const int k = static_cast<int>(crit[move.guard].size());
  if (k < 2) return false;
  if (move.from < 0 || move.from >= k || move.to < 0 || move.to >= k) {
    return false;
  }
  if (state.angle[move.guard] != move.from) return false;
  if (move.sense == Sense::CCW) return move.to == (move.from + 1) % k;
  return move.to == (move.from + k - 1) % k;
}

int Planner::crossing_kind(std::size_t guard, int cell,
                           const Direction& d_star,
                           const std::optional<Segment>& beam) const {
  if (!beam) return 0;
  const Point& gpos = dec_.instance().guards[guard].position;
  const Point dvec = as_vector(d_star);
  const Rational scale = dot(dvec, dvec);
  const Rational t_tip =
      std::max(dot(beam->a - gpos, dvec), dot(beam->b - gpos, dvec)) / scale;
  const Direction back = negated(d_star);
  for (const auto& loop : dec_.cells()[cell].cycles) {
    for (std::size_t i = 0; i < loop.size(); ++i) {
      const Segment edge{loop[i], loop[(i + 1) % loop.size()]};
      // The supporting line must be free of the cell beyond the beam tip and
      // behind the guard; otherwise the beam does not separate the cell.
      if (const auto fwd = intersect_ray_segment(gpos, d_star, edge)) {
        if (fwd->hi > t_tip) return 2;
      }
      if (const auto bwd = intersect_ray_segment(gpos, back, edge)) {
        if (bwd->hi > 0) return 2;
      }
    }
  }
  return 1;
}

const Planner::MoveScript& Planner::script_for(std::size_t guard, int from,
                                               int to, Sense sense) const {
  const auto key = std::make_tuple(guard, from, sense);
  if (const auto it = scripts_.find(key); it != scripts_.end()) {
    return it->second;
  }

  const auto& crit = dec_.critical()[guard];
  const Direction d_from = crit[from];
  const Direction d_to = crit[to];
  const Point& gpos = dec_.instance().guards[guard].position;
  const auto& edges = dec_.edges();
  const std::size_t ncells = dec_.cells().size();

  std::vector<Direction> stops;
  stops.push_back(d_from);
  for (const Direction& e : dec_.micro_events(guard, d_from, d_to, sense)) {
    stops.push_back(e);
  }
  stops.push_back(d_to);

  MoveScript script;
  for (std::size_t i = 0; i + 1 < stops.size(); ++i) {
    const Direction d_star = arc_interior(stops[i], stops[i + 1], sense);
    const auto beam = dec_.view().beam(gpos, d_star);

    StepScript step;
    step.kinds.assign(ncells, 0);
    if (beam) {
      for (std::size_t c = 0; c < ncells; ++c) {
        const GuardCell& gc = view_[guard][c];
        if (gc.has_span && gc.lit &&
            in_open_arc(d_star, gc.lo, gc.hi, Sense::CCW)) {
          step.kinds[c] =
              crossing_kind(guard, static_cast<int>(c), d_star, beam);
        }
      }
    }

    const Point dvec = as_vector(d_star);
    const auto beam_box =
        beam ? loose_box(*beam) : std::array<double, 4>{0, 0, 0, 0};
    for (std::size_t pi = 0; pi < dec_.portals().size(); ++pi) {
      const ArrangementEdge& e = edges[dec_.portals()[pi].edge];
      const Segment carrier{e.a, e.b};

      if (!beam) {
        step.parts.push_back({static_cast<int>(pi), true, true});
        continue;
      }

      std::vector<Segment> parts;
      if (boxes_disjoint(portal_box_[pi], beam_box)) {
        parts.push_back(carrier);
      } else {
        const SegmentMeet meet = intersect_segments(carrier, *beam);
        switch (meet.kind) {
          case SegmentMeet::Kind::None:
            parts.push_back(carrier);
            break;
          case SegmentMeet::Kind::At:
            if (!(carrier.a == meet.at)) parts.push_back({carrier.a, meet.at});
            if (!(carrier.b == meet.at)) parts.push_back({meet.at, carrier.b});
            break;
          case SegmentMeet::Kind::Along: {
            const Point v = carrier.b - carrier.a;
            Point first = meet.along.a;
            Point second = meet.along.b;
            if (dot(second - carrier.a, v) < dot(first - carrier.a, v)) {
              std::swap(first, second);
            }
            if (!(carrier.a == first)) parts.push_back({carrier.a, first});
            if (!(carrier.b == second)) parts.push_back({second, carrier.b});
            break;
          }
        }
      }

      for (const Segment& part : parts) {
        const int sa = sgn(cross(dvec, part.a - gpos));
        const int sb = sgn(cross(dvec, part.b - gpos));
        bool plus = sa > 0 || sb > 0;
        bool minus = sa < 0 || sb < 0;
        // Touching the supporting line away from the beam lets contamination
        // slip between the beam's sides along this carrier stretch.
        if (sa == 0 && sb == 0) {
          plus = minus = true;
        } else if ((sa == 0 && !on_segment(part.a, *beam)) ||
                   (sb == 0 && !on_segment(part.b, *beam))) {
          plus = minus = true;
        }
        step.parts.push_back({static_cast<int>(pi), plus, minus});
      }
    }
    script.steps.push_back(std::move(step));
  }

  return scripts_.emplace(key, std::move(script)).first->second;
}

void Planner::spread(CellSet& bits, std::map<int, bool>& swept_dirty,
                     const StepScript& step, const std::vector<bool>& blocked,
                     Sense sense) const {
  const std::size_t ncells = dec_.cells().size();
  // Node 2c is the whole cell, or its counterclockwise side when the beam
  // splits it; node 2c+1 is the clockwise side of a split cell.
  std::vector<std::vector<int>> adj(2 * ncells);
  for (const PartAttach& part : step.parts) {
    if (blocked[part.portal]) continue;
    const Portal& portal = dec_.portals()[part.portal];
    int nodes[4];
    int count = 0;
    for (const int c : {portal.cell_a, portal.cell_b}) {
      if (step.kinds[c] == 1) {
        if (part.plus) nodes[count++] = 2 * c;
        if (part.minus) nodes[count++] = 2 * c + 1;
      } else {
        nodes[count++] = 2 * c;
      }
    }
    for (int i = 0; i < count; ++i) {
      for (int j = 0; j < count; ++j) {
        if (nodes[i] != nodes[j]) adj[nodes[i]].push_back(nodes[j]);
      }
    }
  }

  std::vector<char> dirty(2 * ncells, 0);
  std::deque<int> queue;
  const auto seed = [&](int node, bool value) {
    if (value && !dirty[node]) {
      dirty[node] = 1;
      queue.push_back(node);
    }
  };
  for (std::size_t c = 0; c < ncells; ++c) {
    const int ci = static_cast<int>(c);
    if (step.kinds[c] == 1) {
      const int ahead = sense == Sense::CCW ? 2 * ci : 2 * ci + 1;
      const int behind = sense == Sense::CCW ? 2 * ci + 1 : 2 * ci;
      seed(ahead, bits.test(c));
      seed(behind, swept_dirty.at(ci));
    } else {
      seed(2 * ci, bits.test(c));
    }
  }
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (const int v : adj[u]) seed(v, true);
  }

  for (std::size_t c = 0; c < ncells; ++c) {
    const int ci = static_cast<int>(c);
    if (step.kinds[c] == 1) {
      const int ahead = sense == Sense::CCW ? 2 * ci : 2 * ci + 1;
      const int behind = sense == Sense::CCW ? 2 * ci + 1 : 2 * ci;
      bits.set(c, dirty[ahead] != 0);
      swept_dirty[ci] = dirty[behind] != 0;
    } else {
      bits.set(c, dirty[2 * c] != 0);
    }
  }
}

SearchState Planner::apply_move(const SearchState& state,
                                const Move& move) const {
  if (!move_applies(state, move)) {
    throw std::invalid_argument("apply_move: move does not apply");
  }

  SearchState next = state;
  next.angle[move.guard] = move.to;

  // The parked beams never change during the rotation; only the moving beam
  // needs per-interval treatment.
  const std::vector<bool> blocked =
      blocked_at(state.angle, static_cast<int>(move.guard));
  const MoveScript& script =
      script_for(move.guard, move.from, move.to, move.sense);

  const std::size_t ncells = dec_.cells().size();
  std::vector<int> kind(ncells, 0);
  std::map<int, bool> swept_dirty;

  for (const StepScript& step : script.steps) {
    for (std::size_t c = 0; c < ncells; ++c) {
      const int ci = static_cast<int>(c);
      const int cur = step.kinds[c];
      if (kind[c] == cur) continue;
      if (kind[c] == 1 && cur == 0) {
        // The beam finished crossing: the whole cell is its swept side now.
        next.contaminated.set(c, swept_dirty.at(ci));
        swept_dirty.erase(ci);
      } else if (kind[c] == 1 && cur == 2) {
        next.contaminated.set(c,
                              next.contaminated.test(c) || swept_dirty.at(ci));
        swept_dirty.erase(ci);
      } else if (cur == 1) {
        // Fresh crossings start with a clean wake; a cell downgraded from an
        // inseparable crossing may carry dirt on either side.
        swept_dirty[ci] = kind[c] == 2 && next.contaminated.test(c);
      }
      kind[c] = cur;
    }
    spread(next.contaminated, swept_dirty, step, blocked, move.sense);
  }

  for (std::size_t c = 0; c < ncells; ++c) {
    if (kind[c] == 1) {
      next.contaminated.set(c, swept_dirty.at(static_cast<int>(c)));
    }
  }
  next.contaminated =
      closure(std::move(next.contaminated), blocked_at(next.angle));
  return next;
}

Schedule Planner::reconstruct(const std::vector<int>& parents,
                              const std::vector<Move>& via,
                              const std::vector<SearchState>& states,
                              int leaf) const {
  std::vector<Move> moves;
  int at = leaf;
  while (parents[at] >= 0) {
    moves.push_back(via[at]);
    at = parents[at];
  }
  std::reverse(moves.begin(), moves.end());

  const auto& guards = dec_.instance().guards;
  const auto& crit = dec_.critical();
  Schedule schedule;
  for (std::size_t gi = 0; gi < guards.size(); ++gi) {
    ScheduleEntry entry;
    entry.guard = guards[gi].id;
    entry.index = states[at].angle[gi];
    if (!crit[gi].empty()) entry.dir = crit[gi][entry.index];
    schedule.initial.push_back(std::move(entry));
  }
  for (const Move& m : moves) {
    ScheduleMove sm;
    sm.guard = guards[m.guard].id;
    sm.from = m.from;
    sm.to = m.to;
    sm.sense = m.sense;
    sm.from_dir = crit[m.guard][m.from];
    sm.to_dir = crit[m.guard][m.to];
    schedule.moves.push_back(std::move(sm));
  }
  return schedule;
}

PlanResult Planner::plan(const PlanLimits& limits) const {
  const auto start_time = std::chrono::steady_clock::now();
  const auto out_of_time = [&] {
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start_time);
    return static_cast<std::uint64_t>(elapsed.count()) > limits.max_millis;
  };

  const auto& guards = dec_.instance().guards;
  const auto& crit = dec_.critical();

  std::vector<std::vector<int>> choices(guards.size());
  for (std::size_t gi = 0; gi < guards.size(); ++gi) {
    if (guards[gi].pinned_start) {
      const auto& list = crit[gi];
      const auto it =
          std::find(list.begin(), list.end(), *guards[gi].pinned_start);
      if (it == list.end()) {
        throw std::logic_error("plan: pinned direction missing from criticals");
      }
      choices[gi] = {static_cast<int>(it - list.begin())};
    } else if (crit[gi].empty()) {
      choices[gi] = {0};
    } else {
      choices[gi].resize(crit[gi].size());
      for (std::size_t i = 0; i < crit[gi].size(); ++i) {
        choices[gi][i] = static_cast<int>(i);
      }
    }
  }

  std::vector<SearchState> states;
  std::vector<int> parents;
  std::vector<Move> via;
  std::unordered_map<SearchState, int, SearchStateHash> ids;
  std::deque<int> queue;

  PlanResult result;
  const auto admit = [&](SearchState s, int parent, const Move& m) -> int {
    const auto [it, fresh] = ids.try_emplace(std::move(s), -1);
    if (!fresh) return -1;
    const int id = static_cast<int>(states.size());
    it->second = id;
    states.push_back(it->first);
    parents.push_back(parent);
    via.push_back(m);
    queue.push_back(id);
    return id;
  };

  // Start postures are existential: any tuple of critical indices, except
  // that pinned guards must begin at their pinned direction.
  std::vector<std::size_t> pick(guards.size(), 0);
  while (true) {
    std::vector<int> angles(guards.size());
    for (std::size_t gi = 0; gi < guards.size(); ++gi) {
      angles[gi] = choices[gi][pick[gi]];
    }
    const int id = admit(initial_state(std::move(angles)), -1, Move{});
    if (id >= 0 && goal_reached(states[id])) {
      result.status = PlanStatus::Solved;
      result.schedule = reconstruct(parents, via, states, id);
      result.states_explored = states.size();
      return result;
    }
    std::size_t gi = 0;
    for (; gi < guards.size(); ++gi) {
      if (++pick[gi] < choices[gi].size()) break;
      pick[gi] = 0;
    }
    if (gi == guards.size()) break;
  }

  while (!queue.empty()) {
    if (states.size() > limits.max_states || out_of_time()) {
      result.status = PlanStatus::ResourceExhausted;
      result.states_explored = states.size();
      return result;
    }
    const int id = queue.front();
    queue.pop_front();
    const SearchState current = states[id];

    for (std::size_t gi = 0; gi < guards.size(); ++gi) {
      const int k = static_cast<int>(crit[gi].size());
      if (k < 2) continue;
      const int at = current.angle[gi];
      const Move moves[2] = {
          {gi, at, (at + 1) % k, Sense::CCW},
          {gi, at, (at + k - 1) % k, Sense::CW},
      };
      for (const Move& m : moves) {
        const int nid = admit(apply_move(current, m), id, m);
        if (nid >= 0 && goal_reached(states[nid])) {
          result.status = PlanStatus::Solved;
          result.schedule = reconstruct(parents, via, states, nid);
          result.states_explored = states.size();
          return result;
        }
      }
    }
  }

  result.status = PlanStatus::Unsolvable;
  result.states_explored = states.size();
  return result;
}

SearchState Planner::replay(const Schedule& schedule) const {
  const auto& guards = dec_.instance().guards;
  const auto& crit = dec_.critical();
  const auto guard_index = [&](const std::string& id) -> std::size_t {
    for (std::size_t gi = 0; gi < guards.size(); ++gi) {
      if (guards[gi].id == id) return gi;
    }
    throw std::invalid_argument("replay: unknown guard '" + id + "'");
  };

  if (schedule.initial.size() != guards.size()) {
    throw std::invalid_argument("replay: start posture must cover every guard");
  }
  std::vector<int> angles(guards.size(), -1);
  for (const ScheduleEntry& entry : schedule.initial) {
    const std::size_t gi = guard_index(entry.guard);
    if (angles[gi] >= 0) {
      throw std::invalid_argument("replay: duplicate start posture for '" +
                                  entry.guard + "'");
    }
    if (crit[gi].empty()) {
      if (entry.index != 0) {
        throw std::invalid_argument("replay: bad index for laserless guard");
      }
      angles[gi] = 0;
      continue;
    }
    if (entry.index < 0 || entry.index >= static_cast<int>(crit[gi].size()) ||
        !(crit[gi][entry.index] == entry.dir)) {
      throw std::invalid_argument(
          "replay: start direction does not match the instance");
    }
    angles[gi] = entry.index;
  }

  SearchState state = initial_state(std::move(angles));
  for (const ScheduleMove& sm : schedule.moves) {
    const std::size_t gi = guard_index(sm.guard);
    const Move m{gi, sm.from, sm.to, sm.sense};
    if (!move_applies(state, m)) {
      throw std::invalid_argument("replay: move does not chain");
    }
    if (!(crit[gi][sm.from] == sm.from_dir) ||
        !(crit[gi][sm.to] == sm.to_dir)) {
      throw std::invalid_argument(
          "replay: move directions do not match the instance");
    }
    state = apply_move(state, m);
  }
  return state;
}

Schedule Planner::reversed(const Schedule& schedule) const {
  return time_reversed(schedule);
}

}  // namespace searchlight
