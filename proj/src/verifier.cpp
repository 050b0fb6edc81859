#include "searchlight/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace searchlight {

namespace {

BigInt floor_div(const BigInt& num, const BigInt& den) {
  BigInt q = num / den;
  if (num < 0 && q * den != num) --q;
  return q;
}

long long lat_floor(const Rational& x, const Rational& pitch) {
  const Rational q = x / pitch;
  return floor_div(numerator(q), denominator(q)).convert_to<long long>();
}

long long lat_ceil(const Rational& x, const Rational& pitch) {
  return -lat_floor(-x, pitch);
}

double seg_dist2(double px, double py, double ax, double ay, double bx,
                 double by) {
  const double vx = bx - ax, vy = by - ay;
  const double wx = px - ax, wy = py - ay;
  const double vv = vx * vx + vy * vy;
  double t = vv > 0 ? (wx * vx + wy * vy) / vv : 0;
  t = std::clamp(t, 0.0, 1.0);
  const double dx = wx - t * vx, dy = wy - t * vy;
  return dx * dx + dy * dy;
}

// Unit-length float approximation of a direction, safe for huge components.
std::pair<double, double> dir_float(const Direction& d) {
  BigInt ax = d.dx < 0 ? BigInt(-d.dx) : d.dx;
  BigInt ay = d.dy < 0 ? BigInt(-d.dy) : d.dy;
  const BigInt m = ax > ay ? ax : ay;
  unsigned shift = 0;
  if (m > 0) {
    const unsigned bits = boost::multiprecision::msb(m) + 1;
    if (bits > 52) shift = bits - 52;
  }
  ax >>= shift;
  ay >>= shift;
  double x = ax.convert_to<double>();
  double y = ay.convert_to<double>();
  if (d.dx < 0) x = -x;
  if (d.dy < 0) y = -y;
  const double len = std::hypot(x, y);
  return {x / len, y / len};
}

std::vector<std::uint64_t> pack_bits(const std::vector<std::uint8_t>& v) {
  std::vector<std::uint64_t> out((v.size() + 63) / 64, 0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i]) out[i / 64] |= std::uint64_t(1) << (i % 64);
  }
  return out;
}

bool bit_test(const std::vector<std::uint64_t>& w, std::size_t i) {
  return (w[i / 64] >> (i % 64)) & 1u;
}

// Spatial hash of wall segments for edge-versus-wall queries.
class WallBuckets {
 public:
  WallBuckets(const std::vector<Segment>& walls, double x0, double y0,
              double x1, double y1)
      : walls_(walls), x0_(x0), y0_(y0) {
    const double extent = std::max({x1 - x0, y1 - y0, 1e-9});
    size_ = extent / 64.0;
    cols_ = static_cast<int>((x1 - x0) / size_) + 2;
    rows_ = static_cast<int>((y1 - y0) / size_) + 2;
    cells_.resize(static_cast<std::size_t>(cols_) * rows_);
    for (std::size_t wi = 0; wi < walls.size(); ++wi) {
      const double ax = approx(walls[wi].a.x), ay = approx(walls[wi].a.y);
      const double bx = approx(walls[wi].b.x), by = approx(walls[wi].b.y);
      for (int ci = clamp_col(std::min(ax, bx)); ci <= clamp_col(std::max(ax, bx));
           ++ci) {
        for (int cj = clamp_row(std::min(ay, by));
             cj <= clamp_row(std::max(ay, by)); ++cj) {
          cells_[static_cast<std::size_t>(cj) * cols_ + ci].push_back(
              static_cast<int>(wi));
        }
      }
    }
    seen_.assign(walls.size(), 0);
  }

  // Indices of walls whose bucket range overlaps the query box.
  const std::vector<int>& query(double ax, double ay, double bx, double by) {
    ++stamp_;
    result_.clear();
    for (int ci = clamp_col(std::min(ax, bx) - size_);
         ci <= clamp_col(std::max(ax, bx) + size_); ++ci) {
      for (int cj = clamp_row(std::min(ay, by) - size_);
           cj <= clamp_row(std::max(ay, by) + size_); ++cj) {
        for (const int wi :
             cells_[static_cast<std::size_t>(cj) * cols_ + ci]) {
          if (seen_[wi] == stamp_) continue;
          seen_[wi] = stamp_;
          result_.push_back(wi);
        }
      }
    }
    return result_;
  }

 private:
  int clamp_col(double x) const {
    return std::clamp(static_cast<int>((x - x0_) / size_), 0, cols_ - 1);
  }
  int clamp_row(double y) const {
    return std::clamp(static_cast<int>((y - y0_) / size_), 0, rows_ - 1);
  }

  const std::vector<Segment>& walls_;
  double x0_, y0_, size_;
  int cols_ = 0, rows_ = 0;
  std::vector<std::vector<int>> cells_;
  std::vector<std::uint32_t> seen_;
  std::uint32_t stamp_ = 0;
  std::vector<int> result_;
};

// True when the whole closed segment stays inside the closed region: probe
// the midpoint of every stretch between boundary crossings.
bool segment_inside(const RegionView& view, const Segment& s,
                    const std::vector<int>& candidate_walls,
                    std::vector<Rational>& cuts) {
  cuts.clear();
  cuts.push_back(0);
  cuts.push_back(1);
  const Point v = s.b - s.a;
  const Rational len2 = dot(v, v);
  for (const int wi : candidate_walls) {
    const SegmentMeet meet = intersect_segments(s, view.edges()[wi]);
    if (meet.kind == SegmentMeet::Kind::At) {
      cuts.push_back(dot(meet.at - s.a, v) / len2);
    } else if (meet.kind == SegmentMeet::Kind::Along) {
      cuts.push_back(dot(meet.along.a - s.a, v) / len2);
      cuts.push_back(dot(meet.along.b - s.a, v) / len2);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i] == cuts[i + 1]) continue;
    const Rational t = midpoint(cuts[i], cuts[i + 1]);
    const Point p{s.a.x + t * v.x, s.a.y + t * v.y};
    if (view.locate(p) == Location::Outside) return false;
  }
  return true;
}

const std::array<Direction, 8>& octant_directions() {
  static const std::array<Direction, 8> dirs = {
      Direction{1, 0},  Direction{1, 1},   Direction{0, 1},  Direction{-1, 1},
      Direction{-1, 0}, Direction{-1, -1}, Direction{0, -1}, Direction{1, -1}};
  return dirs;
}

}  // namespace

Rational default_pitch(const Instance& instance) {
  const Rational len2 = shortest_edge_length2(instance);
  if (len2 <= 0) {
    throw std::invalid_argument("default_pitch: degenerate instance");
  }
  const BigInt num = numerator(len2);
  const BigInt den = denominator(len2);
  const BigInt sn = boost::multiprecision::sqrt(num);
  const BigInt sd = boost::multiprecision::sqrt(den);
  if (sn * sn == num && sd * sd == den) {
    return Rational(sn, sd) / 8;
  }
  // Irrational length: snap down to a power of two so lattice coordinates
  // stay compact.
  const double target = std::sqrt(approx(len2)) / 8.0;
  const int e = static_cast<int>(std::floor(std::log2(target)));
  Rational p = e >= 0 ? Rational(BigInt(1) << e)
                      : Rational(1, BigInt(1) << static_cast<unsigned>(-e));
  while (approx(p) > target) p /= 2;
  return p;
}

SampledFreeSpace sample_free_space(const Instance& instance,
                                   const Rational& pitch,
                                   bool eight_neighbors) {
  if (pitch <= 0) {
    throw std::invalid_argument("sample_free_space: pitch must be positive");
  }
  const RegionView view(instance.env);
  const auto& pts = instance.env.outer.pts;
  if (pts.empty()) {
    throw std::invalid_argument("sample_free_space: empty region");
  }

  Rational xmin = pts[0].x, xmax = pts[0].x, ymin = pts[0].y, ymax = pts[0].y;
  for (const Point& p : pts) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }

  SampledFreeSpace out;
  out.pitch = pitch;
  out.eight_neighbors = eight_neighbors;
  out.imin = lat_floor(xmin, pitch);
  out.jmin = lat_floor(ymin, pitch);
  const long long imax = lat_ceil(xmax, pitch);
  const long long jmax = lat_ceil(ymax, pitch);
  out.cols = static_cast<std::size_t>(imax - out.imin + 1);
  out.rows = static_cast<std::size_t>(jmax - out.jmin + 1);
  if (out.cols * out.rows > 16'777'216u) {
    throw std::invalid_argument(
        "sample_free_space: pitch resolves more than 16M lattice points");
  }

  const double fx0 = approx(xmin), fy0 = approx(ymin);
  const double fx1 = approx(xmax), fy1 = approx(ymax);
  const double scale = std::max({fx1 - fx0, fy1 - fy0, 1.0});
  const double margin = 1e-7 * scale;

  struct FWall {
    double ax, ay, bx, by;
  };
  std::vector<FWall> fwalls;
  fwalls.reserve(view.edges().size());
  for (const Segment& w : view.edges()) {
    fwalls.push_back({approx(w.a.x), approx(w.a.y), approx(w.b.x),
                      approx(w.b.y)});
  }

  std::vector<Rational> xs(out.cols), ys(out.rows);
  for (std::size_t i = 0; i < out.cols; ++i) {
    xs[i] = Rational(out.imin + static_cast<long long>(i)) * pitch;
  }
  for (std::size_t j = 0; j < out.rows; ++j) {
    ys[j] = Rational(out.jmin + static_cast<long long>(j)) * pitch;
  }

  out.node_at.assign(out.cols * out.rows, -1);
  std::vector<double> clearance;  // distance to the nearest wall, per node

  for (std::size_t j = 0; j < out.rows; ++j) {
    const double py = approx(ys[j]);
    for (std::size_t i = 0; i < out.cols; ++i) {
      const double px = approx(xs[i]);
      int crossings = 0;
      bool uncertain = false;
      double best2 = std::numeric_limits<double>::max();
      for (const FWall& w : fwalls) {
        best2 = std::min(best2, seg_dist2(px, py, w.ax, w.ay, w.bx, w.by));
        if (std::abs(w.ay - py) < margin || std::abs(w.by - py) < margin) {
          uncertain = true;
          continue;
        }
        if ((w.ay > py) != (w.by > py)) {
          const double xc = w.ax + (py - w.ay) * (w.bx - w.ax) / (w.by - w.ay);
          if (std::abs(xc - px) < margin) {
            uncertain = true;
          } else if (xc > px) {
            ++crossings;
          }
        }
      }
      bool inside;
      if (uncertain || best2 < margin * margin) {
        inside = view.locate({xs[i], ys[j]}) != Location::Outside;
      } else {
        inside = (crossings % 2) == 1;
      }
      if (!inside) continue;
      out.node_at[j * out.cols + i] = static_cast<int>(out.nodes.size());
      out.nodes.push_back({xs[i], ys[j]});
      clearance.push_back(best2 < margin * margin ? 0.0 : std::sqrt(best2));
    }
  }
  out.incident.resize(out.nodes.size());

  WallBuckets buckets(view.edges(), fx0, fy0, fx1, fy1);
  std::vector<Rational> cuts;
  const double pf = approx(pitch);
  const std::vector<std::pair<int, int>> offsets =
      eight_neighbors
          ? std::vector<std::pair<int, int>>{{1, 0}, {0, 1}, {1, 1}, {1, -1}}
          : std::vector<std::pair<int, int>>{{1, 0}, {0, 1}};

  for (std::size_t j = 0; j < out.rows; ++j) {
    for (std::size_t i = 0; i < out.cols; ++i) {
      const int u = out.node_at[j * out.cols + i];
      if (u < 0) continue;
      for (const auto& [di, dj] : offsets) {
        const int v = out.at(out.imin + static_cast<long long>(i) + di,
                             out.jmin + static_cast<long long>(j) + dj);
        if (v < 0) continue;
        const double len = pf * std::hypot(di, dj);
        bool keep;
        if (clearance[u] > len + margin && clearance[v] > len + margin) {
          keep = true;
        } else {
          const Segment s{out.nodes[u], out.nodes[v]};
          const double ax = approx(s.a.x), ay = approx(s.a.y);
          const double bx = approx(s.b.x), by = approx(s.b.y);
          keep = segment_inside(view, s, buckets.query(ax, ay, bx, by), cuts);
        }
        if (!keep) continue;
        const int eid = static_cast<int>(out.edges.size());
        out.edges.push_back({u, v});
        out.incident[u].push_back({eid, v});
        out.incident[v].push_back({eid, u});
      }
    }
  }
  return out;
}

Verifier::Verifier(const Instance& instance, VerifyOptions options)
    : instance_(instance),
      view_(instance.env),
      pitch_(options.pitch ? *options.pitch : default_pitch(instance)),
      steps_(options.time_steps_per_move),
      space_(sample_free_space(instance, pitch_, options.eight_neighbors)) {
  if (steps_ < 2) {
    throw std::invalid_argument(
        "Verifier: time_steps_per_move must be at least 2");
  }
  node_fx_.reserve(space_.nodes.size());
  node_fy_.reserve(space_.nodes.size());
  for (const Point& p : space_.nodes) {
    node_fx_.push_back(approx(p.x));
    node_fy_.push_back(approx(p.y));
  }

  switch (instance_.target.mode) {
    case TargetMode::Whole:
      for (std::size_t n = 0; n < space_.nodes.size(); ++n) {
        goal_nodes_.push_back(static_cast<int>(n));
      }
      break;
    case TargetMode::Region: {
      Region target;
      target.outer = instance_.target.ring;
      const RegionView tv(target);
      for (std::size_t n = 0; n < space_.nodes.size(); ++n) {
        if (tv.locate(space_.nodes[n]) != Location::Outside) {
          goal_nodes_.push_back(static_cast<int>(n));
        }
      }
      break;
    }
    case TargetMode::PointNeighborhood: {
      const Point& t = instance_.target.point;
      const Rational r2 = pitch_ * pitch_;
      for (std::size_t n = 0; n < space_.nodes.size(); ++n) {
        const Point d = space_.nodes[n] - t;
        if (dot(d, d) <= r2) goal_nodes_.push_back(static_cast<int>(n));
      }
      break;
    }
  }
  if (goal_nodes_.empty()) {
    base_warnings_.push_back(
        "the grid pitch is too coarse: no lattice node falls in the goal "
        "region, so the verdict is vacuous");
  }
  edge_stamp_.assign(space_.edges.size(), 0);
}

const Verifier::BeamHit& Verifier::footprint(std::size_t guard,
                                             const Direction& dir) const {
  const auto key = std::make_pair(guard, dir);
  if (const auto it = footprints_.find(key); it != footprints_.end()) {
    return it->second;
  }
  BeamHit out;
  const Point& g = instance_.guards[guard].position;
  if (const auto beam = view_.beam(g, dir)) {
    ++stamp_;
    const Rational& p = pitch_;
    const Rational two_p = 2 * p;
    const Rational xlo = std::min(beam->a.x, beam->b.x);
    const Rational xhi = std::max(beam->a.x, beam->b.x);
    const long long ilo =
        std::max(space_.imin, lat_floor(xlo, p) - 2);
    const long long ihi = std::min(
        space_.imin + static_cast<long long>(space_.cols) - 1,
        lat_ceil(xhi, p) + 2);
    const bool vertical = beam->a.x == beam->b.x;
    const Rational run = beam->b.x - beam->a.x;
    const Rational rise = beam->b.y - beam->a.y;
    for (long long i = ilo; i <= ihi; ++i) {
      const Rational xi = Rational(i) * p;
      Rational ylo, yhi;
      if (vertical) {
        ylo = std::min(beam->a.y, beam->b.y);
        yhi = std::max(beam->a.y, beam->b.y);
      } else {
        Rational t0 = (xi - two_p - beam->a.x) / run;
        Rational t1 = (xi + two_p - beam->a.x) / run;
        if (t1 < t0) std::swap(t0, t1);
        t0 = std::max(t0, Rational(0));
        t1 = std::min(t1, Rational(1));
        if (t1 < t0) continue;
        const Rational y0 = beam->a.y + t0 * rise;
        const Rational y1 = beam->a.y + t1 * rise;
        ylo = std::min(y0, y1);
        yhi = std::max(y0, y1);
      }
      const long long jlo =
          std::max(space_.jmin, lat_floor(ylo - two_p, p));
      const long long jhi = std::min(
          space_.jmin + static_cast<long long>(space_.rows) - 1,
          lat_ceil(yhi + two_p, p));
      for (long long j = jlo; j <= jhi; ++j) {
        const int id = space_.at(i, j);
        if (id < 0) continue;
        if (on_segment(space_.nodes[id], *beam)) out.nodes.push_back(id);
        for (const auto& [eid, other] : space_.incident[id]) {
          if (edge_stamp_[eid] == stamp_) continue;
          edge_stamp_[eid] = stamp_;
          const Segment es{space_.nodes[space_.edges[eid][0]],
                           space_.nodes[space_.edges[eid][1]]};
          if (intersect_segments(es, *beam).kind != SegmentMeet::Kind::None) {
            out.edges.push_back(eid);
          }
        }
      }
    }
  }
  return footprints_.emplace(key, std::move(out)).first->second;
}

std::vector<int> Verifier::swept_nodes(std::size_t guard, const Direction& a,
                                       const Direction& b, Sense sense) const {
  std::vector<int> out;
  if (a == b) return out;
  const Point& g = instance_.guards[guard].position;
  const double gx = approx(g.x), gy = approx(g.y);
  // Cone spanned counterclockwise from L to R; callers only pass wedges well
  // under a half turn, so two half-plane cuts describe it.
  const Direction& L = sense == Sense::CCW ? a : b;
  const Direction& R = sense == Sense::CCW ? b : a;
  const auto [lx, ly] = dir_float(L);
  const auto [rx, ry] = dir_float(R);
  const double pf = approx(pitch_);

  for (std::size_t ci = 0; ci < space_.cols; ++ci) {
    const long long i = space_.imin + static_cast<long long>(ci);
    const double vx = static_cast<double>(i) * pf - gx;
    const double m = 2.0 * pf + 1e-9 * (std::abs(vx) + 1.0);
    double lo = -std::numeric_limits<double>::max();
    double hi = std::numeric_limits<double>::max();
    bool ok = true;
    // cross(L, v) >= 0, with slack m
    if (lx > 1e-12) {
      lo = std::max(lo, (ly * vx - m) / lx);
    } else if (lx < -1e-12) {
      hi = std::min(hi, (ly * vx - m) / lx);
    } else if (-ly * vx < -m) {
      ok = false;
    }
    // cross(R, v) <= 0, with slack m
    if (ok) {
      if (rx > 1e-12) {
        hi = std::min(hi, (ry * vx + m) / rx);
      } else if (rx < -1e-12) {
        lo = std::max(lo, (ry * vx + m) / rx);
      } else if (-ry * vx > m) {
        ok = false;
      }
    }
    if (!ok || lo > hi) continue;
    // Clamp before the lattice cast: an unconstrained bound is +-DBL_MAX and
    // would overflow the integer conversion.
    const double ymin_f = static_cast<double>(space_.jmin) * pf;
    const double ymax_f =
        static_cast<double>(space_.jmin + static_cast<long long>(space_.rows) -
                            1) *
        pf;
    const double ya = std::clamp(gy + lo, ymin_f, ymax_f);
    const double yb = std::clamp(gy + hi, ymin_f, ymax_f);
    const long long jlo =
        std::max(space_.jmin, static_cast<long long>(std::floor(ya / pf)) - 1);
    const long long jhi = std::min(
        space_.jmin + static_cast<long long>(space_.rows) - 1,
        static_cast<long long>(std::ceil(yb / pf)) + 1);
    for (long long j = jlo; j <= jhi; ++j) {
      const int id = space_.at(i, j);
      if (id < 0) continue;
      const Point& p = space_.nodes[id];
      if (p == g) continue;
      if (!in_closed_arc(direction_from_to(g, p), a, b, sense)) continue;
      if (view_.sees(g, p)) out.push_back(id);
    }
  }
  return out;
}

Verifier::Timeline Verifier::build_timeline(const Schedule& schedule) const {
  const auto& guards = instance_.guards;
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t gi = 0; gi < guards.size(); ++gi) {
    index[guards[gi].id] = gi;
  }
  const auto lookup = [&](const std::string& id) -> std::size_t {
    const auto it = index.find(id);
    if (it == index.end()) {
      throw std::invalid_argument("simulate: unknown guard '" + id + "'");
    }
    return it->second;
  };

  if (schedule.initial.size() != guards.size()) {
    throw std::invalid_argument(
        "simulate: start posture must cover every guard");
  }
  std::vector<std::optional<Direction>> dirs(guards.size());
  for (const ScheduleEntry& entry : schedule.initial) {
    const std::size_t gi = lookup(entry.guard);
    if (dirs[gi]) {
      throw std::invalid_argument("simulate: duplicate start posture for '" +
                                  entry.guard + "'");
    }
    dirs[gi] = entry.dir;
  }

  Timeline tl;
  for (const auto& d : dirs) tl.initial.push_back(*d);
  std::vector<Direction> cur = tl.initial;

  for (const ScheduleMove& sm : schedule.moves) {
    const std::size_t gi = lookup(sm.guard);
    if (!(cur[gi] == sm.from_dir)) {
      throw std::invalid_argument("simulate: moves do not chain");
    }
    if (sm.from_dir == sm.to_dir) {
      throw std::invalid_argument("simulate: move with identical endpoints");
    }
    // Waypoints keep every interpolation gap under a quarter turn so chord
    // interpolation is monotone and wedges stay narrow.
    std::vector<Direction> wp{sm.from_dir};
    for (const Direction& o : octant_directions()) {
      if (in_open_arc(o, sm.from_dir, sm.to_dir, sm.sense)) wp.push_back(o);
    }
    std::sort(wp.begin() + 1, wp.end(),
              [&](const Direction& u, const Direction& v) {
                return rotation_less(sm.from_dir, sm.sense, u, v);
              });
    wp.push_back(sm.to_dir);

    const int gaps = static_cast<int>(wp.size()) - 1;
    const int per = (steps_ + gaps - 1) / gaps;
    Direction prev = sm.from_dir;
    for (int gidx = 0; gidx < gaps; ++gidx) {
      const Direction& P = wp[gidx];
      const Direction& Q = wp[gidx + 1];
      for (int s = 1; s <= per; ++s) {
        const Direction d =
            s == per ? Q
                     : make_direction(Rational(P.dx * (per - s) + Q.dx * s),
                                      Rational(P.dy * (per - s) + Q.dy * s));
        tl.intervals.push_back({gi, prev, d, sm.sense});
        prev = d;
      }
    }
    cur[gi] = sm.to_dir;
  }
  return tl;
}

VerificationReport Verifier::simulate(const Schedule& schedule) const {
  const Timeline tl = build_timeline(schedule);
  const std::size_t N = space_.nodes.size();
  const std::size_t E = space_.edges.size();
  const std::size_t K = tl.intervals.size();

  VerificationReport rep;
  rep.pitch = pitch_;
  rep.time_steps_per_move = steps_;
  rep.eight_neighbors = space_.eight_neighbors;
  rep.samples = K + 1;
  rep.warnings = base_warnings_;
  rep.method =
      "conservative sampled clearing: the turning beam's wedge between "
      "consecutive pose samples is computed exactly; wedge nodes carry "
      "separate not-yet-swept and already-swept states, links crossing the "
      "beam at exactly one bracketing sample attach to the matching state, "
      "links crossing it at both samples are impassable, and a node clears "
      "only when contamination cannot reach its end-of-interval state";
  if (N == 0) return rep;

  // Per-guard aim, updated as moves play out.
  std::vector<Direction> aim = tl.initial;
  // Aim of every guard just before each interval, for the certificate pass.
  std::vector<std::vector<Direction>> aim_before;
  aim_before.reserve(K);

  std::vector<std::uint8_t> C(N, 1), reached(N);
  std::vector<std::uint8_t> pk_hit(N, 0), mhp(N, 0), mhc(N, 0), wedge(N, 0);
  std::vector<std::uint8_t> pk_edge(E, 0), mep(E, 0), mec(E, 0);
  std::vector<int> pk_hit_list, pk_edge_list, wedge_list;

  for (std::size_t g = 0; g < instance_.guards.size(); ++g) {
    for (const int n : footprint(g, aim[g]).nodes) C[n] = 0;
  }
  std::vector<std::vector<std::uint64_t>> snaps;
  snaps.reserve(K + 1);
  snaps.push_back(pack_bits(C));

  // State 2n is a plain node or a wedge node not yet reached by the beam;
  // state 2n+1 is a wedge node the beam has already passed.
  std::vector<std::uint8_t> vis(2 * N, 0);
  std::vector<int> touched;
  std::deque<int> queue;

  const auto run_interval = [&](const std::vector<std::uint8_t>& seeds,
                                std::vector<int>* parent,
                                int start_state) -> int {
    // Returns a reached seed state when start_state >= 0 (backward trace),
    // otherwise floods from all seeds and fills `touched`.
    for (const int s : touched) vis[s] = 0;
    touched.clear();
    queue.clear();

    const auto admit = [&](int node, int phase, int from) -> bool {
      const int s = 2 * node + phase;
      if (vis[s]) return false;
      if (pk_hit[node]) return false;
      if (wedge[node]) {
        // Not-yet-swept occupancy must be beam-free at both bracketing
        // samples so certificate waypoints are always off every beam.
        if (phase == 0 && (mhp[node] || mhc[node])) return false;
        if (phase == 1 && mhc[node]) return false;
      } else if (phase == 1) {
        return false;
      }
      vis[s] = 1;
      touched.push_back(s);
      if (parent) (*parent)[s] = from;
      queue.push_back(s);
      return true;
    };

    if (start_state >= 0) {
      admit(start_state / 2, start_state % 2, -1);
    } else {
      for (std::size_t n = 0; n < N; ++n) {
        if (seeds[n]) admit(static_cast<int>(n), 0, -1);
      }
    }

    while (!queue.empty()) {
      const int s = queue.front();
      queue.pop_front();
      const int n = s / 2;
      const int phase = s % 2;
      // Backward trace: stop at any admissible seed state.
      if (start_state >= 0 && seeds[n] && phase == 0) return s;
      for (const auto& [eid, m] : space_.incident[n]) {
        if (pk_edge[eid]) continue;
        const bool bp = mep[eid], bc = mec[eid];
        if (bp && bc) continue;
        if (wedge[n]) {
          // A link crossing the trailing beam is only usable after the sweep
          // passes; one crossing the leading beam only before.
          if (phase == 0 && bp) continue;
          if (phase == 1 && bc) continue;
        }
        if (!wedge[m]) {
          admit(m, 0, s);
        } else if (wedge[n]) {
          admit(m, phase, s);
        } else if (bp && !bc) {
          admit(m, 1, s);
        } else if (bc && !bp) {
          admit(m, 0, s);
        } else {
          admit(m, 0, s);
          admit(m, 1, s);
        }
      }
    }
    return -1;
  };

  const auto load_interval = [&](std::size_t k,
                                 const std::vector<Direction>& pose) {
    const IntervalRec& iv = tl.intervals[k];
    for (const int n : pk_hit_list) pk_hit[n] = 0;
    for (const int e : pk_edge_list) pk_edge[e] = 0;
    pk_hit_list.clear();
    pk_edge_list.clear();
    for (std::size_t g = 0; g < instance_.guards.size(); ++g) {
      if (g == iv.guard) continue;
      const BeamHit& f = footprint(g, pose[g]);
      for (const int n : f.nodes) {
        if (!pk_hit[n]) {
          pk_hit[n] = 1;
          pk_hit_list.push_back(n);
        }
      }
      for (const int e : f.edges) {
        if (!pk_edge[e]) {
          pk_edge[e] = 1;
          pk_edge_list.push_back(e);
        }
      }
    }
    const BeamHit& fp = footprint(iv.guard, iv.prev_dir);
    const BeamHit& fc = footprint(iv.guard, iv.cur_dir);
    for (const int n : fp.nodes) mhp[n] = 1;
    for (const int e : fp.edges) mep[e] = 1;
    for (const int n : fc.nodes) mhc[n] = 1;
    for (const int e : fc.edges) mec[e] = 1;
    for (const int n : wedge_list) wedge[n] = 0;
    wedge_list = swept_nodes(iv.guard, iv.prev_dir, iv.cur_dir, iv.sense);
    for (const int n : wedge_list) wedge[n] = 1;
    return std::make_pair(&fp, &fc);
  };

  const auto unload_interval = [&](const BeamHit* fp, const BeamHit* fc) {
    for (const int n : fp->nodes) mhp[n] = 0;
    for (const int e : fp->edges) mep[e] = 0;
    for (const int n : fc->nodes) mhc[n] = 0;
    for (const int e : fc->edges) mec[e] = 0;
  };

  for (std::size_t k = 0; k < K; ++k) {
    const IntervalRec& iv = tl.intervals[k];
    aim_before.push_back(aim);
    const auto [fp, fc] = load_interval(k, aim);
    run_interval(C, nullptr, -1);
    std::fill(reached.begin(), reached.end(), 0);
    for (const int s : touched) {
      const int n = s / 2;
      if (wedge[n]) {
        if (s % 2 == 1) reached[n] = 1;
      } else {
        reached[n] = 1;
      }
    }
    C.swap(reached);
    unload_interval(fp, fc);
    aim[iv.guard] = iv.cur_dir;
    snaps.push_back(pack_bits(C));
  }

  for (std::size_t n = 0; n < N; ++n) {
    if (C[n]) rep.final_contaminated.push_back(static_cast<int>(n));
  }
  int evader = -1;
  for (const int gnode : goal_nodes_) {
    if (C[gnode]) {
      evader = gnode;
      break;
    }
  }
  if (evader < 0) return rep;

  rep.verdict = Verdict::EvasionFound;
  std::deque<EvasionStep> path;
  path.push_back({K, evader});
  std::vector<int> parent(2 * N, -1);
  std::vector<std::uint8_t> seed_bits(N);
  for (std::size_t k = K; k >= 1; --k) {
    const auto [fp, fc] = load_interval(k - 1, aim_before[k - 1]);
    for (std::size_t n = 0; n < N; ++n) {
      seed_bits[n] = bit_test(snaps[k - 1], n) ? 1 : 0;
    }
    const int head = path.front().node;
    const int start = wedge[head] ? 2 * head + 1 : 2 * head;
    const int found = run_interval(seed_bits, &parent, start);
    unload_interval(fp, fc);
    if (found < 0) {
      throw std::logic_error("simulate: certificate reconstruction failed");
    }
    // Parent pointers lead from the seed back to `start`, so this walk
    // already lists nodes in evader time order: seed first, head last. The
    // head entry at sample k is already on the path; prepend the seed at
    // sample k-1 plus any intermediate dashes at sample k.
    std::vector<EvasionStep> segment;
    for (int s = found; s != start; s = parent[s]) {
      const std::size_t sample = segment.empty() ? k - 1 : k;
      segment.push_back({sample, s / 2});
    }
    if (segment.empty()) segment.push_back({k - 1, head});
    path.insert(path.begin(), segment.begin(), segment.end());
  }
  rep.path.assign(path.begin(), path.end());
  return rep;
}

std::pair<VerificationReport, VerificationReport> Verifier::check_time_reversal(
    const Schedule& schedule) const {
  return {simulate(schedule), simulate(time_reversed(schedule))};
}

bool Verifier::path_is_certified(const Schedule& schedule,
                                 const std::vector<EvasionStep>& path) const {
  if (path.empty()) return false;
  const Timeline tl = build_timeline(schedule);
  const std::size_t K = tl.intervals.size();

  std::vector<std::vector<Direction>> pose(K + 1);
  pose[0] = tl.initial;
  for (std::size_t k = 0; k < K; ++k) {
    pose[k + 1] = pose[k];
    pose[k + 1][tl.intervals[k].guard] = tl.intervals[k].cur_dir;
  }

  const auto hit_at = [&](std::size_t s, int node) {
    for (std::size_t g = 0; g < instance_.guards.size(); ++g) {
      const auto beam = view_.beam(instance_.guards[g].position, pose[s][g]);
      if (beam && on_segment(space_.nodes[node], *beam)) return true;
    }
    return false;
  };
  const auto blocked_at = [&](std::size_t s, const Segment& es) {
    for (std::size_t g = 0; g < instance_.guards.size(); ++g) {
      const auto beam = view_.beam(instance_.guards[g].position, pose[s][g]);
      if (beam &&
          intersect_segments(es, *beam).kind != SegmentMeet::Kind::None) {
        return true;
      }
    }
    return false;
  };

  if (path.front().sample != 0 || path.back().sample != K) return false;
  if (!std::binary_search(goal_nodes_.begin(), goal_nodes_.end(),
                          path.back().node)) {
    return false;
  }
  for (const EvasionStep& e : path) {
    if (e.node < 0 || e.node >= static_cast<int>(space_.nodes.size())) {
      return false;
    }
    if (e.sample > K) return false;
    if (hit_at(e.sample, e.node)) return false;
  }
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const EvasionStep& e = path[i];
    const EvasionStep& f = path[i + 1];
    std::size_t interval_end;
    if (f.sample == e.sample + 1) {
      if (e.node == f.node) continue;
      interval_end = f.sample;
    } else if (f.sample == e.sample && f.sample >= 1) {
      interval_end = f.sample;
    } else {
      return false;
    }
    bool linked = false;
    for (const auto& [eid, other] : space_.incident[e.node]) {
      if (other != f.node) continue;
      linked = true;
      const Segment es{space_.nodes[e.node], space_.nodes[f.node]};
      if (blocked_at(interval_end - 1, es) && blocked_at(interval_end, es)) {
        return false;
      }
      break;
    }
    if (!linked) return false;
  }
  return true;
}

VerificationReport simulate(const Instance& instance, const Schedule& schedule,
                            const Rational& pitch, int time_steps_per_move) {
  VerifyOptions options;
  options.pitch = pitch;
  options.time_steps_per_move = time_steps_per_move;
  return Verifier(instance, options).simulate(schedule);
}

std::pair<VerificationReport, VerificationReport> check_time_reversal(
    const Instance& instance, const Schedule& schedule,
    const Rational& pitch) {
  VerifyOptions options;
  options.pitch = pitch;
  return Verifier(instance, options).check_time_reversal(schedule);
}

}  // namespace searchlight
