#include "searchlight/reducer.hpp"

#include "searchlight/region.hpp"

#include "json_util.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace searchlight {
namespace {

using boost::multiprecision::denominator;
using boost::multiprecision::numerator;

BigInt rat_floor(const Rational& q) {
  const BigInt n = numerator(q);
  const BigInt d = denominator(q);  // always positive
  BigInt f = n / d;
  if (f * d > n) --f;
  return f;
}

// Smallest multiple of step strictly greater than v.
Rational grid_next(const Rational& v, const Rational& step) {
  return Rational(rat_floor(v / step) + 1) * step;
}

// Smallest multiple of step greater than or equal to v.
Rational grid_ceil(const Rational& v, const Rational& step) {
  const Rational q = v / step;
  const BigInt f = rat_floor(q);
  if (Rational(f) == q) return v;
  return Rational(f + 1) * step;
}

[[noreturn]] void bail(const std::string& msg) {
  throw std::invalid_argument(msg);
}

std::string num(long long v) { return std::to_string(v); }

const Direction kEast{1, 0};
const Direction kWest{-1, 0};
const Direction kNorth{0, 1};
const Direction kSouth{0, -1};

}  // namespace

StaircaseResult staircase_heights(const std::vector<Rational>& mouth_west_xs,
                                  const UpperFrame& fr) {
  if (!(fr.grid > 0)) bail("staircase: grid must be positive");
  const Rational g = fr.grid;
  StaircaseResult out;
  if (mouth_west_xs.empty()) return out;

  const std::size_t n = mouth_west_xs.size();
  std::vector<Rational> u(n);
  Rational umax = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (!(mouth_west_xs[k] > fr.seam_x)) {
      bail("staircase: mouth " + std::to_string(k) +
           " is not east of the seam");
    }
    if (k > 0 && !(mouth_west_xs[k] >= mouth_west_xs[k - 1] + 12 * g)) {
      bail("staircase: mouths " + std::to_string(k - 1) + " and " +
           std::to_string(k) + " are closer than 12 grid steps");
    }
    u[k] = mouth_west_xs[k] - fr.seam_x;
    umax = std::max(umax, u[k]);
  }

  // Snap the border crossings to a dyadic grid fine enough that the three
  // lower bounds below can never collide with each other across mouths.
  const std::size_t bits = rational_bits(umax / g);
  const std::size_t shift = std::max<std::size_t>(6, bits + 1);
  const Rational sigma = g / Rational(BigInt(1) << shift);

  std::vector<Rational> hs(n);
  for (std::size_t k = 0; k < n; ++k) {
    // The beam from the pivot through mouth k's west lip crosses the target's
    // lower border at x: strictly east of the previous spill shadow, far
    // enough east that the lip sits at most three steps under the ceiling,
    // and (past the first mouth) low enough to keep the tops ascending.
    const Rational prev_c =
        k == 0 ? fr.target_left_x + 2 * g : out.shadow_x.back();
    Rational x = grid_next(prev_c, sigma);
    x = std::max(x, grid_ceil(fr.seam_x + Rational(2) * u[k] / 3, sigma));
    if (k > 0) {
      x = std::max(x, grid_next(fr.seam_x + 2 * g * u[k] / hs[k - 1], sigma));
    }
    const Rational h = 2 * g * u[k] / (x - fr.seam_x);
    const Rational top = fr.top_y - h;
    if (!(h > 2 * g && h <= 3 * g)) {
      bail("staircase: mouth " + std::to_string(k) +
           " falls out of the height band; spread the mouths further apart");
    }
    if (!(x < mouth_west_xs[k])) {
      bail("staircase: beam " + std::to_string(k) +
           " would cross the border east of its own mouth");
    }
    if (k > 0 && !(x > out.chord_cross_x.back() && top > out.attach_heights.back())) {
      bail("staircase: mouth " + std::to_string(k) +
           " breaks the ascending order");
    }
    if (!(top > fr.guard_y)) {
      bail("staircase: mouth " + std::to_string(k) + " sinks below the floor");
    }
    const Rational c =
        mouth_west_xs[k] +
        2 * g * (fr.target_bottom_y - fr.guard_y) / (top - fr.guard_y);
    if (!(c < mouth_west_xs[k] + 4 * g)) {
      bail("staircase: spill shadow of mouth " + std::to_string(k) +
           " reaches too far east");
    }
    // Every beam must clear the slabs of all towers west of its own.
    for (std::size_t j = 0; j < k; ++j) {
      if (!(h * (u[j] + 8 * g) < hs[j] * u[k])) {
        bail("staircase: beam " + std::to_string(k) +
             " would clip tower " + std::to_string(j));
      }
    }
    hs[k] = h;
    out.attach_heights.push_back(top);
    out.chord_cross_x.push_back(x);
    out.shadow_x.push_back(c);
  }
  return out;
}

namespace {

// ---------------------------------------------------------------------------
// Rectangle union -> region contour
// ---------------------------------------------------------------------------

struct Rect {
  Rational x0, y0, x1, y1;
};

Region region_from_rects(const std::vector<Rect>& rects) {
  std::vector<Rational> xs, ys;
  for (const Rect& r : rects) {
    xs.push_back(r.x0);
    xs.push_back(r.x1);
    ys.push_back(r.y0);
    ys.push_back(r.y1);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
  const std::size_t nx = xs.size() - 1;  // cells per row
  const std::size_t ny = ys.size() - 1;
  auto xi = [&](const Rational& v) {
    return static_cast<std::size_t>(
        std::lower_bound(xs.begin(), xs.end(), v) - xs.begin());
  };
  auto yi = [&](const Rational& v) {
    return static_cast<std::size_t>(
        std::lower_bound(ys.begin(), ys.end(), v) - ys.begin());
  };

  std::vector<char> air(nx * ny, 0);
  auto at = [&](std::size_t i, std::size_t j) -> char& {
    return air[j * nx + i];
  };
  for (const Rect& r : rects) {
    const std::size_t i0 = xi(r.x0), i1 = xi(r.x1);
    const std::size_t j0 = yi(r.y0), j1 = yi(r.y1);
    for (std::size_t j = j0; j < j1; ++j) {
      for (std::size_t i = i0; i < i1; ++i) at(i, j) = 1;
    }
  }

  // Single four-connected component.
  std::vector<char> seen(nx * ny, 0);
  std::vector<std::pair<std::size_t, std::size_t>> stack;
  std::size_t total = 0;
  for (std::size_t j = 0; j < ny && stack.empty(); ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      if (at(i, j)) {
        stack.push_back({i, j});
        seen[j * nx + i] = 1;
        break;
      }
    }
  }
  for (const char c : air) total += c;
  std::size_t reached = 0;
  while (!stack.empty()) {
    auto [i, j] = stack.back();
    stack.pop_back();
    ++reached;
    auto push = [&](std::size_t a, std::size_t b) {
      if (a < nx && b < ny && at(a, b) && !seen[b * nx + a]) {
        seen[b * nx + a] = 1;
        stack.push_back({a, b});
      }
    };
    if (i > 0) push(i - 1, j);
    push(i + 1, j);
    if (j > 0) push(i, j - 1);
    push(i, j + 1);
  }
  if (reached != total) {
    bail("layout: the open space is not connected (" + std::to_string(reached) +
         " of " + std::to_string(total) + " cells reachable)");
  }

  // A grid vertex whose four surrounding cells alternate air and solid
  // diagonally would pinch the contour into a self-touching polygon.
  for (std::size_t j = 1; j < ny; ++j) {
    for (std::size_t i = 1; i < nx; ++i) {
      const bool sw = at(i - 1, j - 1), se = at(i, j - 1);
      const bool nw = at(i - 1, j), ne = at(i, j);
      if ((sw && ne && !se && !nw) || (se && nw && !sw && !ne)) {
        bail("layout: air boxes touch only at the corner (" +
             format_rational(xs[i]) + ", " + format_rational(ys[j]) + ")");
      }
    }
  }

  // Directed boundary edges with the interior on the left, chained into
  // rings; the positive-area ring is the outer contour.
  auto solid = [&](long long i, long long j) {
    if (i < 0 || j < 0 || i >= static_cast<long long>(nx) ||
        j >= static_cast<long long>(ny)) {
      return true;
    }
    return at(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) == 0;
  };
  std::map<std::pair<std::size_t, std::size_t>,
           std::pair<std::size_t, std::size_t>>
      next;
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      if (!at(i, j)) continue;
      const long long li = static_cast<long long>(i);
      const long long lj = static_cast<long long>(j);
      if (solid(li, lj - 1)) next[{i, j}] = {i + 1, j};          // bottom: east
      if (solid(li, lj + 1)) next[{i + 1, j + 1}] = {i, j + 1};  // top: west
      if (solid(li - 1, lj)) next[{i, j + 1}] = {i, j};          // west: south
      if (solid(li + 1, lj)) next[{i + 1, j}] = {i + 1, j + 1};  // east: north
    }
  }

  std::vector<Ring> rings;
  std::set<std::pair<std::size_t, std::size_t>> used;
  for (const auto& [start, ignored] : next) {
    (void)ignored;
    if (used.count(start)) continue;
    Ring ring;
    auto cur = start;
    do {
      used.insert(cur);
      ring.pts.push_back(Point{xs[cur.first], ys[cur.second]});
      const auto it = next.find(cur);
      if (it == next.end()) bail("layout: boundary chain broke");
      cur = it->second;
    } while (cur != start);
    // Merge collinear runs (all edges are axis parallel).
    Ring slim;
    const std::size_t n = ring.pts.size();
    for (std::size_t k = 0; k < n; ++k) {
      const Point& prev = ring.pts[(k + n - 1) % n];
      const Point& here = ring.pts[k];
      const Point& nxt = ring.pts[(k + 1) % n];
      const bool straight = (prev.x == here.x && here.x == nxt.x) ||
                            (prev.y == here.y && here.y == nxt.y);
      if (!straight) slim.pts.push_back(here);
    }
    rings.push_back(std::move(slim));
  }

  Region region;
  bool have_outer = false;
  for (Ring& r : rings) {
    if (ring_area2(r) > 0) {
      if (have_outer) bail("layout: more than one outer contour");
      region.outer = std::move(r);
      have_outer = true;
    } else {
      region.holes.push_back(std::move(r));
    }
  }
  if (!have_outer) bail("layout: no outer contour");
  return region;
}

// ---------------------------------------------------------------------------
// Machine shape
// ---------------------------------------------------------------------------

int real_end_count(const NclEdge& e) {
  return (e.first >= 0 ? 1 : 0) + (e.second >= 0 ? 1 : 0);
}

void require_compilable(const EenclInstance& ee) {
  std::vector<std::string> errs = validate_machine(ee.machine);
  {
    std::vector<std::string> more = validate_eencl(ee);
    errs.insert(errs.end(), more.begin(), more.end());
  }
  if (!errs.empty()) {
    std::string joined;
    for (const std::string& e : errs) {
      if (!joined.empty()) joined += "; ";
      joined += e;
    }
    bail("reduce: " + joined);
  }
  const NclMachine& m = ee.machine;
  if (m.vertices.empty()) bail("reduce: machine has no vertices");
  std::vector<int> degree(m.vertices.size(), 0);
  for (std::size_t i = 0; i < m.edges.size(); ++i) {
    const NclEdge& e = m.edges[i];
    if (e.first < 0 && e.second < 0) {
      bail("reduce: edge " + std::to_string(i) + " touches no vertex");
    }
    if (e.first >= 0) ++degree[e.first];
    if (e.second >= 0) ++degree[e.second];
  }
  for (std::size_t v = 0; v < degree.size(); ++v) {
    if (degree[v] != 3) {
      bail("reduce: vertex " + std::to_string(v) + " has degree " +
           std::to_string(degree[v]) + "; every vertex needs degree exactly 3");
    }
  }
  if (ee.a.edge == ee.b.edge) {
    bail("reduce: the opening and closing edges must be distinct");
  }
  for (const EdgeTarget* t : {&ee.a, &ee.b}) {
    const NclEdge& e = m.edges[t->edge];
    if (real_end_count(e) != 1) {
      bail("reduce: edge " + std::to_string(t->edge) +
           " must have exactly one plugged end, found " +
           std::to_string(real_end_count(e)));
    }
    const int side = t->toward == Orientation::ToFirst ? e.first : e.second;
    if (side >= 0) {
      bail("reduce: the marked move on edge " + std::to_string(t->edge) +
           " must point toward its free end");
    }
  }
}

void require_params(const LayoutParams& p) {
  const Rational& g = p.grid_pitch;
  if (!(g > 0)) bail("params: grid_pitch must be positive");
  if (p.corridor_width != 4 * g) {
    bail("params: corridor_width must be exactly 4 grid steps");
  }
  if (p.pipe_width != 2 * g) bail("params: pipe_width must be exactly 2 grid steps");
  if (!(p.pipe_width < p.corridor_width)) {
    bail("params: pipe_width must be smaller than corridor_width");
  }
  if (p.nook_width != 2 * g) bail("params: nook_width must be exactly 2 grid steps");
  if (!(p.nook_depth >= 2 * g)) {
    bail("params: nook_depth must be at least 2 grid steps");
  }
  const Rational slots = p.vertex_slot_spacing / g;
  const BigInt f = rat_floor(slots);
  if (Rational(f) != slots || f < 8 || f % 2 != 0) {
    bail("params: vertex_slot_spacing must be an even grid multiple of at least 8 steps");
  }
}

// ---------------------------------------------------------------------------
// The builder
// ---------------------------------------------------------------------------

struct EndRef {
  int edge = 0;
  int end = 0;  // 0 = first, 1 = second
  bool operator<(const EndRef& o) const {
    return edge != o.edge ? edge < o.edge : end < o.end;
  }
};

constexpr int kOpening = 0, kClosing = 1, kStub = 2, kThrough = 3;

struct EdgeW {
  int kind = kStub;
  int band = 0;
  long long T = 0;
  bool real_f = false, real_s = false;
  std::optional<long long> pf, ps;  // drop west lip per plugged end
  long long s0 = 0, s1 = 0;
  long long guard_x = 0;  // track guard
  std::vector<std::pair<long long, long long>> extra_cuts;  // foreign windows
};

struct MouthW {
  long long mx = 0;
  int vertex = 0;
  int slot = 0;
  std::vector<EndRef> feeders;
  std::string pipe_id, nook;
};

struct JointW {
  long long jx = 0;
  int edge = 0, end = 0, rank = 0;
  long long ly = 0;
  std::string pipe_id, nook;
};

struct VertSlab {
  long long x0 = 0, x1 = 0;
  int src = 0;       // owning edge
  long long top = 0; // rises from T[src] + 4 up to here
  bool is_drop = true;
};

struct Builder {
  const EenclInstance& ee;
  const NclMachine& m;
  LayoutParams prm;
  Rational G;
  Rational d0;   // nook depth in steps
  long long S;   // lane pitch in steps

  int E = 0, V = 0;
  long long J = 0, K = 0;
  long long Hw = 0, L0 = 0, LT = 0, ROW0 = 0, ROW1 = 0, A0 = 0, RY1 = 0,
            TY0 = 0, XR = 0, JX = 0, FX = 0, RX1 = 0;
  static constexpr long long DX = 14, TX0 = 18, VX0 = 22;

  std::vector<EdgeW> ew;
  std::vector<long long> VX;
  std::vector<std::vector<EndRef>> inc;
  std::vector<MouthW> mouths;
  std::vector<JointW> joints;
  std::vector<VertSlab> verts;
  StaircaseResult stair;

  std::shared_ptr<LayoutPlan> plan = std::make_shared<LayoutPlan>();
  Instance inst;
  GadgetMetadata meta;

  explicit Builder(const EenclInstance& e, const LayoutParams& p)
      : ee(e), m(e.machine), prm(p), G(p.grid_pitch) {
    d0 = p.nook_depth / G;
    S = static_cast<long long>(rat_floor(p.vertex_slot_spacing / G));
  }

  Rational w(long long steps) const { return Rational(steps) * G; }
  Point P(long long x, long long y) const { return Point{w(x), w(y)}; }
  Point PR(const Rational& x, const Rational& y) const {
    return Point{x * G, y * G};
  }

  long long port(const EndRef& r) const {
    return r.end == 0 ? *ew[r.edge].pf : *ew[r.edge].ps;
  }

  void layout_frame() {
    E = static_cast<int>(m.edges.size());
    V = static_cast<int>(m.vertices.size());
    ew.resize(E);
    for (int e = 0; e < E; ++e) {
      ew[e].real_f = m.edges[e].first >= 0;
      ew[e].real_s = m.edges[e].second >= 0;
      const int reals = (ew[e].real_f ? 1 : 0) + (ew[e].real_s ? 1 : 0);
      if (e == ee.a.edge) ew[e].kind = kOpening;
      else if (e == ee.b.edge) ew[e].kind = kClosing;
      else ew[e].kind = reals == 2 ? kThrough : kStub;
      J += reals;
    }
    // Corridor bands: the opening edge gets the lowest track, the rest stack
    // above it in index order.
    int next_band = 1;
    for (int e = 0; e < E; ++e) {
      ew[e].band = e == ee.a.edge ? 0 : next_band++;
      ew[e].T = 2 + 6 * ew[e].band;
    }
    Hw = 6 * E;
    L0 = Hw + 2;
    LT = L0 + S * (J - 1) + 2;
    ROW0 = LT + 6;
    ROW1 = ROW0 + 4;
    A0 = ROW1 + 2;
    RY1 = ROW1 + 12;
    TY0 = RY1 - 2;

    VX.resize(V);
    for (int v = 0; v < V; ++v) VX[v] = VX0 + 52 * v;

    // Ports: each chamber's floor apertures sit on three fixed slots.
    inc.assign(V, {});
    for (int e = 0; e < E; ++e) {
      if (ew[e].real_f) inc[m.edges[e].first].push_back({e, 0});
      if (ew[e].real_s) inc[m.edges[e].second].push_back({e, 1});
    }
    for (int v = 0; v < V; ++v) {
      std::sort(inc[v].begin(), inc[v].end());
      std::vector<EndRef> order;  // slot 0, 1, 2
      if (m.vertices[v].kind == VertexKind::And) {
        const int out = m.vertices[v].output_edge;
        std::vector<EndRef> rest;
        bool picked = false;
        for (const EndRef& r : inc[v]) {
          if (!picked && r.edge == out) {
            order.push_back(r);
            picked = true;
          } else {
            rest.push_back(r);
          }
        }
        if (!picked) bail("reduce: vertex " + num(v) + " is missing its output edge");
        order.insert(order.end(), rest.begin(), rest.end());
      } else {
        order = inc[v];
      }
      for (int s = 0; s < 3; ++s) {
        const long long px = VX[v] + 4 + 16 * s;
        const EndRef& r = order[s];
        (r.end == 0 ? ew[r.edge].pf : ew[r.edge].ps) = px;
      }
      // Mouths above the roof floor: one per And slot, one shared for an Or.
      if (m.vertices[v].kind == VertexKind::And) {
        static const char* names[3] = {"out", "in1", "in2"};
        for (int s = 0; s < 3; ++s) {
          MouthW mo;
          mo.mx = VX[v] + 2 + 16 * s;
          mo.vertex = v;
          mo.slot = s;
          mo.feeders = {order[s]};
          mo.pipe_id = "pipe.v" + num(v) + "." + names[s];
          mo.nook = "nook.v" + num(v) + "." + names[s];
          mouths.push_back(std::move(mo));
        }
      } else {
        MouthW mo;
        mo.mx = VX[v] + 2;
        mo.vertex = v;
        mo.slot = 0;
        mo.feeders = order;
        mo.pipe_id = "pipe.v" + num(v);
        mo.nook = "nook.v" + num(v);
        mouths.push_back(std::move(mo));
      }
    }
    K = static_cast<long long>(mouths.size());

    // Joints: every plugged corridor end drains into its own lane; the
    // opening edge's joint hugs the west wall.
    for (int e = 0; e < E; ++e) {
      for (int end = 0; end < 2; ++end) {
        if (!(end == 0 ? ew[e].real_f : ew[e].real_s)) continue;
        JointW j;
        j.edge = e;
        j.end = end;
        j.jx = e == ee.a.edge ? 16 : port({e, end}) + 6;
        j.pipe_id = "pipe.e" + num(e) + ".j" + num(end);
        j.nook = "nook.e" + num(e) + ".j" + num(end);
        joints.push_back(std::move(j));
      }
    }
    std::sort(joints.begin(), joints.end(),
              [](const JointW& a, const JointW& b) { return a.jx < b.jx; });
    for (std::size_t r = 0; r + 1 < joints.size(); ++r) {
      if (joints[r].jx == joints[r + 1].jx) bail("layout: joint slits collide");
    }
    for (std::size_t r = 0; r < joints.size(); ++r) {
      joints[r].rank = static_cast<int>(r);
      joints[r].ly = L0 + S * static_cast<long long>(r);
    }

    // Spans.
    for (int e = 0; e < E; ++e) {
      EdgeW& x = ew[e];
      switch (x.kind) {
        case kOpening:
          x.s0 = 2;
          x.s1 = (x.real_f ? *x.pf : *x.ps) + 4;
          break;
        case kClosing:
          x.s0 = x.real_f ? *x.pf : *x.ps;
          x.s1 = 0;  // runs to the finishing cell; filled below
          break;
        case kStub: {
          const long long p = x.real_f ? *x.pf : *x.ps;
          x.s0 = p;
          x.s1 = p + 12;
          break;
        }
        case kThrough:
          x.s0 = std::min(*x.pf, *x.ps);
          x.s1 = std::max(*x.pf, *x.ps) + 12;
          break;
      }
    }

    // Vertical slabs: drops under every port, legs under every joint.
    for (int e = 0; e < E; ++e) {
      for (int end = 0; end < 2; ++end) {
        if (!(end == 0 ? ew[e].real_f : ew[e].real_s)) continue;
        const long long px = port({e, end});
        verts.push_back({px, px + 4, e, ROW0, true});
      }
    }
    for (const JointW& j : joints) {
      verts.push_back({j.jx, j.jx + 2, j.edge, j.ly, false});
    }

    // Any vertical that overlaps a foreign track's span must pierce it with
    // two clear steps of ceiling on both sides; nudge spans outward until
    // every overlap is clean. (The port lattice keeps offsets multiples of
    // four, so in practice this settles immediately.)
    for (int pass = 0; pass < 100; ++pass) {
      bool changed = false;
      for (int e = 0; e < E; ++e) {
        EdgeW& x = ew[e];
        if (x.kind == kClosing) continue;
        for (const VertSlab& vs : verts) {
          if (vs.src == e || ew[vs.src].band >= x.band) continue;
          if (vs.x1 <= x.s0 || vs.x0 >= x.s1) continue;
          if (vs.x0 >= x.s0 + 2 && vs.x1 <= x.s1 - 2) continue;
          if (vs.x0 < x.s0 + 2) x.s0 -= 4;
          if (vs.x1 > x.s1 - 2) x.s1 += 4;
          if (x.s0 < 2) bail("layout: corridor " + num(e) + " ran off the west wall");
          changed = true;
        }
      }
      if (!changed) break;
      if (pass == 99) bail("layout: corridor spans failed to settle");
    }

    // East frame.
    long long xr = VX.back() + 44;
    const long long pa = ew[ee.a.edge].real_f ? *ew[ee.a.edge].pf : *ew[ee.a.edge].ps;
    const long long pb = ew[ee.b.edge].s0;
    xr = std::max(xr, pa + 4);
    xr = std::max(xr, pb + 8);
    for (int e = 0; e < E; ++e) {
      if (e != ee.b.edge) xr = std::max(xr, ew[e].s1);
    }
    for (const JointW& j : joints) xr = std::max(xr, j.jx + 2);
    XR = xr + 4;
    JX = std::max(mouths.back().mx + 8, XR);
    FX = JX + 8;
    RX1 = FX + 6;
    ew[ee.b.edge].s1 = FX;

    // Confirm every remaining overlap is clean (the closing corridor was
    // excluded from the nudge loop; its span is pinned by the frame).
    for (int e = 0; e < E; ++e) {
      const EdgeW& x = ew[e];
      for (const VertSlab& vs : verts) {
        if (vs.src == e || ew[vs.src].band >= x.band) continue;
        if (vs.x1 <= x.s0 || vs.x0 >= x.s1) continue;
        if (!(vs.x0 >= x.s0 + 2 && vs.x1 <= x.s1 - 2)) {
          bail("layout: a shaft straddles the end of corridor " + num(e));
        }
        x.guard_x;  // no-op; keeps clang-tidy quiet about const loop
      }
    }

    // Rooftop staircase.
    std::vector<Rational> mouth_xs;
    for (const MouthW& mo : mouths) mouth_xs.push_back(w(mo.mx));
    const UpperFrame fr{w(DX), w(RY1), w(TY0), w(A0), w(TX0), G};
    stair = staircase_heights(mouth_xs, fr);
  }

  // Windows cut into a track's ceiling: its own apertures plus any foreign
  // shaft piercing it. Used to place the track guard on solid ceiling.
  std::vector<std::pair<long long, long long>> ceiling_cuts(int e) const {
    std::vector<std::pair<long long, long long>> cuts;
    const EdgeW& x = ew[e];
    if (x.pf) cuts.push_back({*x.pf, *x.pf + 4});
    if (x.ps) cuts.push_back({*x.ps, *x.ps + 4});
    for (const JointW& j : joints) {
      if (j.edge == e) cuts.push_back({j.jx, j.jx + 2});
    }
    if (x.kind == kOpening) {
      cuts.push_back({2, 6});    // west riser
      cuts.push_back({8, 10});   // west relief pipe
    }
    if (x.kind == kClosing) {
      cuts.push_back({JX, JX + 4});      // east riser
      cuts.push_back({FX - 2, FX});      // east relief shaft
    }
    for (const VertSlab& vs : verts) {
      if (vs.src == e || ew[vs.src].band >= x.band) continue;
      if (vs.x1 <= x.s0 || vs.x0 >= x.s1) continue;
      cuts.push_back({vs.x0, vs.x1});
    }
    std::sort(cuts.begin(), cuts.end());
    return cuts;
  }

  void place_track_guards() {
    for (int e = 0; e < E; ++e) {
      EdgeW& x = ew[e];
      long long anchor = 0;
      switch (x.kind) {
        case kOpening: anchor = x.real_f ? *x.pf : *x.ps; break;
        case kClosing: anchor = x.s0 + 6; break;  // its joint slit
        case kStub: anchor = x.s1; break;
        case kThrough: anchor = std::max(*x.pf, *x.ps); break;
      }
      const auto cuts = ceiling_cuts(e);
      long long best_u = 0, best_v = 0, cur = x.s0;
      for (const auto& [c0, c1] : cuts) {
        if (c0 > anchor) break;
        if (cur < c0 && c0 <= anchor) { best_u = cur; best_v = c0; }
        cur = std::max(cur, c1);
      }
      if (cur < anchor) { best_u = cur; best_v = anchor; }
      if (best_u >= best_v) bail("layout: no solid ceiling for corridor " + num(e));
      x.guard_x = (best_u + best_v) / 2;
    }
  }

  std::vector<Rect> air_rects() const {
    std::vector<Rect> rs;
    auto add = [&](const Rational& x0, const Rational& y0, const Rational& x1,
                   const Rational& y1) {
      if (x0 < x1 && y0 < y1) rs.push_back({x0 * G, y0 * G, x1 * G, y1 * G});
    };
    auto addi = [&](long long x0, long long y0, long long x1, long long y1) {
      add(Rational(x0), Rational(y0), Rational(x1), Rational(y1));
    };

    const long long Ta = ew[ee.a.edge].T;
    const long long Tb = ew[ee.b.edge].T;

    addi(0, Hw, 14, RY1);                       // west well
    addi(2, Ta + 4, 6, Hw);                     // west riser
    addi(8, Ta + 4, 10, Hw);                    // west relief pipe
    addi(10, Hw - 6, 12, Hw - 4);               // west pipe nook tunnel
    add(Rational(12), Rational(Hw - 4) - 2 * d0, Rational(14), Rational(Hw - 4));

    for (int e = 0; e < E; ++e) {               // tracks
      addi(ew[e].s0, ew[e].T, ew[e].s1, ew[e].T + 4);
    }
    for (const VertSlab& vs : verts) {          // drops and legs
      addi(vs.x0, ew[vs.src].T + 4, vs.x1, vs.top);
    }
    for (const JointW& j : joints) {            // lanes and their nooks
      addi(14, j.ly, j.jx + 2, j.ly + 2);
      addi(j.jx, j.ly + 2, j.jx + 2, j.ly + 4);
      add(Rational(j.jx), Rational(j.ly + 4), Rational(j.jx + 4),
          Rational(j.ly + 2) + 2 * d0);
    }
    for (int v = 0; v < V; ++v) {               // chambers
      addi(VX[v], ROW0, VX[v] + 44, ROW1);
    }
    for (std::size_t k = 0; k < mouths.size(); ++k) {  // shafts and nooks
      const long long mx = mouths[k].mx;
      const Rational H = stair.attach_heights[k] / G;
      add(Rational(mx), Rational(ROW1), Rational(mx + 2), H);
      add(Rational(mx + 2), H - 4, Rational(mx + 4), H - 2);
      add(Rational(mx + 4), H - 4 - 2 * d0, Rational(mx + 6), H - 2);
    }
    // Rooftop strip between and above the towers.
    add(Rational(14), Rational(A0), Rational(mouths.front().mx - 2),
        Rational(RY1));
    for (std::size_t k = 0; k < mouths.size(); ++k) {
      const long long mx = mouths[k].mx;
      const Rational H = stair.attach_heights[k] / G;
      add(Rational(mx - 2), H, Rational(mx + 8), Rational(RY1));
      const long long east =
          k + 1 < mouths.size() ? mouths[k + 1].mx - 2 : JX;
      add(Rational(mx + 8), Rational(A0), Rational(east), Rational(RY1));
    }
    // Seam nook between two lanes.
    {
      const long long mid = std::clamp<long long>(J / 2, 1, J - 1);
      const long long h1 = L0 + S * mid + 5;
      addi(14, h1, 16, h1 + 2);
      add(Rational(16), Rational(h1) - d0, Rational(18), Rational(h1 + 2));
    }
    addi(JX, Tb + 4, JX + 4, TY0);              // east riser
    addi(FX - 2, Tb + 4, FX, TY0);              // east relief shaft
    addi(FX, TY0 - 6, FX + 2, TY0 - 4);         // east pipe nook tunnel
    add(Rational(FX + 2), Rational(TY0 - 4) - 2 * d0, Rational(FX + 4),
        Rational(TY0 - 4));
    addi(FX, TY0, FX + 2, RY1);                 // finishing nook tunnel
    add(Rational(FX + 2), Rational(TY0) - d0, Rational(FX + 4), Rational(RY1));
    addi(JX, TY0, FX, RY1);                     // finishing cell
    return rs;
  }

  // ---- guards ----

  struct PendingGuard {
    Guard g;
    std::string role;
  };
  std::vector<PendingGuard> pending;

  void emit(const std::string& id, Point pos, const std::string& role,
            std::optional<Direction> pin = std::nullopt) {
    pending.push_back({Guard{id, pos, pin}, role});
  }

  bool end_is_east(int e, int end) const {
    const EdgeW& x = ew[e];
    switch (x.kind) {
      case kOpening: return (end == 0) == x.real_f;   // plugged end east
      case kClosing: return (end == 0) != x.real_f;   // plugged end west
      case kStub: return (end == 0) != x.real_f;      // plugged end west
      default: break;
    }
    const long long px = end == 0 ? *x.pf : *x.ps;
    return px == std::max(*x.pf, *x.ps);
  }

  LayoutPlan::CorridorGuard make_port_guard(int e, int end, int index) const {
    const long long px = port({e, end});
    // The raised aim threads the slit pocket's east lip; find the mouth fed
    // by this end.
    const MouthW* mo = nullptr;
    for (const MouthW& cand : mouths) {
      for (const EndRef& r : cand.feeders) {
        if (r.edge == e && r.end == end) mo = &cand;
      }
    }
    if (mo == nullptr) bail("layout: port without a mouth");
    LayoutPlan::CorridorGuard g;
    g.id = "e" + num(e) + ".s" + num(index);
    g.edge = e;
    g.index = index;
    g.role = "corridor port";
    g.pos = P(px + 4, ROW0);
    const Direction chord =
        make_direction(w(mo->mx + 2) - w(px + 4), w(ROW1) - w(ROW0));
    if (end == 0) {
      g.dir_to_first = chord;
      g.dir_to_second = kSouth;
      g.sense_first_to_second = Sense::CCW;
    } else {
      g.dir_to_first = kSouth;
      g.dir_to_second = chord;
      g.sense_first_to_second = Sense::CW;
    }
    return g;
  }

  LayoutPlan::CorridorGuard make_track_guard(int e, int index) const {
    const EdgeW& x = ew[e];
    LayoutPlan::CorridorGuard g;
    g.id = "e" + num(e) + ".s" + num(index);
    g.edge = e;
    g.index = index;
    g.role = "corridor track";
    g.pos = P(x.guard_x, x.T + 4);
    g.dir_to_first = end_is_east(e, 0) ? kEast : kWest;
    g.dir_to_second = end_is_east(e, 1) ? kEast : kWest;
    g.sense_first_to_second =
        g.dir_to_second == kWest ? Sense::CW : Sense::CCW;
    return g;
  }

  std::vector<LayoutPlan::CorridorGuard> corridor_guards(int e) const {
    const EdgeW& x = ew[e];
    std::vector<LayoutPlan::CorridorGuard> gs;
    auto riser_a = [&](int index) {
      LayoutPlan::CorridorGuard g;
      g.id = "e" + num(e) + ".s" + num(index);
      g.edge = e;
      g.index = index;
      g.role = "corridor west riser";
      g.pos = P(6, Hw);
      const bool vertex_first = x.real_f;
      g.dir_to_first = vertex_first ? kSouth : kEast;
      g.dir_to_second = vertex_first ? kEast : kSouth;
      g.sense_first_to_second = vertex_first ? Sense::CCW : Sense::CW;
      return g;
    };
    auto riser_b = [&](int index) {
      LayoutPlan::CorridorGuard g;
      g.id = "e" + num(e) + ".s" + num(index);
      g.edge = e;
      g.index = index;
      g.role = "corridor east splitter";
      g.pos = P(JX + 4, TY0);
      g.dir_to_first = kWest;
      g.dir_to_second = kWest;
      g.sense_first_to_second = Sense::CW;
      g.pinned = true;
      return g;
    };
    switch (x.kind) {
      case kOpening:
        if (x.real_f) {
          gs = {make_port_guard(e, 0, 0), make_track_guard(e, 1), riser_a(2)};
        } else {
          gs = {riser_a(0), make_track_guard(e, 1), make_port_guard(e, 1, 2)};
        }
        break;
      case kClosing:
        if (x.real_f) {
          gs = {make_port_guard(e, 0, 0), make_track_guard(e, 1), riser_b(2)};
        } else {
          gs = {riser_b(0), make_track_guard(e, 1), make_port_guard(e, 1, 2)};
        }
        break;
      case kStub:
        if (x.real_f) {
          gs = {make_port_guard(e, 0, 0), make_track_guard(e, 1)};
        } else {
          gs = {make_track_guard(e, 0), make_port_guard(e, 1, 1)};
        }
        break;
      case kThrough:
        gs = {make_port_guard(e, 0, 0), make_track_guard(e, 1),
              make_port_guard(e, 1, 2)};
        break;
    }
    return gs;
  }

  void build() {
    layout_frame();
    place_track_guards();

    inst.env = region_from_rects(air_rects());

    const long long Ta = ew[ee.a.edge].T;
    const long long Tb = ew[ee.b.edge].T;

    plan->grid = G;
    plan->params = prm;
    plan->machine_edges = E;
    plan->corridor_ends = J;
    plan->tower_count = K;
    plan->well_floor_y = Hw;
    plan->lane0_y = L0;
    plan->lanes_top_y = LT;
    plan->chamber_floor_y = ROW0;
    plan->chamber_top_y = ROW1;
    plan->roof_floor_y = A0;
    plan->top_y = RY1;
    plan->target_bottom_y = TY0;
    plan->seam_x = DX;
    plan->target_west_x = TX0;
    plan->east_reach_x = XR;
    plan->cell_west_x = JX;
    plan->cell_east_x = FX;
    plan->bbox_east_x = RX1;

    // Corridor guards, edge by edge.
    plan->edges.resize(E);
    for (int e = 0; e < E; ++e) {
      LayoutPlan::EdgePlan& ep = plan->edges[e];
      ep.band = ew[e].band;
      ep.floor_y = ew[e].T;
      ep.span_w = ew[e].s0;
      ep.span_e = ew[e].s1;
      ep.port_first = ew[e].pf;
      ep.port_second = ew[e].ps;
      ep.guards = corridor_guards(e);
      for (const auto& g : ep.guards) {
        emit(g.id, g.pos, g.role,
             g.pinned ? std::optional<Direction>(g.dir_to_first) : std::nullopt);
        if (g.role == "corridor west riser") plan->a_rise_guard = g.id;
        if (g.role == "corridor east splitter") plan->b_rise_guard = g.id;
      }
    }

    // Tower pipes.
    for (std::size_t k = 0; k < mouths.size(); ++k) {
      const MouthW& mo = mouths[k];
      LayoutPlan::PipeTower t;
      t.vertex = mo.vertex;
      t.slot = mo.slot;
      t.guard = mo.pipe_id;
      t.nook = mo.nook;
      t.mouth_w = mo.mx;
      t.height = stair.attach_heights[k];
      t.chord_cross_x = stair.chord_cross_x[k];
      t.shadow_x = stair.shadow_x[k];
      const Rational h = w(RY1) - t.height;
      const Rational u = w(mo.mx) - w(DX);
      t.cap_land_y = t.height - 2 * G * h / u;
      t.cap_dir = make_direction(u, t.height - w(RY1));
      for (const EndRef& r : mo.feeders) t.feeders.push_back({r.edge, r.end});
      plan->towers.push_back(t);
      emit(mo.pipe_id, P(mo.mx + 2, A0), "pipe capper");
    }

    // Joint pipes (pinned elbows).
    for (const JointW& j : joints) {
      LayoutPlan::Joint pj;
      pj.edge = j.edge;
      pj.end = j.end;
      pj.slit_w = j.jx;
      pj.rank = j.rank;
      pj.lane_y = j.ly;
      pj.guard = j.pipe_id;
      pj.nook = j.nook;
      plan->joints.push_back(pj);
      emit(j.pipe_id, P(j.jx, j.ly), "pipe elbow", kSouth);
    }

    // Relief pipe keepers.
    plan->ga_pos = P(10, Ta + 6);
    plan->gb_pos = P(FX, Tb + 6);
    emit("pipe.ga", plan->ga_pos, "pipe keeper west", kSouth);
    emit("pipe.gb", plan->gb_pos, "pipe keeper east");

    // Chamber guards.
    for (int v = 0; v < V; ++v) {
      if (m.vertices[v].kind != VertexKind::And) continue;
      LayoutPlan::ChamberGuard c;
      c.vertex = v;
      c.id = "v" + num(v) + ".c";
      c.pos = P(VX[v] + 10, ROW1);
      plan->chamber_guards.push_back(c);
      emit(c.id, c.pos, "chamber seal");
    }

    // Crossing stations: lanes pierced by drops, then tracks pierced by
    // foreign shafts.
    std::vector<LayoutPlan::Crossing> lane_x, band_x;
    for (const JointW& j : joints) {
      for (const VertSlab& vs : verts) {
        if (!vs.is_drop && vs.src == j.edge) continue;
        if (ew[vs.src].T + 4 > j.ly || vs.top < j.ly + 2) continue;
        if (vs.x1 <= 14 || vs.x0 >= j.jx + 2) continue;
        if (!(vs.x0 >= 16 && vs.x1 <= j.jx)) {
          bail("layout: a shaft straddles the end of lane " + num(j.rank));
        }
        LayoutPlan::Crossing c;
        c.vertical_is_drop = vs.is_drop;
        c.x0 = vs.x0;
        c.x1 = vs.x1;
        c.y0 = j.ly;
        c.y1 = j.ly + 2;
        c.dir = kEast;
        lane_x.push_back(c);
      }
    }
    std::sort(lane_x.begin(), lane_x.end(),
              [](const LayoutPlan::Crossing& a, const LayoutPlan::Crossing& b) {
                return a.y0 != b.y0 ? a.y0 < b.y0 : a.x0 < b.x0;
              });
    for (int e = 0; e < E; ++e) {
      for (const VertSlab& vs : verts) {
        if (vs.src == e || ew[vs.src].band >= ew[e].band) continue;
        if (vs.x1 <= ew[e].s0 || vs.x0 >= ew[e].s1) continue;
        LayoutPlan::Crossing c;
        c.vertical_is_drop = vs.is_drop;
        c.x0 = vs.x0;
        c.x1 = vs.x1;
        c.y0 = ew[e].T;
        c.y1 = ew[e].T + 4;
        c.dir = kSouth;
        band_x.push_back(c);
      }
    }
    std::sort(band_x.begin(), band_x.end(),
              [](const LayoutPlan::Crossing& a, const LayoutPlan::Crossing& b) {
                return a.y0 != b.y0 ? a.y0 < b.y0 : a.x0 < b.x0;
              });
    std::size_t xn = 0;
    for (LayoutPlan::Crossing c : lane_x) {
      c.guard_a = "x" + std::to_string(xn) + ".a";
      c.guard_b = "x" + std::to_string(xn) + ".b";
      emit(c.guard_a, P(c.x0, c.y0), "crossing seal low", kEast);
      emit(c.guard_b, P(c.x0, c.y1), "crossing seal high", kEast);
      plan->crossings.push_back(c);
      ++xn;
    }
    for (LayoutPlan::Crossing c : band_x) {
      c.guard_a = "x" + std::to_string(xn) + ".a";
      c.guard_b = "x" + std::to_string(xn) + ".b";
      emit(c.guard_a, P(c.x0, c.y1), "crossing seal west", kSouth);
      emit(c.guard_b, P(c.x1, c.y1), "crossing seal east", kSouth);
      plan->crossings.push_back(c);
      ++xn;
    }

    // Sweep guards.
    plan->d_pos = P(DX, RY1);
    plan->f_pos = P(FX, TY0);
    plan->j_pos = P(JX, RY1);
    emit("d", plan->d_pos, "rooftop sweeper");
    emit("f", plan->f_pos, "cell finisher");
    emit("j", plan->j_pos, "cell partition", kSouth);

    // Nooks.
    auto nook = [&](const std::string& name, Rational x0, Rational y0,
                    Rational x1, Rational y1, Point sample,
                    std::vector<std::string> cappers) {
      plan->nooks.push_back(
          {name, x0 * G, y0 * G, x1 * G, y1 * G, sample, std::move(cappers)});
    };
    for (std::size_t k = 0; k < mouths.size(); ++k) {
      const MouthW& mo = mouths[k];
      const Rational H = stair.attach_heights[k] / G;
      nook(mo.nook, Rational(mo.mx + 4), H - 4 - 2 * d0, Rational(mo.mx + 6),
           H - 2, PR(Rational(mo.mx + 5), H - 7), {mo.pipe_id});
    }
    for (const JointW& j : joints) {
      nook(j.nook, Rational(j.jx), Rational(j.ly + 4), Rational(j.jx + 4),
           Rational(j.ly + 2) + 2 * d0,
           PR(Rational(j.jx + 3), Rational(j.ly) + Rational(11, 2)), {"d"});
    }
    {
      const long long mid = std::clamp<long long>(J / 2, 1, J - 1);
      const long long h1 = L0 + S * mid + 5;
      nook("nook.seam", Rational(16), Rational(h1) - d0, Rational(18),
           Rational(h1 + 2),
           PR(Rational(35, 2) + Rational(0), Rational(h1) - Rational(7, 4)),
           {"d"});
    }
    nook("nook.west-pipe", Rational(12), Rational(Hw - 4) - 2 * d0,
         Rational(14), Rational(Hw - 4), P(13, Hw - 7), {plan->a_rise_guard});
    nook("nook.east-pipe", Rational(FX + 2), Rational(TY0 - 4) - 2 * d0,
         Rational(FX + 4), Rational(TY0 - 4), P(FX + 3, TY0 - 7), {"pipe.gb"});
    nook("nook.finish", Rational(FX + 2), Rational(TY0) - d0, Rational(FX + 4),
         Rational(RY1), P(FX + 3, TY0 - 1), {"pipe.gb", "f"});

    // Assemble and validate the instance.
    for (const PendingGuard& pg : pending) inst.guards.push_back(pg.g);
    inst.target.mode = TargetMode::Region;
    inst.target.ring.pts = {P(TX0, TY0), P(FX - 2, TY0), P(FX - 2, RY1),
                            P(TX0, RY1)};
    {
      const std::vector<Violation> bad = validate_instance(inst);
      if (!bad.empty()) {
        bail("layout: generated instance failed validation: " + bad.front().rule +
             " (" + bad.front().detail + ")");
      }
    }
    for (std::size_t i = 0; i < inst.guards.size(); ++i) {
      if (!plan->guard_index.emplace(inst.guards[i].id, i).second) {
        bail("layout: duplicate guard id " + inst.guards[i].id);
      }
    }

    // Metadata.
    meta.eencl = ee;
    meta.params = prm;
    for (int e = 0; e < E; ++e) {
      for (const auto& g : plan->edges[e].guards) {
        meta.subsegments.push_back({e, g.index, g.id, g.role});
      }
    }
    for (const auto& t : plan->towers) {
      meta.pipes.push_back({t.guard, t.nook, {t.guard}});
    }
    for (const auto& j : plan->joints) {
      meta.pipes.push_back({j.guard, j.nook, {"d"}});
    }
    meta.pipes.push_back({"pipe.ga", "nook.west-pipe", {plan->a_rise_guard}});
    meta.pipes.push_back({"pipe.gb", "nook.east-pipe", {"pipe.gb"}});
    for (const auto& c : plan->crossings) {
      meta.intersections.push_back({c.guard_a, c.dir});
      meta.intersections.push_back({c.guard_b, c.dir});
    }
    for (const auto& c : plan->chamber_guards) meta.chamber_guards.push_back(c.id);
    meta.guard_d = "d";
    meta.guard_f = "f";
    meta.guard_j = "j";
    meta.target_parts.push_back({"strip", w(TX0), w(FX - 2)});
    for (const PendingGuard& pg : pending) {
      meta.roles.push_back({pg.g.id, pg.role});
    }
    meta.census.pipe_guards = mouths.size() + joints.size() + 2;
    meta.census.subsegment_guards = meta.subsegments.size();
    meta.census.chamber_guards = plan->chamber_guards.size();
    meta.census.intersection_guards = 2 * plan->crossings.size();
    meta.census.special_guards = 3;
    meta.census.total = inst.guards.size();
    const std::size_t sum = meta.census.pipe_guards +
                            meta.census.subsegment_guards +
                            meta.census.chamber_guards +
                            meta.census.intersection_guards +
                            meta.census.special_guards;
    if (sum != meta.census.total) bail("layout: guard census mismatch");
  }
};

}  // namespace

ReductionOutput reduce(const EenclInstance& eencl, const LayoutParams& params) {
  require_params(params);
  require_compilable(eencl);
  Builder b(eencl, params);
  b.build();
  return {std::move(b.inst), std::move(b.meta), std::move(b.plan)};
}

// ---------------------------------------------------------------------------
// Structural checks
// ---------------------------------------------------------------------------

namespace {

bool same_segment(const Segment& s, const Point& p, const Point& q) {
  return (s.a == p && s.b == q) || (s.a == q && s.b == p);
}

Point far_end(const Segment& s, const Point& guard) {
  return s.a == guard ? s.b : s.a;
}

struct Checker {
  const ReductionOutput& out;
  const LayoutPlan& pl;
  RegionView view;
  CheckReport rep;

  explicit Checker(const ReductionOutput& o)
      : out(o), pl(*o.plan), view(o.instance.env) {}

  Rational w(long long steps) const { return Rational(steps) * pl.grid; }
  Point P(long long x, long long y) const { return Point{w(x), w(y)}; }

  void item(const std::string& name, bool ok, std::string detail) {
    rep.items.push_back({name, ok, std::move(detail)});
  }

  const Point& guard_pos(const std::string& id) const {
    const auto it = pl.guard_index.find(id);
    if (it == pl.guard_index.end()) {
      throw std::invalid_argument("checks: unknown guard " + id);
    }
    return out.instance.guards[it->second].position;
  }

  void run() {
    check_region();
    check_orthogonal();
    check_target();
    check_roles();
    check_nooks();
    check_or_spill();
    check_pipes();
    check_crossings();
    check_isolation();
    check_stairs();
    check_partition();
    check_chambers();
    check_anchors();
    rep.all_passed = true;
    for (const auto& it : rep.items) rep.all_passed = rep.all_passed && it.passed;
  }

  void check_region() {
    Instance copy = out.instance;
    const std::vector<Violation> bad = validate_instance(copy);
    std::string detail;
    if (!bad.empty()) detail = bad.front().rule + ": " + bad.front().detail;
    item("region-valid", bad.empty(), detail);
  }

  void check_orthogonal() {
    for (const Segment& s : view.edges()) {
      if (s.a.x != s.b.x && s.a.y != s.b.y) {
        item("orthogonal-boundary", false,
             "slanted wall near (" + format_rational(s.a.x) + ", " +
                 format_rational(s.a.y) + ")");
        return;
      }
    }
    item("orthogonal-boundary", true, "");
  }

  void check_target() {
    const Ring& r = out.instance.target.ring;
    bool ok = out.instance.target.mode == TargetMode::Region && r.pts.size() == 4;
    if (ok) {
      for (std::size_t i = 0; i < 4; ++i) {
        const Point& a = r.pts[i];
        const Point& b = r.pts[(i + 1) % 4];
        if (a.x != b.x && a.y != b.y) ok = false;
        if (view.locate(a) == Location::Outside) ok = false;
      }
    }
    item("target-rectangle", ok, ok ? "" : "target band is not an inscribed rectangle");
  }

  void check_roles() {
    std::set<std::string> ids;
    for (const Guard& g : out.instance.guards) ids.insert(g.id);
    std::set<std::string> tagged;
    std::string detail;
    bool ok = ids.size() == out.instance.guards.size();
    for (const auto& [id, role] : out.metadata.roles) {
      if (!ids.count(id)) { ok = false; detail = "role for unknown guard " + id; }
      if (!tagged.insert(id).second) { ok = false; detail = "guard " + id + " tagged twice"; }
      if (role.empty()) { ok = false; detail = "guard " + id + " has an empty role"; }
    }
    if (tagged.size() != ids.size()) {
      ok = false;
      if (detail.empty()) detail = "some guards carry no role";
    }
    item("roles-bijective", ok, detail);
  }

  void check_nooks() {
    for (const auto& nk : pl.nooks) {
      if (view.locate(nk.sample) != Location::Inside) {
        item("nook-invisibility", false, nk.name + ": sample point is not interior");
        return;
      }
      for (const Guard& g : out.instance.guards) {
        if (view.sees(g.position, nk.sample)) {
          item("nook-invisibility", false,
               "guard " + g.id + " sees into " + nk.name);
          return;
        }
      }
    }
    item("nook-invisibility", true, "");
  }

  void check_or_spill() {
    bool any = false;
    for (const auto& t : pl.towers) {
      if (t.feeders.size() < 2) continue;  // only shared mouths
      any = true;
      const auto nk = std::find_if(pl.nooks.begin(), pl.nooks.end(),
                                   [&](const auto& n) { return n.name == t.nook; });
      if (nk == pl.nooks.end()) {
        item("or-recontamination", false, t.nook + " missing");
        return;
      }
      for (const auto& [e, end] : t.feeders) {
        const auto& gd = pl.edges[e].guards[end == 0 ? 0 : pl.edges[e].guards.size() - 1];
        if (view.sees(gd.pos, nk->sample)) {
          item("or-recontamination", false,
               "port " + gd.id + " sees into " + t.nook);
          return;
        }
      }
    }
    item("or-recontamination", true, any ? "" : "no shared mouths");
  }

  bool pipe_sees(const std::string& id, const Point& a, const Point& b,
                 std::string& detail) {
    const Point& g = guard_pos(id);
    if (!view.sees(g, a) || !view.sees(g, b)) {
      detail = "pipe guard " + id + " cannot see both ends of its pipe";
      return false;
    }
    return true;
  }

  void check_pipes() {
    std::string detail;
    const long long ROW1 = pl.chamber_top_y;
    for (const auto& t : pl.towers) {
      const Point lo{w(t.mouth_w + 1), w(ROW1)};
      const Point hi{w(t.mouth_w + 1), t.height};
      if (!pipe_sees(t.guard, lo, hi, detail)) { item("pipe-see-through", false, detail); return; }
    }
    for (const auto& j : pl.joints) {
      const Point lo{w(j.slit_w + 1), w(pl.edges[j.edge].floor_y + 4)};
      const Point west{w(14), w(j.lane_y + 1)};
      if (!pipe_sees(j.guard, lo, west, detail)) { item("pipe-see-through", false, detail); return; }
    }
    {
      const long long Ta = pl.edges_floor(pl_a_edge());
      const Point lo{w(9), w(Ta + 4)};
      const Point hi{w(9), w(pl.well_floor_y)};
      if (!pipe_sees("pipe.ga", lo, hi, detail)) { item("pipe-see-through", false, detail); return; }
    }
    {
      const long long Tb = pl.edges_floor(pl_b_edge());
      const Point lo{w(pl.cell_east_x - 1), w(Tb + 4)};
      const Point hi{w(pl.cell_east_x - 1), w(pl.target_bottom_y)};
      if (!pipe_sees("pipe.gb", lo, hi, detail)) { item("pipe-see-through", false, detail); return; }
    }
    item("pipe-see-through", true, "");
  }

  int pl_a_edge() const { return out.metadata.eencl.a.edge; }
  int pl_b_edge() const { return out.metadata.eencl.b.edge; }

  void check_crossings() {
    std::map<std::string, Direction> metadir;
    for (const auto& ix : out.metadata.intersections) metadir[ix.guard] = ix.dir;
    for (const auto& c : pl.crossings) {
      for (int side = 0; side < 2; ++side) {
        const std::string& id = side == 0 ? c.guard_a : c.guard_b;
        const auto it = metadir.find(id);
        if (it == metadir.end()) {
          item("intersection-separation", false,
               "crossing guard " + id + " is missing");
          return;
        }
        const auto b = view.beam(guard_pos(id), it->second);
        Point lip;  // the far lip its fixed beam must reach
        if (c.dir == kEast) {
          lip = Point{w(c.x1), side == 0 ? w(c.y0) : w(c.y1)};
        } else {
          lip = Point{side == 0 ? w(c.x0) : w(c.x1), w(c.y0)};
        }
        if (!b || !on_segment(lip, *b)) {
          item("intersection-separation", false,
               "beam of " + id + " does not span its crossing");
          return;
        }
      }
    }
    item("intersection-separation", true, "");
  }

  void check_isolation() {
    for (int e = 0; e < static_cast<int>(pl.edges.size()); ++e) {
      for (const auto& g : pl.edges[e].guards) {
        for (int o = 0; o < static_cast<int>(pl.edges.size()); ++o) {
          if (o == e) continue;
          const auto& op = pl.edges[o];
          const Point wm{w(op.span_w), w(op.floor_y + 2)};
          const Point em{w(op.span_e), w(op.floor_y + 2)};
          if (view.sees(g.pos, wm) || view.sees(g.pos, em)) {
            item("corridor-isolation", false,
                 g.id + " sees the end of corridor " + std::to_string(o));
            return;
          }
        }
      }
    }
    item("corridor-isolation", true, "");
  }

  void check_stairs() {
    Direction prev = kEast;
    for (std::size_t k = pl.towers.size(); k-- > 0;) {
      const auto& t = pl.towers[k];
      if (!(cross(prev, t.cap_dir) < 0)) {
        item("stair-capping", false, "cap aims are not clockwise-ordered");
        return;
      }
      prev = t.cap_dir;
      const auto b = view.beam(pl.d_pos, t.cap_dir);
      if (!b) { item("stair-capping", false, t.guard + ": no cap beam"); return; }
      const Point land{w(t.mouth_w + 2), t.cap_land_y};
      const Point lip{w(t.mouth_w), t.height};
      if (far_end(*b, pl.d_pos) != land || !on_segment(lip, *b)) {
        item("stair-capping", false,
             t.guard + ": cap beam misses its landing");
        return;
      }
      if (!(t.cap_land_y > t.height - 2 * pl.grid && t.cap_land_y < t.height)) {
        item("stair-capping", false, t.guard + ": landing outside the lip band");
        return;
      }
      // The crossing of the border must match the aim exactly and stay east
      // of the previous spill shadow.
      const Rational x = w(pl.seam_x) +
                         2 * pl.grid * (w(pl.top_y) - t.height == 0
                                            ? Rational(0)
                                            : (w(t.mouth_w) - w(pl.seam_x)) /
                                                  (w(pl.top_y) - t.height));
      if (x != t.chord_cross_x) {
        item("stair-capping", false, t.guard + ": border crossing drifted");
        return;
      }
      if (k > 0 && !(t.chord_cross_x > pl.towers[k - 1].shadow_x)) {
        item("stair-capping", false,
             t.guard + ": crossing is not clear of the previous shadow");
        return;
      }
    }
    if (!(cross(prev, kSouth) < 0)) {
      item("stair-capping", false, "final rest aim is not clockwise of the caps");
      return;
    }
    item("stair-capping", true, "");
  }

  void check_partition() {
    const auto b = view.beam(pl.j_pos, kSouth);
    const long long Tb = pl.edges[pl_b_edge()].floor_y;
    const bool ok = b && same_segment(*b, P(pl.cell_west_x, pl.top_y),
                                      P(pl.cell_west_x, Tb));
    item("partition-beam", ok, ok ? "" : "partition beam does not reach the east corridor");
  }

  void check_chambers() {
    const long long ROW1 = pl.chamber_top_y;
    for (const auto& c : pl.chamber_guards) {
      const auto be = view.beam(c.pos, kEast);
      const auto bw = view.beam(c.pos, kWest);
      if (!be || !bw) {
        item("chamber-capping", false, c.id + ": seal beams blocked");
        return;
      }
      for (const auto& t : pl.towers) {
        if (t.vertex != c.vertex) continue;
        const Point mouth{w(t.mouth_w + 1), w(ROW1)};
        const auto& b = t.slot == 0 ? bw : be;
        if (!on_segment(mouth, *b)) {
          item("chamber-capping", false,
               c.id + " does not seal " + t.guard + "'s slit");
          return;
        }
      }
    }
    // Raised port aims must land exactly on their pocket walls.
    for (const auto& t : pl.towers) {
      for (const auto& [e, end] : t.feeders) {
        const auto& gs = pl.edges[e].guards;
        const auto& gd = end == 0 ? gs.front() : gs.back();
        const Direction chord = end == 0 ? gd.dir_to_first : gd.dir_to_second;
        const auto b = view.beam(gd.pos, chord);
        if (!b) {
          item("chamber-capping", false, gd.id + ": raised aim blocked");
          return;
        }
        const Rational px = gd.pos.x;  // port guard stands at the drop's east lip
        const Rational run = px - w(t.mouth_w);  // horizontal reach to the west wall
        const Rational land_y =
            w(ROW1 - 4) + 4 * pl.grid * run / (px - w(t.mouth_w + 2));
        const Point land{w(t.mouth_w), land_y};
        const Point lip{w(t.mouth_w + 2), w(ROW1)};
        if (far_end(*b, gd.pos) != land || !on_segment(lip, *b)) {
          item("chamber-capping", false,
               gd.id + ": raised aim misses the pocket wall");
          return;
        }
      }
    }
    item("chamber-capping", true, "");
  }

  void check_anchors() {
    struct Want {
      const char* what;
      Point from;
      Direction dir;
      Point a, b;
    };
    const long long Tb = pl.edges[pl_b_edge()].floor_y;
    const Point rise_b_pos = guard_pos(pl.b_rise_guard);
    const Point a_rise_pos = guard_pos(pl.a_rise_guard);
    const std::vector<Want> wants = {
        {"finisher west", pl.f_pos, kWest, P(0, pl.target_bottom_y), pl.f_pos},
        {"finisher rest", pl.f_pos, kNorth, pl.f_pos, P(pl.cell_east_x, pl.top_y)},
        {"east keeper rest", pl.gb_pos, kNorth, pl.gb_pos,
         P(pl.cell_east_x, pl.top_y)},
        {"sweeper rest", pl.d_pos, kSouth, P(pl.seam_x, pl.well_floor_y),
         pl.d_pos},
        {"sweeper start", pl.d_pos, kEast, pl.d_pos,
         P(pl.cell_east_x + 4, pl.top_y)},
        {"splitter", rise_b_pos, kWest, P(0, pl.target_bottom_y), rise_b_pos},
        {"west riser seal", a_rise_pos, kEast, a_rise_pos,
         P(pl.seam_x, pl.well_floor_y)},
    };
    for (const Want& want : wants) {
      const auto b = view.beam(want.from, want.dir);
      if (!b || !same_segment(*b, want.a, want.b)) {
        item("sweep-anchors", false,
             std::string(want.what) + " beam is not anchored");
        return;
      }
    }
    if (!on_segment(Point{w(9), w(pl.well_floor_y)},
                    Segment{a_rise_pos, P(pl.seam_x, pl.well_floor_y)})) {
      item("sweep-anchors", false, "west riser seal misses the relief pipe");
      return;
    }
    item("sweep-anchors", true, "");
  }
};

}  // namespace

CheckReport structural_checks(const ReductionOutput& out) {
  Checker c(out);
  c.run();
  return c.rep;
}

// ---------------------------------------------------------------------------
// Witness schedule
// ---------------------------------------------------------------------------

namespace {

struct WitnessBuilder {
  const ReductionOutput& out;
  const LayoutPlan& pl;
  const NclMachine& m;
  Schedule sched;
  std::map<std::string, Direction> cur;

  explicit WitnessBuilder(const ReductionOutput& o)
      : out(o), pl(*o.plan), m(o.metadata.eencl.machine) {}

  void move(const std::string& id, const Direction& to, Sense sense) {
    const auto it = cur.find(id);
    if (it == cur.end()) throw std::logic_error("witness: unknown guard " + id);
    if (it->second == to) {
      throw std::logic_error("witness: guard " + id + " asked to hold still");
    }
    sched.moves.push_back({id, 0, 0, sense, it->second, to});
    it->second = to;
  }

  int pointed_vertex(int e, Orientation o) const {
    if (o == Orientation::ToFirst) return m.edges[e].first;
    if (o == Orientation::ToSecond) return m.edges[e].second;
    return -1;
  }

  void chamber_transit(int vertex, bool to_west) {
    for (const auto& c : pl.chamber_guards) {
      if (c.vertex != vertex) continue;
      move(c.id, to_west ? kWest : kEast, to_west ? Sense::CW : Sense::CCW);
      return;
    }
    throw std::logic_error("witness: no chamber guard at vertex " +
                           std::to_string(vertex));
  }

  void corridor_flip(int e, Orientation from) {
    const auto& gs = pl.edges[e].guards;
    const bool forward = from == Orientation::ToFirst;
    for (std::size_t step = 0; step < gs.size(); ++step) {
      const auto& g = gs[forward ? step : gs.size() - 1 - step];
      if (g.pinned) continue;
      const Direction& to = forward ? g.dir_to_second : g.dir_to_first;
      const Sense s = forward ? g.sense_first_to_second
                              : opposite(g.sense_first_to_second);
      move(g.id, to, s);
    }
  }

  Schedule run(const MoveSeq& sol) {
    const EenclInstance& ee = out.metadata.eencl;
    if (sol.initial.size() != m.edges.size()) {
      bail("witness: initial configuration has " +
           std::to_string(sol.initial.size()) + " entries for " +
           std::to_string(m.edges.size()) + " edges");
    }
    for (std::size_t e = 0; e < sol.initial.size(); ++e) {
      if (sol.initial[e] == Orientation::Undefined) {
        bail("witness: edge " + std::to_string(e) + " starts undefined");
      }
    }
    Configuration cfg = sol.initial;
    if (!is_legal(m, cfg)) bail("witness: initial configuration is illegal");
    for (std::size_t i = 0; i < sol.moves.size(); ++i) {
      const int e = sol.moves[i];
      if (e < 0 || e >= static_cast<int>(m.edges.size())) {
        bail("witness: move " + std::to_string(i) + " names no edge");
      }
      if (e == ee.a.edge && i != 0) {
        bail("witness: the opening edge may move only first");
      }
      if (e == ee.b.edge && i + 1 != sol.moves.size()) {
        bail("witness: the closing edge may move only last");
      }
    }
    if (cfg[ee.a.edge] != ee.a.toward &&
        (sol.moves.empty() || sol.moves.front() != ee.a.edge)) {
      bail("witness: the solution neither starts on the opening edge nor "
           "begins with it already reversed");
    }

    // Start postures from the initial configuration.
    for (const Guard& g : out.instance.guards) {
      Direction d = kEast;
      const auto jt = pl.guard_index.find(g.id);
      (void)jt;
      d = initial_dir(g.id, cfg);
      cur[g.id] = d;
      sched.initial.push_back({g.id, 0, d});
    }

    // Rooftop sweep: walk the caps east to west, letting each pipe dance
    // shut while its mouth is held.
    const std::size_t K = pl.towers.size();
    for (std::size_t n = 0; n < K; ++n) {
      const std::size_t k = K - 1 - n;
      move("d", pl.towers[k].cap_dir, Sense::CW);
      move(pl.towers[k].guard, kWest, Sense::CW);
      move(pl.towers[k].guard, kNorth, Sense::CW);
    }
    move("d", kSouth, Sense::CW);

    // Mimic the machine's moves one corridor at a time.
    for (std::size_t i = 0; i < sol.moves.size(); ++i) {
      const int e = sol.moves[i];
      const Orientation o = cfg[e];
      const Orientation o2 = reversed(o);
      if (o == Orientation::Undefined) {
        bail("witness: move " + std::to_string(i) + " flips an undefined edge");
      }
      const int leave = pointed_vertex(e, o);
      if (leave >= 0 && m.vertices[leave].kind == VertexKind::And &&
          m.vertices[leave].output_edge == e) {
        chamber_transit(leave, true);
      }
      corridor_flip(e, o);
      const int arrive = pointed_vertex(e, o2);
      if (arrive >= 0 && m.vertices[arrive].kind == VertexKind::And &&
          m.vertices[arrive].output_edge == e) {
        chamber_transit(arrive, false);
      }
      cfg[e] = o2;
      if (!is_legal(m, cfg)) {
        bail("witness: move " + std::to_string(i) + " leaves an illegal configuration");
      }
    }
    if (cfg[ee.b.edge] != ee.b.toward) {
      bail("witness: the final configuration does not reverse the closing edge");
    }

    // Finishing sweep: the east keeper folds its shaft shut, then the
    // finisher wipes the cell.
    move("pipe.gb", kWest, Sense::CW);
    move("pipe.gb", kNorth, Sense::CW);
    move("f", kNorth, Sense::CW);
    return sched;
  }

  Direction initial_dir(const std::string& id, const Configuration& cfg) const {
    // Corridor guards mirror their edge's orientation; everything else has a
    // fixed start.
    for (const auto& ep : pl.edges) {
      for (const auto& g : ep.guards) {
        if (g.id != id) continue;
        return cfg[g.edge] == Orientation::ToFirst ? g.dir_to_first
                                                   : g.dir_to_second;
      }
    }
    for (const auto& t : pl.towers) {
      if (t.guard == id) return kSouth;
    }
    for (const auto& j : pl.joints) {
      if (j.guard == id) return kSouth;
    }
    for (const auto& c : pl.chamber_guards) {
      if (c.id != id) continue;
      const int oe = m.vertices[c.vertex].output_edge;
      const int at = cfg[oe] == Orientation::ToFirst ? m.edges[oe].first
                                                     : m.edges[oe].second;
      return at == c.vertex ? kEast : kWest;
    }
    if (id == "pipe.ga") return kSouth;
    if (id == "pipe.gb") return kSouth;
    if (id == "d") return kEast;
    if (id == "f") return kWest;
    if (id == "j") return kSouth;
    for (const auto& ix : out.metadata.intersections) {
      if (ix.guard == id) return ix.dir;
    }
    throw std::logic_error("witness: guard " + id + " has no start posture");
  }
};

}  // namespace

Schedule witness_schedule(const ReductionOutput& out, const MoveSeq& solution) {
  WitnessBuilder wb(out);
  return wb.run(solution);
}

// ---------------------------------------------------------------------------
// Metadata serialization
// ---------------------------------------------------------------------------

std::string save_metadata(const GadgetMetadata& meta) {
  using nlohmann::json;
  json j;
  json machine;
  machine["vertices"] = json::array();
  for (const auto& v : meta.eencl.machine.vertices) {
    machine["vertices"].push_back(
        {{"kind", v.kind == VertexKind::And ? "and" : "or"},
         {"output", v.output_edge}});
  }
  machine["edges"] = json::array();
  for (const auto& e : meta.eencl.machine.edges) {
    machine["edges"].push_back(json::array({e.first, e.second}));
  }
  auto target = [](const EdgeTarget& t) {
    return json{{"edge", t.edge},
                {"toward", t.toward == Orientation::ToFirst ? "first" : "second"}};
  };
  machine["opening"] = target(meta.eencl.a);
  machine["closing"] = target(meta.eencl.b);
  j["machine"] = machine;

  j["params"] = {
      {"grid_pitch", format_rational(meta.params.grid_pitch)},
      {"corridor_width", format_rational(meta.params.corridor_width)},
      {"pipe_width", format_rational(meta.params.pipe_width)},
      {"nook_depth", format_rational(meta.params.nook_depth)},
      {"nook_width", format_rational(meta.params.nook_width)},
      {"vertex_slot_spacing", format_rational(meta.params.vertex_slot_spacing)},
  };

  j["subsegments"] = json::array();
  for (const auto& s : meta.subsegments) {
    j["subsegments"].push_back({{"edge", s.edge},
                                {"index", s.index},
                                {"guard", s.guard},
                                {"role", s.role}});
  }
  j["pipes"] = json::array();
  for (const auto& p : meta.pipes) {
    j["pipes"].push_back(
        {{"guard", p.guard}, {"nook", p.nook}, {"cappers", p.cappers}});
  }
  j["intersections"] = json::array();
  for (const auto& ix : meta.intersections) {
    j["intersections"].push_back(
        {{"guard", ix.guard},
         {"dir", json::array({ix.dir.dx.str(), ix.dir.dy.str()})}});
  }
  j["chamber_guards"] = meta.chamber_guards;
  j["sweeper"] = meta.guard_d;
  j["finisher"] = meta.guard_f;
  j["partition"] = meta.guard_j;
  j["target_parts"] = json::array();
  for (const auto& t : meta.target_parts) {
    j["target_parts"].push_back({{"label", t.label},
                                 {"west_x", format_rational(t.west_x)},
                                 {"east_x", format_rational(t.east_x)}});
  }
  j["roles"] = json::array();
  for (const auto& [id, role] : meta.roles) {
    j["roles"].push_back(json::array({id, role}));
  }
  j["census"] = {{"pipe_guards", meta.census.pipe_guards},
                 {"subsegment_guards", meta.census.subsegment_guards},
                 {"chamber_guards", meta.census.chamber_guards},
                 {"intersection_guards", meta.census.intersection_guards},
                 {"special_guards", meta.census.special_guards},
                 {"total", meta.census.total}};
  return j.dump(2) + "\n";
}

}  // namespace searchlight
