#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "searchlight/ncl.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

using namespace searchlight;

namespace {

// Two vertices joined by three parallel edges; the smallest closed machine.
NclMachine theta(VertexKind u, VertexKind v, int out_u = -1, int out_v = -1) {
  NclMachine m;
  m.vertices.push_back({u, out_u});
  m.vertices.push_back({v, out_v});
  m.edges = {{0, 1}, {0, 1}, {0, 1}};
  return m;
}

// One vertex with three pendant edges (free far ends).
NclMachine pendant(VertexKind k, int out = -1) {
  NclMachine m;
  m.vertices.push_back({k, out});
  m.edges = {{0, -1}, {0, -1}, {0, -1}};
  return m;
}

// Two independent pendant OR vertices; tolerates one mid-flight edge apiece.
NclMachine double_or() {
  NclMachine m;
  m.vertices = {{VertexKind::Or, -1}, {VertexKind::Or, -1}};
  m.edges = {{0, -1}, {0, -1}, {0, -1}, {1, -1}, {1, -1}, {1, -1}};
  return m;
}

// Bit e set means edge e is oriented ToSecond.
Configuration config_of(const NclMachine& m, std::uint32_t mask) {
  Configuration c(m.edges.size(), Orientation::ToFirst);
  for (std::size_t e = 0; e < c.size(); ++e) {
    if ((mask >> e) & 1u) c[e] = Orientation::ToSecond;
  }
  return c;
}

std::uint32_t mask_of(const Configuration& c) {
  std::uint32_t mask = 0;
  for (std::size_t e = 0; e < c.size(); ++e) {
    if (c[e] == Orientation::ToSecond) mask |= 1u << e;
  }
  return mask;
}

// Independent legality evaluation in counting style: a vertex tallies how
// many incident edges point at it.  undef_mask edges point at nobody.
bool oracle_legal(const NclMachine& m, std::uint32_t mask,
                  std::uint32_t undef_mask = 0) {
  for (int v = 0; v < static_cast<int>(m.vertices.size()); ++v) {
    int inward_total = 0;
    int inputs = 0;
    int inward_inputs = 0;
    bool output_inward = false;
    for (int e = 0; e < static_cast<int>(m.edges.size()); ++e) {
      const NclEdge& edge = m.edges[static_cast<std::size_t>(e)];
      if (edge.first != v && edge.second != v) continue;
      const int towards = ((undef_mask >> e) & 1u)
                              ? -1
                              : (((mask >> e) & 1u) ? edge.second : edge.first);
      const bool in = towards == v;
      inward_total += in ? 1 : 0;
      const NclVertex& vx = m.vertices[static_cast<std::size_t>(v)];
      if (vx.kind == VertexKind::And && e == vx.output_edge) {
        output_inward = in;
      } else {
        ++inputs;
        inward_inputs += in ? 1 : 0;
      }
    }
    if (m.vertices[static_cast<std::size_t>(v)].kind == VertexKind::And) {
      if (!output_inward && inward_inputs < inputs) return false;
    } else if (inward_total == 0) {
      return false;
    }
  }
  return true;
}

// Random 3-regular multigraph on four vertices via stub pairing.
NclMachine random_machine(std::mt19937& rng) {
  for (;;) {
    std::vector<int> stubs = {0, 0, 0, 1, 1, 1, 2, 2, 2, 3, 3, 3};
    std::shuffle(stubs.begin(), stubs.end(), rng);
    NclMachine m;
    m.vertices.assign(4, {VertexKind::Or, -1});
    bool ok = true;
    for (std::size_t i = 0; i < stubs.size(); i += 2) {
      if (stubs[i] == stubs[i + 1]) {
        ok = false;
        break;
      }
      m.edges.push_back({stubs[i], stubs[i + 1]});
    }
    if (!ok) continue;
    for (int v = 0; v < 4; ++v) {
      if (rng() % 2 == 0) continue;
      std::vector<int> incident;
      for (int e = 0; e < 6; ++e) {
        if (m.edges[static_cast<std::size_t>(e)].first == v ||
            m.edges[static_cast<std::size_t>(e)].second == v) {
          incident.push_back(e);
        }
      }
      m.vertices[static_cast<std::size_t>(v)] = {
          VertexKind::And, incident[rng() % incident.size()]};
    }
    return m;
  }
}

}  // namespace

TEST_CASE("machine validation flags structural defects") {
  CHECK(validate_machine(theta(VertexKind::Or, VertexKind::Or)).empty());
  CHECK(validate_machine(pendant(VertexKind::And, 0)).empty());
  CHECK(validate_machine(double_or()).empty());

  NclMachine degree_two = theta(VertexKind::Or, VertexKind::Or);
  degree_two.edges.pop_back();
  CHECK(validate_machine(degree_two).size() == 2);  // both endpoints short

  NclMachine loop = pendant(VertexKind::Or);
  loop.edges[0] = {0, 0};
  CHECK(!validate_machine(loop).empty());

  NclMachine dangling = pendant(VertexKind::Or);
  dangling.edges[1] = {0, 7};
  CHECK(!validate_machine(dangling).empty());

  NclMachine unplugged = pendant(VertexKind::Or);
  unplugged.edges[2] = {-1, -1};
  CHECK(!validate_machine(unplugged).empty());

  NclMachine no_output = pendant(VertexKind::And, -1);
  CHECK(!validate_machine(no_output).empty());

  NclMachine foreign_output = theta(VertexKind::And, VertexKind::Or, 0);
  foreign_output.edges.push_back({-1, 1});
  foreign_output.vertices[0].output_edge = 3;  // incident to 1, not to 0
  CHECK(!validate_machine(foreign_output).empty());

  NclMachine or_with_output = pendant(VertexKind::Or, 1);
  CHECK(!validate_machine(or_with_output).empty());
}

TEST_CASE("pendant vertices evaluate the basic constraints") {
  const NclMachine lone_or = pendant(VertexKind::Or);
  CHECK(is_legal(lone_or, config_of(lone_or, 0b000)));  // all inward
  CHECK(is_legal(lone_or, config_of(lone_or, 0b110)));  // one inward suffices
  CHECK(!is_legal(lone_or, config_of(lone_or, 0b111)));

  const NclMachine lone_and = pendant(VertexKind::And, 0);
  // Output outward and an input outward: neither clause holds.
  CHECK(!is_legal(lone_and, {Orientation::ToSecond, Orientation::ToSecond,
                             Orientation::ToFirst}));
  CHECK(is_legal(lone_and, config_of(lone_and, 0b110)));  // output inward
  CHECK(is_legal(lone_and, config_of(lone_and, 0b001)));  // both inputs inward
  CHECK(!is_legal(lone_and, config_of(lone_and, 0b011)));
}

TEST_CASE("undefined edges point at nobody") {
  const NclMachine lone_or = pendant(VertexKind::Or);
  CHECK(is_legal(lone_or, {Orientation::Undefined, Orientation::ToFirst,
                           Orientation::ToSecond}));
  CHECK(!is_legal(lone_or, {Orientation::Undefined, Orientation::Undefined,
                            Orientation::ToSecond}));

  const NclMachine lone_and = pendant(VertexKind::And, 0);
  CHECK(is_legal(lone_and, {Orientation::Undefined, Orientation::ToFirst,
                            Orientation::ToFirst}));
  CHECK(!is_legal(lone_and, {Orientation::Undefined, Orientation::ToSecond,
                             Orientation::ToFirst}));
}

TEST_CASE("configurations must cover every edge") {
  const NclMachine m = pendant(VertexKind::Or);
  CHECK_THROWS_AS(is_legal(m, Configuration(2, Orientation::ToFirst)),
                  std::invalid_argument);
  CHECK_THROWS_AS(legal_moves(m, Configuration(4, Orientation::ToFirst)),
                  std::invalid_argument);
}

TEST_CASE("legal moves on the theta machines") {
  const NclMachine or_theta = theta(VertexKind::Or, VertexKind::Or);
  // (ToFirst, ToSecond, ToSecond): reversing the lone inward edge of either
  // vertex is fatal only for edge 0.
  const std::vector<int> moves = legal_moves(or_theta, config_of(or_theta, 6));
  CHECK(moves == std::vector<int>{1, 2});

  // Swapping edges 1 and 2 is a machine symmetry, so the move sets of the
  // two mirror configurations are each other's renamings.
  CHECK(legal_moves(or_theta, config_of(or_theta, 0b010)) ==
        std::vector<int>{0, 2});
  CHECK(legal_moves(or_theta, config_of(or_theta, 0b100)) ==
        std::vector<int>{0, 1});

  // Both AND vertices share edge 0 as output: the two legal configurations
  // are isolated, so no reversal is ever available.
  const NclMachine rigid = theta(VertexKind::And, VertexKind::And, 0, 0);
  CHECK(legal_moves(rigid, config_of(rigid, 1)).empty());
  CHECK(legal_moves(rigid, config_of(rigid, 6)).empty());

  // Four-edge machine: compare every legal configuration against the
  // brute-force filter of all single reversals.
  NclMachine lock;
  lock.vertices = {{VertexKind::And, 0}, {VertexKind::And, 1}};
  lock.edges = {{0, -1}, {0, 1}, {0, 1}, {1, -1}};
  REQUIRE(validate_machine(lock).empty());
  int checked = 0;
  for (std::uint32_t mask = 0; mask < 16; ++mask) {
    if (!oracle_legal(lock, mask)) continue;
    std::vector<int> expect;
    for (int e = 0; e < 4; ++e) {
      if (oracle_legal(lock, mask ^ (1u << e))) expect.push_back(e);
    }
    CHECK(legal_moves(lock, config_of(lock, mask)) == expect);
    ++checked;
  }
  CHECK(checked == 5);
}

TEST_CASE("legal_moves rejects illegal or half-reversed configurations") {
  const NclMachine or_theta = theta(VertexKind::Or, VertexKind::Or);
  CHECK_THROWS_AS(legal_moves(or_theta, config_of(or_theta, 0)),
                  std::invalid_argument);
  Configuration c = config_of(or_theta, 6);
  c[1] = Orientation::Undefined;
  CHECK_THROWS_AS(legal_moves(or_theta, c), std::invalid_argument);
}

TEST_CASE("zero-move and locked instances") {
  // Some legal configuration orients both distinguished edges as targeted,
  // so the empty move list wins; the canonical witness is the smallest one.
  EenclInstance easy;
  easy.machine = theta(VertexKind::Or, VertexKind::Or);
  easy.a = {0, Orientation::ToFirst};
  easy.b = {2, Orientation::ToFirst};
  const auto witness = solve_eencl(easy);
  REQUIRE(witness.has_value());
  CHECK(witness->moves.empty());
  CHECK(mask_of(witness->initial) == 2);

  // Two isolated legal configurations: reachable set never meets the goal.
  EenclInstance stuck;
  stuck.machine = theta(VertexKind::And, VertexKind::And, 0, 0);
  stuck.a = {0, Orientation::ToFirst};
  stuck.b = {1, Orientation::ToFirst};
  CHECK(!solve_eencl(stuck).has_value());

  // No legal configuration orients edge 0 toward its free end at all.
  EenclInstance locked;
  locked.machine.vertices = {{VertexKind::And, 0}, {VertexKind::And, 1}};
  locked.machine.edges = {{0, -1}, {0, 1}, {0, 1}, {1, -1}};
  locked.a = {0, Orientation::ToSecond};
  locked.b = {3, Orientation::ToSecond};
  CHECK(!solve_eencl(locked).has_value());
}

TEST_CASE("the solver returns the canonical shortest witness") {
  EenclInstance inst;
  inst.machine = pendant(VertexKind::And, 0);
  inst.a = {0, Orientation::ToSecond};
  inst.b = {1, Orientation::ToSecond};

  // No legal configuration orients both distinguished edges as targeted:
  // pushing the output outward locks both inputs inward.
  for (std::uint32_t mask = 0; mask < 8; ++mask) {
    if (!oracle_legal(inst.machine, mask)) continue;
    CHECK(!((mask & 1u) && (mask & 2u)));
  }

  const auto witness = solve_eencl(inst);
  REQUIRE(witness.has_value());
  CHECK(mask_of(witness->initial) == 1);
  CHECK(witness->moves == std::vector<int>{0, 1});
  CHECK(witness->moves.size() >= 1);

  // Replay: the witness threads through legal configurations only and makes
  // each reversal while it is offered.
  Configuration c = witness->initial;
  CHECK(is_legal(inst.machine, c));
  CHECK(c[0] == Orientation::ToSecond);
  for (const int e : witness->moves) {
    const std::vector<int> offered = legal_moves(inst.machine, c);
    CHECK(std::find(offered.begin(), offered.end(), e) != offered.end());
    c[static_cast<std::size_t>(e)] = reversed(c[static_cast<std::size_t>(e)]);
  }
  CHECK(is_legal(inst.machine, c));
  CHECK(c[1] == Orientation::ToSecond);

  // Determinism: a second run reproduces the witness exactly.
  const auto again = solve_eencl(inst);
  REQUIRE(again.has_value());
  CHECK(again->initial == witness->initial);
  CHECK(again->moves == witness->moves);
}

TEST_CASE("the solver rejects oversized or malformed instances") {
  EenclInstance inst;
  inst.machine = theta(VertexKind::Or, VertexKind::Or);
  inst.a = {0, Orientation::ToFirst};
  inst.b = {2, Orientation::ToSecond};
  CHECK_THROWS_AS(solve_eencl(inst, SolveNclOptions{2}), std::invalid_argument);

  EenclInstance same_edge = inst;
  same_edge.b = {0, Orientation::ToSecond};
  CHECK_THROWS_AS(solve_eencl(same_edge), std::invalid_argument);

  EenclInstance undefined_target = inst;
  undefined_target.a.toward = Orientation::Undefined;
  CHECK_THROWS_AS(solve_eencl(undefined_target), std::invalid_argument);

  EenclInstance broken = inst;
  broken.machine.edges.pop_back();
  CHECK_THROWS_AS(solve_eencl(broken), std::invalid_argument);
}

TEST_CASE("random machines agree with exhaustive reachability") {
  std::mt19937 rng(20260823);
  int solvable = 0;
  for (int round = 0; round < 200; ++round) {
    const NclMachine m = random_machine(rng);
    REQUIRE(validate_machine(m).empty());

    // The implementation and the counting oracle must agree edge for edge.
    for (int probe = 0; probe < 8; ++probe) {
      const std::uint32_t mask = rng() % 64;
      CHECK(is_legal(m, config_of(m, mask)) == oracle_legal(m, mask));
    }

    EenclInstance inst;
    inst.machine = m;
    inst.a = {static_cast<int>(rng() % 6),
              rng() % 2 ? Orientation::ToFirst : Orientation::ToSecond};
    do {
      inst.b.edge = static_cast<int>(rng() % 6);
    } while (inst.b.edge == inst.a.edge);
    inst.b.toward = rng() % 2 ? Orientation::ToFirst : Orientation::ToSecond;

    // Transitive closure over the full configuration space.
    std::vector<int> parent(64);
    std::iota(parent.begin(), parent.end(), 0);
    const auto find = [&](int x) {
      while (parent[static_cast<std::size_t>(x)] != x) {
        x = parent[static_cast<std::size_t>(x)] =
            parent[static_cast<std::size_t>(
                parent[static_cast<std::size_t>(x)])];
      }
      return x;
    };
    for (std::uint32_t mask = 0; mask < 64; ++mask) {
      if (!oracle_legal(m, mask)) continue;
      for (int e = 0; e < 6; ++e) {
        const std::uint32_t next = mask ^ (1u << e);
        if (next > mask && oracle_legal(m, next)) {
          parent[static_cast<std::size_t>(find(static_cast<int>(mask)))] =
              find(static_cast<int>(next));
        }
      }
    }
    const auto targeted = [](std::uint32_t mask, const EdgeTarget& t) {
      const std::uint32_t want = t.toward == Orientation::ToSecond ? 1u : 0u;
      return ((mask >> t.edge) & 1u) == want;
    };
    bool expect = false;
    int shortest = -1;
    {
      // Forward breadth-first search from every start, independent of the
      // solver's goal-rooted direction.
      std::vector<int> dist(64, -1);
      std::vector<std::uint32_t> frontier;
      for (std::uint32_t mask = 0; mask < 64; ++mask) {
        if (oracle_legal(m, mask) && targeted(mask, inst.a)) {
          dist[mask] = 0;
          frontier.push_back(mask);
        }
      }
      for (int d = 0; !frontier.empty(); ++d) {
        std::vector<std::uint32_t> next_frontier;
        for (const std::uint32_t mask : frontier) {
          if (targeted(mask, inst.b) && shortest == -1) shortest = d;
          for (int e = 0; e < 6; ++e) {
            const std::uint32_t next = mask ^ (1u << e);
            if (oracle_legal(m, next) && dist[next] == -1) {
              dist[next] = d + 1;
              next_frontier.push_back(next);
            }
          }
        }
        frontier = std::move(next_frontier);
      }
      expect = shortest != -1;
      // Cross-check with the union-find closure.
      bool closure = false;
      for (std::uint32_t s = 0; s < 64 && !closure; ++s) {
        if (!oracle_legal(m, s) || !targeted(s, inst.a)) continue;
        for (std::uint32_t g = 0; g < 64; ++g) {
          if (oracle_legal(m, g) && targeted(g, inst.b) &&
              find(static_cast<int>(s)) == find(static_cast<int>(g))) {
            closure = true;
            break;
          }
        }
      }
      CHECK(closure == expect);
    }

    const auto witness = solve_eencl(inst);
    CHECK(witness.has_value() == expect);
    if (witness) {
      ++solvable;
      CHECK(static_cast<int>(witness->moves.size()) == shortest);
      Configuration c = witness->initial;
      REQUIRE(is_legal(m, c));
      CHECK(targeted(mask_of(c), inst.a));
      for (const int e : witness->moves) {
        c[static_cast<std::size_t>(e)] =
            reversed(c[static_cast<std::size_t>(e)]);
        CHECK(is_legal(m, c));
      }
      CHECK(targeted(mask_of(c), inst.b));
    }
  }
  // The sample must exercise both verdicts to mean anything.
  CHECK(solvable > 20);
  CHECK(solvable < 200);
}

TEST_CASE("async traces simulate boundary by boundary") {
  const NclMachine lone_or = pendant(VertexKind::Or);

  AsyncTrace idle;
  idle.initial = config_of(lone_or, 0b100);
  CHECK(check_async_trace(lone_or, idle).legal);

  AsyncTrace bad_start;
  bad_start.initial = config_of(lone_or, 0b111);
  const LegalityReport dead = check_async_trace(lone_or, bad_start);
  CHECK(!dead.legal);
  CHECK(!dead.violation_time.has_value());

  // Overlapping reversals of edges 0 and 1 leave only the outward edge 2
  // defined on (1/2, 1): the vertex starves mid-flight.
  AsyncTrace starving;
  starving.initial = config_of(lone_or, 0b100);
  starving.events = {{0, Rational(0), Rational(1)},
                     {1, Rational(1, 2), Rational(3, 2)}};
  const LegalityReport starved = check_async_trace(lone_or, starving);
  CHECK(!starved.legal);
  REQUIRE(starved.violation_time.has_value());
  CHECK(*starved.violation_time == Rational(1, 2));
  CHECK(starved.message.find("vertex 0") != std::string::npos);

  // Sequential instead: edge 0 flips outward at t=1, and edge 1 goes dark
  // right then, so the violation onset moves to 1.
  AsyncTrace sequential = starving;
  sequential.events[1] = {1, Rational(1), Rational(2)};
  const LegalityReport late = check_async_trace(lone_or, sequential);
  CHECK(!late.legal);
  REQUIRE(late.violation_time.has_value());
  CHECK(*late.violation_time == Rational(1));

  // Two vertices reversing one pendant edge each never interact.
  AsyncTrace parallel;
  parallel.initial = config_of(double_or(), 0);
  parallel.events = {{1, Rational(0), Rational(2)},
                     {4, Rational(1), Rational(3)}};
  CHECK(check_async_trace(double_or(), parallel).legal);
}

TEST_CASE("async trace validation errors") {
  const NclMachine m = double_or();
  AsyncTrace t;
  t.initial = config_of(m, 0);

  t.events = {{0, Rational(2), Rational(2)}};
  CHECK_THROWS_AS(check_async_trace(m, t), std::invalid_argument);

  t.events = {{0, Rational(0), Rational(2)}, {0, Rational(1), Rational(3)}};
  CHECK_THROWS_AS(check_async_trace(m, t), std::invalid_argument);

  // Touching phases are disjoint: the edge flips at 1 and immediately
  // starts flipping back.
  t.events = {{0, Rational(0), Rational(1)}, {0, Rational(1), Rational(2)}};
  CHECK(check_async_trace(m, t).legal);

  t.events = {{9, Rational(0), Rational(1)}};
  CHECK_THROWS_AS(check_async_trace(m, t), std::invalid_argument);

  t.events.clear();
  t.initial[2] = Orientation::Undefined;
  CHECK_THROWS_AS(check_async_trace(m, t), std::invalid_argument);

  t.initial = Configuration(3, Orientation::ToFirst);
  CHECK_THROWS_AS(check_async_trace(m, t), std::invalid_argument);
}

TEST_CASE("serialization orders by start time and preserves the outcome") {
  const NclMachine m = double_or();

  AsyncTrace overlap;
  overlap.initial = config_of(m, 0);
  overlap.events = {{4, Rational(1), Rational(3)},
                    {1, Rational(0), Rational(2)}};
  const MoveSeq seq = serialize_trace(m, overlap);
  CHECK(seq.moves == std::vector<int>{1, 4});  // start times 0 < 1
  CHECK(seq.initial == overlap.initial);

  // Equal start times keep the listed event order.
  AsyncTrace tie;
  tie.initial = config_of(m, 0);
  tie.events = {{2, Rational(5), Rational(6)}, {5, Rational(5), Rational(7)}};
  CHECK(serialize_trace(m, tie).moves == std::vector<int>{2, 5});

  // Replay of the serialized moves stays legal throughout and lands on the
  // trace's own final configuration.
  Configuration c = seq.initial;
  CHECK(is_legal(m, c));
  for (const int e : seq.moves) {
    c[static_cast<std::size_t>(e)] = reversed(c[static_cast<std::size_t>(e)]);
    CHECK(is_legal(m, c));
  }
  CHECK(mask_of(c) == 0b010010);

  AsyncTrace illegal;
  illegal.initial = config_of(m, 0b000111);  // vertex 0 starved outright
  CHECK_THROWS_AS(serialize_trace(m, illegal), std::invalid_argument);
}

TEST_CASE("random legal traces serialize into legal move sequences") {
  std::mt19937 rng(8230626);
  int traced = 0;
  int overlapping = 0;
  for (int round = 0; round < 400 && traced < 120; ++round) {
    const NclMachine m = random_machine(rng);
    std::vector<std::uint32_t> legal_masks;
    for (std::uint32_t mask = 0; mask < 64; ++mask) {
      if (oracle_legal(m, mask)) legal_masks.push_back(mask);
    }
    if (legal_masks.empty()) continue;

    // Grow a trace generatively: start a reversal only when going dark keeps
    // every vertex fed, finish one only when the flipped edge keeps them fed.
    std::uint32_t mask = legal_masks[rng() % legal_masks.size()];
    std::uint32_t undef = 0;
    AsyncTrace trace;
    trace.initial = config_of(m, mask);
    struct Active {
      int edge;
      Rational since;
    };
    std::vector<Active> active;
    Rational now(0);
    for (int step = 0; step < 10; ++step) {
      std::vector<std::pair<bool, int>> options;  // (is_finish, edge/index)
      for (int e = 0; e < 6; ++e) {
        if ((undef >> e) & 1u) continue;
        if (oracle_legal(m, mask, undef | (1u << e))) {
          options.push_back({false, e});
        }
      }
      for (std::size_t i = 0; i < active.size(); ++i) {
        const std::uint32_t bit = 1u << active[i].edge;
        if (oracle_legal(m, mask ^ bit, undef & ~bit)) {
          options.push_back({true, static_cast<int>(i)});
        }
      }
      if (options.empty()) break;
      now += Rational(1 + static_cast<int>(rng() % 3), 2);
      const auto [is_finish, which] = options[rng() % options.size()];
      if (is_finish) {
        const Active a = active[static_cast<std::size_t>(which)];
        active.erase(active.begin() + which);
        trace.events.push_back({a.edge, a.since, now});
        mask ^= 1u << a.edge;
        undef &= ~(1u << a.edge);
      } else {
        active.push_back({which, now});
        undef |= 1u << which;
      }
    }
    // Close what can close; abandon the rest (dropping a reversal that never
    // happened only adds a defined edge, which cannot starve anyone).
    for (std::size_t i = 0; i < active.size();) {
      const std::uint32_t bit = 1u << active[i].edge;
      if (oracle_legal(m, mask ^ bit, undef & ~bit)) {
        now += 1;
        trace.events.push_back({active[i].edge, active[i].since, now});
        mask ^= bit;
        undef &= ~bit;
        active.erase(active.begin() + static_cast<long>(i));
        i = 0;
      } else {
        undef &= ~bit;
        active.erase(active.begin() + static_cast<long>(i));
      }
    }
    if (trace.events.empty()) continue;
    ++traced;

    bool has_overlap = false;
    for (std::size_t i = 0; i < trace.events.size() && !has_overlap; ++i) {
      for (std::size_t j = i + 1; j < trace.events.size(); ++j) {
        const auto& a = trace.events[i];
        const auto& b = trace.events[j];
        if (a.start < b.finish && b.start < a.finish) {
          has_overlap = true;
          break;
        }
      }
    }
    if (has_overlap) ++overlapping;

    const LegalityReport report = check_async_trace(m, trace);
    REQUIRE(report.legal);

    const MoveSeq seq = serialize_trace(m, trace);
    CHECK(seq.moves.size() == trace.events.size());

    // Reversal counts per edge survive serialization.
    std::vector<int> from_trace(6, 0);
    std::vector<int> from_seq(6, 0);
    for (const TraceEvent& ev : trace.events) {
      ++from_trace[static_cast<std::size_t>(ev.edge)];
    }
    for (const int e : seq.moves) ++from_seq[static_cast<std::size_t>(e)];
    CHECK(from_trace == from_seq);

    // Every prefix is legal, and the end state matches the async end state.
    Configuration c = seq.initial;
    REQUIRE(is_legal(m, c));
    for (const int e : seq.moves) {
      c[static_cast<std::size_t>(e)] =
          reversed(c[static_cast<std::size_t>(e)]);
      REQUIRE(is_legal(m, c));
    }
    CHECK(mask_of(c) == mask);
  }
  CHECK(traced >= 120);
  CHECK(overlapping > 10);
}

TEST_CASE("machine and trace documents round trip") {
  NclMachine m;
  m.vertices = {{VertexKind::And, 1}, {VertexKind::Or, -1}};
  m.edges = {{0, -1}, {0, 1}, {0, 1}, {1, -1}};
  const NclMachine m2 = load_machine(save_machine(m));
  CHECK(m2.vertices.size() == 2);
  CHECK(m2.vertices[0].kind == VertexKind::And);
  CHECK(m2.vertices[0].output_edge == 1);
  CHECK(m2.vertices[1].kind == VertexKind::Or);
  CHECK(m2.edges.size() == 4);
  CHECK(m2.edges[0].second == -1);
  CHECK(m2.edges[2].second == 1);

  EenclInstance inst;
  inst.machine = m;
  inst.a = {0, Orientation::ToSecond};
  inst.b = {3, Orientation::ToFirst};
  const EenclInstance inst2 = load_eencl(save_eencl(inst));
  CHECK(inst2.a.edge == 0);
  CHECK(inst2.a.toward == Orientation::ToSecond);
  CHECK(inst2.b.edge == 3);
  CHECK(inst2.b.toward == Orientation::ToFirst);
  CHECK(inst2.machine.edges.size() == 4);

  // A machine loader accepts instance documents and ignores the targets.
  CHECK(load_machine(save_eencl(inst)).edges.size() == 4);

  AsyncTrace t;
  t.initial = {Orientation::ToFirst, Orientation::ToSecond,
               Orientation::Undefined, Orientation::ToFirst};
  t.events = {{2, Rational(1, 3), Rational(5, 2)}};
  const AsyncTrace t2 = load_trace(save_trace(t));
  CHECK(t2.initial == t.initial);
  REQUIRE(t2.events.size() == 1);
  CHECK(t2.events[0].edge == 2);
  CHECK(t2.events[0].start == Rational(1, 3));
  CHECK(t2.events[0].finish == Rational(5, 2));

  MoveSeq seq;
  seq.initial = t.initial;
  seq.moves = {3, 1, 1, 0};
  const MoveSeq seq2 = load_move_seq(save_move_seq(seq));
  CHECK(seq2.initial == seq.initial);
  CHECK(seq2.moves == seq.moves);

  CHECK_THROWS(load_machine("{\"vertices\": [{\"kind\": \"nand\"}]}"));
  CHECK_THROWS(load_machine("{\"vertices\": [], \"edges\": [[0]]}"));
  CHECK_THROWS(load_eencl(save_machine(m)));  // missing distinguished edges
  CHECK_THROWS(load_trace(
      "{\"initial\": [\"up\"], \"events\": []}"));
  CHECK_THROWS(load_trace(
      "{\"initial\": [\"first\"], \"events\": [{\"edge\": 0}]}"));
}
