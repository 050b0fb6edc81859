#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "searchlight/planner.hpp"

#include "fixtures.hpp"

#include <algorithm>
#include <random>
#include <vector>

using namespace searchlight;
using namespace searchlight::fixtures;

namespace {

Instance square_corner_guard() {
  Instance ins;
  ins.env.outer = fring({fpt(0, 0), fpt(4, 0), fpt(4, 4), fpt(0, 4)});
  ins.guards.push_back({"g", fpt(0, 0), std::nullopt});
  ins.target.mode = TargetMode::Whole;
  return ins;
}

// Cells whose interior no guard can see. Visibility cannot change inside a
// cell (grazing rays are carriers of the decomposition), so testing the
// sample point decides the whole cell; such cells stay contaminated forever.
std::vector<int> unreachable_cells(const Decomposition& dec) {
  std::vector<int> out;
  for (const Cell& cell : dec.cells()) {
    bool seen = false;
    for (const Guard& guard : dec.instance().guards) {
      if (dec.view().sees(guard.position, cell.sample)) seen = true;
    }
    if (!seen) out.push_back(cell.id);
  }
  return out;
}

std::vector<Move> as_moves(const Planner& planner, const Schedule& schedule) {
  const auto& guards = planner.decomposition().instance().guards;
  std::vector<Move> moves;
  for (const ScheduleMove& sm : schedule.moves) {
    std::size_t gi = guards.size();
    for (std::size_t i = 0; i < guards.size(); ++i) {
      if (guards[i].id == sm.guard) gi = i;
    }
    REQUIRE(gi < guards.size());
    moves.push_back({gi, sm.from, sm.to, sm.sense});
  }
  return moves;
}

std::vector<int> start_angles(const Planner& planner, const Schedule& schedule) {
  const auto& guards = planner.decomposition().instance().guards;
  std::vector<int> angles(guards.size(), 0);
  for (const ScheduleEntry& entry : schedule.initial) {
    for (std::size_t i = 0; i < guards.size(); ++i) {
      if (guards[i].id == entry.guard) angles[i] = entry.index;
    }
  }
  return angles;
}

}  // namespace

TEST_CASE("cell set basics") {
  CellSet s(130);
  CHECK(s.none());
  s.set(0, true);
  s.set(64, true);
  s.set(129, true);
  CHECK(s.count() == 3);
  CHECK(s.test(64));
  CHECK_FALSE(s.test(63));
  s.set(64, false);
  CHECK(s.count() == 2);

  const CellSet everything = CellSet::all(130);
  CHECK(everything.count() == 130);
  CHECK_FALSE(everything == s);
  CHECK(everything.hash() != s.hash());
}

TEST_CASE("corner guard sweeps a square clean") {
  const Decomposition dec(validated(square_corner_guard()));
  const Planner planner(dec);
  REQUIRE(dec.critical()[0].size() == 3);
  REQUIRE(dec.cells().size() == 2);

  // Cell below the diagonal and cell above it.
  int lower = -1, upper = -1;
  for (const Cell& cell : dec.cells()) {
    (cell.sample.y < cell.sample.x ? lower : upper) = cell.id;
  }
  REQUIRE(lower >= 0);
  REQUIRE(upper >= 0);

  SearchState state = planner.initial_state({0});
  CHECK(state.contaminated.count() == 2);
  CHECK_FALSE(planner.goal_reached(state));

  // Sweeping the lower wedge protects it: the laser parks on the diagonal.
  state = planner.apply_move(state, {0, 0, 1, Sense::CCW});
  CHECK_FALSE(state.contaminated.test(lower));
  CHECK(state.contaminated.test(upper));

  state = planner.apply_move(state, {0, 1, 2, Sense::CCW});
  CHECK(state.contaminated.none());
  CHECK(planner.goal_reached(state));

  const PlanResult result = planner.plan();
  REQUIRE(result.status == PlanStatus::Solved);
  CHECK(result.schedule.moves.size() == 2);
  CHECK(planner.goal_reached(planner.replay(result.schedule)));

  // This room is symmetric, so the reversed schedule happens to work too.
  CHECK(planner.goal_reached(planner.replay(planner.reversed(result.schedule))));
}

TEST_CASE("center guard can never protect the whole square") {
  const Decomposition dec(validated(square_center_guard()));
  const Planner planner(dec);

  // Whatever the laser does, contamination slips around behind it: every
  // move returns to the fully contaminated state.
  SearchState state = planner.initial_state({0});
  for (const Sense sense : {Sense::CCW, Sense::CW}) {
    const int k = 4;
    const int to = sense == Sense::CCW ? 1 : k - 1;
    const SearchState next = planner.apply_move(state, {0, 0, to, sense});
    CHECK(next.contaminated.count() == dec.cells().size());
  }

  const PlanResult result = planner.plan();
  CHECK(result.status == PlanStatus::Unsolvable);
  CHECK(result.states_explored == 4);  // one per start angle, no progress
}

TEST_CASE("closure properties") {
  const Decomposition dec(validated(one_pocket()));
  const Planner planner(dec);
  const std::size_t n = dec.cells().size();

  std::vector<std::vector<bool>> blockings;
  for (std::size_t i = 0; i < dec.critical()[0].size(); ++i) {
    blockings.push_back(
        dec.blocked_portals(planner.lasers_at({static_cast<int>(i)})));
    // The planner's cached coverage intervals must agree with the direct
    // geometric computation.
    CHECK(planner.blocked_at({static_cast<int>(i)}) == blockings.back());
  }

  std::mt19937 rng(20240817);
  for (int trial = 0; trial < 40; ++trial) {
    CellSet a(n);
    CellSet b(n);
    for (std::size_t c = 0; c < n; ++c) {
      const bool in_a = rng() % 2 == 0;
      a.set(c, in_a);
      b.set(c, in_a || rng() % 2 == 0);  // b is a superset of a
    }
    const auto& blocked = blockings[trial % blockings.size()];
    const CellSet fa = planner.closure(a, blocked);
    const CellSet fb = planner.closure(b, blocked);

    // Extensive and idempotent.
    for (std::size_t c = 0; c < n; ++c) {
      if (a.test(c)) CHECK(fa.test(c));
    }
    CHECK(planner.closure(fa, blocked) == fa);

    // Monotone.
    for (std::size_t c = 0; c < n; ++c) {
      if (fa.test(c)) CHECK(fb.test(c));
    }
  }
}

TEST_CASE("cached portal blocking matches the direct computation") {
  const Decomposition dec(validated(two_pockets_helper()));
  const Planner planner(dec);
  const int kg = static_cast<int>(dec.critical()[0].size());
  const int kh = static_cast<int>(dec.critical()[1].size());
  REQUIRE(kg >= 2);
  REQUIRE(kh >= 2);

  for (int i = 0; i < kg; ++i) {
    for (int j = 0; j < kh; ++j) {
      const std::vector<int> angle{i, j};
      auto lasers = planner.lasers_at(angle);
      CHECK(planner.blocked_at(angle) == dec.blocked_portals(lasers));
      for (int skip = 0; skip < 2; ++skip) {
        auto partial = lasers;
        partial[skip] = std::nullopt;
        CHECK(planner.blocked_at(angle, skip) ==
              dec.blocked_portals(partial));
      }
    }
  }
}

TEST_CASE("pocket room: sweep seals the target away from the alcove") {
  const Decomposition dec(validated(one_pocket()));
  const Planner planner(dec);
  REQUIRE_FALSE(planner.goals().empty());

  const PlanResult result = planner.plan();
  REQUIRE(result.status == PlanStatus::Solved);
  REQUIRE_FALSE(result.schedule.moves.empty());

  // Deterministic output.
  const PlanResult again = planner.plan();
  CHECK(save_schedule(result.schedule) == save_schedule(again.schedule));

  // Replay move by move: the goal ends clear, and the cells no beam can
  // reach stay contaminated the whole way through.
  const std::vector<int> hidden = unreachable_cells(dec);
  REQUIRE_FALSE(hidden.empty());
  SearchState state = planner.initial_state(start_angles(planner, result.schedule));
  for (const int c : hidden) CHECK(state.contaminated.test(c));
  for (const Move& m : as_moves(planner, result.schedule)) {
    state = planner.apply_move(state, m);
    for (const int c : hidden) CHECK(state.contaminated.test(c));
  }
  CHECK(planner.goal_reached(state));
  CHECK(state == planner.replay(result.schedule));

  // Running the same rotations backwards drags the alcove's contamination
  // across the room: the target does not end clear.
  const Schedule back = planner.reversed(result.schedule);
  CHECK_FALSE(planner.goal_reached(planner.replay(back)));
}

TEST_CASE("two pockets defeat a single guard") {
  const Decomposition dec(validated(two_pockets()));
  const Planner planner(dec);
  const PlanResult result = planner.plan();
  CHECK(result.status == PlanStatus::Unsolvable);
}

TEST_CASE("a helper guard restores solvability") {
  const Decomposition dec(validated(two_pockets_helper()));
  const Planner planner(dec);
  const PlanResult result = planner.plan();
  REQUIRE(result.status == PlanStatus::Solved);
  CHECK(planner.goal_reached(planner.replay(result.schedule)));
}

TEST_CASE("schedule serialization round trip") {
  Schedule schedule;
  schedule.initial.push_back({"g", 3, make_direction(1, 0)});
  schedule.initial.push_back({"h", 0, make_direction(0, -1)});
  schedule.moves.push_back(
      {"g", 3, 4, Sense::CCW, make_direction(1, 0), make_direction(1, 1)});
  schedule.moves.push_back(
      {"g", 4, 3, Sense::CW, make_direction(1, 1), make_direction(1, 0)});

  const std::string text = save_schedule(schedule);
  const Schedule parsed = load_schedule(text);
  CHECK(save_schedule(parsed) == text);
  REQUIRE(parsed.initial.size() == 2);
  CHECK(parsed.initial[1].dir == make_direction(0, -1));
  REQUIRE(parsed.moves.size() == 2);
  CHECK(parsed.moves[0].sense == Sense::CCW);
  CHECK(parsed.moves[1].sense == Sense::CW);

  CHECK_THROWS(load_schedule("{"));
  CHECK_THROWS(load_schedule("{}"));
  CHECK_THROWS(load_schedule(R"({"initial": [], "moves": [{}]})"));
  CHECK_THROWS(load_schedule(
      R"({"initial": [{"guard": "g", "index": 0, "dir": ["0", "0"]}],
          "moves": []})"));
}

TEST_CASE("replay rejects schedules that do not fit") {
  const Decomposition dec(validated(square_corner_guard()));
  const Planner planner(dec);
  const PlanResult result = planner.plan();
  REQUIRE(result.status == PlanStatus::Solved);

  Schedule wrong_guard = result.schedule;
  wrong_guard.initial[0].guard = "nobody";
  CHECK_THROWS_AS(planner.replay(wrong_guard), std::invalid_argument);

  Schedule wrong_dir = result.schedule;
  wrong_dir.initial[0].dir = make_direction(7, 1);
  CHECK_THROWS_AS(planner.replay(wrong_dir), std::invalid_argument);

  Schedule broken_chain = result.schedule;
  REQUIRE(broken_chain.moves.size() >= 2);
  std::swap(broken_chain.moves[0], broken_chain.moves[1]);
  CHECK_THROWS_AS(planner.replay(broken_chain), std::invalid_argument);
}
