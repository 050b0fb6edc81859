#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "searchlight/verifier.hpp"

#include "searchlight/planner.hpp"

#include "fixtures.hpp"

#include <algorithm>
#include <stdexcept>

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

Instance unit_square() {
  Instance ins;
  ins.env.outer = fring({fpt(0, 0), fpt(1, 0), fpt(1, 1), fpt(0, 1)});
  ins.guards.push_back({"g", fpt(0, 0), std::nullopt});
  ins.target.mode = TargetMode::Whole;
  return ins;
}

// A hole thinner than the sampling pitch: excluding its interior and the
// diagonal links grazing its corners relies on exact arithmetic, not on the
// lattice resolution.
Instance thin_wall_room() {
  Instance ins;
  ins.env.outer = fring({fpt(0, 0), fpt(4, 0), fpt(4, 4), fpt(0, 4)});
  ins.env.holes.push_back(
      fring({{Rational(1), Rational(19, 10)},
             {Rational(1), Rational(21, 10)},
             {Rational(3), Rational(21, 10)},
             {Rational(3), Rational(19, 10)}}));
  ins.guards.push_back({"g", fpt(0, 0), std::nullopt});
  ins.target.mode = TargetMode::Whole;
  return ins;
}

bool linked(const SampledFreeSpace& space, long long i1, long long j1,
            long long i2, long long j2) {
  const int u = space.at(i1, j1);
  const int v = space.at(i2, j2);
  if (u < 0 || v < 0) return false;
  for (const auto& [eid, other] : space.incident[u]) {
    (void)eid;
    if (other == v) return true;
  }
  return false;
}

// Corner guard sweeping the square in two quarter turns.
Schedule corner_sweep() {
  Schedule s;
  s.initial = {{"g", 0, {1, 0}}};
  s.moves = {{"g", 0, 1, Sense::CCW, {1, 0}, {1, 1}},
             {"g", 1, 2, Sense::CCW, {1, 1}, {0, 1}}};
  return s;
}

// Center guard spinning a full turn; the intruder just stays ahead of it.
Schedule full_rotation() {
  Schedule s;
  s.initial = {{"g", 0, {1, 0}}};
  s.moves = {{"g", 0, 0, Sense::CCW, {1, 0}, {-1, 0}},
             {"g", 0, 0, Sense::CCW, {-1, 0}, {1, 0}}};
  return s;
}

}  // namespace

TEST_CASE("unit square lattice at quarter pitch") {
  const Instance ins = validated(unit_square());

  const SampledFreeSpace eight = sample_free_space(ins, Rational(1, 4));
  CHECK(eight.cols == 5);
  CHECK(eight.rows == 5);
  CHECK(eight.imin == 0);
  CHECK(eight.jmin == 0);
  CHECK(eight.nodes.size() == 25);
  CHECK(eight.edges.size() == 72);
  CHECK(eight.eight_neighbors);

  const SampledFreeSpace four = sample_free_space(ins, Rational(1, 4), false);
  CHECK(four.nodes.size() == 25);
  CHECK(four.edges.size() == 40);

  // Every lattice point of the closed square is a node.
  for (long long i = 0; i <= 4; ++i) {
    for (long long j = 0; j <= 4; ++j) {
      CHECK(eight.at(i, j) >= 0);
    }
  }
  CHECK(eight.at(5, 0) == -1);
  CHECK(eight.at(-1, 0) == -1);
}

TEST_CASE("thin wall excludes interior nodes and grazing diagonals") {
  const Instance ins = validated(thin_wall_room());
  const SampledFreeSpace space = sample_free_space(ins, Rational(1, 2));

  CHECK(space.cols == 9);
  CHECK(space.rows == 9);
  CHECK(space.nodes.size() == 78);  // 81 lattice points minus 3 in the hole
  CHECK(space.at(3, 4) == -1);      // (3/2, 2)
  CHECK(space.at(4, 4) == -1);      // (2, 2)
  CHECK(space.at(5, 4) == -1);      // (5/2, 2)
  CHECK(space.edges.size() == 246);

  // The four diagonals clipping the hole corners at (1,2) and (3,2) are out.
  CHECK_FALSE(linked(space, 2, 4, 3, 5));
  CHECK_FALSE(linked(space, 2, 4, 3, 3));
  CHECK_FALSE(linked(space, 5, 3, 6, 4));
  CHECK_FALSE(linked(space, 5, 5, 6, 4));
  // The corner nodes themselves sit on the boundary and stay connected
  // away from the hole.
  CHECK(linked(space, 2, 4, 2, 5));
  CHECK(linked(space, 2, 4, 1, 3));
  CHECK(linked(space, 6, 4, 7, 5));
}

TEST_CASE("sampled nodes and links stay inside the closed region") {
  const Instance ins = validated(one_pocket());
  const SampledFreeSpace space = sample_free_space(ins, Rational(1, 4));
  const RegionView view(ins.env);
  for (const Point& p : space.nodes) {
    REQUIRE(view.locate(p) != Location::Outside);
  }
  for (const auto& e : space.edges) {
    const Point& a = space.nodes[e[0]];
    const Point& b = space.nodes[e[1]];
    const Point mid{(a.x + b.x) / 2, (a.y + b.y) / 2};
    REQUIRE(view.locate(mid) != Location::Outside);
  }
}

TEST_CASE("sampling guards against bad pitches") {
  const Instance ins = validated(unit_square());
  CHECK_THROWS_AS(sample_free_space(ins, Rational(0)), std::invalid_argument);
  CHECK_THROWS_AS(sample_free_space(ins, Rational(-1, 4)),
                  std::invalid_argument);
  CHECK_THROWS_AS(sample_free_space(ins, Rational(1, 8192)),
                  std::invalid_argument);
}

TEST_CASE("default pitch is an eighth of the shortest edge") {
  CHECK(default_pitch(validated(one_pocket())) == Rational(1, 8));
  CHECK(default_pitch(validated(square_corner_guard())) == Rational(1, 2));

  // Shortest edge of length sqrt(2): snapped down to a power of two.
  Instance ins;
  ins.env.outer = fring({fpt(0, 0), fpt(3, 0), fpt(3, 3), fpt(2, 2)});
  ins.guards.push_back({"g", fpt(0, 0), std::nullopt});
  ins.target.mode = TargetMode::Whole;
  CHECK(default_pitch(validated(ins)) == Rational(1, 8));
}

TEST_CASE("goal nodes per target mode") {
  {
    const Verifier v(validated(one_pocket()), {Rational(1, 4), 16, true});
    // Target strip [6,8] x [0,1] at quarter pitch: a 9 by 5 block.
    CHECK(v.goal_nodes().size() == 45);
  }
  {
    Instance ins = square_corner_guard();
    ins.target.mode = TargetMode::PointNeighborhood;
    ins.target.point = fpt(1, 1);
    const Verifier v(validated(ins), {Rational(1, 4), 16, true});
    // The point itself plus its four axis neighbors at distance 1/4; the
    // diagonal neighbors sit farther away.
    CHECK(v.goal_nodes().size() == 5);
  }
  {
    Instance ins = square_corner_guard();
    ins.target.mode = TargetMode::Whole;
    const Verifier v(ins, {Rational(1), 16, true});
    CHECK(v.goal_nodes().size() == v.space().nodes.size());
  }
}

TEST_CASE("a goal region smaller than the pitch is flagged") {
  Instance ins = square_corner_guard();
  ins.target.mode = TargetMode::Region;
  ins.target.ring = fring({{Rational(1, 16), Rational(1, 16)},
                           {Rational(3, 16), Rational(1, 16)},
                           {Rational(3, 16), Rational(3, 16)},
                           {Rational(1, 16), Rational(3, 16)}});
  const Verifier v(validated(ins), {Rational(1), 16, true});
  CHECK(v.goal_nodes().empty());

  Schedule s;
  s.initial = {{"g", 0, {1, 0}}};
  const VerificationReport rep = v.simulate(s);
  CHECK(rep.verdict == Verdict::NoEvasionFound);
  REQUIRE_FALSE(rep.warnings.empty());
  CHECK(rep.warnings.front().find("pitch") != std::string::npos);
}

TEST_CASE("an empty schedule lets a stationary intruder win") {
  const Verifier v(validated(one_pocket()), {Rational(1, 4), 16, true});
  Schedule s;
  s.initial = {{"g", 0, {1, 0}}};
  const VerificationReport rep = v.simulate(s);
  CHECK(rep.verdict == Verdict::EvasionFound);
  CHECK(rep.samples == 1);
  REQUIRE(rep.path.size() == 1);
  CHECK(rep.path.front().sample == 0);
  CHECK(std::binary_search(v.goal_nodes().begin(), v.goal_nodes().end(),
                           rep.path.front().node));
  CHECK(v.path_is_certified(s, rep.path));
}

TEST_CASE("corner sweep clears the square in both time directions") {
  const Instance ins = validated(square_corner_guard());
  const Verifier v(ins, {Rational(1, 2), 16, true});
  const Schedule s = corner_sweep();

  const VerificationReport rep = v.simulate(s);
  CHECK(rep.verdict == Verdict::NoEvasionFound);
  CHECK(rep.final_contaminated.empty());
  CHECK(rep.path.empty());
  CHECK(rep.samples == 33);  // two moves, sixteen intervals each

  // This room is symmetric, so the reversed sweep also works.
  const auto [fwd, bwd] = v.check_time_reversal(s);
  CHECK(fwd.verdict == Verdict::NoEvasionFound);
  CHECK(bwd.verdict == Verdict::NoEvasionFound);

  const Schedule r = time_reversed(s);
  REQUIRE(r.initial.size() == 1);
  CHECK(r.initial.front().dir == Direction{0, 1});
  REQUIRE(r.moves.size() == 2);
  CHECK(r.moves.front().sense == Sense::CW);
  CHECK(r.moves.front().from_dir == Direction{0, 1});
  CHECK(r.moves.back().to_dir == Direction{1, 0});
}

TEST_CASE("a full rotation from the center never clears the room") {
  const Instance ins = validated(square_center_guard());
  const Verifier v(ins, {Rational(1, 2), 16, true});

  const VerificationReport rep = v.simulate(full_rotation());
  CHECK(rep.verdict == Verdict::EvasionFound);
  CHECK_FALSE(rep.final_contaminated.empty());
  REQUIRE_FALSE(rep.path.empty());
  CHECK(rep.path.front().sample == 0);
  CHECK(rep.path.back().sample + 1 == rep.samples);
  CHECK(v.path_is_certified(full_rotation(), rep.path));

  // A quarter sweep and back leaves the far half untouched.
  Schedule there_and_back;
  there_and_back.initial = {{"g", 0, {1, 0}}};
  there_and_back.moves = {{"g", 0, 1, Sense::CCW, {1, 0}, {0, 1}},
                          {"g", 1, 0, Sense::CW, {0, 1}, {1, 0}}};
  const VerificationReport rep2 = v.simulate(there_and_back);
  CHECK(rep2.verdict == Verdict::EvasionFound);
  CHECK(v.path_is_certified(there_and_back, rep2.path));
}

TEST_CASE("planned schedules verify clean; their reversals split") {
  const Instance ins = validated(one_pocket());
  const Decomposition dec(ins);
  const Planner planner(dec);
  const PlanResult result = planner.plan();
  REQUIRE(result.status == PlanStatus::Solved);

  const Verifier v(ins, {Rational(1, 4), 16, true});
  const auto [fwd, bwd] = v.check_time_reversal(result.schedule);

  CHECK(fwd.verdict == Verdict::NoEvasionFound);
  // The clean verdict is about the target, not the whole region: the
  // unswept pocket may stay contaminated.
  for (const int n : fwd.final_contaminated) {
    CHECK_FALSE(std::binary_search(v.goal_nodes().begin(),
                                   v.goal_nodes().end(), n));
  }

  // Replaying the motion backwards drags pocket contamination across the
  // target: evasion found, with a certificate ending on a goal node.
  CHECK(bwd.verdict == Verdict::EvasionFound);
  REQUIRE_FALSE(bwd.path.empty());
  CHECK(bwd.path.front().sample == 0);
  CHECK(bwd.path.back().sample + 1 == bwd.samples);
  CHECK(std::binary_search(v.goal_nodes().begin(), v.goal_nodes().end(),
                           bwd.path.back().node));
  CHECK(v.path_is_certified(time_reversed(result.schedule), bwd.path));
}

TEST_CASE("evasion verdicts survive grid refinement") {
  const Instance ins = validated(one_pocket());
  const Decomposition dec(ins);
  const Planner planner(dec);
  const PlanResult result = planner.plan();
  REQUIRE(result.status == PlanStatus::Solved);
  const Schedule reversed = time_reversed(result.schedule);

  const Verifier coarse(ins, {Rational(1, 4), 16, true});
  const Verifier fine(ins, {Rational(1, 8), 16, true});
  CHECK(coarse.simulate(reversed).verdict == Verdict::EvasionFound);
  CHECK(fine.simulate(reversed).verdict == Verdict::EvasionFound);
}

TEST_CASE("two guards clear the two pocket room") {
  const Instance ins = validated(two_pockets_helper());
  const Decomposition dec(ins);
  const Planner planner(dec);
  const PlanResult result = planner.plan();
  REQUIRE(result.status == PlanStatus::Solved);

  const VerificationReport rep =
      simulate(ins, result.schedule, Rational(1, 4), 16);
  CHECK(rep.verdict == Verdict::NoEvasionFound);
}

TEST_CASE("certification rejects tampered paths") {
  const Instance ins = validated(square_center_guard());
  const Verifier v(ins, {Rational(1, 2), 16, true});
  const Schedule s = full_rotation();
  const VerificationReport rep = v.simulate(s);
  REQUIRE(rep.verdict == Verdict::EvasionFound);
  REQUIRE(v.path_is_certified(s, rep.path));

  {
    std::vector<EvasionStep> bad = rep.path;
    bad.pop_back();  // no longer reaches the final sample
    CHECK_FALSE(v.path_is_certified(s, bad));
  }
  {
    std::vector<EvasionStep> bad = rep.path;
    bad.front().sample = 1;  // does not start at the first sample
    CHECK_FALSE(v.path_is_certified(s, bad));
  }
  {
    std::vector<EvasionStep> bad = rep.path;
    bad.back().node = -5;  // not a node at all
    CHECK_FALSE(v.path_is_certified(s, bad));
  }
  {
    // Teleport: splice in a hop between non-adjacent nodes.
    std::vector<EvasionStep> bad = rep.path;
    const int far_node = v.space().at(0, 0) == bad.back().node
                             ? v.space().at(4, 4)
                             : v.space().at(0, 0);
    REQUIRE(far_node >= 0);
    bad.insert(bad.end() - 1,
               {bad.back().sample, far_node});
    CHECK_FALSE(v.path_is_certified(s, bad));
  }
  CHECK_FALSE(v.path_is_certified(s, {}));
}

TEST_CASE("a schedule with no moves equals its own reversal") {
  const Instance ins = validated(square_center_guard());
  const Verifier v(ins, {Rational(1, 2), 16, true});
  Schedule s;
  s.initial = {{"g", 0, {0, 1}}};
  const auto [fwd, bwd] = v.check_time_reversal(s);
  CHECK(fwd.verdict == bwd.verdict);
  CHECK(fwd.samples == bwd.samples);
  CHECK(fwd.final_contaminated == bwd.final_contaminated);
}

TEST_CASE("simulation rejects malformed schedules") {
  const Instance ins = validated(square_corner_guard());
  const Verifier v(ins, {Rational(1, 2), 16, true});

  Schedule empty_posture;
  CHECK_THROWS_AS(v.simulate(empty_posture), std::invalid_argument);

  Schedule unknown;
  unknown.initial = {{"x", 0, {1, 0}}};
  CHECK_THROWS_AS(v.simulate(unknown), std::invalid_argument);

  Schedule duplicate;
  duplicate.initial = {{"g", 0, {1, 0}}, {"g", 0, {0, 1}}};
  CHECK_THROWS_AS(v.simulate(duplicate), std::invalid_argument);

  Schedule unchained;
  unchained.initial = {{"g", 0, {1, 0}}};
  unchained.moves = {{"g", 0, 1, Sense::CCW, {0, 1}, {-1, 0}}};
  CHECK_THROWS_AS(v.simulate(unchained), std::invalid_argument);

  Schedule stuck;
  stuck.initial = {{"g", 0, {1, 0}}};
  stuck.moves = {{"g", 0, 0, Sense::CCW, {1, 0}, {1, 0}}};
  CHECK_THROWS_AS(v.simulate(stuck), std::invalid_argument);

  CHECK_THROWS_AS(Verifier(ins, {Rational(1, 2), 1, true}),
                  std::invalid_argument);
}

TEST_CASE("step resolution does not change the square verdicts") {
  const Instance ins = validated(square_corner_guard());
  const Schedule s = corner_sweep();
  for (const int steps : {8, 32}) {
    const Verifier v(ins, {Rational(1, 2), steps, true});
    CHECK(v.simulate(s).verdict == Verdict::NoEvasionFound);
  }
}
