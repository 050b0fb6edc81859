#pragma once

#include "searchlight/decomposition.hpp"
#include "searchlight/schedule.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace searchlight {

// Contamination indicator over cells, packed for visited-set hashing.
class CellSet {
 public:
  CellSet() = default;
  explicit CellSet(std::size_t size)
      : size_(size), words_((size + 63) / 64, 0) {}

  static CellSet all(std::size_t size);

  std::size_t size() const { return size_; }
  bool test(std::size_t i) const {
    return (words_[i / 64] >> (i % 64)) & 1u;
  }
  void set(std::size_t i, bool value) {
    const std::uint64_t bit = std::uint64_t(1) << (i % 64);
    if (value) {
      words_[i / 64] |= bit;
    } else {
      words_[i / 64] &= ~bit;
    }
  }
  std::size_t count() const;
  bool none() const;
  std::size_t hash() const;
  bool operator==(const CellSet&) const = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

// One rotation of one guard between cyclically adjacent critical directions.
struct Move {
  std::size_t guard = 0;
  int from = 0;
  int to = 0;
  Sense sense = Sense::CCW;
  bool operator==(const Move&) const = default;
};

struct SearchState {
  std::vector<int> angle;  // critical index per guard
  CellSet contaminated;
  bool operator==(const SearchState&) const = default;
};

struct SearchStateHash {
  std::size_t operator()(const SearchState& s) const;
};

enum class PlanStatus { Solved, Unsolvable, ResourceExhausted };

struct PlanLimits {
  std::uint64_t max_states = 2'000'000;
  std::uint64_t max_millis = 120'000;
};

struct PlanResult {
  PlanStatus status = PlanStatus::Unsolvable;
  Schedule schedule;  // populated when status == Solved
  std::uint64_t states_explored = 0;
};

// Exact reachability search over guard postures and cell contamination.
class Planner {
 public:
  explicit Planner(const Decomposition& dec);

  const Decomposition& decomposition() const { return dec_; }
  const std::vector<int>& goals() const { return goals_; }

  // Every cell contaminated, guards parked at the given critical indices.
  SearchState initial_state(std::vector<int> angles) const;

  bool goal_reached(const SearchState& state) const;

  // Least fixpoint: contamination spreads through unblocked portals.
  CellSet closure(CellSet contaminated, const std::vector<bool>& blocked) const;

  // Where each guard aims when parked at the given indices; guards with no
  // usable direction report an extinguished laser.
  std::vector<std::optional<Direction>> lasers_at(
      const std::vector<int>& angle) const;

  bool move_applies(const SearchState& state, const Move& move) const;

  // Which portals the parked beams jointly cover when the guards sit at the
  // given indices; skip_guard (if >= 0) is treated as having no beam.
  std::vector<bool> blocked_at(const std::vector<int>& angle,
                               int skip_guard = -1) const;

  // Exact rotation between adjacent critical directions: contamination is
  // re-evaluated at every micro event, and while the beam crosses a cell the
  // cell is tracked as a swept side and an unswept side so nothing leaks
  // across the moving laser.
  SearchState apply_move(const SearchState& state, const Move& move) const;

  PlanResult plan(const PlanLimits& limits = {}) const;

  // Runs the schedule from its declared start posture; throws
  // std::invalid_argument when it does not fit this instance.
  SearchState replay(const Schedule& schedule) const;

  // Same rotations run backwards: start from the forward end posture, swap
  // move endpoints, flip every sense.
  Schedule reversed(const Schedule& schedule) const;

 private:
  struct GuardCell {
    bool has_span = false;
    bool lit = false;     // the beam reaches the cell interior mid-span
    Direction lo{1, 0};   // covering arc, counterclockwise from lo to hi
    Direction hi{1, 0};
  };

  // One uncovered stretch of a portal carrier and the beam sides it touches.
  struct PartAttach {
    int portal = -1;
    bool plus = false;   // counterclockwise side of the moving beam
    bool minus = false;  // clockwise side
  };

  // Everything about one micro interval that does not depend on the
  // contamination state: how the beam crosses each cell and which carrier
  // stretches connect which beam sides.
  struct StepScript {
    std::vector<int> kinds;  // per cell: 0 untouched, 1 split, 2 inseparable
    std::vector<PartAttach> parts;
  };
  struct MoveScript {
    std::vector<StepScript> steps;
  };

  void build_views();
  void build_cover();
  const MoveScript& script_for(std::size_t guard, int from, int to,
                               Sense sense) const;
  // Crossing status of a cell while the moving beam points at d_star.
  int crossing_kind(std::size_t guard, int cell, const Direction& d_star,
                    const std::optional<Segment>& beam) const;
  void spread(CellSet& bits, std::map<int, bool>& swept_dirty,
              const StepScript& step, const std::vector<bool>& blocked,
              Sense sense) const;
  Schedule reconstruct(const std::vector<int>& parents,
                       const std::vector<Move>& via,
                       const std::vector<SearchState>& states, int leaf) const;

  const Decomposition& dec_;
  std::vector<int> goals_;
  std::vector<std::vector<std::pair<int, int>>> adjacency_;  // portal, cell
  std::vector<std::vector<GuardCell>> view_;                 // [guard][cell]
  // cover_[guard][index]: carrier stretches (portal, lo, hi) that the parked
  // beam covers, as fractions of the carrier.
  std::vector<std::vector<std::vector<std::tuple<int, Rational, Rational>>>>
      cover_;
  std::vector<std::array<double, 4>> portal_box_;  // conservative prescreen
  mutable std::map<std::tuple<std::size_t, int, Sense>, MoveScript> scripts_;
};

}  // namespace searchlight
