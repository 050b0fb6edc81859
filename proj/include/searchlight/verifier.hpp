#pragma once

#include "searchlight/instance.hpp"
#include "searchlight/schedule.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace searchlight {

// Lattice sampling of the closed region: nodes at integer multiples of the
// pitch that lie inside or on the boundary, linked when the connecting
// segment stays inside the closed region.
struct SampledFreeSpace {
  Rational pitch;
  bool eight_neighbors = true;
  long long imin = 0, jmin = 0;  // lattice window lower-left corner
  std::size_t cols = 0, rows = 0;
  std::vector<Point> nodes;               // node id -> position
  std::vector<int> node_at;               // lattice cell -> node id or -1
  std::vector<std::array<int, 2>> edges;  // edge id -> endpoint node ids
  std::vector<std::vector<std::pair<int, int>>> incident;  // (edge, other)

  // Node id at lattice coordinates, or -1 when absent.
  int at(long long i, long long j) const {
    if (i < imin || j < jmin) return -1;
    const long long ci = i - imin;
    const long long cj = j - jmin;
    if (ci >= static_cast<long long>(cols) ||
        cj >= static_cast<long long>(rows)) {
      return -1;
    }
    return node_at[static_cast<std::size_t>(cj) * cols +
                   static_cast<std::size_t>(ci)];
  }
};

SampledFreeSpace sample_free_space(const Instance& instance,
                                   const Rational& pitch,
                                   bool eight_neighbors = true);

// One eighth of the shortest boundary or target edge; snapped down to a power
// of two when that length is irrational, so lattice coordinates stay small.
Rational default_pitch(const Instance& instance);

enum class Verdict { NoEvasionFound, EvasionFound };

// One waypoint of an evasion certificate: the intruder sits at this node when
// the guards reach the given pose sample. Consecutive entries at the same
// sample are dashes through intermediate nodes within one sampling interval.
struct EvasionStep {
  std::size_t sample = 0;
  int node = -1;
};

struct VerificationReport {
  Verdict verdict = Verdict::NoEvasionFound;
  std::vector<EvasionStep> path;        // nonempty iff EvasionFound
  std::vector<int> final_contaminated;  // node ids, ascending
  Rational pitch;
  int time_steps_per_move = 0;
  bool eight_neighbors = true;
  std::size_t samples = 0;  // pose samples simulated, including the start
  std::vector<std::string> warnings;
  std::string method;  // the conservative clearing rule, spelled out
};

struct VerifyOptions {
  std::optional<Rational> pitch;  // default: default_pitch(instance)
  int time_steps_per_move = 16;   // >= 2
  bool eight_neighbors = true;
};

// Sampled continuous-time check against an unbounded-speed intruder. Shares
// the geometry kernel with the planner but none of its contamination logic;
// where the planner reasons over exact cells, this samples space and time.
class Verifier {
 public:
  explicit Verifier(const Instance& instance, VerifyOptions options = {});

  const Instance& instance() const { return instance_; }
  const SampledFreeSpace& space() const { return space_; }
  const std::vector<int>& goal_nodes() const { return goal_nodes_; }
  const Rational& pitch() const { return pitch_; }

  VerificationReport simulate(const Schedule& schedule) const;

  // Reports for the schedule and for its time-reversed counterpart.
  std::pair<VerificationReport, VerificationReport> check_time_reversal(
      const Schedule& schedule) const;

  // Replays the sampled poses and checks a claimed evasion independently:
  // every waypoint avoids every beam at its sample, every hop uses a link
  // that some bracketing sample leaves unblocked, the path starts in the
  // initial contamination and ends on a goal node at the final sample.
  bool path_is_certified(const Schedule& schedule,
                         const std::vector<EvasionStep>& path) const;

 private:
  // Beam footprint on the lattice: nodes the segment passes through and grid
  // links it crosses.
  struct BeamHit {
    std::vector<int> nodes;
    std::vector<int> edges;
  };
  // One sampling interval: the moving guard turns from prev_dir to cur_dir.
  struct IntervalRec {
    std::size_t guard = 0;
    Direction prev_dir{1, 0};
    Direction cur_dir{1, 0};
    Sense sense = Sense::CCW;
  };
  struct Timeline {
    std::vector<Direction> initial;  // per guard, instance order
    std::vector<IntervalRec> intervals;
  };

  Timeline build_timeline(const Schedule& schedule) const;
  const BeamHit& footprint(std::size_t guard, const Direction& dir) const;
  // Visible nodes inside the closed angular wedge from a to b.
  std::vector<int> swept_nodes(std::size_t guard, const Direction& a,
                               const Direction& b, Sense sense) const;

  Instance instance_;
  RegionView view_;
  Rational pitch_;
  int steps_;
  SampledFreeSpace space_;
  std::vector<int> goal_nodes_;
  std::vector<std::string> base_warnings_;
  std::vector<double> node_fx_, node_fy_;
  struct GuardDirLess {
    bool operator()(const std::pair<std::size_t, Direction>& a,
                    const std::pair<std::size_t, Direction>& b) const {
      if (a.first != b.first) return a.first < b.first;
      return compare_ccw(a.second, b.second) < 0;
    }
  };
  mutable std::map<std::pair<std::size_t, Direction>, BeamHit, GuardDirLess>
      footprints_;
  mutable std::vector<std::uint32_t> edge_stamp_;
  mutable std::uint32_t stamp_ = 0;
};

// One-shot conveniences mirroring the class interface.
VerificationReport simulate(const Instance& instance, const Schedule& schedule,
                            const Rational& pitch, int time_steps_per_move);
std::pair<VerificationReport, VerificationReport> check_time_reversal(
    const Instance& instance, const Schedule& schedule, const Rational& pitch);

}  // namespace searchlight
