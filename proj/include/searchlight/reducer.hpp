#pragma once

#include "searchlight/instance.hpp"
#include "searchlight/ncl.hpp"
#include "searchlight/schedule.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace searchlight {

// Dimension knobs for the machine-to-environment compiler. Everything scales
// with grid_pitch. The layout is engineered around the default proportions:
// corridors are exactly four grid steps tall and pipes exactly two wide.
// nook_depth may grow (the structural checks then decide whether the deeper
// pockets stay invisible) and vertex_slot_spacing may stretch the lane stack.
struct LayoutParams {
  Rational grid_pitch{1};
  Rational corridor_width{4};
  Rational pipe_width{2};
  Rational nook_depth{2};
  Rational nook_width{2};
  Rational vertex_slot_spacing{8};
};

// Rooftop geometry handed to the staircase solver. The sweeper guard pivots at
// (seam_x, top_y); each pipe tower pokes through the roof floor at guard_y and
// must be cappable from the pivot without disturbing caps laid before it.
struct UpperFrame {
  Rational seam_x;
  Rational top_y;
  Rational target_bottom_y;
  Rational guard_y;
  Rational target_left_x;
  Rational grid;
};

// Heights for the pipe towers, west to east. attach_heights[k] is the top of
// tower k; the capping beam from the pivot grazes that tower's west lip and
// lands on the shaft's east face. chord_cross_x[k] is where the beam crosses
// the target's lower border; shadow_x[k] bounds the spill shadow the tower's
// mouth can throw onto that border. The heights are chosen so each beam's
// crossing lies strictly east of every earlier shadow: caps can then be laid
// east first without re-contaminating what is already swept.
struct StaircaseResult {
  std::vector<Rational> attach_heights;
  std::vector<Rational> chord_cross_x;
  std::vector<Rational> shadow_x;
};

// Throws std::invalid_argument when the mouths are not strictly ascending and
// east of the seam, or are spaced too tightly for the fixed height band.
StaircaseResult staircase_heights(const std::vector<Rational>& mouth_west_xs,
                                  const UpperFrame& frame);

// Full construction record for one compiled instance. Coordinates named *_y /
// *_x are in grid steps (multiply by grid for world coordinates).
struct LayoutPlan {
  Rational grid;
  LayoutParams params;

  long long machine_edges = 0;     // corridors
  long long corridor_ends = 0;     // plugged corridor ends (joints/lanes)
  long long tower_count = 0;       // 3 per And vertex + 1 per Or vertex

  long long well_floor_y = 0;      // floor of the west quarantine well
  long long lane0_y = 0;           // floor of the lowest lane
  long long lanes_top_y = 0;       // ceiling of the highest lane
  long long chamber_floor_y = 0;
  long long chamber_top_y = 0;
  long long roof_floor_y = 0;      // floor of the rooftop strip; pipe-guard row
  long long top_y = 0;             // rooftop ceiling
  long long target_bottom_y = 0;
  long long seam_x = 0;            // sweeper pivot wall
  long long target_west_x = 0;
  long long east_reach_x = 0;      // east limit of the corridor furniture
  long long cell_west_x = 0;       // west wall line of the finishing cell
  long long cell_east_x = 0;       // east wall of the finishing cell
  long long bbox_east_x = 0;

  struct CorridorGuard {
    std::string id;
    int edge = 0;
    int index = 0;                 // 0 = nearest the machine edge's first end
    std::string role;
    Point pos;
    Direction dir_to_first{1, 0};  // aim while the edge points at its first end
    Direction dir_to_second{1, 0};
    Sense sense_first_to_second = Sense::CW;
    bool pinned = false;
  };

  struct EdgePlan {
    int band = 0;
    long long floor_y = 0;
    long long span_w = 0, span_e = 0;
    std::optional<long long> port_first, port_second;  // drop west x per real end
    std::vector<CorridorGuard> guards;                 // first-end side first
  };
  std::vector<EdgePlan> edges;

  struct PipeTower {
    int vertex = 0;
    int slot = 0;                  // And: 0 out, 1/2 inputs; Or: 0
    std::string guard;             // dancing pipe guard id
    std::string nook;
    long long mouth_w = 0;         // west lip x of the roof-floor mouth
    Rational height;               // tower top
    Rational cap_land_y;           // capping beam's landing on the east face
    Direction cap_dir{1, 0};
    Rational chord_cross_x;
    Rational shadow_x;
    std::vector<std::pair<int, int>> feeders;  // (edge, end) slits under this mouth
  };
  std::vector<PipeTower> towers;   // west to east

  struct Joint {
    int edge = 0;
    int end = 0;                   // 0 = first, 1 = second
    long long slit_w = 0;
    int rank = 0;
    long long lane_y = 0;
    std::string guard;             // pinned elbow pipe guard id
    std::string nook;
  };
  std::vector<Joint> joints;       // sorted by slit_w

  struct ChamberGuard {
    int vertex = 0;
    std::string id;
    Point pos;
  };
  std::vector<ChamberGuard> chamber_guards;  // And vertices, vertex order

  struct Crossing {
    bool vertical_is_drop = true;  // else a lane leg
    long long x0 = 0, x1 = 0;      // the vertical slab
    long long y0 = 0, y1 = 0;      // the crossed passage's slab
    std::string guard_a, guard_b;  // low/high or west/east stations
    Direction dir{1, 0};
  };
  std::vector<Crossing> crossings;

  struct Nook {
    std::string name;
    Rational x0, y0, x1, y1;       // the pocket box that must stay invisible
    Point sample;
    std::vector<std::string> cappers;  // parked beams sealing the approach
  };
  std::vector<Nook> nooks;

  Point d_pos, f_pos, j_pos, ga_pos, gb_pos;
  std::string a_rise_guard;        // corridor guard doubling as west-well capper
  std::string b_rise_guard;        // pinned strip splitter on the cell's west rim
  std::map<std::string, std::size_t> guard_index;  // id -> instance.guards slot
};

// Serializable companion data: who guards what, which pockets must stay
// invisible, and the guard census. Mirrors the plan but carries only what a
// consumer of the emitted instance needs.
struct GadgetMetadata {
  EenclInstance eencl;
  LayoutParams params;

  struct Subsegment {
    int edge = 0;
    int index = 0;
    std::string guard;
    std::string role;
  };
  std::vector<Subsegment> subsegments;

  struct Pipe {
    std::string guard;
    std::string nook;
    std::vector<std::string> cappers;
  };
  std::vector<Pipe> pipes;

  struct Intersection {
    std::string guard;
    Direction dir{1, 0};
  };
  std::vector<Intersection> intersections;

  std::vector<std::string> chamber_guards;
  std::string guard_d, guard_f, guard_j;

  struct TargetPart {
    std::string label;
    Rational west_x, east_x;
  };
  std::vector<TargetPart> target_parts;

  std::vector<std::pair<std::string, std::string>> roles;  // id -> role

  struct Census {
    std::size_t pipe_guards = 0;
    std::size_t subsegment_guards = 0;
    std::size_t chamber_guards = 0;
    std::size_t intersection_guards = 0;
    std::size_t special_guards = 0;
    std::size_t total = 0;
  };
  Census census;
};

struct ReductionOutput {
  Instance instance;
  GadgetMetadata metadata;
  std::shared_ptr<const LayoutPlan> plan;
};

// Compiles a constraint machine into a searchlight instance. Every machine
// edge becomes a guarded corridor whose laser posture mirrors the edge's
// orientation, every vertex a guarded chamber enforcing its flow constraint,
// and the rooftop strip above them is the target. Requires every vertex to
// have degree exactly three and the two marked edges to have exactly one
// plugged end each; throws std::invalid_argument otherwise, or when the
// parameters are out of range.
ReductionOutput reduce(const EenclInstance& eencl,
                       const LayoutParams& params = {});

struct CheckReport {
  struct Item {
    std::string name;
    bool passed = false;
    std::string detail;
  };
  std::vector<Item> items;
  bool all_passed = false;
};

// Post-hoc audit of a compiled instance: region validity, orthogonality,
// nook invisibility, pipe see-through, intersection separation, corridor
// isolation, stair and chamber capping, and the sweep anchor beams. Each item
// carries a human-readable witness on failure.
CheckReport structural_checks(const ReductionOutput& out);

// Expands a machine solution into a full schedule for the compiled instance:
// rooftop sweep with tower caps and pipe dances, verbatim per-move corridor
// mimicry with chamber-guard transits, then the finishing sweep of the east
// cell. The move sequence must be a valid solution of the machine carried in
// the output (checked; std::invalid_argument on any violation).
Schedule witness_schedule(const ReductionOutput& out, const MoveSeq& solution);

std::string save_metadata(const GadgetMetadata& meta);

}  // namespace searchlight
