#pragma once

#include "searchlight/instance.hpp"
#include "searchlight/region.hpp"

#include <optional>
#include <vector>

namespace searchlight {

// Dedupe priority ascending: an edge shared between owners keeps the largest.
enum class CarrierOwner { TargetEdge, CriticalRay, Wall };

struct ArrangementEdge {
  Point a, b;
  CarrierOwner owner;
  int va = -1, vb = -1;          // vertex ids
  int cell_left_ab = -1;         // region cell left of a->b, -1 if void
  int cell_left_ba = -1;
};

struct Cell {
  int id = -1;
  // cycles[0] is the outer boundary (counterclockwise, interior left);
  // further cycles bound enclosed islands the lasers never touch.
  std::vector<std::vector<Point>> cycles;
  Rational area2;
  Point sample;  // strictly interior
};

struct Portal {
  int edge = -1;  // index into edges()
  int cell_a = -1, cell_b = -1;
  CarrierOwner owner = CarrierOwner::CriticalRay;
};

// Directions from the guard to every environment vertex, other guard, and
// target vertex along which the guard's beam is nondegenerate, plus its
// pinned start if any; sorted counterclockwise.
std::vector<Direction> critical_directions(const Instance& instance,
                                           const RegionView& view,
                                           std::size_t guard_index);

// The exact subdivision of the environment induced by walls, target edges,
// and every guard's critical-direction beams. Cells are its faces;
// contamination flows between cells through portals.
class Decomposition {
 public:
  explicit Decomposition(Instance validated);

  const Instance& instance() const { return instance_; }
  const RegionView& view() const { return view_; }
  const std::vector<std::vector<Direction>>& critical() const {
    return critical_;
  }
  const std::vector<ArrangementEdge>& edges() const { return edges_; }
  const std::vector<Point>& vertices() const { return vertex_points_; }
  const std::vector<Cell>& cells() const { return cells_; }
  const std::vector<Portal>& portals() const { return portals_; }

  std::vector<int> goal_cells(const TargetSpec& target) const;

  // lasers[i]: where guard i currently aims, or nothing if its beam is off
  // (degenerate). A portal is blocked when the active beams jointly cover its
  // carrier; answer indexed like portals().
  std::vector<bool> blocked_portals(
      const std::vector<std::optional<Direction>>& lasers) const;

  // Directions from the guard to arrangement vertices strictly inside the
  // open arc from..to (in the given sense) that its beam can reach, ordered
  // along the rotation.
  std::vector<Direction> micro_events(std::size_t guard, const Direction& from,
                                      const Direction& to, Sense sense) const;

  bool cell_closure_contains(const Cell& cell, const Point& p) const;

  // p in the cell's interior: inside the closure but on no bounding edge.
  bool strictly_inside_cell(const Cell& cell, const Point& p) const;

  // The segment shares at least one point with the cell's interior.
  bool segment_meets_cell_interior(const Cell& cell, const Segment& s) const;

 private:
  void build();

  Instance instance_;
  RegionView view_;
  std::vector<std::vector<Direction>> critical_;
  std::vector<Point> vertex_points_;
  std::vector<ArrangementEdge> edges_;
  std::vector<Cell> cells_;
  std::vector<Portal> portals_;
};

}  // namespace searchlight
